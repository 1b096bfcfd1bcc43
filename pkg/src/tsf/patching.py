"""Patch tokenization strategies: overlapping, non-overlapping, reversed,
trend/residual decomposition, and daily slot-index meta tokens."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Optional, Sequence

from .errors import EvenTrendWindow, InvalidClockTime, LengthMismatch, WindowTooLarge


class PatchStrategy(Enum):
    BASIC = "basic"
    NON_OVERLAPPING = "non-overlapping"
    STR_DECOMPOSE = "str-decompose"
    REVERSE_ORDERED = "reverse-ordered"
    META_TOKENS = "meta-tokens"


class PatchOrder(Enum):
    NATURAL = "natural"
    REVERSED = "reversed"


@dataclass(frozen=True)
class Patch:
    values: tuple[float, ...]
    meta: Optional[tuple] = None  # slot ids or (trend, residual) pairs

    def __post_init__(self):
        if not self.values:
            raise ValueError("patch must be non-empty")
        if self.meta is not None and len(self.meta) != len(self.values):
            raise ValueError("meta must align with values")


@dataclass(frozen=True)
class PatchSet:
    strategy: PatchStrategy
    window: int
    stride: int
    patches: tuple[Patch, ...]
    order: PatchOrder = PatchOrder.NATURAL


@dataclass(frozen=True)
class Decomposition:
    trend: tuple[float, ...]
    residual: tuple[float, ...]
    trend_window: int


def overlapping_patches(
    context: Sequence[float],
    w: int = 3,
    s: int = 1,
    strategy: PatchStrategy = PatchStrategy.BASIC,
) -> PatchSet:
    """Patches at offsets 0, s, 2s, ... each holding exactly w values."""
    n = len(context)
    if w < 1 or w > n:
        raise WindowTooLarge(f"window {w} not in [1, {n}]")
    if s < 1:
        raise ValueError("stride must be >= 1")
    patches = tuple(
        Patch(values=tuple(context[i : i + w])) for i in range(0, n - w + 1, s)
    )
    return PatchSet(strategy=strategy, window=w, stride=s, patches=patches)


def reverse_patches(ps: PatchSet) -> PatchSet:
    """Reverse the patch list so the most recent patch comes first."""
    if ps.order is not PatchOrder.NATURAL:
        raise ValueError("can only reverse a naturally ordered patch set")
    return replace(ps, patches=tuple(reversed(ps.patches)), order=PatchOrder.REVERSED)


def nonoverlapping_patches(context: Sequence[float], h: int) -> PatchSet:
    """Tile a suffix of the context with disjoint patches of width h.

    When len(context) is not a multiple of h the oldest leading values are
    dropped so the last patch always ends at the most recent value.
    """
    n = len(context)
    if h < 1:
        raise ValueError("window must be >= 1")
    if h > n:
        raise WindowTooLarge(f"window {h} exceeds context length {n}")
    offset = n % h
    patches = tuple(
        Patch(values=tuple(context[i : i + h])) for i in range(offset, n, h)
    )
    return PatchSet(
        strategy=PatchStrategy.NON_OVERLAPPING, window=h, stride=h, patches=patches
    )


def str_decompose(context: Sequence[float], trend_window: int = 5) -> Decomposition:
    """Centered moving-average trend (window shrinks at the edges) plus the
    residual defined by exact subtraction."""
    n = len(context)
    if trend_window % 2 == 0:
        raise EvenTrendWindow(f"trend window must be odd, got {trend_window}")
    if not 1 <= trend_window <= n:
        raise ValueError(f"trend window {trend_window} not in [1, {n}]")
    half = trend_window // 2
    trend = []
    for t in range(n):
        lo = max(0, t - half)
        hi = min(n, t + half + 1)
        window = context[lo:hi]
        first = window[0]
        if all(v == first for v in window):
            # mean of equal values is that value; avoids float drift
            trend.append(first)
        else:
            trend.append(sum(window) / (hi - lo))
    residual = []
    for t in range(n):
        x, tr = context[t], trend[t]
        # nudge the trend so trend + residual reproduces x bitwise
        r = x - tr
        for _ in range(5):
            if tr + r == x:
                break
            tr = x - r
            r = x - tr
        else:
            tr, r = x, 0.0
        trend[t] = tr
        residual.append(r)
    return Decomposition(
        trend=tuple(trend), residual=tuple(residual), trend_window=trend_window
    )


def composite_tokens(d: Decomposition) -> list[tuple[float, float]]:
    """(trend, residual) pair per time step, natural order."""
    return list(zip(d.trend, d.residual))


def slot_index(hour: int, minute: int) -> int:
    """10-minute slot-of-day index: floor((60*hour + minute) / 10)."""
    if not (0 <= hour <= 23 and 0 <= minute <= 59):
        raise InvalidClockTime(f"{hour:02d}:{minute:02d} is not a valid clock time")
    return (60 * hour + minute) // 10


def meta_tokens(
    context: Sequence[float], context_timestamps: Sequence[int]
) -> list[tuple[float, int]]:
    """Pair each value with the slot index of its UTC clock time."""
    if len(context) != len(context_timestamps):
        raise LengthMismatch(
            f"{len(context)} values vs {len(context_timestamps)} timestamps"
        )
    out = []
    for v, ts in zip(context, context_timestamps):
        dt = datetime.fromtimestamp(ts, tz=timezone.utc)
        out.append((v, slot_index(dt.hour, dt.minute)))
    return out
