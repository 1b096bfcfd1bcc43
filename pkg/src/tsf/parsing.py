"""Extraction of numeric forecasts (and optional echoed patches) from raw
LLM output text."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import MalformedPatchList, NoListFound, NonNumericElement, WrongCount
from .patching import Patch, PatchSet

PREDICTION_MARKER = "Prediction:"
PATCHES_MARKER = "Patches:"


@dataclass(frozen=True)
class Forecast:
    values: tuple[float, ...]
    raw_text: str
    echoed_patches: Optional[tuple[Patch, ...]] = None


@dataclass(frozen=True)
class FidelityReport:
    exact_fraction: float
    mean_abs_dev: Optional[float]  # None when nothing aligned


def _bracket_groups(text: str, top_level_only: bool = True) -> list[str]:
    """Balanced [...] spans; unclosed groups are dropped."""
    groups = []
    depth = 0
    start = -1
    for i, ch in enumerate(text):
        if ch == "[":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "]":
            if depth > 0:
                depth -= 1
                if depth == 0 and top_level_only:
                    groups.append(text[start : i + 1])
    return groups


def _parse_flat(group: str) -> Optional[list[float]]:
    """Parse "[a, b, c]" into floats; None when the group is nested or any
    element is non-numeric."""
    inner = group[1:-1]
    if "[" in inner or "]" in inner:
        return None
    tokens = [t.strip().rstrip(".") for t in inner.split(",")]
    if not tokens or tokens == [""]:
        return None
    values = []
    for t in tokens:
        try:
            v = float(t)
        except ValueError:
            return None
        if not math.isfinite(v):
            return None
        values.append(v)
    return values


def parse_prediction(text: str, h: int, lenient: bool = False) -> list[float]:
    """Numeric forecast from raw LLM text.

    Prefers the first list after the last "Prediction:" marker; otherwise the
    last top-level flat numeric list in the text. Strict mode insists on
    exactly h values; lenient mode truncates or pads with the last value.
    """
    if h < 1:
        raise ValueError("horizon must be >= 1")
    marker_at = text.rfind(PREDICTION_MARKER)
    candidates: list[str] = []
    if marker_at >= 0:
        candidates = _bracket_groups(text[marker_at + len(PREDICTION_MARKER) :])
    if not candidates:
        candidates = _bracket_groups(text)
    if not candidates:
        raise NoListFound("no bracketed list in text")

    chosen: Optional[list[float]] = None
    saw_flat = False
    search = candidates if marker_at >= 0 else list(reversed(candidates))
    for group in search:
        inner = group[1:-1]
        if "[" in inner:
            continue
        saw_flat = True
        values = _parse_flat(group)
        if values is not None:
            chosen = values
            break
    if chosen is None:
        if saw_flat:
            raise NonNumericElement("flat list found but not all elements numeric")
        raise NoListFound("no flat numeric list in text")

    if len(chosen) != h:
        if not lenient:
            raise WrongCount(len(chosen), h)
        if len(chosen) > h:
            chosen = chosen[:h]
        else:
            chosen = chosen + [chosen[-1]] * (h - len(chosen))
    return chosen


def parse_patches(text: str) -> Optional[list[Patch]]:
    """Echoed patches (list-of-lists after "Patches:"); None when the marker
    is absent."""
    marker_at = text.find(PATCHES_MARKER)
    if marker_at < 0:
        return None
    tail = text[marker_at + len(PATCHES_MARKER) :]
    groups = _bracket_groups(tail)
    if not groups:
        raise MalformedPatchList("no balanced list after Patches: marker")
    outer = groups[0]
    inner_groups = _bracket_groups(outer[1:-1])
    if not inner_groups:
        raise MalformedPatchList("Patches: list contains no inner lists")
    patches = []
    for g in inner_groups:
        values = _parse_flat(g)
        if values is None:
            raise MalformedPatchList(f"unparseable patch {g!r}")
        patches.append(Patch(values=tuple(values)))
    return patches


def patch_fidelity(
    echoed: list[Patch], truth: PatchSet, tol: float = 1e-4
) -> FidelityReport:
    """Agreement between echoed and ground-truth patches. Position-aligned
    comparison; surplus or missing patches count as mismatches."""
    truth_patches = truth.patches
    total = max(len(echoed), len(truth_patches))
    if total == 0 or not echoed:
        return FidelityReport(exact_fraction=0.0, mean_abs_dev=None)

    exact = 0
    devs: list[float] = []
    for e, t in zip(echoed, truth_patches):
        if len(e.values) == len(t.values):
            diffs = [abs(a - b) for a, b in zip(e.values, t.values)]
            devs.extend(diffs)
            if all(d <= tol for d in diffs):
                exact += 1
    mad = sum(devs) / len(devs) if devs else None
    return FidelityReport(exact_fraction=exact / total, mean_abs_dev=mad)
