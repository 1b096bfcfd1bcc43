"""Nearest-neighbor retrieval of historical context windows by Euclidean
distance. Exhaustive scan; datasets here are small enough that no index is
needed."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, EvalWindow
from .errors import EmptyPool, LengthMismatch


@dataclass(frozen=True)
class CandidateWindow:
    series_id: str
    start_index: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class NeighborSet:
    k: int
    entries: tuple[tuple[CandidateWindow, float], ...]


def build_pool(
    dataset: Dataset, target: EvalWindow, candidate_stride: int = 1
) -> list[CandidateWindow]:
    """All length-L windows, from every series, lying entirely before the
    target context begins. The target's own context is never a candidate."""
    if candidate_stride < 1:
        raise ValueError("candidate_stride must be >= 1")
    L = len(target.context)
    context_start_ts = target.context_timestamps[0]
    pool: list[CandidateWindow] = []
    for series in dataset.series:
        last_start = len(series) - L
        for start in range(0, last_start + 1, candidate_stride):
            # window must end strictly before the target context begins
            if series.timestamps[start + L - 1] >= context_start_ts:
                break
            pool.append(
                CandidateWindow(
                    series_id=series.id,
                    start_index=start,
                    values=series.values[start : start + L],
                )
            )
    if not pool:
        raise EmptyPool(
            f"no candidate windows precede target at {target.series_id!r}"
            f" start {target.context_start}"
        )
    return pool


def euclidean(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)}")
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def _znorm(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    if sd == 0:
        return x - x.mean()
    return (x - x.mean()) / sd


def top_k(
    target: EvalWindow,
    pool: list[CandidateWindow],
    k: int = 5,
    znorm: bool = False,
) -> NeighborSet:
    """k nearest candidates; ties broken by (series_id, start_index)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not pool:
        raise EmptyPool("candidate pool is empty")
    t = np.asarray(target.context, dtype=float)
    mat = np.asarray([c.values for c in pool], dtype=float)
    if znorm:
        t = _znorm(t)
        mat = np.apply_along_axis(_znorm, 1, mat)
    dists = np.sqrt(((mat - t) ** 2).sum(axis=1))
    ranked = sorted(
        zip(pool, dists.tolist()),
        key=lambda e: (e[1], e[0].series_id, e[0].start_index),
    )
    return NeighborSet(k=k, entries=tuple(ranked[: min(k, len(ranked))]))
