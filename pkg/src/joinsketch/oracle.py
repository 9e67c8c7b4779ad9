"""Brute-force ground truth for tests and experiment baselines.

Everything here materializes the full result and is desk-scale by design; a
size cap refuses anything beyond roughly 10^7 candidate pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hashing import PairHash
from .kmin import SketchOutcome
from .relation import GroupedInput

DEFAULT_CAP = 10_000_000

_SHIFT = np.uint64(32)
_LOW = np.uint64(0xFFFFFFFF)


class SizeCapError(RuntimeError):
    """Materialization would exceed the configured cap."""


@dataclass(frozen=True)
class ExactResult:
    z: int
    pairs: frozenset[tuple[int, int]] | None = None


def _check_cap(grouped: GroupedInput, cap: int) -> None:
    if grouped.total_product > cap:
        raise SizeCapError(
            f"materializing {grouped.total_product} candidate pairs exceeds the cap of {cap}"
        )


def distinct_pair_keys(grouped: GroupedInput, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Sorted encoded keys (a << 32 | c) of all distinct result pairs."""
    _check_cap(grouped, cap)
    if not grouped.groups:
        return np.empty(0, dtype=np.uint64)
    parts = []
    for g in grouped.groups:
        keys = (g.left_values[:, None] << _SHIFT) | g.right_values[None, :]
        parts.append(keys.ravel())
    return np.unique(np.concatenate(parts))


def exact_size(grouped: GroupedInput, cap: int = DEFAULT_CAP, materialize: bool = False) -> ExactResult:
    """Exact join-project size by unioning every group's product."""
    keys = distinct_pair_keys(grouped, cap)
    if materialize:
        pairs = frozenset(zip((keys >> _SHIFT).tolist(), (keys & _LOW).tolist()))
        return ExactResult(int(keys.size), pairs)
    return ExactResult(int(keys.size))


def exact_size_bitsets(grouped: GroupedInput, cap: int = DEFAULT_CAP) -> int:
    """Independent second path: per-left-value sets of reachable right values."""
    _check_cap(grouped, cap)
    reach: dict[int, set[int]] = {}
    for g in grouped.groups:
        right = g.right_values.tolist()
        for a in g.left_values.tolist():
            reach.setdefault(a, set()).update(right)
    return sum(len(s) for s in reach.values())


def exact_kth_hash(
    grouped: GroupedInput, pair_hash: PairHash, k: int, cap: int = DEFAULT_CAP
) -> SketchOutcome:
    """Full-sort k-th smallest pair hash over all distinct result pairs.

    Uses the sketch's tie rule, (hash, a, c) lexicographic, so a filled
    sketch outcome must match this bit for bit.
    """
    if k < 1:
        raise ValueError("k must be positive")
    keys = distinct_pair_keys(grouped, cap)
    if keys.size < k:
        return SketchOutcome(filled=False, count=int(keys.size))
    a = keys >> _SHIFT
    c = keys & _LOW
    hv = pair_hash.h1.values(a) - pair_hash.h2.values(c)  # uint64 wraparound
    order = np.lexsort((c, a, hv))
    return SketchOutcome(filled=True, v=int(hv[order[k - 1]]))
