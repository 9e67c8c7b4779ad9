"""Pairwise-independent hashing into 64-bit fixed-point fractions.

A hash value is a plain integer ``raw`` in ``[0, 2**64)`` standing for the
fraction ``raw / 2**64``.  On that grid, wrapping 64-bit subtraction realizes
subtraction mod 1 exactly, which is what makes the structured pair hash

    h(x, y) = (h1(x) - h2(y)) mod 1

cheap to evaluate, compare and sort.  The pair hash is the workhorse of the
whole estimator: for a fixed y, walking x in h1-order makes h(x, y) ascend
with a single wraparound, so all pairs below a threshold sit in one
contiguous cyclic run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GRID_BITS = 64
GRID = 1 << GRID_BITS  # denominator of the fixed-point grid; GRID itself means 1.0
MASK64 = GRID - 1
MERSENNE61 = (1 << 61) - 1

WRAPPING64 = "wrapping64"
MERSENNE = "mersenne61"
FAMILIES = (WRAPPING64, MERSENNE)


@dataclass(frozen=True)
class PairwiseHash:
    """One multiply-add hash from 32-bit attribute values to the fraction grid.

    Two families are supported:

    * ``wrapping64``: ``(multiplier * x + addend) mod 2**64`` with an odd
      multiplier.  Single machine word, but only approximately pairwise
      independent on the grid.  This is the default for estimation runs.
    * ``mersenne61``: ``(multiplier * x + addend) mod (2**61 - 1)`` rescaled
      to the grid by exact integer division.  Exactly pairwise independent
      before rescaling; meant for validation runs.
    """

    multiplier: int
    addend: int
    family: str = WRAPPING64

    def value(self, x: int) -> int:
        if self.family == WRAPPING64:
            return (self.multiplier * x + self.addend) & MASK64
        v = (self.multiplier * x + self.addend) % MERSENNE61
        return (v << GRID_BITS) // MERSENNE61

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`value` over a uint64 array."""
        if self.family == WRAPPING64:
            return np.uint64(self.multiplier) * xs + np.uint64(self.addend)
        m, a = self.multiplier, self.addend
        out = [((m * x + a) % MERSENNE61 << GRID_BITS) // MERSENNE61 for x in xs.tolist()]
        return np.array(out, dtype=np.uint64)


@dataclass(frozen=True)
class PairHash:
    """Structured pair hash h(x, y) = (h1(x) - h2(y)) mod 1 on the grid."""

    h1: PairwiseHash
    h2: PairwiseHash

    def value(self, x: int, y: int) -> int:
        return (self.h1.value(x) - self.h2.value(y)) & MASK64


def draw_single(rng: np.random.Generator, family: str = WRAPPING64) -> PairwiseHash:
    """Draw fresh hash parameters from a seeded generator."""
    if family == WRAPPING64:
        multiplier = int(rng.integers(0, GRID, dtype=np.uint64)) | 1
        addend = int(rng.integers(0, GRID, dtype=np.uint64))
    elif family == MERSENNE:
        multiplier = 1 + int(rng.integers(0, MERSENNE61 - 1, dtype=np.uint64))
        addend = int(rng.integers(0, MERSENNE61, dtype=np.uint64))
    else:
        raise ValueError(f"unknown hash family: {family!r}")
    return PairwiseHash(multiplier, addend, family)


def draw_pair_hash(rng: np.random.Generator, family: str = WRAPPING64) -> PairHash:
    return PairHash(draw_single(rng, family), draw_single(rng, family))


# Disjoint spawn-key namespaces keep estimator-run streams and sample-selector
# streams independent even when their indices collide.
_RUN_SPACE = 0
_SELECTOR_SPACE = 1


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic, independent generator for (seed, key)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def run_rng(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    """Generator stream for one estimator run identified by ``key``."""
    return spawn_rng(seed, _RUN_SPACE, *key)


def selector_rng(seed: int, side_index: int) -> np.random.Generator:
    """Generator stream for a sampling selector on the given side (0=left, 1=right)."""
    return spawn_rng(seed, _SELECTOR_SPACE, side_index)
