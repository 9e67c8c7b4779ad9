"""k-minimum-values sketch with an unordered overflow buffer.

The k smallest distinct pair hashes seen so far live in an unordered list S.
New candidates go to a second unordered list F; when F holds k entries the
two lists are merged by a rank-k selection (expected linear time), which also
tightens the live threshold p to the new k-th smallest hash.  Insertion is
therefore amortized O(1), with no heap and no ordering maintained between
merges.

Entries are (hash, a, c) tuples; their lexicographic order is the tie rule
everywhere, so a merge keeps exactly k entries even under equal hashes and
the whole sketch is deterministic given its inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

Entry = tuple[int, int, int]  # (hash raw, a, c)


@dataclass(frozen=True)
class SketchOutcome:
    """Result of finalizing a sketch.

    ``filled`` means k distinct pairs were retained and ``v`` is the k-th
    smallest hash in grid units.  Otherwise ``count`` is the number of
    distinct pairs found below the initial threshold.
    """

    filled: bool
    v: int | None = None
    count: int | None = None


def select_smallest(entries: list[Entry], k: int, rng: random.Random) -> None:
    """Partition ``entries`` in place so entries[:k] are the k smallest.

    Randomized quickselect, expected linear time; no full sort.  Assumes the
    entries are pairwise distinct tuples (distinct pairs guarantee this).
    """
    lo, hi = 0, len(entries) - 1
    goal = k - 1
    while lo < hi:
        pivot = entries[rng.randint(lo, hi)]
        i, j = lo, hi
        while i <= j:
            while entries[i] < pivot:
                i += 1
            while entries[j] > pivot:
                j -= 1
            if i <= j:
                entries[i], entries[j] = entries[j], entries[i]
                i += 1
                j -= 1
        if goal <= j:
            hi = j
        elif goal >= i:
            lo = i
        else:
            return


def combine(
    sketch: list[Entry],
    buffer: list[Entry],
    k: int,
    current_p: int,
    rng: random.Random,
) -> tuple[int, list[Entry]]:
    """Rank-k selection over sketch + buffer.

    Returns the new threshold (the k-th smallest hash, or ``current_p``
    unchanged when fewer than k entries exist in total) and the list of kept
    entries.  Ties at the rank boundary break by (hash, a, c) order.
    """
    merged = sketch + buffer
    if len(merged) < k:
        return current_p, merged
    select_smallest(merged, k, rng)
    return merged[k - 1][0], merged[:k]


class KMinState:
    """Mutable sketch state for one estimator run (single owner, no sharing)."""

    __slots__ = ("k", "p", "sketch", "buffer", "members", "accepted", "combines",
                 "_select_rng", "_evicted")

    def __init__(
        self,
        k: int,
        p0: int,
        select_rng: random.Random | None = None,
        track_evictions: bool = False,
    ):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.p = p0  # live threshold in grid units; only ever decreases
        self.sketch: list[Entry] = []
        self.buffer: list[Entry] = []
        self.members: set[int] = set()  # encoded (a << 32 | c) keys of sketch + buffer
        self.accepted = 0
        self.combines = 0
        self._select_rng = select_rng if select_rng is not None else random.Random(0)
        # Debug-only shadow set: a pair dropped by a merge has hash >= every
        # later threshold, so it must never be offered again.
        self._evicted: set[int] | None = set() if track_evictions else None

    def threshold(self) -> int:
        return self.p

    def offer(self, a: int, c: int, hv: int) -> bool:
        """Insert pair (a, c) with hash ``hv``.

        Returns False without touching the state when the pair is already
        present.  The k-th accepted entry in the buffer triggers a merge.
        Callers normally guarantee hv < p; an offer above the live threshold
        (a caller working from a stale, lagging cutoff) is tolerated and
        simply evicted at the next merge, so the final rank is unaffected.
        """
        key = (a << 32) | c
        if key in self.members:
            return False
        if self._evicted is not None and key in self._evicted:
            raise AssertionError("evicted pair offered again; threshold discipline broken")
        self.buffer.append((hv, a, c))
        self.members.add(key)
        self.accepted += 1
        if len(self.buffer) == self.k:
            self._merge()
        return True

    def _merge(self) -> None:
        held = len(self.sketch) + len(self.buffer)
        self.p, self.sketch = combine(self.sketch, self.buffer, self.k, self.p, self._select_rng)
        self.buffer = []
        if held > self.k:
            kept = {(a << 32) | c for _, a, c in self.sketch}
            if self._evicted is not None:
                self._evicted.update(self.members - kept)
            self.members = kept
        self.combines += 1

    def finalize(self) -> SketchOutcome:
        """Run the closing merge and report the outcome."""
        self._merge()
        if len(self.sketch) == self.k:
            return SketchOutcome(filled=True, v=self.p)
        return SketchOutcome(filled=False, count=len(self.sketch))
