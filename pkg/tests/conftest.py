import random

import pytest

from joinsketch import Relation, Side


def random_instance(rng: random.Random, max_each=200, a_range=40, b_range=12, c_range=40):
    """Random pair of relations joined on a shared b-range (duplicates collapse)."""
    n1 = rng.randint(0, max_each)
    n2 = rng.randint(0, max_each)
    t1 = {(rng.randrange(a_range), rng.randrange(b_range)) for _ in range(n1)}
    t2 = {(rng.randrange(b_range), rng.randrange(c_range)) for _ in range(n2)}
    return Relation(Side.LEFT, frozenset(t1)), Relation(Side.RIGHT, frozenset(t2))


def disjoint_instance(groups: int, left: int, right: int):
    """Groups with disjoint value ranges, so z = groups * left * right exactly."""
    t1 = {(g * left + i, g) for g in range(groups) for i in range(left)}
    t2 = {(g, g * right + j) for g in range(groups) for j in range(right)}
    return Relation(Side.LEFT, frozenset(t1)), Relation(Side.RIGHT, frozenset(t2))


def scattered_instance(groups: int, left: int, right: int, seed=4):
    """Like disjoint_instance but with scattered attribute values.

    Contiguous ids interact with the multiply-add hash as a low-discrepancy
    lattice and concentrate estimates beyond the iid-uniform theory;
    scattered values exercise the generic behavior.
    """
    rng = random.Random(seed)
    avals = rng.sample(range(2**31), groups * left)
    cvals = rng.sample(range(2**31), groups * right)
    t1 = {(avals[g * left + i], g) for g in range(groups) for i in range(left)}
    t2 = {(g, cvals[g * right + j]) for g in range(groups) for j in range(right)}
    return Relation(Side.LEFT, frozenset(t1)), Relation(Side.RIGHT, frozenset(t2))


def brute_force_pairs(r1: Relation, r2: Relation) -> set:
    """Quadratic-time join-project, independent of the grouping code."""
    out = set()
    for a, b in r1.tuples:
        for b2, c in r2.tuples:
            if b == b2:
                out.add((a, c))
    return out


@pytest.fixture(scope="session")
def mini_fimi_path():
    from pathlib import Path

    return Path(__file__).parent / "data" / "mini.fimi"
