from __future__ import annotations

import itertools
from math import factorial

import pytest

from antiorb.segments import (
    HatPair,
    Multisegment,
    PartitionMult,
    SegmentClass,
    count_P,
    count_Pap,
    enumerate_multisegments,
    hat_bijection,
    hat_unbijection,
    hook_dim,
    is_aperiodic,
    partition_mults,
    rank_formula,
)


def ms(m, *triples):
    return Multisegment.from_list(m, triples)


def test_aperiodicity_examples():
    assert is_aperiodic(Multisegment(2))
    assert not is_aperiodic(ms(2, (0, 1, 1), (1, 1, 1)))
    assert is_aperiodic(ms(2, (0, 2, 1)))


def test_hat_examples():
    assert hat_bijection(ms(2, (0, 1, 1), (1, 1, 1))) == HatPair(Multisegment(2), PartitionMult.from_counts({1: 1}))
    assert hat_bijection(ms(2, (0, 2, 1))) == HatPair(ms(2, (0, 2, 1)), PartitionMult())
    assert hat_bijection(Multisegment(3)) == HatPair(Multisegment(3), PartitionMult())


def test_enumeration_examples():
    found = enumerate_multisegments(2, (1, 1))
    assert set(found) == {ms(2, (0, 2, 1)), ms(2, (1, 2, 1)), ms(2, (0, 1, 1), (1, 1, 1))}
    assert count_Pap(2, (1, 1)) == 2
    for m in (1, 2, 3):
        assert enumerate_multisegments(m, (0,) * m) == [Multisegment(m)]
    for n in range(1, 5):
        assert count_Pap(1, (n,)) == 0


def brute_force_multisegments(m, nu):
    """Independent oracle: all multiplicity vectors over bounded segments, filtered by dimension."""
    segs = [SegmentClass(m, a, ln) for a in range(m) for ln in range(1, sum(nu) + 1)]
    bound = max(nu) if nu else 0
    out = set()
    for mults in itertools.product(range(bound + 1), repeat=len(segs)):
        dims = [0] * m
        for s, c in zip(segs, mults):
            for i, d in enumerate(s.dims()):
                dims[i] += c * d
        if tuple(dims) == tuple(nu):
            out.add(Multisegment.from_counts(m, list(zip(segs, mults))))
    return out


@pytest.mark.parametrize("m,nu", [(1, (3,)), (2, (1, 1)), (2, (2, 1)), (2, (2, 2)), (3, (1, 1, 1)), (3, (1, 0, 1))])
def test_enumeration_matches_oracle(m, nu):
    found = enumerate_multisegments(m, nu)
    assert len(found) == len(set(found))
    assert set(found) == brute_force_multisegments(m, nu)


def dims_up_to(m, bound):
    return itertools.product(range(bound + 1), repeat=m)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_hat_round_trip_exhaustive(m):
    for nu in dims_up_to(m, 3 if m < 3 else 2):
        for tilde in enumerate_multisegments(m, nu):
            pair = hat_bijection(tilde)
            assert is_aperiodic(pair.sigma)
            assert pair.dims() == tilde.dims()
            assert hat_unbijection(pair) == tilde


@pytest.mark.parametrize("m", [1, 2, 3])
def test_counting_identity(m):
    for nu in dims_up_to(m, 2):
        total = 0
        for t in range(min(nu) + 1):
            rest = tuple(n - t for n in nu)
            total += count_Pap(m, rest) * len(partition_mults(t))
        assert total == count_P(m, nu)


def test_hook_dims():
    assert hook_dim(PartitionMult.from_counts({1: 5})) == 1
    assert hook_dim(PartitionMult.from_counts({2: 1})) == 1
    assert hook_dim(PartitionMult.from_counts({1: 1, 2: 1})) == 2
    for n in range(7):
        assert sum(hook_dim(r) ** 2 for r in partition_mults(n)) == factorial(n)


def test_rank_formula_examples():
    one = PartitionMult.from_counts({1: 1})
    assert rank_formula([], PartitionMult(), 2) == 1
    assert rank_formula([one], PartitionMult(), 2) == 2
    assert rank_formula([one, one], PartitionMult(), 2) == 8
    # the zero part enters z but not the power of m
    assert rank_formula([one], one, 3) == 2 * 3


def test_json_forms():
    s = ms(3, (2, 2, 1), (0, 1, 3))
    assert s.to_json() == [[0, 1, 3], [2, 2, 1]]
    assert Multisegment.from_json(3, s.to_json()) == s
    assert SegmentClass(3, 4, 2) == SegmentClass(3, 1, 2)
    r = PartitionMult.from_parts([2, 1, 1])
    assert PartitionMult.from_json(r.to_json()) == r
