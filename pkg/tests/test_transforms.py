"""Sums, summarization, flattening, and reduction to uniform bad form."""
import itertools
import random

import pytest

from crlab.core import (
    AlignmentError,
    Condition,
    SizeNormPair,
    SlotSpace,
    leq,
    pos_product,
    validate_condition,
)
from crlab.transforms import (
    SummarizedPair,
    flatten_condition,
    reduce_to_bad_form,
    sum_creatures,
    summarize_condition,
    summarize_pair,
)

BASE = SizeNormPair(SlotSpace((2, 2, 2, 2)))


def test_sum_norm_is_min_exhaustively():
    for t0 in BASE.enumerate_creatures(0):
        for t1 in BASE.enumerate_creatures(1):
            s = sum_creatures([t0, t1], tight=True)
            assert s.nor == min(t0.nor, t1.nor)
            assert s.sets == t0.sets + t1.sets
            assert s.parts == (t0, t1)


def test_sum_gap_pins_zero():
    t0 = BASE.make(0, [{0, 1}])
    t2 = BASE.make(2, [{1}])
    s = sum_creatures([t0, t2])
    assert s.sets[1] == frozenset({0})
    assert pos_product((), (s,)) == [(0, 0, 1), (1, 0, 1)]
    with pytest.raises(AlignmentError):
        sum_creatures([t0, t2], tight=True)
    with pytest.raises(AlignmentError):
        sum_creatures([t2, t0])


def _base_conditions(pair, boundaries):
    """All block-aligned conditions with empty stem over the local pair."""
    per_slot = [pair.enumerate_creatures(m) for m in range(boundaries[-1])]
    for combo in itertools.product(*per_slot):
        yield Condition((), combo)


def test_summarize_then_flatten_is_identity():
    spair = summarize_pair(BASE, (0, 2, 4))
    for p in _base_conditions(BASE, spair.boundaries):
        q = summarize_condition(spair, p)
        assert flatten_condition(spair, q) == p
        for block, t in enumerate(q.creatures):
            assert t.nor == min(part.nor for part in t.parts)
            assert t.m_dn == spair.boundaries[block]


def test_summarize_requires_alignment():
    spair = summarize_pair(BASE, (0, 2, 4))
    p = Condition((0,), tuple(BASE.full_creature(m) for m in range(1, 4)))
    with pytest.raises(AlignmentError):
        summarize_condition(spair, p)


def test_flatten_preserves_order_exhaustively():
    """q1 <= q2 among summarized conditions iff the flattened conditions
    compare the same way in the base pair."""
    spair = summarize_pair(BASE, (0, 2, 4))
    conds = [summarize_condition(spair, p) for p in _base_conditions(BASE, (0, 2, 4))]
    flat = {q: flatten_condition(spair, q) for q in conds}
    for q1 in conds:
        for q2 in conds:
            assert leq(spair, q1, q2) == leq(BASE, flat[q1], flat[q2]), (q1, q2)


def test_reduce_trace():
    sizes = (2, 3, 3, 4, 4, 4)
    pair = SizeNormPair(SlotSpace(sizes))
    p = Condition((), tuple(pair.full_creature(m) for m in range(len(sizes))))
    out = reduce_to_bad_form(pair, p)
    # block i keeps creatures of pos size exactly i + 2
    assert out.boundaries == (0, 1, 3, 6)
    for i, (lo, hi) in enumerate(zip(out.boundaries, out.boundaries[1:])):
        for t in out.q.creatures[lo:hi]:
            assert len(t.sets[0]) == i + 2
    assert leq(pair, p, out.q)
    assert flatten_condition(out.spair, out.q_star) == out.q


def test_reduce_absorbs_small_creatures_into_stem():
    pair = SizeNormPair(SlotSpace((2, 2, 3)))
    p = Condition(
        (), (pair.make(0, [{1}]), pair.full_creature(1), pair.full_creature(2))
    )
    out = reduce_to_bad_form(pair, p)
    assert out.q.w == (1,)
    assert out.boundaries[0] == 1
    assert leq(pair, p, out.q)


def test_reduce_random_inputs():
    rng = random.Random(0)
    for trial in range(100):
        width = rng.randint(3, 8)
        sizes = tuple(rng.randint(2, 2 + min(trial % 5, 4) + 2) for _ in range(width))
        pair = SizeNormPair(SlotSpace(sizes))
        creatures = []
        for m, size in enumerate(sizes):
            chosen = rng.sample(range(size), rng.randint(1, size))
            creatures.append(pair.make(m, [chosen]))
        p = Condition((), tuple(creatures))
        validate_condition(pair, p)
        try:
            out = reduce_to_bad_form(pair, p)
        except ValueError:
            continue  # horizon too short for a full block: acceptable refusal
        assert leq(pair, p, out.q)
        stem = len(out.q.w)
        for i, (lo, hi) in enumerate(zip(out.boundaries, out.boundaries[1:])):
            for t in out.q.creatures[lo - stem:hi - stem]:
                assert len(t.sets[0]) == i + 2
        assert flatten_condition(out.spair, out.q_star) == out.q
        assert leq(out.spair, out.q_star, out.q_star)


def test_summarized_pair_membership():
    spair = summarize_pair(BASE, (0, 2, 4))
    t = spair.full_creature(0)
    assert spair.member(t)
    assert spair.span(2) == 4
    with pytest.raises(AlignmentError):
        spair.span(1)
    assert spair.block_size(0) == 4
