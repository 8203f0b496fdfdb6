"""The epsilon-half contract, interval splits, and the product bound."""
import random
from fractions import Fraction

import pytest

from crlab.core import AlignmentError, Condition, Creature
from crlab.halving import (
    SplitMaps,
    SymbolicCreature,
    build_split,
    check_halving_property,
    check_product_bound,
    half,
    merge_conditions,
    random_condition,
    split_condition,
    unhalve,
)


def test_half_frozen_example():
    t = SymbolicCreature(0, Fraction(20), Fraction(4), 1)
    assert t.nor == pytest.approx(4.0, abs=1e-12)
    h = half(t, Fraction(2))
    assert h.drop == 12 and h.lam == t.lam
    assert h.nor == pytest.approx(3.0, abs=1e-12)
    assert h.nor >= t.nor - 2


def test_half_preconditions():
    low = SymbolicCreature(0, Fraction(5), Fraction(2), 1)
    assert low.nor < 2
    with pytest.raises(ValueError):
        half(low, Fraction(2))
    t = SymbolicCreature(0, Fraction(20), Fraction(0), 2)
    with pytest.raises(ValueError):
        half(t, Fraction(1, 2))


def test_unhalve_round():
    t = SymbolicCreature(0, Fraction(64), Fraction(0), 1)
    eps = Fraction(2)
    h = half(t, eps)
    s = SymbolicCreature(0, Fraction(50), h.drop + 2, 1)
    assert s.refines(h) and s.nor > 1
    t0 = unhalve(s, t, eps)
    assert t0.lam == s.lam and t0.drop == t.drop
    assert t0.refines(t)
    assert t0.nor >= t.nor - float(eps) - 1e-9


def test_unhalve_rejects_non_refinements():
    t = SymbolicCreature(0, Fraction(64), Fraction(0), 1)
    h = half(t, Fraction(2))
    outsider = SymbolicCreature(0, Fraction(64), h.drop - 1, 1)
    with pytest.raises(ValueError):
        unhalve(outsider, t, Fraction(2))


def test_check_halving_sweep():
    rng = random.Random(2)
    creatures = []
    for _ in range(500):
        k = rng.randint(1, 16)
        lam = Fraction(rng.randint(18, 1024))
        gap = Fraction(4) ** k
        choices = [Fraction(0)]
        if lam - gap >= 0:
            choices.append(lam - gap)  # the exact nor = 2 boundary
        creatures.append(SymbolicCreature(0, lam, rng.choice(choices), k))
    report = check_halving_property(creatures, refinement_lams=[64, 256, 1024])
    assert report.ok, report.violations[:3]
    assert report.creatures_checked + report.skipped == 500
    kinds = {r.kind for r in report.rows}
    assert {"half", "midpoint", "unhalve"} <= kinds


def test_check_halving_norm2_boundary_is_checked():
    t = SymbolicCreature(0, Fraction(16), Fraction(0), 2)  # nor exactly 2
    report = check_halving_property([t])
    assert report.creatures_checked == 1 and report.skipped == 0
    assert report.ok


def test_build_split_trace():
    maps = build_split([2] * 200, lambda n: n + 2, 4)
    assert maps.bounds == (0, 1, 2, 6, 126)
    assert maps.even_intervals()[:3] == (0, 2, 3)
    assert maps.odd_intervals()[:3] == (1, 6, 7)
    assert set(maps.even_intervals()) | set(maps.odd_intervals()) == set(range(200))
    assert not set(maps.even_intervals()) & set(maps.odd_intervals())


def test_build_split_refuses_short_horizon():
    with pytest.raises(ValueError):
        build_split([2] * 50, lambda n: n + 2, 4)
    with pytest.raises(ValueError):
        build_split([2] * 50, lambda n: 50 - n, 1)


def test_factor_levels_and_product_bound():
    maps = build_split([2] * 200, lambda n: n + 2, 4)
    levels = maps.factor_levels(0)
    assert levels, "the even factor must carry at least one level"
    report = check_product_bound(maps.factor_sizes(0), levels)
    assert report.ok
    # the bound is tight enough that doubling epsilon breaks it
    doubled = check_product_bound(maps.factor_sizes(0), levels, eps_scale=2)
    assert not doubled.ok and doubled.first_failure() is not None


def test_split_merge_round_trip_small():
    maps = build_split([2] * 200, lambda n: n + 2, 4)
    rng = random.Random(9)
    for _ in range(50):
        p = random_condition(maps, rng.randint(0, 3), rng.randint(1, 30), rng)
        p0, p1 = split_condition(p, maps)
        assert merge_conditions(p0, p1, maps) == p


def test_split_requires_stem_on_bound():
    maps = build_split([2] * 200, lambda n: n + 2, 4)
    p = Condition((0, 0, 0), (Creature(3, 4, 1.0, (frozenset({0}),)),))
    with pytest.raises(AlignmentError):
        split_condition(p, maps)


def test_split_factors_partition_the_condition():
    maps = build_split([2] * 200, lambda n: n + 2, 4)
    rng = random.Random(4)
    p = random_condition(maps, 2, 20, rng)
    p0, p1 = split_condition(p, maps)
    assert len(p0.w) + len(p1.w) == len(p.w)
    assert len(p0.creatures) + len(p1.creatures) == len(p.creatures)


def test_splitmaps_validation():
    with pytest.raises(ValueError):
        SplitMaps((1, 2), 5, (2,) * 5, (2,) * 5)
    with pytest.raises(ValueError):
        SplitMaps((0, 2), 5, (2,) * 4, (2,) * 5)
