"""Acceptance gate: one test per criterion, each printing a single
pass/fail line.  Tolerances are pinned here and nowhere looser."""
import itertools
import random
import time
from fractions import Fraction

from crlab.coloring import ColoringParams, verify_otimes
from crlab.collapse import (
    build_badness,
    decode_names,
    encode_real,
    norm_drop,
    sample_branch,
)
from crlab.core import (
    BlockPair,
    Condition,
    SizeNormPair,
    SlotSpace,
    check_good_pair,
    leq,
)
from crlab.halving import (
    SymbolicCreature,
    build_split,
    check_halving_property,
    check_product_bound,
    merge_conditions,
    random_condition,
    split_condition,
)
from crlab.norms import default_grid, verify_norm_identities
from crlab.transforms import (
    flatten_condition,
    reduce_to_bad_form,
    sum_creatures,
    summarize_condition,
    summarize_pair,
)

EQUALITY_TOL = 1e-9
INEQUALITY_SLACK = 1e-9
COLORING_TIME_LIMIT_S = 60.0
COLLAPSE_TIME_LIMIT_S = 30.0


def _verdict(number, name, ok):
    print(f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {number} ({name}) failed"


def test_criterion_1_coloring_exhaustive():
    started = time.monotonic()
    ok = True
    total = 0
    for n, m in [(2, 2), (2, 3), (3, 2)]:
        d_min = (n - 2) * 2**m + 1
        for d in range(d_min, d_min + 3):
            report = verify_otimes(ColoringParams(n, m, d), exhaustive=True)
            total += report.families_checked
            ok = ok and report.ok and not report.sampled
    elapsed = time.monotonic() - started
    ok = ok and total > 0 and elapsed < COLORING_TIME_LIMIT_S
    _verdict(1, f"coloring exhaustive, {total} families in {elapsed:.1f}s", ok)


def test_criterion_2_norm_identities_grid():
    lams, drops, ks = default_grid()
    report = verify_norm_identities(
        lams, drops, ks, clauses=(1, 2, 3, 4), tol=EQUALITY_TOL
    )
    admissible = sum(
        1 for lam in lams for drop in drops for _ in ks if 0 <= drop <= lam
    )
    ok = admissible >= 10_000 and report.ok and report.checked > 0
    _verdict(
        2,
        f"norm identities, {admissible} grid points, {report.checked} rows, "
        f"{len(report.violations)} violations",
        ok,
    )


def test_criterion_3_halving_sweep():
    rng = random.Random(0)
    creatures = []
    # every admissible k gets its exact nor = 2 boundary case
    for k in range(1, 6):
        gap = Fraction(4) ** k
        if gap <= 1024:
            creatures.append(SymbolicCreature(0, Fraction(max(18, gap)), Fraction(max(18, gap)) - gap, k))
    admissible = sum(1 for t in creatures if t.nor >= 2)
    while admissible < 10_000:
        k = rng.randint(1, 16)
        lam = Fraction(rng.randint(18, 1024))
        gap = Fraction(4) ** k
        choices = [Fraction(0), Fraction(rng.randint(0, 8))]
        if lam - gap >= 0:
            choices.append(lam - gap)
        t = SymbolicCreature(0, lam, rng.choice(choices), k)
        creatures.append(t)
        admissible += t.nor >= 2
    report = check_halving_property(
        creatures, refinement_lams=[32, 128, 512, 1024], tol=EQUALITY_TOL
    )
    boundary = sum(1 for t in creatures if abs(t.nor - 2.0) <= EQUALITY_TOL)
    ok = (
        report.ok
        and report.creatures_checked >= 10_000
        and boundary > 0
    )
    _verdict(
        3,
        f"halving contract, {report.creatures_checked} creatures "
        f"({boundary} at the nor=2 boundary), {len(report.violations)} violations",
        ok,
    )


def test_criterion_4_collapse_round_trip():
    started = time.monotonic()
    witness = build_badness(2, level_offset=3)
    pair = witness.block_pair()
    p = Condition(
        (), tuple(pair.full_creature(b) for b in witness.boundaries[:-1])
    )
    rng = random.Random(1)
    length = witness.boundaries[2]
    ok = True
    for bits in itertools.product((0, 1), repeat=2):
        result = encode_real(witness, pair, p, bits)
        ok = ok and leq(pair, p, result.q)
        for j, nor in enumerate(result.norms):
            ok = ok and nor >= min(norm_drop(p.creatures[j].nor), norm_drop(j))
        for _ in range(100):
            branch = sample_branch(result.q, length, rng)
            _, decoded = decode_names(witness, branch, result.seed, 2)
            ok = ok and tuple(decoded) == bits
    elapsed = time.monotonic() - started
    ok = ok and elapsed < COLLAPSE_TIME_LIMIT_S
    _verdict(4, f"collapse round trip, 4 strings x 100 branches in {elapsed:.1f}s", ok)


def test_criterion_5_good_pair_laws():
    local = SizeNormPair(SlotSpace((4, 3, 2)))
    block = BlockPair(SlotSpace((4, 2, 2)), (0, 1, 3))
    summarized = summarize_pair(SizeNormPair(SlotSpace((2, 2, 3))), (0, 2, 3))
    reports = [
        check_good_pair(local, range(3)),
        check_good_pair(block, (0, 1)),
        check_good_pair(summarized, (0, 2)),
    ]
    ok = all(r.ok for r in reports)
    checked = sum(r.checked for r in reports)
    _verdict(5, f"good-pair laws, {checked} law instances over 3 pairs", ok)


def test_criterion_6_transforms():
    base = SizeNormPair(SlotSpace((2, 2, 2, 2)))
    spair = summarize_pair(base, (0, 2, 4))
    ok = True

    sums = 0
    for t0 in base.enumerate_creatures(0):
        for t1 in base.enumerate_creatures(1):
            sums += 1
            ok = ok and sum_creatures([t0, t1]).nor == min(t0.nor, t1.nor)

    per_slot = [base.enumerate_creatures(m) for m in range(4)]
    conds = [Condition((), combo) for combo in itertools.product(*per_slot)]
    for p in conds:
        ok = ok and flatten_condition(spair, summarize_condition(spair, p)) == p

    summarized = [summarize_condition(spair, p) for p in conds]
    flat = {q: flatten_condition(spair, q) for q in summarized}
    pairs = 0
    for q1 in summarized:
        for q2 in summarized:
            pairs += 1
            ok = ok and leq(spair, q1, q2) == leq(base, flat[q1], flat[q2])

    rng = random.Random(0)
    reduced = 0
    while reduced < 100:
        width = rng.randint(4, 8)
        sizes = tuple(rng.randint(2, 7) for _ in range(width))
        rpair = SizeNormPair(SlotSpace(sizes))
        creatures = tuple(
            rpair.make(m, [rng.sample(range(size), rng.randint(1, size))])
            for m, size in enumerate(sizes)
        )
        p = Condition((), creatures)
        try:
            out = reduce_to_bad_form(rpair, p)
        except ValueError:
            continue
        reduced += 1
        ok = ok and leq(rpair, p, out.q)
        stem = len(out.q.w)
        for i, (lo, hi) in enumerate(zip(out.boundaries, out.boundaries[1:])):
            for t in out.q.creatures[lo - stem:hi - stem]:
                ok = ok and len(t.sets[0]) == i + 2

    _verdict(
        6,
        f"transforms: {sums} sums, {len(conds)} identities, "
        f"{pairs} order pairs, {reduced} reductions",
        ok,
    )


def test_criterion_7_split_merge_and_product_bound():
    maps = build_split([2] * 200, lambda n: n + 2, 4)
    rng = random.Random(0)
    ok = maps.bounds == (0, 1, 2, 6, 126)
    trips = 1000
    for _ in range(trips):
        p = random_condition(maps, rng.randint(0, 3), rng.randint(1, 40), rng)
        p0, p1 = split_condition(p, maps)
        ok = ok and merge_conditions(p0, p1, maps) == p
    for factor in (0, 1):
        levels = maps.factor_levels(factor)
        sizes = maps.factor_sizes(factor)
        ok = ok and bool(levels) and check_product_bound(sizes, levels).ok
        doubled = check_product_bound(sizes, levels, eps_scale=2)
        ok = ok and not doubled.ok and doubled.first_failure() is not None
    _verdict(
        7,
        f"split/merge, {trips} round trips, product bound tight on both factors",
        ok,
    )
