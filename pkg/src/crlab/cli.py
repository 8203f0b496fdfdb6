"""Command-line driver: every verification campaign and construction as a
subcommand emitting a JSON report (plus CSV and figures for grid runs).

Exit codes: 0 all checks passed, 1 verification failure, 2 usage or input
error.  Reports are byte-identical for identical inputs and seed; elapsed
time is recorded only with --timings.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import coloring, collapse, halving, norms, serialize, transforms
from .core import (
    BlockPair,
    BudgetError,
    Condition,
    SizeNormPair,
    SlotSpace,
    check_good_pair,
    leq,
)
from .report import (
    RunReport,
    halving_rows_to_csv,
    norm_rows_to_csv,
    render_margin_figure,
)

USAGE_ERROR = 2


def _fractions(text: str):
    return [serialize.fraction_from_json(part) for part in text.split(",") if part]


def _ints(text: str):
    return [int(part) for part in text.split(",") if part]


def cmd_verify_coloring(args, report: RunReport) -> None:
    params = coloring.ColoringParams(args.N, args.M, args.d)
    out = coloring.verify_otimes(
        params,
        exhaustive=not args.sample,
        budget=args.budget,
        samples=args.samples,
        seed=args.seed,
    )
    report.checked = out.families_checked
    report.failed = len(out.failures)
    report.passed = report.checked - report.failed
    if out.failures:
        report.counterexample = out.failures[0]
    report.extra["families_checked"] = out.families_checked
    report.extra["per_ell"] = {str(k): v for k, v in sorted(out.per_ell.items())}
    report.extra["sampled"] = out.sampled


def cmd_verify_norms(args, report: RunReport) -> None:
    if args.grid == "default":
        lams, drops, ks = norms.default_grid()
    else:
        lams = _fractions(args.lams)
        drops = _fractions(args.drops)
        ks = _ints(args.ks)
    clauses = tuple(range(1, 5)) if args.clause == 0 else (args.clause,)
    out = norms.verify_norm_identities(lams, drops, ks, clauses=clauses)
    report.checked = out.checked
    report.failed = len(out.violations)
    report.passed = report.checked - report.failed
    if out.violations:
        v = out.violations[0]
        report.counterexample = (
            f"clause {v.clause} at lambda={v.lam} i={v.drop} k={v.k}: "
            f"lhs={v.lhs} rhs={v.rhs}"
        )
    if args.csv:
        norm_rows_to_csv(out.rows, args.csv)
    if args.figures:
        Path(args.figures).mkdir(parents=True, exist_ok=True)
        render_margin_figure(
            out.rows,
            Path(args.figures) / "norm-margins.png",
            "norm identity margins by clause",
            lambda r: f"clause {r.clause}",
        )


def _halving_grid(args):
    rng = random.Random(args.seed)
    creatures = []
    lam_lo, lam_hi = _ints(args.lam_range)
    k_lo, k_hi = _ints(args.k_range)
    for _ in range(args.samples):
        k = rng.randint(k_lo, k_hi)
        lam = Fraction(rng.randint(lam_lo, lam_hi))
        # bias toward admissible drops, including the norm-2 boundary
        gap = Fraction(4) ** k
        choices = [Fraction(0)]
        if lam - gap >= 0:
            choices.append(lam - gap)
        if lam - gap - 1 >= 0:
            choices.append(lam - gap - 1)
        drop = rng.choice(choices)
        creatures.append(halving.SymbolicCreature(0, lam, drop, k))
    return creatures


def cmd_verify_halving(args, report: RunReport) -> None:
    creatures = _halving_grid(args)
    out = halving.check_halving_property(creatures)
    report.checked = len(out.rows)
    report.failed = len(out.violations)
    report.passed = report.checked - report.failed
    report.extra["creatures_checked"] = out.creatures_checked
    report.extra["skipped"] = out.skipped
    if out.violations:
        v = out.violations[0]
        report.counterexample = (
            f"{v.kind} at lambda={v.lam} i={v.drop} k={v.k}: lhs={v.lhs} rhs={v.rhs}"
        )
    if args.csv:
        halving_rows_to_csv(out.rows, args.csv)
    if args.figures:
        Path(args.figures).mkdir(parents=True, exist_ok=True)
        render_margin_figure(
            [r for r in out.rows if r.kind != "skipped"],
            Path(args.figures) / "halving-margins.png",
            "halving contract margins by kind",
            lambda r: r.kind,
        )


def cmd_verify_goodpair(args, report: RunReport) -> None:
    pair = serialize.pair_from_json(serialize.load_json(args.pair))
    if args.slots:
        slots = _ints(args.slots)
    elif isinstance(pair, (BlockPair, transforms.SummarizedPair)):
        slots = list(pair.boundaries[:-1])
    else:
        slots = list(range(len(pair.space)))
    out = check_good_pair(pair, slots, args.budget)
    report.checked = out.checked
    report.failed = out.failed
    report.passed = report.checked - report.failed
    report.counterexample = out.first_failure()
    report.extra["laws"] = {
        law.name: {"checked": law.checked, "failed": len(law.failures)}
        for law in out.laws
    }


def cmd_build_badness(args, report: RunReport) -> None:
    witness = collapse.build_badness(args.levels, args.growth_base, args.level_offset)
    doc = serialize.witness_to_json(witness)
    serialize.dump_json(doc, args.witness_out)
    report.checked = report.passed = witness.levels
    report.extra["witness"] = doc


def cmd_encode(args, report: RunReport) -> None:
    witness = serialize.witness_from_json(serialize.load_json(args.witness))
    pair = witness.block_pair()
    bits = [int(c) for c in args.bits]
    if args.condition:
        p = serialize.condition_from_json(
            serialize.load_json(args.condition)["condition"], pair
        )
    else:
        p = Condition((), tuple(pair.full_creature(b) for b in witness.boundaries[:-1]))
    result = collapse.encode_real(witness, pair, p, bits)
    serialize.dump_json(serialize.instance_to_json(pair, result.q), args.condition_out)
    report.checked = report.passed = len(bits)
    report.extra["seed"] = {"level": result.seed.level, "label": result.seed.label}
    report.extra["labels"] = list(result.labels)
    report.extra["norms"] = list(result.norms)


def cmd_decode(args, report: RunReport) -> None:
    witness = serialize.witness_from_json(serialize.load_json(args.witness))
    pair = witness.block_pair()
    q = serialize.condition_from_json(
        serialize.load_json(args.condition)["condition"], pair
    )
    level_text, label_text = args.name_seed.split(",")
    seed = collapse.NameSeed(int(level_text), int(label_text))
    horizon = args.horizon or (witness.levels - seed.level)
    rng = random.Random(args.seed)
    length = witness.boundaries[seed.level + horizon]
    decodings = set()
    for _ in range(args.samples):
        branch = collapse.sample_branch(q, length, rng)
        _, bits = collapse.decode_names(witness, branch, seed, horizon)
        decodings.add(tuple(bits))
    report.checked = args.samples
    if len(decodings) == 1:
        report.passed = args.samples
        report.extra["bits"] = "".join(map(str, next(iter(decodings))))
    else:
        report.failed = args.samples
        report.counterexample = f"branch-dependent decodings: {sorted(decodings)}"


def cmd_summarize(args, report: RunReport) -> None:
    pair, p = serialize.instance_from_json(serialize.load_json(args.instance))
    spair = transforms.summarize_pair(pair, _ints(args.blocks))
    q = transforms.summarize_condition(spair, p)
    serialize.dump_json(serialize.instance_to_json(spair, q), args.condition_out)
    report.checked = report.passed = len(q.creatures)


def cmd_reduce(args, report: RunReport) -> None:
    pair, p = serialize.instance_from_json(serialize.load_json(args.instance))
    if not isinstance(pair, SizeNormPair):
        raise serialize.InstanceError("reduce expects a size-norm pair instance")
    out = transforms.reduce_to_bad_form(pair, p)
    ok = leq(pair, p, out.q)
    report.checked = 1
    report.passed = int(ok)
    report.failed = int(not ok)
    if not ok:
        report.counterexample = "reduced condition does not strengthen the input"
    doc = {
        "q": serialize.instance_to_json(pair, out.q),
        "boundaries": list(out.boundaries),
        "q_star": serialize.instance_to_json(out.spair, out.q_star),
    }
    if args.condition_out:
        serialize.dump_json(doc, args.condition_out)
    report.extra["boundaries"] = list(out.boundaries)


def cmd_build_split(args, report: RunReport) -> None:
    if args.sizes:
        sizes = _ints(args.sizes)
    else:
        sizes = [args.uniform] * args.horizon
    maps = halving.build_split(sizes, lambda n: args.k0 + args.kstep * n, args.levels)
    serialize.dump_json(serialize.splitmaps_to_json(maps), args.maps_out)
    report.checked = report.passed = len(maps.bounds)
    report.extra["bounds"] = list(maps.bounds)


def cmd_split(args, report: RunReport) -> None:
    maps = serialize.splitmaps_from_json(serialize.load_json(args.maps))
    pair, p = serialize.instance_from_json(serialize.load_json(args.instance))
    p0, p1 = halving.split_condition(p, maps)
    merged = halving.merge_conditions(p0, p1, maps)
    ok = merged == p
    report.checked = 1
    report.passed = int(ok)
    report.failed = int(not ok)
    if not ok:
        report.counterexample = "merge of the split differs from the input"
    doc = {
        "factor0": serialize.condition_to_json(p0),
        "factor1": serialize.condition_to_json(p1),
    }
    if args.condition_out:
        serialize.dump_json(doc, args.condition_out)


def cmd_check_hypothesis(args, report: RunReport) -> None:
    maps = serialize.splitmaps_from_json(serialize.load_json(args.maps))
    levels = maps.factor_levels(args.factor)
    sizes = maps.factor_sizes(args.factor)
    out = halving.check_product_bound(
        sizes, levels, serialize.fraction_from_json(args.eps_scale)
    )
    report.checked = len(out.rows)
    report.failed = sum(not r.ok for r in out.rows)
    report.passed = report.checked - report.failed
    bad = out.first_failure()
    if bad is not None:
        report.counterexample = (
            f"level {bad.level}: stem product {bad.product} exceeds 1/eps "
            f"for eps={bad.epsilon}"
        )
    report.extra["levels"] = [
        {"level": r.level, "stem": r.stem_len, "product": r.product,
         "epsilon": str(r.epsilon), "ok": r.ok}
        for r in out.rows
    ]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crlab",
        description="desk-scale verification of creature-forcing combinatorics",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for all sampling")
    parser.add_argument("--budget", type=int, default=1_000_000,
                        help="cap on every exhaustive enumeration")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--timings", action="store_true",
                        help="record elapsed time (breaks byte-identical reports)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-coloring",
                       help="sound witnesses for every cell family (modular-sum coloring)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sample", action="store_true",
                   help="sample families instead of refusing above the budget")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(run=cmd_verify_coloring)

    p = sub.add_parser("verify-norms", help="norm-drop identities on a grid")
    p.add_argument("--clause", type=int, default=0, choices=[0, 1, 2, 3, 4],
                   help="0 checks all four")
    p.add_argument("--grid", default="default")
    p.add_argument("--lams", default="")
    p.add_argument("--drops", default="")
    p.add_argument("--ks", default="")
    p.add_argument("--csv")
    p.add_argument("--figures")
    p.set_defaults(run=cmd_verify_norms)

    p = sub.add_parser("verify-halving", help="epsilon-half contract sweep")
    p.add_argument("--lam-range", default="18,1024")
    p.add_argument("--k-range", default="1,16")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--csv")
    p.add_argument("--figures")
    p.set_defaults(run=cmd_verify_halving)

    p = sub.add_parser("verify-goodpair", help="good-pair laws, exhaustively")
    p.add_argument("--pair", required=True, help="pair JSON file")
    p.add_argument("--slots", default="", help="start slots, comma separated")
    p.set_defaults(run=cmd_verify_goodpair)

    p = sub.add_parser("build-badness", help="construct a badness witness")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--growth-base", type=int, default=2)
    p.add_argument("--level-offset", type=int, default=0)
    p.add_argument("--witness-out", required=True)
    p.set_defaults(run=cmd_build_badness)

    p = sub.add_parser("encode", help="encode a bit string into a condition")
    p.add_argument("--witness", required=True)
    p.add_argument("--bits", required=True)
    p.add_argument("--condition", help="instance file; defaults to the full condition")
    p.add_argument("--condition-out", required=True)
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("decode", help="decode bits from branches through a condition")
    p.add_argument("--witness", required=True)
    p.add_argument("--condition", required=True)
    p.add_argument("--name-seed", required=True, metavar="LEVEL,LABEL")
    p.add_argument("--horizon", type=int, default=0, help="0 means all levels")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(run=cmd_decode)

    p = sub.add_parser("summarize", help="group a local condition into block sums")
    p.add_argument("--instance", required=True)
    p.add_argument("--blocks", required=True)
    p.add_argument("--condition-out", required=True)
    p.set_defaults(run=cmd_summarize)

    p = sub.add_parser("reduce", help="reduce to uniform-per-block bad form")
    p.add_argument("--instance", required=True)
    p.add_argument("--condition-out")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("build-split", help="interval split of the coordinate axis")
    p.add_argument("--sizes", default="", help="slot sizes, comma separated")
    p.add_argument("--uniform", type=int, default=2)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--k0", type=int, default=2)
    p.add_argument("--kstep", type=int, default=1)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--maps-out", required=True)
    p.set_defaults(run=cmd_build_split)

    p = sub.add_parser("split", help="split a condition along the factor maps")
    p.add_argument("--instance", required=True)
    p.add_argument("--maps", required=True)
    p.add_argument("--condition-out")
    p.set_defaults(run=cmd_split)

    p = sub.add_parser("check-hypothesis",
                       help="stem product bound per level, exact arithmetic")
    p.add_argument("--maps", required=True)
    p.add_argument("--factor", type=int, default=0, choices=[0, 1])
    p.add_argument("--eps-scale", default="1",
                   help="rational multiplier on epsilon, e.g. 2 to probe failure")
    p.set_defaults(run=cmd_check_hypothesis)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(
        command=args.command,
        params={
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("run", "command", "out", "timings") and v is not None
        },
    )
    started = time.monotonic()
    try:
        args.run(args, report)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (serialize.InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.timings:
        report.elapsed_ms = int((time.monotonic() - started) * 1000)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
