"""Command-line front end.

Subcommands:

    bounds     evaluate a bound family on a count table
    derive     re-derive sharp symbolic bounds from the polytope
    simulate   run the two-family comparison experiment, write CSV
    validate   run the Monte-Carlo oracle suites
    ci         bootstrap confidence intervals for bound endpoints

Exit codes: 0 success, 1 usage or data error, 2 validation violation,
3 enumeration budget exceeded.  All output is deterministic given the
flags; numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .bootstrap import bootstrap_ci
from .closed_forms import BoundFamily, family_bounds
from .dists import (
    Estimand,
    EstimandKind,
    dist_from_counts,
    mediation_point_estimate,
    read_counts_csv,
    sde,
    sie,
    te,
)
from .errors import MedboundsError, ResourceExhausted, UndefinedConditional
from .oracle import (
    containment_suite,
    figure_s1_experiment,
    figure_s1_orderings,
    sharpness_suite,
    validity_suite,
    write_figure_s1_csv,
)
from .polytope import (
    DEFAULT_BUDGET,
    build_system,
    coupling_bounds,
    numeric_bounds,
    symbolic_bounds,
)

_FAMILY_NAMES = {
    BoundFamily.SJOLANDER_SDE: "sjolander-sde",
    BoundFamily.SJOLANDER_SIE: "sjolander-sie",
    BoundFamily.RR_FRECHET_NDE: "rr-frechet-nde",
    BoundFamily.GABRIEL_SDE: "gabriel-sde",
    BoundFamily.GABRIEL_SIE: "gabriel-sie",
    BoundFamily.FRECHET_NDE000: "frechet-nde000",
    BoundFamily.TCHETGEN_NDE: "tchetgen-nde",
}

_AUTO_FAMILY = {
    (1, "sde"): BoundFamily.SJOLANDER_SDE,
    (1, "sie"): BoundFamily.SJOLANDER_SIE,
    (1, "nde-frechet"): BoundFamily.RR_FRECHET_NDE,
    (2, "sde"): BoundFamily.GABRIEL_SDE,
    (2, "sie"): BoundFamily.GABRIEL_SIE,
    (2, "nde-frechet"): BoundFamily.FRECHET_NDE000,
    (2, "nde-tchetgen"): BoundFamily.TCHETGEN_NDE,
}


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _jnum(x) -> float:
    return float(_fmt(x))


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with code 1 (argparse defaults to 2)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _estimand_label(
    setting: int, estimand: str, arm: int, mediator_arm: int
) -> str:
    if estimand == "sde":
        return f"SDE({arm})"
    if estimand == "sie":
        return f"SIE({arm})"
    if estimand == "nde-frechet":
        if setting == 1:
            return f"NDE({arm})"
        return f"NDE({arm},{arm},{arm})"
    return f"NDE(a_y={arm},a_m={mediator_arm})"


def _provenance(family: BoundFamily, arm: int, mediator_arm: int) -> str:
    """Arm variants the sources print verbatim versus mirrored ones."""
    if family in (
        BoundFamily.SJOLANDER_SDE,
        BoundFamily.SJOLANDER_SIE,
        BoundFamily.GABRIEL_SDE,
        BoundFamily.GABRIEL_SIE,
    ):
        return "paper-form"
    if family in (BoundFamily.RR_FRECHET_NDE, BoundFamily.FRECHET_NDE000):
        return "paper-form" if arm == 0 else "arm-symmetry"
    return "paper-form" if (arm, mediator_arm) == (1, 0) else "arm-symmetry"


def _point_estimate(dist, setting: int, estimand: str, arm: int):
    kind = (
        EstimandKind.MEDIATION_POINT_NIE
        if estimand == "sie"
        else EstimandKind.MEDIATION_POINT_NDE
    )
    try:
        return mediation_point_estimate(
            dist, Estimand(kind=kind, setting=setting, arm=arm)
        )
    except UndefinedConditional:
        return None


def cmd_bounds(args) -> int:
    table = read_counts_csv(args.counts, args.setting)
    dist = dist_from_counts(table)
    arm = args.arm
    mediator_arm = args.mediator_arm
    if mediator_arm is None:
        mediator_arm = 1 - arm
    key = (args.setting, args.estimand)
    if key not in _AUTO_FAMILY:
        raise MedboundsError(
            f"estimand {args.estimand!r} is not available in setting {args.setting}"
        )
    closed_family = _AUTO_FAMILY[key]

    if args.family == "lp":
        iv = _lp_bounds(dist, args.setting, args.estimand, arm, mediator_arm)
        family_name = "lp"
        provenance = "lp"
        assumptions = (
            "randomization"
            if args.estimand in ("sde", "sie")
            else "randomization+swi"
        )
    else:
        iv = family_bounds(
            dist,
            closed_family,
            arm,
            mediator_arm=(
                mediator_arm if closed_family is BoundFamily.TCHETGEN_NDE else None
            ),
            widen=args.widen_undefined,
        )
        family_name = _FAMILY_NAMES[closed_family]
        provenance = _provenance(closed_family, arm, mediator_arm)
        assumptions = closed_family.assumptions

    point = _point_estimate(dist, args.setting, args.estimand, arm)
    label = _estimand_label(args.setting, args.estimand, arm, mediator_arm)
    report = {
        "schema_version": "1",
        "setting": args.setting,
        "estimand": label,
        "family": family_name,
        "assumptions": assumptions,
        "point": None if point is None else _jnum(point),
        "lower": _jnum(iv.lower),
        "upper": _jnum(iv.upper),
        "provenance": provenance,
    }
    if args.text:
        print(f"estimand:    {label}")
        print(f"family:      {family_name}")
        print(f"assumptions: {assumptions}")
        print(f"bounds:      [{_fmt(iv.lower)}, {_fmt(iv.upper)}]")
        print(f"point:       {'undefined' if point is None else _fmt(point)}")
        print(f"provenance:  {provenance}")
    else:
        print(json.dumps(report))
    return 0


def _lp_bounds(dist, setting: int, estimand: str, arm: int, mediator_arm: int):
    if estimand == "sde":
        return numeric_bounds(build_system(setting, sde(setting, arm)), dist)
    if estimand == "sie":
        return numeric_bounds(build_system(setting, sie(setting, arm)), dist)
    if estimand == "nde-frechet":
        est = Estimand(kind=EstimandKind.NDE_FRECHET, setting=setting, arm=arm)
        return coupling_bounds(dist, est)
    est = Estimand(
        kind=EstimandKind.NDE_TCHETGEN,
        setting=setting,
        arm=arm,
        mediator_arm=mediator_arm,
    )
    return coupling_bounds(dist, est)


def cmd_derive(args) -> int:
    if args.estimand == "te":
        estimand = te(args.setting)
    elif args.estimand == "sde":
        estimand = sde(args.setting, args.arm)
    else:
        estimand = sie(args.setting, args.arm)
    system = build_system(args.setting, estimand)
    try:
        expr = symbolic_bounds(system, budget=args.budget)
    except ResourceExhausted as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        for key, val in sorted(exc.progress.items()):
            print(f"  {key}: {val}", file=sys.stderr)
        return 3
    identified = (
        len(expr.lower_terms) == 1
        and len(expr.upper_terms) == 1
        and expr.lower_terms[0] == expr.upper_terms[0]
    )
    if args.format == "latex":
        if identified:
            print(
                r"\mathrm{" + expr.estimand_label + r"} = "
                + expr.lower_terms[0].format_latex()
            )
        else:
            print(expr.format_latex())
    else:
        if identified:
            print(f"{expr.estimand_label} = {expr.lower_terms[0].format_text()}")
        else:
            print(expr.format_text())
        print(
            f"terms: {len(expr.lower_terms)} lower, {len(expr.upper_terms)} upper"
        )
    return 0


def cmd_simulate(args) -> int:
    records = figure_s1_experiment(args.n, args.seed)
    write_figure_s1_csv(records, args.out)
    counts = figure_s1_orderings(records)
    print(f"records written: {len(records)} -> {args.out}")
    for key in sorted(counts):
        print(f"{key}: {counts[key]}")
    return 0


def cmd_validate(args) -> int:
    suites = []
    if args.suite in ("validity", "all"):
        suites.append(validity_suite(args.setting, args.n, args.seed))
    if args.suite in ("sharpness", "all"):
        suites.append(sharpness_suite(args.setting, args.n, args.seed))
    if args.suite in ("containment", "all"):
        suites.append(containment_suite(args.setting, args.n, args.seed))
    failed = False
    for report in suites:
        print(report.summary())
        for v in report.violations:
            failed = True
            print(
                f"  violation: replicate={v.replicate} seed={v.seed} "
                f"family={v.family} estimand={v.estimand} "
                f"interval=[{_fmt(v.lower)}, {_fmt(v.upper)}] "
                f"truth={_fmt(v.truth)} ({v.detail})"
            )
    return 2 if failed else 0


def cmd_ci(args) -> int:
    table = read_counts_csv(args.counts, args.setting)
    key = (args.setting, args.estimand)
    if key not in _AUTO_FAMILY:
        raise MedboundsError(
            f"estimand {args.estimand!r} is not available in setting {args.setting}"
        )
    family = _AUTO_FAMILY[key]
    mediator_arm = None
    if family is BoundFamily.TCHETGEN_NDE:
        mediator_arm = (
            args.mediator_arm if args.mediator_arm is not None else 1 - args.arm
        )
    report = bootstrap_ci(
        table,
        family,
        args.arm,
        mediator_arm=mediator_arm,
        B=args.replicates,
        alpha=args.alpha,
        seed=args.seed,
    )
    out = {
        "schema_version": "1",
        "setting": args.setting,
        "estimand": report.estimand,
        "family": _FAMILY_NAMES[family],
        "assumptions": family.assumptions,
        "point": [_jnum(report.point.lower), _jnum(report.point.upper)],
        "lower_ci": [_jnum(x) for x in report.lower_ci],
        "upper_ci": [_jnum(x) for x in report.upper_ci],
        "replicates": report.replicates,
        "alpha": _jnum(report.alpha),
        "seed": report.seed,
        "n_undefined": report.n_undefined,
    }
    print(json.dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="medbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_counts_flags(p):
        p.add_argument("--setting", type=int, choices=[1, 2], required=True)
        p.add_argument("--counts", required=True, help="count CSV path")
        p.add_argument(
            "--estimand",
            choices=["sde", "sie", "nde-frechet", "nde-tchetgen"],
            required=True,
        )
        p.add_argument("--arm", type=int, choices=[0, 1], required=True)
        p.add_argument("--mediator-arm", type=int, choices=[0, 1], default=None)

    p = sub.add_parser("bounds", parents=[], help="evaluate a bound family")
    add_counts_flags(p)
    p.add_argument("--family", choices=["auto", "lp"], default="auto")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true", default=True)
    mode.add_argument("--text", action="store_true", default=False)
    p.add_argument(
        "--widen-undefined",
        action="store_true",
        help="widen over empty conditioning cells instead of erroring",
    )
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("derive", help="re-derive sharp symbolic bounds")
    p.add_argument("--setting", type=int, choices=[1, 2], required=True)
    p.add_argument("--estimand", choices=["sde", "sie", "te"], required=True)
    p.add_argument("--arm", type=int, choices=[0, 1], default=0)
    p.add_argument("--format", choices=["text", "latex"], default="text")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("simulate", help="two-family comparison experiment")
    p.add_argument("--setting", type=int, choices=[2], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="Monte-Carlo oracle suites")
    p.add_argument("--setting", type=int, choices=[1, 2], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--suite",
        choices=["validity", "sharpness", "containment", "all"],
        default="all",
    )
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ci", help="bootstrap confidence intervals")
    add_counts_flags(p)
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ci)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceExhausted as exc:
        print(f"medbounds: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (MedboundsError, OSError, ValueError) as exc:
        print(f"medbounds: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
