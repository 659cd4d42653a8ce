"""Command line front end.

Exit codes are uniform across subcommands:

* 0: the command ran to completion, including negative answers such as
  "no homomorphism" or "not contained"; those are results, not failures.
* 1: a domain failure: no fitting query exists, a duality check found a
  counterexample, or a construction reported an internal contradiction.
* 2: unusable input: unknown flags, unreadable files, parse errors, or
  examples of the wrong shape for the subcommand.
* 3: the homomorphism search node budget ran out (see --node-budget and
  the CQFIT_NODE_BUDGET environment variable).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import core, duality, hom, pac, product
from .core import CqfitError, ParseError, SchemaError

__all__ = ["main", "build_parser"]


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_out(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_hom(args: argparse.Namespace) -> int:
    src = core.parse_example(_read(args.source))
    dst = core.parse_example(_read(args.target))
    witness = hom.find_hom(src, dst, args.node_budget)
    if witness is None:
        print("none")
    else:
        for k in sorted(witness):
            print(f"{k} -> {witness[k]}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    q = core.parse_cq(_read(args.query))
    inst = core.parse_instance(_read(args.instance))
    answers = hom.evaluate(q, inst, args.node_budget)
    if q.arity == 0:
        print("true" if answers else "false")
    else:
        for tup in sorted(answers):
            print(",".join(tup))
    return 0


def _cmd_contained(args: argparse.Namespace) -> int:
    q1 = core.parse_cq(_read(args.query1))
    q2 = core.parse_cq(_read(args.query2))
    print("yes" if hom.contained(q1, q2, args.node_budget) else "no")
    return 0


def _cmd_product(args: argparse.Namespace) -> int:
    e1 = core.parse_example(_read(args.left))
    e2 = core.parse_example(_read(args.right))
    out = product.product_example(e1, e2, args.max_facts)
    _write_out(core.serialize_example(out), args.output)
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    collection = core.parse_collection(_read(args.collection))
    try:
        if args.method == "most-specific":
            q = product.most_specific_fitting(
                collection, args.max_facts, args.node_budget
            )
        else:
            q = pac.fit_smallest_path_cq(
                collection, max_atoms=args.max_atoms, node_budget=args.node_budget
            )
    except product.NoFittingError as exc:
        print(f"no fitting query: {exc}", file=sys.stderr)
        return 1
    except CqfitError as exc:
        if isinstance(
            exc, (hom.BudgetExceeded, SchemaError, product.ProductSizeError)
        ):
            raise
        print(f"no fitting query: {exc}", file=sys.stderr)
        return 1
    _write_out(core.serialize_cq(q), args.output)
    return 0


def _paths(args: argparse.Namespace) -> tuple[core.PathExample, core.PathExample]:
    src = core.parse_example(_read(args.source))
    anchor = core.parse_example(_read(args.anchor))
    return core.as_path_example(src), core.as_path_example(anchor)


def _cmd_dual(args: argparse.Namespace) -> int:
    source, anchor = _paths(args)
    pd = duality.build_path_dual(source, anchor, args.node_budget)
    if not pd.constructed:
        print("source does not map into anchor; the anchor is the dual", file=sys.stderr)
    _write_out(core.serialize_example(pd.dual), args.output)
    return 0


def _cmd_verify_duality(args: argparse.Namespace) -> int:
    source, anchor = _paths(args)
    pd = duality.build_path_dual(source, anchor, args.node_budget)
    rd = pd.as_duality()
    if args.exhaustive:
        result = duality.verify_duality_exhaustive(
            rd, args.max_values, args.node_budget
        )
    else:
        probes = duality.generate_probes(rd.anchor, args.probes, args.seed)
        result = duality.verify_relative_duality(rd, probes, args.node_budget)
    print(f"checked={result.checked} skipped={result.skipped} failures={len(result.failures)}")
    if result.failures:
        probe, into_dual, from_source = result.failures[0]
        print("counterexample:", file=sys.stderr)
        print(core.serialize_example(probe), end="", file=sys.stderr)
        print(
            f"maps into a dual: {into_dual}; admits a source: {from_source}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    report = pac.run_experiment(
        args.scenario,
        n=args.n,
        m=args.m,
        trials=args.trials,
        epsilon=args.epsilon,
        delta=args.delta,
        seed=args.seed,
        jobs=args.jobs,
        base=args.on,
    )
    if args.json:
        Path(args.json).write_text(report.to_json())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    if args.plot:
        from . import plots

        plots.render_report_figure(report, args.plot)
    if not args.json:
        sys.stdout.write(report.to_json())
    agg = report.aggregates()
    print(
        f"trials={report.trials} error>eps in {agg['trials_error_above_epsilon']} "
        f"trials, mean error {agg['mean_error']}",
        file=sys.stderr,
    )
    return 0


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from exc


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--node-budget",
        type=int,
        default=None,
        metavar="N",
        help="search node budget (default: CQFIT_NODE_BUDGET or 10^7)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqfit",
        description="Fit, compare, and stress-test conjunctive queries on labelled examples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom", help="find a homomorphism between two examples")
    p.add_argument("source")
    p.add_argument("target")
    _add_budget(p)
    p.set_defaults(func=_cmd_hom)

    p = sub.add_parser("eval", help="evaluate a query on an instance")
    p.add_argument("query")
    p.add_argument("instance")
    _add_budget(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("contained", help="decide query containment (first in second)")
    p.add_argument("query1")
    p.add_argument("query2")
    _add_budget(p)
    p.set_defaults(func=_cmd_contained)

    p = sub.add_parser("product", help="direct product of two examples")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--max-facts", type=int, default=product.DEFAULT_MAX_FACTS)
    p.set_defaults(func=_cmd_product)

    p = sub.add_parser("fit", help="fit a query to a labelled collection")
    p.add_argument("collection")
    p.add_argument(
        "--method",
        choices=("most-specific", "smallest-path"),
        default="most-specific",
    )
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--max-facts", type=int, default=product.DEFAULT_MAX_FACTS)
    p.add_argument("--max-atoms", type=int, default=12)
    _add_budget(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("dual", help="dual of a path example relative to an anchor path")
    p.add_argument("source")
    p.add_argument("anchor")
    p.add_argument("-o", "--output", default=None)
    _add_budget(p)
    p.set_defaults(func=_cmd_dual)

    p = sub.add_parser("verify-duality", help="probe or exhaustively check a built duality")
    p.add_argument("source")
    p.add_argument("anchor")
    p.add_argument("--probes", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--max-values", type=int, default=3)
    _add_budget(p)
    p.set_defaults(func=_cmd_verify_duality)

    p = sub.add_parser("experiment", help="run a sample-efficiency experiment")
    p.add_argument("scenario", choices=pac.SCENARIO_NAMES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--epsilon", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--delta", type=_fraction, default=Fraction(1, 20))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--on", choices=("thm4", "thm5"), default="thm4",
                   help="which scenario the baseline fitter runs on")
    p.add_argument("--json", default=None, metavar="PATH")
    p.add_argument("--csv", default=None, metavar="PATH")
    p.add_argument("--plot", default=None, metavar="PATH")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except hom.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CqfitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
