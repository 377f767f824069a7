"""Command-line entry points.

Exit codes: 0 ok, 1 node limit hit with nothing found, 2 infeasible
instance, 3 input error, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from degvrp.degradation import ObjectiveSpec, Variant
from degvrp.instance_io import DocumentError, gen_reference, parse_document, serialize_document
from degvrp.report import base_cost_for, dumps_report, make_block, render_table, report_document
from degvrp.solver import InfeasibleInstanceError, NodeLimitError, SolverConfig, solve, solve_bruteforce

EXIT_OK = 0
EXIT_LIMIT = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha_list(text: str) -> list[float]:
    try:
        return [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="degvrp", description="Exact EV fleet routing with a depth-of-discharge penalty.")
    sub = parser.add_subparsers(dest="command", required=True)

    def solve_flags(p, alpha_flag: bool):
        p.add_argument("--instance", required=True, type=Path, help="instance document (JSON)")
        p.add_argument("--variant", choices=[v.value for v in Variant], help="objective variant")
        if alpha_flag:
            p.add_argument("--alpha", type=float, help="penalty weight")
        p.add_argument("--json", action="store_true", help="emit the report as JSON")
        p.add_argument("--node-limit", type=int, help="abort branch-and-bound after N nodes")
        p.add_argument("--table1-style", action="store_true", help="print cycles as '<' upper bounds")

    solve_flags(sub.add_parser("solve", help="branch-and-bound solve"), True)
    solve_flags(sub.add_parser("oracle", help="exhaustive solve"), True)
    p = sub.add_parser("sweep", help="solve for several alpha values")
    solve_flags(p, False)
    p.add_argument("--alphas", required=True, type=_alpha_list, help="comma-separated, strictly increasing")
    p.add_argument("--exhaustive", action="store_true", help="use the exhaustive oracle")
    p = sub.add_parser("validate", help="check an instance document")
    p.add_argument("--instance", required=True, type=Path)
    p = sub.add_parser("gen-reference", help="write the bundled reference instance")
    p.add_argument("--output", type=Path, help="file to write (default stdout)")
    return parser


def _load(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return parse_document(text)


def _objective(args, doc) -> ObjectiveSpec:
    default = doc.default_objective or ObjectiveSpec()
    variant = args.variant or default.variant
    alpha = args.alpha if getattr(args, "alpha", None) is not None else default.alpha
    try:
        return ObjectiveSpec(variant, alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _solvers(args):
    if args.node_limit is not None and args.node_limit < 1:
        raise UsageError("--node-limit must be a positive integer")
    cfg = SolverConfig(node_limit=args.node_limit)
    exhaustive = args.command == "oracle" or getattr(args, "exhaustive", False)
    if exhaustive:
        return solve_bruteforce
    return lambda inst, spec: solve(inst, spec, cfg)


def _emit(args, inst, results, base_cost, out) -> None:
    blocks = [make_block(inst, r, base_cost) for r in results]
    if args.json:
        out.write(dumps_report(report_document(inst, blocks, base_cost, args.command)))
    else:
        out.write(render_table(inst, blocks, args.table1_style))


def cmd_solve(args, out) -> int:
    doc = _load(args.instance)
    spec = _objective(args, doc)
    run = _solvers(args)
    inst = doc.instance
    result = run(inst, spec)
    base_cost = base_cost_for(inst, run)
    _emit(args, inst, [result], base_cost, out)
    return EXIT_OK


cmd_oracle = cmd_solve


def cmd_sweep(args, out) -> int:
    doc = _load(args.instance)
    alphas = args.alphas
    if not alphas or any(a < 0 for a in alphas) or any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise UsageError(f"--alphas must be nonempty, >= 0 and strictly increasing, got {alphas}")
    variant = Variant.parse(args.variant) if args.variant else (doc.default_objective or ObjectiveSpec()).variant
    run = _solvers(args)
    inst = doc.instance
    results = [run(inst, ObjectiveSpec(variant, a)) for a in alphas]
    base_cost = base_cost_for(inst, run)
    _emit(args, inst, results, base_cost, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    doc = _load(args.instance)
    inst = doc.instance
    out.write(f"ok: {inst.node_count} nodes, {inst.n_vehicles} vehicles\n")
    return EXIT_OK


def cmd_gen_reference(args, out) -> int:
    text = serialize_document(gen_reference())
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "gen-reference": cmd_gen_reference,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"degvrp: error: {exc}\n")
        return EXIT_USAGE
    except DocumentError as exc:
        err.write(f"degvrp: invalid instance: {exc}\n")
        return EXIT_INPUT
    except InfeasibleInstanceError as exc:
        err.write(f"degvrp: infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except NodeLimitError as exc:
        err.write(f"degvrp: {exc}\n")
        return EXIT_LIMIT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
