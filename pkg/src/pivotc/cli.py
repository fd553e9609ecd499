"""Command-line driver: frontend -> pass pipeline -> backend, plus an
oracle-backed equivalence checker and an expression evaluator.

Subcommands:
  compile -m M [-d D] --target clp|flat|pivot [--passes ...]
          [--alldiff MODE] [--unroll] -o OUT [--verify-against FILE]
  check   -m M [-d D] [--passes ...] [--alldiff MODE]
  eval    -e EXPR

Exit codes: 0 success, 1 diagnostics, 2 usage error, 3 oracle limit.
Pass reports go to stderr; payload only ever goes to the output file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import ir
from .clp import ClpEmitOptions, emit_clp
from .errors import (
    CompileError,
    IncompleteSolutionsError,
    ParseError,
    SearchSpaceError,
)
from .flat import emit_flat, lower_to_flat
from .oracle import compare_solutions, enumerate_solutions
from .parser import SourceUnit, parse, parse_expression
from .passes import ALLDIFF_MODES, PASS_IDS, PassConfig, _Folder, run_pipeline
from .printer import print_expression, print_pivot
from .sema import resolve, validate

DEFAULT_PASSES = ("objectFlatten", "enumRemove", "foldConstants")
FLAT_EXTRA_PASSES = ("alldiffRewrite", "loopUnroll")

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2
EXIT_ORACLE_LIMIT = 3


@dataclass(frozen=True)
class RunSpec:
    model_path: str
    data_path: str | None
    target: str  # "clp" | "flat" | "pivot"
    pass_config: PassConfig
    out_path: str | None = None
    verify_against: str | None = None


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_DIAGNOSTICS


def _load_unit(model_path: str, data_path: str | None) -> SourceUnit:
    model_text = Path(model_path).read_text(encoding="utf-8")
    data_text = None
    if data_path is not None:
        data_text = Path(data_path).read_text(encoding="utf-8")
    return SourceUnit(model_text, data_text, model_path, data_path or "<data>")


def _front(model_path: str, data_path: str | None) -> ir.Model:
    """Parse, resolve and validate; raises ParseError/CompileError."""
    unit = _load_unit(model_path, data_path)
    model = parse(unit)
    model = resolve(model)
    diags = validate(model)
    if diags:
        raise ParseError(diags)
    return model


def _pass_config(args, target: str | None) -> PassConfig:
    mode = args.alldiff or "disequalities"
    if args.passes:
        passes = tuple(p.strip() for p in args.passes.split(",") if p.strip())
    else:
        passes = DEFAULT_PASSES
        if target == "flat":
            passes = passes + FLAT_EXTRA_PASSES
        else:
            if args.alldiff:
                passes = passes + ("alldiffRewrite",)
            if getattr(args, "unroll", False):
                passes = passes + ("loopUnroll",)
    if getattr(args, "unroll", False) and "loopUnroll" not in passes:
        passes = passes + ("loopUnroll",)
    return PassConfig(passes, mode)


def cmd_compile(args) -> int:
    try:
        cfg = _pass_config(args, args.target)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.target == "flat" and not cfg.unroll:
        print(
            "usage error: --target flat requires loop unrolling "
            "(add --unroll or include loopUnroll in --passes)",
            file=sys.stderr,
        )
        return EXIT_USAGE
    spec = RunSpec(args.model, args.data, args.target, cfg, args.output, args.verify_against)
    try:
        model = _front(spec.model_path, spec.data_path)
        model, reports = run_pipeline(model, spec.pass_config)
        for r in reports:
            print(str(r), file=sys.stderr)
        if spec.target == "clp":
            payload = emit_clp(model, ClpEmitOptions(label_sets=not args.no_label))
        elif spec.target == "flat":
            payload = emit_flat(lower_to_flat(model))
        else:
            payload = print_pivot(model)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except OSError as exc:
        return _fail(str(exc))
    except CompileError as exc:
        return _fail(str(exc))
    try:
        with open(spec.out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    except OSError as exc:
        return _fail(str(exc))
    if spec.verify_against is not None:
        try:
            expected = Path(spec.verify_against).read_text(encoding="utf-8")
        except OSError as exc:
            return _fail(str(exc))
        if expected != payload:
            return _fail(f"output differs from {spec.verify_against}")
    return EXIT_OK


def _flat_solutions(model: ir.Model, cfg: PassConfig):
    processed, _reports = run_pipeline(model, cfg)
    program = lower_to_flat(processed)
    return program, enumerate_solutions(program)


def cmd_check(args) -> int:
    try:
        cfg = _pass_config(args, None)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    base_cfg = PassConfig(DEFAULT_PASSES + FLAT_EXTRA_PASSES, "disequalities")
    passes = cfg.passes
    for needed in FLAT_EXTRA_PASSES:  # the oracle needs fully lowered models
        if needed not in passes:
            passes = passes + (needed,)
    full_cfg = PassConfig(passes, cfg.alldiff_mode)
    try:
        model = _front(args.model, args.data)
        base_prog, base_sols = _flat_solutions(model, base_cfg)
        _full_prog, full_sols = _flat_solutions(model, full_cfg)
        projection = [v.name for v in base_prog.vars]
        relation = compare_solutions(full_sols, base_sols, projection)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except (SearchSpaceError, IncompleteSolutionsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE_LIMIT
    except OSError as exc:
        return _fail(str(exc))
    except CompileError as exc:
        return _fail(str(exc))
    if not base_sols.complete or not full_sols.complete:
        print("error: oracle hit an enumeration limit", file=sys.stderr)
        return EXIT_ORACLE_LIMIT
    verdict = {
        "equal": "EQUAL",
        "superset": "SUPERSET",
        "subset": "SUBSET",
        "incomparable": "DIFFER",
    }[relation]
    print(f"{verdict} baseline={len(base_sols)} transformed={len(full_sols)}")
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        expr = parse_expression(args.expr)
        folded = _Folder({}).fold(expr)
        print(print_expression(folded))
    except ParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except CompileError as exc:
        return _fail(str(exc))
    return EXIT_OK


def _build_argparser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="pivotc",
        description="constraint-model compiler (object-oriented source -> clp/flat)",
    )
    sub = top.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="run the transformation chain and emit a target")
    c.add_argument("-m", "--model", required=True, help="model file (.som)")
    c.add_argument("-d", "--data", help="data file (.dat)")
    c.add_argument("--target", required=True, choices=("clp", "flat", "pivot"))
    c.add_argument("--passes", help="comma-separated pass list: " + ",".join(PASS_IDS))
    c.add_argument("--alldiff", choices=ALLDIFF_MODES, help="alldifferent rewrite mode")
    c.add_argument("--unroll", action="store_true", help="append loopUnroll")
    c.add_argument("--no-label", action="store_true", help="omit the labeling goal (clp)")
    c.add_argument("-o", "--output", required=True, help="output path")
    c.add_argument("--verify-against", help="fail unless the output matches this file")
    c.set_defaults(func=cmd_compile)

    k = sub.add_parser("check", help="oracle-compare the transformed model with a baseline")
    k.add_argument("-m", "--model", required=True)
    k.add_argument("-d", "--data")
    k.add_argument("--passes")
    k.add_argument("--alldiff", choices=ALLDIFF_MODES)
    k.set_defaults(func=cmd_check)

    e = sub.add_parser("eval", help="parse and fold a standalone expression")
    e.add_argument("-e", "--expr", required=True)
    e.set_defaults(func=cmd_eval)
    return top


def main(argv=None) -> int:
    parser = _build_argparser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    return args.func(args)


def entry():  # console_scripts hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
