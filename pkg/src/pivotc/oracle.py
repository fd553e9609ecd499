"""Brute-force enumeration over flat programs.

This is the semantic ground truth used to check that rewriting passes
preserve solution sets, so it stays deliberately naive: plain backtracking
in declaration order, no propagation.  The only liberties taken are that
constraints are checked as soon as their last variable is assigned (eager
filtering) and that each constraint is compiled once into a Python closure.

Evaluation is exact: integer arithmetic is unbounded, ``/`` evaluates in
rationals, and set values are frozensets over the declared universe.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import ir
from .errors import (
    CompileError,
    Diagnostic,
    DivisionByZeroError,
    IncompleteSolutionsError,
    ParseError,
    SearchSpaceError,
)
from .flat import FlatProgram, FlatVar
from .parser import parse_expression

MAX_SET_UNIVERSE = 12
MAX_SEARCH_SPACE = 2 ** 40
DEFAULT_MAX_SOLUTIONS = 10 ** 6
DEFAULT_MAX_NODES = 10 ** 7


@dataclass(frozen=True)
class Assignment:
    values: dict = field(default_factory=dict)

    def __getitem__(self, name: str):
        return self.values[name]

    def project(self, names) -> tuple:
        return tuple(self.values[n] for n in names)


@dataclass(frozen=True)
class SolutionSet:
    solutions: tuple[Assignment, ...] = ()
    complete: bool = True

    def __len__(self) -> int:
        return len(self.solutions)


# --------------------------------------------------------------------------
# Reading the flat format back (inverse of flat.emit_flat)

_VAR_INT_RE = re.compile(r"^var int ([A-Za-z_][A-Za-z0-9_]*) in (-?\d+)\.\.(-?\d+);$")
_VAR_BOOL_RE = re.compile(r"^var bool ([A-Za-z_][A-Za-z0-9_]*);$")
_VAR_SET_RE = re.compile(r"^var set of (-?\d+)\.\.(-?\d+) ([A-Za-z_][A-Za-z0-9_]*);$")
_CONSTRAINT_RE = re.compile(r"^constraint (.*);$")


def parse_flat(text: str, file: str = "<flat>") -> FlatProgram:
    """Parse the flat interchange format; errors carry line numbers."""
    vars_: list[FlatVar] = []
    names: set[str] = set()
    constraints: list[ir.Expression] = []
    diags: list[Diagnostic] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if m := _VAR_INT_RE.match(line):
            name, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
            vars_.append(FlatVar(name, "int", lo, hi))
        elif m := _VAR_BOOL_RE.match(line):
            name = m.group(1)
            vars_.append(FlatVar(name, "bool"))
        elif m := _VAR_SET_RE.match(line):
            lo, hi, name = int(m.group(1)), int(m.group(2)), m.group(3)
            vars_.append(FlatVar(name, "set", lo, hi))
        elif m := _CONSTRAINT_RE.match(line):
            try:
                expr = parse_expression(m.group(1), file=file)
            except ParseError as exc:
                first = exc.diagnostics[0]
                diags.append(Diagnostic("error", first.message, lineno, first.column, file))
                continue
            bad = next(
                (
                    n
                    for n in ir.walk_expr(expr)
                    if isinstance(n, ir.VarOccurrence) and (n.indexes or n.name not in names)
                ),
                None,
            )
            if bad is not None:
                what = "indexed reference" if bad.indexes else f"unknown variable '{bad.name}'"
                diags.append(Diagnostic("error", f"{what} in flat constraint", lineno, 1, file))
                continue
            constraints.append(expr)
            continue
        else:
            diags.append(Diagnostic("error", f"unrecognized line: {line}", lineno, 1, file))
            continue
        if vars_ and vars_[-1].name in names:
            diags.append(Diagnostic("error", f"duplicate variable '{vars_[-1].name}'", lineno, 1, file))
        elif vars_:
            names.add(vars_[-1].name)
    if diags:
        raise ParseError(diags)
    return FlatProgram(tuple(vars_), tuple(constraints))


# --------------------------------------------------------------------------
# Compiling constraints to closures over a positional value vector

def _div(a, b):
    if b == 0:
        raise DivisionByZeroError("division by zero during evaluation")
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a) / Fraction(b)


def _pow(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return float(a) ** float(b)
    if isinstance(b, Fraction):
        if b.denominator != 1:
            return float(a) ** float(b)
        b = b.numerator
    try:
        return Fraction(a) ** b if b < 0 or isinstance(a, Fraction) else a ** b
    except ZeroDivisionError:
        raise DivisionByZeroError("zero raised to a negative power") from None


def _ordered(op: str, a, b) -> bool:
    if isinstance(a, frozenset) or isinstance(b, frozenset):
        raise CompileError(f"sets cannot be compared with '{op}'")
    if op == "<=":
        return a <= b
    if op == ">=":
        return a >= b
    if op == "<":
        return a < b
    return a > b


def compile_expression(e: ir.Expression, index: dict[str, int]):
    """Build a closure evaluating e against a positional value vector."""
    if isinstance(e, ir.IntValue):
        v = e.v
        return lambda env: v
    if isinstance(e, ir.RealValue):
        v = Fraction(e.v)  # floats are binary rationals; keep them exact
        return lambda env: v
    if isinstance(e, ir.BoolValue):
        v = e.value
        return lambda env: v
    if isinstance(e, ir.IntervalValue):
        v = frozenset(range(math.ceil(e.lo), math.floor(e.hi) + 1))
        return lambda env: v
    if isinstance(e, ir.VarOccurrence):
        if e.indexes or e.name not in index:
            raise CompileError(f"'{e.name}' is not a flat variable")
        i = index[e.name]
        return lambda env: env[i]
    if isinstance(e, ir.SetValue):
        elems = [compile_expression(x, index) for x in e.elems]
        return lambda env: frozenset(int(fn(env)) for fn in elems)
    if isinstance(e, ir.SetFunction):
        arg = compile_expression(e.arg, index)
        return lambda env: len(arg(env))
    if isinstance(e, ir.SetBinaryOp):
        left = compile_expression(e.left, index)
        right = compile_expression(e.right, index)
        if e.op == "intersect":
            return lambda env: left(env) & right(env)
        if e.op == "union":
            return lambda env: left(env) | right(env)
        return lambda env: left(env) - right(env)
    if isinstance(e, ir.AlgUnaryOp):
        operand = compile_expression(e.operand, index)
        if e.op == "neg":
            return lambda env: -operand(env)
        return lambda env: +operand(env)
    if isinstance(e, ir.AlgBinaryOp):
        left = compile_expression(e.left, index)
        right = compile_expression(e.right, index)
        op = e.op
        if op == "+":
            return lambda env: left(env) + right(env)
        if op == "-":
            return lambda env: left(env) - right(env)
        if op == "*":
            return lambda env: left(env) * right(env)
        if op == "/":
            return lambda env: _div(left(env), right(env))
        return lambda env: _pow(left(env), right(env))
    if isinstance(e, ir.AlgFunction):
        args = [compile_expression(a, index) for a in e.args]
        fn = e.fn
        if fn == "abs":
            a0 = args[0]
            return lambda env: abs(a0(env))
        if fn == "min":
            return lambda env: min(a(env) for a in args)
        if fn == "max":
            return lambda env: max(a(env) for a in args)
        mathfn = getattr(math, fn)
        a0 = args[0]
        return lambda env: mathfn(float(a0(env)))
    if isinstance(e, ir.BoolUnaryOp):
        operand = compile_expression(e.operand, index)
        return lambda env: not operand(env)
    if isinstance(e, ir.BoolBinaryOp):
        left = compile_expression(e.left, index)
        right = compile_expression(e.right, index)
        op = e.op
        if op == "=":
            return lambda env: left(env) == right(env)
        if op == "!=":
            return lambda env: left(env) != right(env)
        if op in ("<=", ">=", "<", ">"):
            return lambda env: _ordered(op, left(env), right(env))
        if op == "and":
            return lambda env: bool(left(env)) and bool(right(env))
        if op == "or":
            return lambda env: bool(left(env)) or bool(right(env))
        if op == "implies":
            return lambda env: (not left(env)) or bool(right(env))
        return lambda env: bool(left(env)) == bool(right(env))  # iff
    raise CompileError(f"cannot evaluate {type(e).__name__} in the oracle")


def domain_values(v: FlatVar) -> list:
    """Candidate values in canonical order (sets: by cardinality, then
    lexicographic membership)."""
    if v.kind == "int":
        return list(range(v.lo, v.hi + 1))
    if v.kind == "bool":
        return [False, True]
    universe = list(range(v.lo, v.hi + 1))
    if len(universe) > MAX_SET_UNIVERSE:
        raise SearchSpaceError(
            f"set universe of '{v.name}' has {len(universe)} elements "
            f"(limit {MAX_SET_UNIVERSE})"
        )
    out = []
    for k in range(len(universe) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(universe, k))
    return out


def _value_key(v):
    if isinstance(v, frozenset):
        return (len(v), tuple(sorted(v)))
    return (int(v),)


def enumerate_solutions(
    program: FlatProgram,
    max_solutions: int = DEFAULT_MAX_SOLUTIONS,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SolutionSet:
    """Exhaustive backtracking search; exact unless a limit triggers."""
    names = [v.name for v in program.vars]
    index = {n: i for i, n in enumerate(names)}
    domains = [domain_values(v) for v in program.vars]
    space = 1
    for d in domains:
        space *= len(d)
        if space > MAX_SEARCH_SPACE:
            raise SearchSpaceError(
                f"search space exceeds 2^40 ({len(program.vars)} variables)"
            )

    checks: list[list] = [[] for _ in names]
    constant_checks = []
    for c in program.constraints:
        used = sorted(
            {index[n.name] for n in ir.walk_expr(c) if isinstance(n, ir.VarOccurrence)}
        )
        fn = compile_expression(c, index)
        if used:
            checks[used[-1]].append(fn)
        else:
            constant_checks.append(fn)
    for fn in constant_checks:
        if not fn(()):
            return SolutionSet((), True)

    n = len(names)
    env: list = [None] * n
    solutions: list[Assignment] = []
    state = {"nodes": 0, "complete": True}

    def search(d: int) -> bool:  # True aborts the whole search
        if d == n:
            solutions.append(Assignment(dict(zip(names, env))))
            if len(solutions) >= max_solutions:
                state["complete"] = False
                return True
            return False
        for value in domains[d]:
            state["nodes"] += 1
            if state["nodes"] > max_nodes:
                state["complete"] = False
                return True
            env[d] = value
            ok = True
            for fn in checks[d]:
                if not fn(env):
                    ok = False
                    break
            if ok and search(d + 1):
                return True
        return False

    search(0)
    ordered_names = sorted(names)
    solutions.sort(key=lambda a: tuple(_value_key(a.values[x]) for x in ordered_names))
    return SolutionSet(tuple(solutions), state["complete"])


def compare_solutions(a: SolutionSet, b: SolutionSet, projection=None) -> str:
    """'equal' | 'subset' (a strictly within b) | 'superset' | 'incomparable',
    after projecting both sides onto the given variable names."""
    if not a.complete or not b.complete:
        raise IncompleteSolutionsError("cannot compare incomplete solution sets")
    if projection is None:
        pa = {tuple(sorted(s.values.items(), key=lambda kv: kv[0])) for s in a.solutions}
        pb = {tuple(sorted(s.values.items(), key=lambda kv: kv[0])) for s in b.solutions}
    else:
        names = list(projection)
        pa = {s.project(names) for s in a.solutions}
        pb = {s.project(names) for s in b.solutions}
    if pa == pb:
        return "equal"
    if pa < pb:
        return "subset"
    if pa > pb:
        return "superset"
    return "incomparable"
