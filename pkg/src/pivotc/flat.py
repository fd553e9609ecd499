"""Flat backend: scalarized variables plus a plain list of ground
constraints, written in the pivot expression syntax.

The text format is the interchange grammar shared with the oracle:

    var int x in 1..3;
    var bool b;
    var set of 1..9 s1;
    constraint x = 2;

Array cells scalarize to ``name__i`` / ``name__i__j`` (double underscore,
so flattened-object names with single underscores cannot collide).
Lowering requires a class-free, enum-free, unrolled, constant-folded model
with every alldifferent already rewritten.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import ir, sema
from .errors import IndexOutOfBoundsError, ResidualStatementError
from .passes import _Folder, _literal_value, _value_int, const_env
from .printer import print_expression


@dataclass(frozen=True)
class FlatVar:
    name: str
    kind: str  # "int" | "bool" | "set"
    lo: int | None = None
    hi: int | None = None


@dataclass(frozen=True)
class FlatProgram:
    vars: tuple[FlatVar, ...] = ()
    constraints: tuple[ir.Expression, ...] = ()


def _cell_name(base: str, idx: tuple[int, ...]) -> str:
    if not idx:
        return base
    return base + "".join(f"__{i}" for i in idx)


def _or_chain(terms: list[ir.Expression]) -> ir.Expression:
    acc = terms[0]
    for t in terms[1:]:
        acc = ir.BoolBinaryOp("or", acc, t)
    return acc


class _Lowerer:
    def __init__(self, model: ir.Model):
        self.model = model
        self.scope = sema.Scope(model)
        self.env = const_env(model)
        self.dims: dict[str, tuple[int, ...]] = {}
        self.vars: list[FlatVar] = []
        self.domain_constraints: list[ir.Expression] = []

    def _dims_of(self, v: ir.Variable) -> tuple[int, ...]:
        out = []
        for d in v.dims:
            n = _value_int(d, self.env)
            if n is None:
                raise ResidualStatementError("non-ground dimension", f"variable '{v.name}'")
            out.append(n)
        return tuple(out)

    def _interval(self, v: ir.Variable, domain: ir.Domain) -> tuple[int, int]:
        lo = _value_int(domain.lo, self.env)
        hi = _value_int(domain.hi, self.env)
        if lo is None or hi is None:
            raise ResidualStatementError("non-ground domain", f"variable '{v.name}'")
        return lo, hi

    def _domain_members(self, v: ir.Variable) -> frozenset | None:
        d = v.domain
        if isinstance(d, ir.SetDomain):
            members = []
            for m in d.members:
                value = _value_int(m, self.env)
                if value is None:
                    raise ResidualStatementError("non-ground domain", f"variable '{v.name}'")
                members.append(value)
            return frozenset(members)
        if isinstance(d, ir.ExprDomain):
            folded = _Folder(self.env).fold(d.expr)
            value = _literal_value(folded, self.env)
            if isinstance(value, frozenset):
                return value
            raise ResidualStatementError("non-ground domain", f"variable '{v.name}'")
        return None

    def add_variable(self, v: ir.Variable):
        dims = self._dims_of(v)
        self.dims[v.name] = dims
        cells = itertools.product(*(range(1, n + 1) for n in dims))
        for idx in cells:
            name = _cell_name(v.name, idx)
            if v.is_set:
                if not isinstance(v.domain, ir.IntervalDomain):
                    raise ResidualStatementError(
                        "set variable without an interval universe", f"variable '{v.name}'"
                    )
                lo, hi = self._interval(v, v.domain)
                self.vars.append(FlatVar(name, "set", lo, hi))
            elif v.type_name == "bool":
                if v.domain is not None:
                    raise ResidualStatementError(
                        "boolean variable with a domain", f"variable '{v.name}'"
                    )
                self.vars.append(FlatVar(name, "bool"))
            elif v.type_name == "int":
                if isinstance(v.domain, ir.IntervalDomain):
                    lo, hi = self._interval(v, v.domain)
                    self.vars.append(FlatVar(name, "int", lo, hi))
                    continue
                members = self._domain_members(v)
                if members is None or not members:
                    raise ResidualStatementError(
                        "variable without a finite domain", f"variable '{v.name}'"
                    )
                lo, hi = min(members), max(members)
                self.vars.append(FlatVar(name, "int", lo, hi))
                if members != frozenset(range(lo, hi + 1)):
                    occ = ir.VarOccurrence(name)
                    self.domain_constraints.append(
                        _or_chain(
                            [ir.BoolBinaryOp("=", occ, ir.IntValue(m)) for m in sorted(members)]
                        )
                    )
            else:
                raise ResidualStatementError(
                    f"{v.type_name} variable", f"variable '{v.name}'"
                )

    def rewrite(self, e: ir.Expression) -> ir.Expression:
        e = _Folder(self.env).fold(e)

        def fix(node: ir.Expression) -> ir.Expression:
            if isinstance(node, ir.ObjectOccurrence):
                raise ResidualStatementError("object navigation", print_expression(node))
            if not isinstance(node, ir.VarOccurrence):
                return node
            b = node.binding
            if b is not None and b.kind == "enum_literal":
                raise ResidualStatementError("enumeration literal", node.name)
            if b is not None and b.kind == "iterator":
                raise ResidualStatementError("loop iterator", node.name)
            if b is not None and b.kind == "constant":
                raise ResidualStatementError("non-ground constant", node.name)
            dims = self.dims.get(node.name)
            if dims is None:
                raise ResidualStatementError("unknown variable", node.name)
            if len(node.indexes) != len(dims):
                raise ResidualStatementError(
                    "partial array reference", f"'{node.name}'"
                )
            idx = []
            for expr, size in zip(node.indexes, dims):
                value = _value_int(expr, self.env)
                if value is None:
                    raise ResidualStatementError("non-ground index", print_expression(expr))
                if not 1 <= value <= size:
                    raise IndexOutOfBoundsError(
                        f"index {value} outside 1..{size} for '{node.name}'", node.loc
                    )
                idx.append(value)
            return ir.VarOccurrence(_cell_name(node.name, tuple(idx)), loc=node.loc)

        return ir.map_expr(e, fix)

    def run(self) -> FlatProgram:
        for e in self.model.elements:
            if isinstance(e, (ir.Class, ir.Enumeration, ir.Record, ir.Predicate, ir.Function)):
                raise ResidualStatementError(type(e).__name__.lower(), f"'{e.name}'")
            if isinstance(e, ir.Variable):
                self.add_variable(e)
        constraints = list(self.domain_constraints)

        def add_stmt(s: ir.Statement):
            if isinstance(s, ir.ExpressionConstraint):
                constraints.append(self.rewrite(s.expr))
            elif isinstance(s, ir.GlobalCtr):
                raise ResidualStatementError("global constraint", s.ctr_name)
            elif isinstance(s, ir.ForAll):
                raise ResidualStatementError("forall loop", f"over '{s.iter_var}'")
            elif isinstance(s, ir.If):
                raise ResidualStatementError("conditional", "if statement")
            else:
                raise ResidualStatementError(type(s).__name__, "")

        for e in self.model.elements:
            if isinstance(e, ir.ConstraintZone):
                for s in e.body:
                    add_stmt(s)
            elif isinstance(e, ir.Statement):
                add_stmt(e)
        return FlatProgram(tuple(self.vars), tuple(constraints))


def lower_to_flat(model: ir.Model) -> FlatProgram:
    """Scalarize a fully lowered model into a FlatProgram."""
    model = sema.resolve(model)
    return _Lowerer(model).run()


def emit_flat(p: FlatProgram) -> str:
    """Deterministic text form; declarations first, then constraints."""
    lines = []
    for v in p.vars:
        if v.kind == "int":
            lines.append(f"var int {v.name} in {v.lo}..{v.hi};")
        elif v.kind == "bool":
            lines.append(f"var bool {v.name};")
        else:
            lines.append(f"var set of {v.lo}..{v.hi} {v.name};")
    for c in p.constraints:
        lines.append(f"constraint {print_expression(c)};")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
