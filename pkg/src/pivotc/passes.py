"""Rewriting passes over pivot models.

Each pass is a pure function Model -> Model: inputs are never mutated and
outputs come back freshly resolved.  ``run_pipeline`` chains passes and
collects one report per pass.

Passes:
  * object_flatten  - remove classes; object attributes become prefixed
    top-level declarations, arrays of objects linearize into one dimension
    and class constraint zones are wrapped in fresh loops over instances;
  * enum_remove     - map enumeration literals to their 1-based positions
    and retype enum variables over integer ranges;
  * alldiff_rewrite - replace alldifferent constraints by pairwise
    disequalities, a sum relaxation, or a boolean assignment matrix;
  * loop_unroll     - expand loops and ground conditionals;
  * fold_constants  - evaluate every ground subexpression (rationals for
    exactness), inline constants, and apply +0/*1 style identities.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction

from . import ir, sema
from .errors import (
    CompileError,
    CyclicCompositionError,
    DivisionByZeroError,
    DomainAssumptionError,
    HeterogeneousDomainsError,
    NameCollisionError,
    NonGroundBoundError,
    NonGroundConditionError,
    NonVariableParamError,
    NotAlldifferentError,
    PreconditionError,
)

PASS_IDS = ("objectFlatten", "enumRemove", "alldiffRewrite", "loopUnroll", "foldConstants")
ALLDIFF_MODES = ("disequalities", "relaxation", "boolean")


@dataclass(frozen=True)
class PassConfig:
    passes: tuple[str, ...] = ()
    alldiff_mode: str = "disequalities"

    def __post_init__(self):
        object.__setattr__(self, "passes", tuple(self.passes))
        for p in self.passes:
            if p not in PASS_IDS:
                raise ValueError(f"unknown pass '{p}'")
        if len(set(self.passes)) != len(self.passes):
            raise ValueError("duplicate pass in pipeline")
        if self.alldiff_mode not in ALLDIFF_MODES:
            raise ValueError(f"unknown alldifferent mode '{self.alldiff_mode}'")

    @property
    def unroll(self) -> bool:
        return "loopUnroll" in self.passes


@dataclass(frozen=True)
class PassReport:
    pass_id: str
    elements_before: int
    elements_after: int
    rewrites_applied: int

    def __str__(self) -> str:
        return (
            f"{self.pass_id}: elements {self.elements_before} -> "
            f"{self.elements_after}, rewrites {self.rewrites_applied}"
        )


# --------------------------------------------------------------------------
# Ground evaluation and constant folding

_MISSING = object()


def _num(v):
    return int(v) if isinstance(v, bool) else v


def _arith(op: str, a, b, loc):
    a, b = _num(a), _num(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise DivisionByZeroError("division by zero", loc)
        if isinstance(a, float) or isinstance(b, float):
            return a / b
        return Fraction(a) / Fraction(b)
    if op == "^":
        if isinstance(a, float) or isinstance(b, float):
            return float(a) ** float(b)
        if isinstance(b, Fraction):
            if b.denominator != 1:
                return float(a) ** float(b)
            b = b.numerator
        try:
            return Fraction(a) ** b if isinstance(a, Fraction) or b < 0 else a ** b
        except ZeroDivisionError:
            raise DivisionByZeroError("zero raised to a negative power", loc) from None
    raise ValueError(op)


def _literal_value(e: ir.Expression, env: dict):
    """Exact recursive value of a ground expression, or _MISSING.

    Rationals stay exact (Fractions); enum literals, variables, iterators
    and navigation paths are opaque and yield _MISSING."""
    if isinstance(e, ir.IntValue):
        return e.v
    if isinstance(e, ir.RealValue):
        return e.v
    if isinstance(e, ir.BoolValue):
        return e.value
    if isinstance(e, ir.VarOccurrence):
        b = e.binding
        if (
            not e.indexes
            and b is not None
            and b.kind == "constant"
            and b.owner is None
            and e.name in env
        ):
            return env[e.name]
        return _MISSING
    if isinstance(e, ir.SetValue):
        members = []
        for m in e.elems:
            v = _literal_value(m, env)
            if v is _MISSING or not isinstance(_num(v), int):
                return _MISSING
            members.append(_num(v))
        return frozenset(members)
    if isinstance(e, ir.IntervalValue):
        if e.lo != int(e.lo) and math.ceil(e.lo) > math.floor(e.hi):
            return frozenset()
        return frozenset(range(math.ceil(e.lo), math.floor(e.hi) + 1))
    if isinstance(e, ir.AlgBinaryOp):
        a = _literal_value(e.left, env)
        if a is _MISSING:
            return _MISSING
        b = _literal_value(e.right, env)
        if b is _MISSING:
            return _MISSING
        return _arith(e.op, a, b, e.loc)
    if isinstance(e, ir.AlgUnaryOp):
        v = _literal_value(e.operand, env)
        if v is _MISSING:
            return _MISSING
        return -_num(v) if e.op == "neg" else _num(v)
    if isinstance(e, ir.AlgFunction):
        vals = []
        for a in e.args:
            v = _literal_value(a, env)
            if v is _MISSING:
                return _MISSING
            vals.append(_num(v))
        if e.fn == "abs":
            return abs(vals[0])
        if e.fn == "min":
            return min(vals)
        if e.fn == "max":
            return max(vals)
        return getattr(math, e.fn)(float(vals[0]))
    if isinstance(e, ir.BoolUnaryOp):
        v = _literal_value(e.operand, env)
        if v is _MISSING or not isinstance(v, bool):
            return _MISSING
        return not v
    if isinstance(e, ir.BoolBinaryOp):
        a = _literal_value(e.left, env)
        if a is _MISSING:
            return _MISSING
        b = _literal_value(e.right, env)
        if b is _MISSING:
            return _MISSING
        if e.op in ("iff", "implies", "and", "or"):
            if not (isinstance(a, bool) and isinstance(b, bool)):
                return _MISSING
            return {
                "iff": a == b,
                "implies": (not a) or b,
                "and": a and b,
                "or": a or b,
            }[e.op]
        if isinstance(a, frozenset) != isinstance(b, frozenset):
            return _MISSING
        if isinstance(a, frozenset):
            if e.op == "=":
                return a == b
            if e.op == "!=":
                return a != b
            return _MISSING
        a, b = _num(a), _num(b)
        return {
            "=": a == b, "!=": a != b, "<=": a <= b,
            ">=": a >= b, "<": a < b, ">": a > b,
        }[e.op]
    if isinstance(e, ir.SetFunction):
        v = _literal_value(e.arg, env)
        return len(v) if isinstance(v, frozenset) else _MISSING
    if isinstance(e, ir.SetBinaryOp):
        a = _literal_value(e.left, env)
        if not isinstance(a, frozenset):
            return _MISSING
        b = _literal_value(e.right, env)
        if not isinstance(b, frozenset):
            return _MISSING
        if e.op == "intersect":
            return a & b
        if e.op == "union":
            return a | b
        return a - b
    return _MISSING


def _materialize(v, loc) -> ir.Expression | None:
    if isinstance(v, bool):
        return ir.BoolValue(v, loc=loc)
    if isinstance(v, int):
        return ir.IntValue(v, loc=loc)
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return ir.IntValue(v.numerator, loc=loc)
        return None  # keep non-integral rationals symbolic to stay exact
    if isinstance(v, float):
        return ir.RealValue(v, loc=loc)
    if isinstance(v, frozenset):
        return ir.SetValue(tuple(ir.IntValue(x, loc=loc) for x in sorted(v)), loc=loc)
    return None


_INT_ZERO = ir.IntValue(0)
_INT_ONE = ir.IntValue(1)


class _Folder:
    """Bottom-up ground evaluation; counts the rewrites it makes."""

    def __init__(self, env: dict):
        self.env = env
        self.count = 0

    def fold(self, e: ir.Expression) -> ir.Expression:
        return ir.map_expr(e, self._fold_node)

    def _fold_node(self, e: ir.Expression) -> ir.Expression:
        if isinstance(e, (ir.IntValue, ir.RealValue, ir.BoolValue)):
            return e
        try:
            v = _literal_value(e, self.env)
        except (ValueError, OverflowError):
            v = _MISSING  # domain error: leave the node symbolic
        if v is not _MISSING:
            node = _materialize(v, e.loc)
            if node is not None:
                if node == e:
                    return e
                self.count += 1
                return node
        return self._identities(e)

    def _identities(self, e: ir.Expression) -> ir.Expression:
        if isinstance(e, ir.AlgBinaryOp):
            if e.op == "+":
                if e.left == _INT_ZERO:
                    self.count += 1
                    return e.right
                if e.right == _INT_ZERO:
                    self.count += 1
                    return e.left
            elif e.op == "-" and e.right == _INT_ZERO:
                self.count += 1
                return e.left
            elif e.op == "*":
                if e.left == _INT_ONE:
                    self.count += 1
                    return e.right
                if e.right == _INT_ONE:
                    self.count += 1
                    return e.left
            elif e.op == "/" and e.right == _INT_ONE:
                self.count += 1
                return e.left
        return e

def const_env(model: ir.Model) -> dict:
    """Values of all evaluable constants (exact rationals for division)."""
    consts = [e for e in model.elements if isinstance(e, ir.Constant) and not e.dims]
    env: dict = {}
    for _ in range(len(consts) + 1):
        progress = False
        for c in consts:
            if c.name in env:
                continue
            folded = _Folder(env).fold(c.value)
            v = _literal_value(folded, env)
            if v is not _MISSING:
                env[c.name] = v
                progress = True
        if not progress:
            break
    return env


def _fold_constants_counted(model: ir.Model) -> tuple[ir.Model, int]:
    model = sema.resolve(model)
    folder = _Folder(const_env(model))
    out = ir.map_expressions(model, folder._fold_node)
    return sema.resolve(out), folder.count


def fold_constants(model: ir.Model) -> ir.Model:
    return _fold_constants_counted(model)[0]


def _value_int(e: ir.Expression, env: dict) -> int | None:
    v = _literal_value(_Folder(env).fold(e), env)
    if v is _MISSING:
        return None
    v = _num(v)
    if isinstance(v, Fraction):
        if v.denominator != 1:
            return None
        return v.numerator
    if isinstance(v, float):
        return int(v) if v == int(v) else None
    return v if isinstance(v, int) else None


# --------------------------------------------------------------------------
# Object flattening

def _composition_cycle_check(classes: dict[str, ir.Class]):
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(name: str, parent: str | None):
        if state.get(name) == 1:
            return
        if state.get(name) == 0:
            raise CyclicCompositionError(parent or name, name)
        state[name] = 0
        for f in classes[name].features:
            if isinstance(f, ir.Variable) and f.type_name in classes:
                visit(f.type_name, name)
        state[name] = 1

    for name in classes:
        visit(name, None)


def _linear_index(pairs: list[tuple[ir.Expression, ir.Expression]]) -> ir.Expression:
    """Row-major fold: index i within nested arrays of sizes d becomes
    d2*(i1-1)+i2 and so on (1-based)."""
    linear = pairs[0][0]
    for idx, size in pairs[1:]:
        linear = ir.AlgBinaryOp(
            "+",
            ir.AlgBinaryOp("*", size, ir.AlgBinaryOp("-", linear, ir.IntValue(1))),
            idx,
        )
    return linear


def _composed_dim(sizes: list[ir.Expression]) -> ir.Expression:
    acc = sizes[0]
    for s in sizes[1:]:
        acc = ir.AlgBinaryOp("*", s, acc)
    return acc


class _Flattener:
    def __init__(self, model: ir.Model):
        self.model = model
        self.classes = model.classes()
        self.scope = sema.Scope(model)
        self.taken = {
            e.name
            for e in model.elements
            if isinstance(e, (ir.Variable, ir.Constant, ir.Enumeration))
        }
        self.created = 0

    # -- expression rewriting ------------------------------------------
    def _attr_of(self, cls: ir.Class | None, name: str):
        if cls is None:
            return None
        for f in cls.features:
            if isinstance(f, (ir.Variable, ir.Constant)) and f.name == name:
                return f
        return None

    def _flat_ref(self, prefix: list[str], ctx_pairs, steps, cls: ir.Class | None, loc):
        """steps: list of (name, rewritten indexes, decl).  Returns the flat
        occurrence for a navigation that starts at an attribute of cls
        (prefix non-empty context) or at a top-level object variable."""
        names = prefix + [name for name, _, _ in steps]
        flat_name = "_".join(names)
        last_decl = steps[-1][2]
        if isinstance(last_decl, ir.Constant):
            # constants are shared by all instances: prefix only
            return ir.VarOccurrence(flat_name, steps[-1][1], loc=loc)
        pairs = list(ctx_pairs)
        for _name, indexes, decl in steps:
            pairs.extend(zip(indexes, decl.dims))
        if not ctx_pairs and all(not decl.dims for _n, _i, decl in steps[:-1]):
            # no enclosing arrays anywhere: pure renaming
            return ir.VarOccurrence(flat_name, steps[-1][1], loc=loc)
        indexes = (_linear_index(pairs),) if pairs else ()
        return ir.VarOccurrence(flat_name, indexes, loc=loc)

    def _rewrite_expr(self, e: ir.Expression, prefix, ctx_pairs, cls):
        rw = lambda x: self._rewrite_expr(x, prefix, ctx_pairs, cls)
        if isinstance(e, ir.VarOccurrence):
            indexes = tuple(rw(i) for i in e.indexes)
            b = e.binding
            if b is not None and b.kind in ("variable", "constant") and b.owner == (cls.name if cls else None) and cls is not None:
                decl = self._attr_of(cls, e.name)
                if decl is not None and decl.type_name not in self.classes:
                    return self._flat_ref(prefix, ctx_pairs, [(e.name, indexes, decl)], cls, e.loc)
            return ir.VarOccurrence(e.name, indexes, binding=b, loc=e.loc)
        if isinstance(e, ir.ObjectOccurrence):
            return self._rewrite_path(e, prefix, ctx_pairs, cls)
        updates = {}
        for f in dataclasses.fields(e):
            v = getattr(e, f.name)
            if isinstance(v, ir.Expression):
                nv = rw(v)
                if nv is not v:
                    updates[f.name] = nv
            elif isinstance(v, tuple) and v and isinstance(v[0], ir.Expression):
                nv = tuple(rw(x) for x in v)
                if any(a is not b for a, b in zip(nv, v)):
                    updates[f.name] = nv
        return dataclasses.replace(e, **updates) if updates else e

    def _rewrite_path(self, e: ir.ObjectOccurrence, prefix, ctx_pairs, cls):
        head = e.path[0]
        hb = head.binding
        steps = []
        if hb is not None and hb.owner == (cls.name if cls else None) and cls is not None:
            decl = self._attr_of(cls, head.name)
            base_prefix, base_ctx = prefix, ctx_pairs
        else:
            kind, decl = self.scope.lookup(head.name)
            base_prefix, base_ctx = [], []
        current = decl
        indexes = tuple(self._rewrite_expr(i, prefix, ctx_pairs, cls) for i in head.indexes)
        steps.append((head.name, indexes, current))
        owner = self.classes.get(current.type_name)
        for step in e.path[1:]:
            feature = self._attr_of(owner, step.name)
            indexes = tuple(self._rewrite_expr(i, prefix, ctx_pairs, cls) for i in step.indexes)
            steps.append((step.name, indexes, feature))
            owner = self.classes.get(feature.type_name) if feature is not None else None
        return self._flat_ref(base_prefix, base_ctx, steps, cls, e.loc)

    def _rewrite_stmt(self, s: ir.Statement, prefix, ctx_pairs, cls):
        rw = lambda x: self._rewrite_expr(x, prefix, ctx_pairs, cls)
        if isinstance(s, ir.ExpressionConstraint):
            return ir.ExpressionConstraint(rw(s.expr), loc=s.loc)
        if isinstance(s, ir.GlobalCtr):
            return ir.GlobalCtr(s.ctr_name, tuple(rw(p) for p in s.params), loc=s.loc)
        if isinstance(s, ir.ForAll):
            return ir.ForAll(
                s.iter_var, rw(s.lower), rw(s.upper),
                tuple(self._rewrite_stmt(b, prefix, ctx_pairs, cls) for b in s.body),
                loc=s.loc,
            )
        if isinstance(s, ir.If):
            else_body = None
            if s.else_body is not None:
                else_body = tuple(self._rewrite_stmt(b, prefix, ctx_pairs, cls) for b in s.else_body)
            return ir.If(
                rw(s.cond),
                tuple(self._rewrite_stmt(b, prefix, ctx_pairs, cls) for b in s.then_body),
                else_body,
                loc=s.loc,
            )
        raise TypeError(f"unknown statement {s!r}")

    # -- feature flattening --------------------------------------------
    def _fresh_iters(self, count: int, body_names: set[str]) -> list[str]:
        names = []
        n = 1
        while len(names) < count:
            cand = f"I{n}"
            n += 1
            if cand in body_names or cand in self.taken or cand in names:
                continue
            names.append(cand)
        return names

    def _claim(self, name: str):
        if name in self.taken:
            raise NameCollisionError(name)
        self.taken.add(name)

    def flatten_class_feature(self, f: ir.ModelFeature, prefix: list[str],
                              enclosing: list[ir.Expression], cls: ir.Class):
        """Flatten one feature of cls reached through the object-variable
        path named by prefix with the given enclosing array sizes."""
        out: list[ir.ModelFeature] = []
        if isinstance(f, ir.Variable) and f.type_name in self.classes:
            inner = self.classes[f.type_name]
            sizes = [self._rewrite_expr(d, prefix, [], cls) for d in f.dims]
            for g in inner.features:
                out.extend(
                    self.flatten_class_feature(g, prefix + [f.name], enclosing + sizes, inner)
                )
            return out
        if isinstance(f, (ir.Variable, ir.Constant)):
            flat_name = "_".join(prefix + [f.name]) if prefix else f.name
            if prefix:
                self._claim(flat_name)
            dims = tuple(self._rewrite_expr(d, prefix, [], cls) for d in f.dims)
            if isinstance(f, ir.Constant):
                value = self._rewrite_expr(f.value, prefix, [], cls)
                out.append(dataclasses.replace(f, name=flat_name, dims=dims, value=value))
            else:
                if enclosing:
                    dims = (_composed_dim(enclosing + list(dims)),)
                domain = self._rewrite_domain(f.domain, prefix, cls)
                out.append(dataclasses.replace(f, name=flat_name, dims=dims, domain=domain))
            self.created += 1
            return out
        if isinstance(f, ir.ConstraintZone):
            zone_name = "_".join(prefix + [f.name]) if prefix else f.name
            body_names = {
                node.name
                for s in f.body
                for expr in ir._statement_exprs(s)
                for node in ir.walk_expr(expr)
                if isinstance(node, ir.VarOccurrence)
            }
            iters = self._fresh_iters(len(enclosing), body_names)
            ctx_pairs = [
                (ir.VarOccurrence(name), size) for name, size in zip(iters, enclosing)
            ]
            body = tuple(self._rewrite_stmt(s, prefix, ctx_pairs, cls) for s in f.body)
            for name, size in reversed(list(zip(iters, enclosing))):
                body = (ir.ForAll(name, ir.IntValue(1), size, body, loc=f.loc),)
            out.append(ir.ConstraintZone(zone_name, body, loc=f.loc))
            return out
        if isinstance(f, ir.Statement):
            ctx_pairs = []
            if enclosing:
                iters = self._fresh_iters(len(enclosing), set())
                ctx_pairs = [
                    (ir.VarOccurrence(name), size) for name, size in zip(iters, enclosing)
                ]
            stmt = self._rewrite_stmt(f, prefix, ctx_pairs, cls)
            for (it, size) in reversed(ctx_pairs):
                stmt = ir.ForAll(it.name, ir.IntValue(1), size, (stmt,), loc=f.loc)
            out.append(stmt)
            return out
        return [f]

    def _rewrite_domain(self, d: ir.Domain | None, prefix, cls):
        if d is None:
            return None
        rw = lambda x: self._rewrite_expr(x, prefix, [], cls)
        if isinstance(d, ir.IntervalDomain):
            return ir.IntervalDomain(rw(d.lo), rw(d.hi), loc=d.loc)
        if isinstance(d, ir.SetDomain):
            return ir.SetDomain(tuple(rw(m) for m in d.members), loc=d.loc)
        return ir.ExprDomain(rw(d.expr), loc=d.loc)

    def run(self) -> ir.Model:
        out: list[ir.ModelElement] = []
        for e in self.model.elements:
            if isinstance(e, ir.Class):
                if e.is_main:
                    for f in e.features:
                        out.extend(self.flatten_class_feature(f, [], [], e))
                continue
            if isinstance(e, ir.Variable) and e.type_name in self.classes:
                inner = self.classes[e.type_name]
                for g in inner.features:
                    out.extend(
                        self.flatten_class_feature(g, [e.name], list(e.dims), inner)
                    )
                continue
            if isinstance(e, ir.ConstraintZone):
                out.append(
                    ir.ConstraintZone(
                        e.name,
                        tuple(self._rewrite_stmt(s, [], [], None) for s in e.body),
                        loc=e.loc,
                    )
                )
                continue
            if isinstance(e, ir.Statement):
                out.append(self._rewrite_stmt(e, [], [], None))
                continue
            out.append(e)
        return dataclasses.replace(self.model, elements=tuple(out))


def _object_flatten_counted(model: ir.Model) -> tuple[ir.Model, int]:
    model = sema.resolve(model)
    classes = model.classes()
    if not classes:
        return model, 0
    _composition_cycle_check(classes)
    flattener = _Flattener(model)
    out = flattener.run()
    return sema.resolve(out), flattener.created


def object_flatten(model: ir.Model) -> ir.Model:
    return _object_flatten_counted(model)[0]


# --------------------------------------------------------------------------
# Enumeration removal

def _ensure_class_free(model: ir.Model, pass_id: str):
    if model.classes():
        raise PreconditionError(pass_id, "model still contains classes")


def _enum_remove_counted(model: ir.Model) -> tuple[ir.Model, int]:
    model = sema.resolve(model)
    _ensure_class_free(model, "enumRemove")
    enums = model.enumerations()
    if not enums:
        return model, 0
    count = 0

    def literal_to_int(e: ir.Expression) -> ir.Expression:
        nonlocal count
        if (
            isinstance(e, ir.VarOccurrence)
            and e.binding is not None
            and e.binding.kind == "enum_literal"
        ):
            count += 1
            return ir.IntValue(e.binding.position, loc=e.loc)
        return e

    mapped = ir.map_expressions(model, literal_to_int)
    elements: list[ir.ModelElement] = []
    for e in mapped.elements:
        if isinstance(e, ir.Enumeration):
            count += 1
            continue
        if isinstance(e, (ir.Variable, ir.Constant)) and e.type_name in enums:
            n = len(enums[e.type_name].literals)
            count += 1
            if isinstance(e, ir.Variable):
                domain = e.domain
                if domain is None:
                    domain = ir.IntervalDomain(ir.IntValue(1), ir.IntValue(n))
                e = dataclasses.replace(e, type_name="int", domain=domain)
            else:
                e = dataclasses.replace(e, type_name="int")
        elements.append(e)
    out = dataclasses.replace(mapped, elements=tuple(elements))
    return sema.resolve(out), count


def enum_remove(model: ir.Model) -> ir.Model:
    return _enum_remove_counted(model)[0]


# --------------------------------------------------------------------------
# Alldifferent rewrites

def alldiff_to_disequalities(c: ir.GlobalCtr) -> list[ir.Statement]:
    """alldifferent(x1..xn) -> the n(n-1)/2 pairwise disequalities."""
    if not isinstance(c, ir.GlobalCtr) or c.ctr_name != "alldifferent":
        raise NotAlldifferentError("expected an alldifferent constraint")
    out: list[ir.Statement] = []
    n = len(c.params)
    for i in range(n):
        for j in range(i + 1, n):
            out.append(
                ir.ExpressionConstraint(
                    ir.BoolBinaryOp("!=", c.params[i], c.params[j], loc=c.loc), loc=c.loc
                )
            )
    return out


def _param_interval(p: ir.Expression, scope: sema.Scope, env: dict):
    """(lo, hi) of the declared domain behind a variable occurrence."""
    if not isinstance(p, ir.VarOccurrence):
        return None
    try:
        kind, decl = scope.lookup(p.name)
    except CompileError:
        return None
    if kind != "variable" or not isinstance(decl.domain, ir.IntervalDomain):
        return None
    lo = _value_int(decl.domain.lo, env)
    hi = _value_int(decl.domain.hi, env)
    if lo is None or hi is None:
        return None
    return lo, hi


def _sum_of(terms: list[ir.Expression]) -> ir.Expression:
    acc = terms[0]
    for t in terms[1:]:
        acc = ir.AlgBinaryOp("+", acc, t)
    return acc


def _alldiff_to_relaxation(c: ir.GlobalCtr, scope: sema.Scope, env: dict) -> ir.Statement:
    if not isinstance(c, ir.GlobalCtr) or c.ctr_name != "alldifferent":
        raise NotAlldifferentError("expected an alldifferent constraint")
    n = len(c.params)
    for p in c.params:
        iv = _param_interval(p, scope, env)
        if iv != (1, n):
            raise DomainAssumptionError(
                f"relaxation requires every parameter domain to be 1..{n}", c.loc
            )
    total = ir.IntValue(n * (n + 1) // 2)
    return ir.ExpressionConstraint(
        ir.BoolBinaryOp("=", _sum_of(list(c.params)), total, loc=c.loc), loc=c.loc
    )


def alldiff_to_relaxation(c: ir.GlobalCtr, model: ir.Model) -> ir.Statement:
    model = sema.resolve(model)
    return _alldiff_to_relaxation(c, sema.Scope(model), const_env(model))


def _fresh_bool_matrix_name(taken: set[str]) -> str:
    if "b" not in taken:
        return "b"
    n = 2
    while f"b{n}" in taken:
        n += 1
    return f"b{n}"


def _alldiff_to_boolean(
    c: ir.GlobalCtr, scope: sema.Scope, env: dict, taken: set[str]
) -> list[ir.ModelFeature]:
    if not isinstance(c, ir.GlobalCtr) or c.ctr_name != "alldifferent":
        raise NotAlldifferentError("expected an alldifferent constraint")
    n = len(c.params)
    intervals = []
    for p in c.params:
        if not isinstance(p, ir.VarOccurrence) or (
            p.binding is not None and p.binding.kind != "variable"
        ):
            raise NonVariableParamError(
                "boolean reformulation requires plain variable parameters", c.loc
            )
        iv = _param_interval(p, scope, env)
        if iv is None:
            raise NonVariableParamError(
                f"cannot determine the domain of parameter '{p.name}'", c.loc
            )
        intervals.append(iv)
    if len(set(intervals)) != 1:
        raise HeterogeneousDomainsError(
            "boolean reformulation requires one common parameter domain", c.loc
        )
    lo, m = intervals[0]
    if lo != 1 or m < n:
        raise DomainAssumptionError(
            f"boolean reformulation requires a common domain 1..m with m >= {n}", c.loc
        )
    name = _fresh_bool_matrix_name(taken)
    taken.add(name)
    b = ir.Variable(name, "bool", dims=(ir.IntValue(n), ir.IntValue(m)), loc=c.loc)

    def cell(i: int, j: int) -> ir.Expression:
        return ir.VarOccurrence(name, (ir.IntValue(i), ir.IntValue(j)))

    features: list[ir.ModelFeature] = [b]
    for i in range(1, n + 1):  # one value per variable
        row = _sum_of([cell(i, j) for j in range(1, m + 1)])
        features.append(ir.ExpressionConstraint(ir.BoolBinaryOp("=", row, ir.IntValue(1)), loc=c.loc))
    col_op = "=" if m == n else "<="
    for j in range(1, m + 1):  # each value used once (at most once when m > n)
        col = _sum_of([cell(i, j) for i in range(1, n + 1)])
        features.append(
            ir.ExpressionConstraint(ir.BoolBinaryOp(col_op, col, ir.IntValue(1)), loc=c.loc)
        )
    for i, p in enumerate(c.params, start=1):  # channel b back to the parameters
        value = _sum_of(
            [ir.AlgBinaryOp("*", ir.IntValue(j), cell(i, j)) for j in range(1, m + 1)]
        )
        features.append(
            ir.ExpressionConstraint(ir.BoolBinaryOp("=", p, value), loc=c.loc)
        )
    return features


def alldiff_to_boolean(c: ir.GlobalCtr, model: ir.Model) -> list[ir.ModelFeature]:
    model = sema.resolve(model)
    taken = {e.name for e in model.elements if hasattr(e, "name")}
    return _alldiff_to_boolean(c, sema.Scope(model), const_env(model), taken)


def _contains_alldiff(stmts) -> bool:
    for s in stmts:
        if isinstance(s, ir.GlobalCtr) and s.ctr_name == "alldifferent":
            return True
        if isinstance(s, ir.ForAll) and _contains_alldiff(s.body):
            return True
        if isinstance(s, ir.If) and (
            _contains_alldiff(s.then_body) or _contains_alldiff(s.else_body or ())
        ):
            return True
    return False


def _alldiff_rewrite_counted(model: ir.Model, mode: str) -> tuple[ir.Model, int]:
    if mode not in ALLDIFF_MODES:
        raise ValueError(f"unknown alldifferent mode '{mode}'")
    model = sema.resolve(model)
    _ensure_class_free(model, "alldiffRewrite")
    scope = sema.Scope(model)
    env = const_env(model)
    taken = {e.name for e in model.elements if hasattr(e, "name")}
    count = 0

    def rewrite_stmts(stmts, nested: bool):
        nonlocal count
        out: list[ir.Statement] = []
        hoisted: list[ir.Variable] = []
        for s in stmts:
            if isinstance(s, ir.GlobalCtr) and s.ctr_name == "alldifferent":
                count += 1
                if mode == "disequalities":
                    out.extend(alldiff_to_disequalities(s))
                elif mode == "relaxation":
                    out.append(_alldiff_to_relaxation(s, scope, env))
                else:
                    if nested:
                        raise PreconditionError(
                            "alldiffRewrite",
                            "boolean mode cannot rewrite alldifferent inside forall/if "
                            "(the matrix would be shared between iterations)",
                        )
                    features = _alldiff_to_boolean(s, scope, env, taken)
                    hoisted.extend(f for f in features if isinstance(f, ir.Variable))
                    out.extend(f for f in features if isinstance(f, ir.Statement))
            elif isinstance(s, ir.ForAll):
                body, inner_hoisted = rewrite_stmts(s.body, True)
                hoisted.extend(inner_hoisted)
                out.append(dataclasses.replace(s, body=tuple(body)))
            elif isinstance(s, ir.If):
                then_body, h1 = rewrite_stmts(s.then_body, True)
                hoisted.extend(h1)
                else_body = None
                if s.else_body is not None:
                    eb, h2 = rewrite_stmts(s.else_body, True)
                    hoisted.extend(h2)
                    else_body = tuple(eb)
                out.append(dataclasses.replace(s, then_body=tuple(then_body), else_body=else_body))
            else:
                out.append(s)
        return out, hoisted

    elements: list[ir.ModelElement] = []
    for e in model.elements:
        if isinstance(e, ir.ConstraintZone):
            body, hoisted = rewrite_stmts(e.body, False)
            elements.extend(hoisted)
            elements.append(ir.ConstraintZone(e.name, tuple(body), loc=e.loc))
        elif isinstance(e, ir.Statement):
            stmts, hoisted = rewrite_stmts([e], False)
            elements.extend(hoisted)
            elements.extend(stmts)
        else:
            elements.append(e)
    out = dataclasses.replace(model, elements=tuple(elements))
    return sema.resolve(out), count


def alldiff_rewrite(model: ir.Model, mode: str = "disequalities") -> ir.Model:
    return _alldiff_rewrite_counted(model, mode)[0]


# --------------------------------------------------------------------------
# Loop unrolling

def _subst_iter(e: ir.Expression, name: str, value: ir.Expression) -> ir.Expression:
    def fix(node: ir.Expression) -> ir.Expression:
        if (
            isinstance(node, ir.VarOccurrence)
            and node.name == name
            and not node.indexes
            and (node.binding is None or node.binding.kind == "iterator")
        ):
            return value
        return node

    return ir.map_expr(e, fix)


def _subst_stmt(s: ir.Statement, name: str, value: ir.Expression) -> ir.Statement:
    if isinstance(s, ir.ExpressionConstraint):
        return ir.ExpressionConstraint(_subst_iter(s.expr, name, value), loc=s.loc)
    if isinstance(s, ir.GlobalCtr):
        return ir.GlobalCtr(
            s.ctr_name, tuple(_subst_iter(p, name, value) for p in s.params), loc=s.loc
        )
    if isinstance(s, ir.ForAll):
        lower = _subst_iter(s.lower, name, value)
        upper = _subst_iter(s.upper, name, value)
        if s.iter_var == name:  # inner loop shadows the outer iterator
            return dataclasses.replace(s, lower=lower, upper=upper)
        return ir.ForAll(
            s.iter_var, lower, upper,
            tuple(_subst_stmt(b, name, value) for b in s.body), loc=s.loc,
        )
    if isinstance(s, ir.If):
        else_body = None
        if s.else_body is not None:
            else_body = tuple(_subst_stmt(b, name, value) for b in s.else_body)
        return ir.If(
            _subst_iter(s.cond, name, value),
            tuple(_subst_stmt(b, name, value) for b in s.then_body),
            else_body, loc=s.loc,
        )
    raise TypeError(f"unknown statement {s!r}")


def _loop_unroll_counted(model: ir.Model) -> tuple[ir.Model, int]:
    model = sema.resolve(model)
    _ensure_class_free(model, "loopUnroll")
    env = const_env(model)
    count = 0

    def bound_value(e: ir.Expression, loop: ir.ForAll) -> int:
        v = _value_int(e, env)
        if v is None:
            raise NonGroundBoundError(
                f"loop over '{loop.iter_var}' has a non-ground bound", loop.loc
            )
        return v

    def unroll_stmts(stmts) -> list[ir.Statement]:
        nonlocal count
        out: list[ir.Statement] = []
        for s in stmts:
            if isinstance(s, ir.ForAll):
                count += 1
                lo = bound_value(s.lower, s)
                hi = bound_value(s.upper, s)
                for v in range(lo, hi + 1):
                    body = [_subst_stmt(b, s.iter_var, ir.IntValue(v)) for b in s.body]
                    out.extend(unroll_stmts(body))
            elif isinstance(s, ir.If):
                count += 1
                folded = _Folder(env).fold(s.cond)
                if not isinstance(folded, ir.BoolValue):
                    raise NonGroundConditionError(
                        "conditional with a non-ground condition cannot be unrolled", s.loc
                    )
                branch = s.then_body if folded.value else (s.else_body or ())
                out.extend(unroll_stmts(list(branch)))
            else:
                folder = _Folder(env)
                out.append(ir._map_statement(s, folder._fold_node))
        return out

    elements: list[ir.ModelElement] = []
    for e in model.elements:
        if isinstance(e, ir.ConstraintZone):
            elements.append(ir.ConstraintZone(e.name, tuple(unroll_stmts(e.body)), loc=e.loc))
        elif isinstance(e, ir.Statement):
            elements.extend(unroll_stmts([e]))
        else:
            elements.append(e)
    out = dataclasses.replace(model, elements=tuple(elements))
    return sema.resolve(out), count


def loop_unroll(model: ir.Model) -> ir.Model:
    return _loop_unroll_counted(model)[0]


# --------------------------------------------------------------------------
# Pipeline

def run_pipeline(model: ir.Model, cfg: PassConfig) -> tuple[ir.Model, list[PassReport]]:
    """Apply cfg.passes in order; pass errors abort and carry the reports
    collected so far on the exception's ``reports`` attribute."""
    model = sema.resolve(model)
    reports: list[PassReport] = []
    for pass_id in cfg.passes:
        before = ir.element_count(model)
        try:
            if pass_id == "objectFlatten":
                model, n = _object_flatten_counted(model)
            elif pass_id == "enumRemove":
                model, n = _enum_remove_counted(model)
            elif pass_id == "alldiffRewrite":
                model, n = _alldiff_rewrite_counted(model, cfg.alldiff_mode)
            elif pass_id == "loopUnroll":
                model, n = _loop_unroll_counted(model)
            else:
                model, n = _fold_constants_counted(model)
        except CompileError as exc:
            exc.reports = reports  # type: ignore[attr-defined]
            raise
        reports.append(PassReport(pass_id, before, ir.element_count(model), n))
    return model, reports
