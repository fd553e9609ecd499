"""Structured CLP backend: one predicate per model, loops preserved.

The output shape is a single clause:

    name(L):-
     S $= 3,
     ...
     intsets(NAME,Count,Lo,Hi),
     L = NAME,
     % zoneName
     (for(I,Lo,Hi),param(...) do ... ),
     label_sets(L).

Arrays are lists in the target, so indexed accesses go through fresh
auxiliary variables and nth/3 goals (``V1 is <index>, nth(V2,V1,NAME)``).
Every for-loop declares the outside names its body uses in its param list.
Requires a class-free, enum-free, constant-folded model over integer,
boolean and integer-set variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ir, sema
from .errors import NameCollisionError, UnsupportedElementError

_SPELLING = {"=": "$=", "!=": "$\\=", "<=": "$=<", ">=": "$>=", "<": "$<", ">": "$>"}
_SET_SPELLING = {"intersect": "/\\", "union": "\\/", "diff": "\\"}
_ATOM_RE = re.compile(r"^[a-z][A-Za-z0-9_]*$")
_SIMPLE_TERM_RE = re.compile(r"^[A-Z][A-Za-z0-9_]*$|^-?[0-9]+$")

# term precedences for minimal parenthesization
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


@dataclass(frozen=True)
class ClpEmitOptions:
    predicate_name: str | None = None  # default: model name, first letter lowered
    label_sets: bool = True


def _upper(name: str) -> str:
    return name.upper()


class _Emitter:
    def __init__(self, model: ir.Model, opts: ClpEmitOptions):
        self.model = model
        self.opts = opts
        self.scope = sema.Scope(model)
        self.variables = [e for e in model.elements if isinstance(e, ir.Variable)]
        self.constants = [e for e in model.elements if isinstance(e, ir.Constant)]
        self.var_names = {v.name for v in self.variables}
        self.const_names = {c.name for c in self.constants}
        self._check_supported()
        upper_names = [_upper(n) for n in self.var_names | self.const_names]
        if len(set(upper_names)) != len(upper_names):
            raise NameCollisionError("upper-cased declaration names collide")
        self.reserved = set(upper_names) | {"L"}
        self.fresh_counter = 0

    def _check_supported(self):
        for e in self.model.elements:
            if isinstance(e, (ir.Class, ir.Enumeration, ir.Record, ir.Predicate, ir.Function)):
                raise UnsupportedElementError(
                    f"{type(e).__name__.lower()} '{e.name}' is not supported by the clp target"
                )
        for v in self.variables:
            if v.type_name == "real":
                raise UnsupportedElementError(
                    f"real variable '{v.name}' is not supported by the clp target "
                    "(finite domains only)"
                )
            if v.type_name not in ("int", "bool"):
                raise UnsupportedElementError(
                    f"variable '{v.name}' has unsupported type '{v.type_name}'"
                )

    def fresh(self) -> str:
        while True:
            self.fresh_counter += 1
            name = f"V{self.fresh_counter}"
            if name not in self.reserved:
                return name

    # ---- terms ----------------------------------------------------------
    def term(self, e: ir.Expression, pre: list[str], iters: tuple[str, ...], prec: int = 0) -> str:
        """Render e as a target term, appending any needed aux goals to pre."""
        if isinstance(e, ir.IntValue):
            return str(e.v) if e.v >= 0 or prec == 0 else f"({e.v})"
        if isinstance(e, ir.RealValue):
            return repr(e.v) if e.v >= 0 or prec == 0 else f"({e.v!r})"
        if isinstance(e, ir.BoolValue):
            return "1" if e.value else "0"
        if isinstance(e, ir.VarOccurrence):
            return self._occurrence_term(e, pre, iters)
        if isinstance(e, ir.AlgBinaryOp):
            p = _PREC[e.op]
            left = self.term(e.left, pre, iters, p)
            right = self.term(e.right, pre, iters, p + 1)
            text = f"{left}{e.op}{right}"
            return f"({text})" if p < prec else text
        if isinstance(e, ir.AlgUnaryOp):
            inner = self.term(e.operand, pre, iters, 4)
            return f"-{inner}" if e.op == "neg" else inner
        if isinstance(e, ir.AlgFunction):
            args = ",".join(self.term(a, pre, iters) for a in e.args)
            return f"{e.fn}({args})"
        if isinstance(e, ir.SetFunction):
            arg = self.term(e.arg, pre, iters)
            v = self.fresh()
            pre.append(f"#({arg}, {v})")
            return v
        if isinstance(e, ir.SetBinaryOp):
            left = self.term(e.left, pre, iters, 4)
            right = self.term(e.right, pre, iters, 4)
            text = f"{left} {_SET_SPELLING[e.op]} {right}"
            return f"({text})" if prec > 0 else text
        if isinstance(e, ir.SetValue):
            return "[" + ",".join(self.term(x, pre, iters) for x in e.elems) + "]"
        if isinstance(e, ir.BoolBinaryOp) or isinstance(e, ir.BoolUnaryOp):
            return self.bool_term(e, pre, iters)
        raise UnsupportedElementError(
            f"expression {type(e).__name__} is not supported by the clp target"
        )

    def _occurrence_term(self, e: ir.VarOccurrence, pre: list[str], iters: tuple[str, ...]) -> str:
        name = _upper(e.name)
        if not e.indexes:
            return name
        kind, decl = self.scope.lookup(e.name)
        index = self._linear_index_term(e.indexes, decl.dims, pre, iters)
        if not _SIMPLE_TERM_RE.match(index):
            v = self.fresh()
            pre.append(f"{v} is {index}")
            index = v
        elem = self.fresh()
        pre.append(f"nth({elem},{index},{name})")
        return elem

    def _linear_index_term(self, indexes, dims, pre, iters) -> str:
        if len(indexes) == 1:
            return self.term(indexes[0], pre, iters)
        # row-major linearization over the declared sizes
        linear = self.term(indexes[0], pre, iters)
        for idx, size in zip(indexes[1:], dims[1:]):
            size_t = self.term(size, pre, iters, 3)
            idx_t = self.term(idx, pre, iters, 2)
            linear = f"{size_t}*({linear}-1)+{idx_t}"
        return linear

    def bool_term(self, e: ir.Expression, pre: list[str], iters: tuple[str, ...]) -> str:
        if isinstance(e, ir.BoolValue):
            return "1" if e.value else "0"
        if isinstance(e, ir.VarOccurrence):
            return self._occurrence_term(e, pre, iters)
        if isinstance(e, ir.BoolUnaryOp):
            return f"neg({self.bool_term(e.operand, pre, iters)})"
        if isinstance(e, ir.BoolBinaryOp):
            if e.op in ir.COMPARISON_OPS:
                left = self.term(e.left, pre, iters)
                right = self.term(e.right, pre, iters)
                return f"({left} {_SPELLING[e.op]} {right})"
            connective = {"and": "and", "or": "or", "implies": "=>", "iff": "<=>"}[e.op]
            left = self.bool_term(e.left, pre, iters)
            right = self.bool_term(e.right, pre, iters)
            return f"({left} {connective} {right})"
        raise UnsupportedElementError(
            f"boolean expression {type(e).__name__} is not supported by the clp target"
        )

    # ---- statements ------------------------------------------------------
    def constraint_goals(self, expr: ir.Expression, iters: tuple[str, ...]) -> list[str]:
        if isinstance(expr, ir.BoolBinaryOp) and expr.op == "and":
            return self.constraint_goals(expr.left, iters) + self.constraint_goals(expr.right, iters)
        pre: list[str] = []
        if isinstance(expr, ir.BoolBinaryOp) and expr.op in ir.COMPARISON_OPS:
            left = self.term(expr.left, pre, iters)
            right = self.term(expr.right, pre, iters)
            return pre + [f"{left} {_SPELLING[expr.op]} {right}"]
        if isinstance(expr, ir.BoolValue):
            return pre + (["true"] if expr.value else ["fail"])
        if isinstance(expr, ir.VarOccurrence):
            term = self._occurrence_term(expr, pre, iters)
            return pre + [f"{term} $= 1"]
        if isinstance(expr, (ir.BoolUnaryOp, ir.BoolBinaryOp)):
            goal = self.bool_term(expr, pre, iters)
            return pre + [goal]
        raise UnsupportedElementError(
            f"constraint expression {type(expr).__name__} is not supported by the clp target"
        )

    def stmt_goals(self, s: ir.Statement, level: int, iters: tuple[str, ...]) -> list[str]:
        pad = " " * level
        if isinstance(s, ir.ExpressionConstraint):
            return [pad + g for g in self.constraint_goals(s.expr, iters)]
        if isinstance(s, ir.GlobalCtr):
            pre: list[str] = []
            terms = [self.term(p, pre, iters) for p in s.params]
            if s.ctr_name == "alldifferent":
                goal = f"alldifferent([{','.join(terms)}])"
            else:
                goal = f"{s.ctr_name}({','.join(terms)})"
            return [pad + g for g in pre + [goal]]
        if isinstance(s, ir.ForAll):
            return self.loop_goals(s, level, iters)
        if isinstance(s, ir.If):
            pre: list[str] = []
            cond = self.bool_term(s.cond, pre, iters)
            block = [f"{pad}( {cond} ->"]
            block.append(",\n".join(self.body_goals(s.then_body, level + 1, iters)))
            block.append(f"{pad};")
            block.append(",\n".join(self.body_goals(s.else_body or (), level + 1, iters)))
            block.append(f"{pad})")
            return [pad + g for g in pre] + ["\n".join(block)]
        raise UnsupportedElementError(
            f"statement {type(s).__name__} is not supported by the clp target"
        )

    def body_goals(self, body, level: int, iters: tuple[str, ...]) -> list[str]:
        goals: list[str] = []
        for b in body:
            goals.extend(self.stmt_goals(b, level, iters))
        if not goals:
            goals = [" " * level + "true"]
        return goals

    def loop_goals(self, s: ir.ForAll, level: int, iters: tuple[str, ...]) -> list[str]:
        pad = " " * level
        pre: list[str] = []
        lo = self.term(s.lower, pre, iters)
        hi = self.term(s.upper, pre, iters)
        params = self._param_list(s, iters)
        iter_name = _upper(s.iter_var)
        head = f"{pad}(for({iter_name},{lo},{hi})"
        if params:
            head += f",param({','.join(params)})"
        head += " do"
        inner = self.body_goals(s.body, level + 1, iters + (s.iter_var,))
        block = head + "\n" + ",\n".join(inner) + "\n" + pad + ")"
        return [pad + g for g in pre] + [block]

    def _param_list(self, s: ir.ForAll, iters: tuple[str, ...]) -> list[str]:
        """Outside names referenced anywhere in the loop body."""
        used: set[str] = set()

        def collect(stmt: ir.Statement):
            for expr in ir._statement_exprs(stmt):
                for node in ir.walk_expr(expr):
                    if isinstance(node, ir.VarOccurrence):
                        used.add(node.name)

        for b in s.body:
            collect(b)
        params = [_upper(v.name) for v in self.variables if v.name in used]
        params += [_upper(c.name) for c in self.constants if c.name in used]
        params += [_upper(name) for name in iters if name in used]
        return params

    # ---- declarations ----------------------------------------------------
    def _count_term(self, v: ir.Variable, pre: list[str]) -> str:
        dims = [self.term(d, pre, (), 3) for d in v.dims]
        return "*".join(dims)

    def decl_goals(self) -> list[str]:
        goals: list[str] = []
        for v in self.variables:
            name = _upper(v.name)
            pre: list[str] = []
            if v.is_set:
                if not isinstance(v.domain, ir.IntervalDomain):
                    raise UnsupportedElementError(
                        f"set variable '{v.name}' needs an interval universe"
                    )
                lo = self.term(v.domain.lo, pre, ())
                hi = self.term(v.domain.hi, pre, ())
                if v.dims:
                    count = self._count_term(v, pre)
                    goals.extend(pre)
                    goals.append(f"intsets({name},{count},{lo},{hi})")
                else:
                    goals.extend(pre)
                    goals.append(f"intset({name},{lo},{hi})")
                continue
            domain = self._domain_text(v, pre)
            decl = []
            if v.dims:
                decl.append(f"length({name},{self._count_term(v, pre)})")
            decl.append(f"{name} :: {domain}")
            goals.extend(pre)
            goals.extend(decl)
        return goals

    def _domain_text(self, v: ir.Variable, pre: list[str]) -> str:
        if v.type_name == "bool":
            return "0..1"
        if isinstance(v.domain, ir.IntervalDomain):
            lo = self.term(v.domain.lo, pre, ())
            hi = self.term(v.domain.hi, pre, ())
            return f"{lo}..{hi}"
        if isinstance(v.domain, ir.SetDomain):
            members = ",".join(self.term(m, pre, ()) for m in v.domain.members)
            return f"[{members}]"
        raise UnsupportedElementError(
            f"variable '{v.name}' needs a finite domain for the clp target"
        )

    def decision_binding(self) -> list[str]:
        arrays = [_upper(v.name) for v in self.variables if v.dims]
        scalars = [_upper(v.name) for v in self.variables if not v.dims]
        parts = arrays + (["[" + ",".join(scalars) + "]"] if scalars else [])
        if not parts:
            return ["L = []"]
        if len(parts) == 1:
            return [f"L = {parts[0]}"]
        goals = []
        acc = parts[0]
        for i, part in enumerate(parts[1:]):
            target = "L" if i == len(parts) - 2 else self.fresh()
            goals.append(f"append({acc},{part},{target})")
            acc = target
        return goals

    # ---- whole clause ------------------------------------------------------
    def emit(self) -> str:
        name = self.opts.predicate_name
        if name is None:
            name = self.model.name[:1].lower() + self.model.name[1:]
        if not _ATOM_RE.match(name):
            raise UnsupportedElementError(f"'{name}' is not a valid predicate name")

        sections: list[list[str]] = []
        const_goals = []
        for c in self.constants:
            pre: list[str] = []
            value = self.term(c.value, pre, ())
            const_goals.extend(pre)
            const_goals.append(f"{_upper(c.name)} $= {value}")
        if const_goals:
            sections.append(const_goals)
        decls = self.decl_goals() + self.decision_binding()
        if self.variables:
            sections.append(decls)
        for e in self.model.elements:
            if isinstance(e, ir.ConstraintZone):
                goals = [f"% {e.name}"]
                for s in e.body:
                    goals.extend(self.stmt_goals(s, 1, ()))
                if len(goals) == 1:
                    goals.append(" true")  # empty zone still needs a goal
                sections.append(goals)
            elif isinstance(e, ir.Statement):
                sections.append(self.stmt_goals(e, 1, ()))
        if self.opts.label_sets:
            sections.append(["label_sets(L)"])

        lines = [f"{name}(L):-"]
        flat: list[tuple[str, bool]] = []  # (text, section-final)
        for si, section in enumerate(sections):
            for gi, goal in enumerate(section):
                flat.append((goal, si == len(sections) - 1 and gi == len(section) - 1))
            if si != len(sections) - 1:
                flat.append(("", False))
        if not flat:
            return f"{name}(L):-\n true.\n"
        out: list[str] = []
        for text, is_last in flat:
            if text == "":
                out.append("")
                continue
            prefixed = text if text.startswith(" ") or text.startswith("%") else " " + text
            if text.startswith("%"):
                prefixed = " " + text
                out.append(prefixed)
                continue
            out.append(prefixed + ("." if is_last else ","))
        return lines[0] + "\n" + "\n".join(out) + "\n"


def emit_clp(model: ir.Model, opts: ClpEmitOptions | None = None) -> str:
    """Emit a structured CLP clause for a class-free, enum-free model."""
    model = sema.resolve(model)
    return _Emitter(model, opts or ClpEmitOptions()).emit()
