"""Deterministic source-syntax printing of pivot models.

``print_pivot(parse(text))`` reparses to a structurally equal model for
every model built from frontend-expressible constructs.  Predicates,
functions, records and interval values have no surface syntax and raise
UnprintableError.
"""

from __future__ import annotations

from . import ir
from .errors import UnprintableError

# Binding strengths, loosest to tightest.  Keep in sync with parser.py.
_BOOL_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4}
_CMP_PREC = 6
_SET_PREC = {"union": 7, "diff": 7, "intersect": 8}
_ALG_PREC = {"+": 9, "-": 9, "*": 10, "/": 10, "^": 11}
_UNARY_PREC = 12
_ATOM_PREC = 13
_POWER_PREC = 11


def _prec(e: ir.Expression) -> int:
    if isinstance(e, ir.BoolBinaryOp):
        return _BOOL_PREC.get(e.op, _CMP_PREC)
    if isinstance(e, ir.BoolUnaryOp):
        return 5
    if isinstance(e, ir.SetBinaryOp):
        return _SET_PREC[e.op]
    if isinstance(e, ir.AlgBinaryOp):
        return _ALG_PREC[e.op]
    if isinstance(e, ir.AlgUnaryOp):
        return _UNARY_PREC
    if isinstance(e, (ir.IntValue, ir.RealValue)) and e.v < 0:
        return _UNARY_PREC  # prints with a leading minus
    return _ATOM_PREC


def print_expression(e: ir.Expression, min_prec: int = 0) -> str:
    text = _render(e)
    if _prec(e) < min_prec:
        return f"({text})"
    return text


def _render_occurrence(e: ir.VarOccurrence) -> str:
    text = e.name
    if e.indexes:
        text += "[" + ",".join(print_expression(i) for i in e.indexes) + "]"
    return text


def _render(e: ir.Expression) -> str:
    if isinstance(e, ir.IntValue):
        return str(e.v)
    if isinstance(e, ir.RealValue):
        return repr(e.v)
    if isinstance(e, ir.BoolValue):
        return "true" if e.value else "false"
    if isinstance(e, ir.IntervalValue):
        raise UnprintableError("interval values have no source syntax")
    if isinstance(e, ir.VarOccurrence):
        return _render_occurrence(e)
    if isinstance(e, ir.ObjectOccurrence):
        return ".".join(_render_occurrence(s) for s in e.path)
    if isinstance(e, ir.FunctionCall) or isinstance(e, ir.PredicateCall):
        raise UnprintableError(f"call of '{e.name}' has no source syntax")
    if isinstance(e, ir.BoolUnaryOp):
        return "not " + print_expression(e.operand, 5)
    if isinstance(e, ir.BoolBinaryOp):
        p = _prec(e)
        return (
            print_expression(e.left, p)
            + f" {e.op} "
            + print_expression(e.right, p + 1)
        )
    if isinstance(e, ir.SetValue):
        return "{" + ",".join(print_expression(x) for x in e.elems) + "}"
    if isinstance(e, ir.SetFunction):
        return f"{e.fn}(" + print_expression(e.arg) + ")"
    if isinstance(e, ir.SetBinaryOp):
        p = _prec(e)
        return (
            print_expression(e.left, p)
            + f" {e.op} "
            + print_expression(e.right, p + 1)
        )
    if isinstance(e, ir.AlgFunction):
        return f"{e.fn}(" + ", ".join(print_expression(a) for a in e.args) + ")"
    if isinstance(e, ir.AlgUnaryOp):
        sign = "-" if e.op == "neg" else "+"
        # parenthesize literal operands so reparsing does not fold them
        if isinstance(e.operand, (ir.IntValue, ir.RealValue)):
            return f"{sign}({_render(e.operand)})"
        return sign + print_expression(e.operand, _POWER_PREC)
    if isinstance(e, ir.AlgBinaryOp):
        if e.op == "^":
            return (
                print_expression(e.left, _ATOM_PREC)
                + " ^ "
                + print_expression(e.right, _POWER_PREC)
            )
        p = _prec(e)
        return (
            print_expression(e.left, p)
            + f" {e.op} "
            + print_expression(e.right, p + 1)
        )
    raise TypeError(f"unknown expression {e!r}")


# --------------------------------------------------------------------------
# Statements and declarations

def _domain_text(d: ir.Domain) -> str:
    if isinstance(d, ir.IntervalDomain):
        return print_expression(d.lo, _ATOM_PREC) + ".." + print_expression(d.hi, _ATOM_PREC)
    if isinstance(d, ir.SetDomain):
        return "{" + ",".join(print_expression(m) for m in d.members) + "}"
    return print_expression(d.expr)


def _typed_prefix(decl: ir.TypedElement) -> str:
    text = decl.type_name
    if decl.is_set:
        text += " set"
    text += f" {decl.name}"
    if decl.dims:
        text += "[" + ",".join(print_expression(d) for d in decl.dims) + "]"
    return text


def _print_stmt(s: ir.Statement, out: list[str], level: int):
    pad = "  " * level
    if isinstance(s, ir.ExpressionConstraint):
        out.append(f"{pad}{print_expression(s.expr)};")
    elif isinstance(s, ir.GlobalCtr):
        args = ", ".join(print_expression(p) for p in s.params)
        out.append(f"{pad}{s.ctr_name}({args});")
    elif isinstance(s, ir.ForAll):
        lower = print_expression(s.lower, _ATOM_PREC)
        upper = print_expression(s.upper, _ATOM_PREC)
        out.append(f"{pad}forall({s.iter_var} in {lower}..{upper}) {{")
        for b in s.body:
            _print_stmt(b, out, level + 1)
        out.append(f"{pad}}}")
    elif isinstance(s, ir.If):
        out.append(f"{pad}if ({print_expression(s.cond)}) {{")
        for b in s.then_body:
            _print_stmt(b, out, level + 1)
        if s.else_body is not None:
            out.append(f"{pad}}} else {{")
            for b in s.else_body:
                _print_stmt(b, out, level + 1)
        out.append(f"{pad}}}")
    else:
        raise TypeError(f"unknown statement {s!r}")


def _print_feature(e: ir.ModelElement, out: list[str], level: int):
    pad = "  " * level
    if isinstance(e, ir.Enumeration):
        out.append(f"{pad}enum {e.name} := {{" + ",".join(e.literals) + "};")
    elif isinstance(e, ir.Constant):
        out.append(f"{pad}{_typed_prefix(e)} := {print_expression(e.value)};")
    elif isinstance(e, ir.Variable):
        text = f"{pad}{_typed_prefix(e)}"
        if e.domain is not None:
            text += f" in {_domain_text(e.domain)}"
        out.append(text + ";")
    elif isinstance(e, ir.Class):
        head = "main class" if e.is_main else "class"
        out.append(f"{pad}{head} {e.name} {{")
        for f in e.features:
            _print_feature(f, out, level + 1)
        out.append(f"{pad}}}")
    elif isinstance(e, ir.ConstraintZone):
        out.append(f"{pad}constraint {e.name} {{")
        for s in e.body:
            _print_stmt(s, out, level + 1)
        out.append(f"{pad}}}")
    elif isinstance(e, ir.Statement):
        _print_stmt(e, out, level)
    elif isinstance(e, (ir.Predicate, ir.Function, ir.Record)):
        kind = type(e).__name__.lower()
        raise UnprintableError(f"{kind} '{e.name}' has no source syntax")
    else:
        raise TypeError(f"unknown element {e!r}")


def print_pivot(model: ir.Model) -> str:
    """Render a model in the source grammar, header line first."""
    out = [f"model {model.name};"]
    for e in model.elements:
        _print_feature(e, out, 0)
    return "\n".join(out) + "\n"
