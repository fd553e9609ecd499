"""Frontend for the object-oriented source language.

A source unit is a model file plus an optional data file.  Both accept the
same top-level declarations; data-file elements come first in the model.

Grammar sketch (see README for the full table):

    unit       := ["model" ID ";"] topDecl*
    topDecl    := enumDecl | constDecl | varDecl | classDecl | zone
    enumDecl   := "enum" ID ":=" "{" ID ("," ID)* "}" ";"
    constDecl  := ("int"|"real"|"bool") ID ":=" expr ";"
    classDecl  := ["main"] "class" ID "{" feature* "}"
    feature    := varDecl | constDecl | zone
    varDecl    := typeRef ["set"] ID ["[" expr ("," expr)* "]"] ["in" domain] ";"
    domain     := "{" expr ("," expr)* "}" | expr [".." expr]
    zone       := "constraint" ID "{" stmt* "}"
    stmt       := forall | ifStmt | globalCtr | expr ";"

Operator precedence, loosest to tightest: iff, implies, or, and, not,
comparisons, union/diff, intersect, additive, multiplicative, ^ (right
associative), unary -/+ (an exponent may be signed, so ``-x^2`` reads as
``-(x^2)``), then indexing / navigation / calls.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from . import ir
from .errors import Diagnostic, Loc, ParseError

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))

KEYWORDS = frozenset(
    "enum int real bool class main constraint forall if else in set "
    "not and or iff implies card intersect union diff true false".split()
)

_OPERATORS = (":=", "..", "<=", ">=", "!=", "=", "<", ">", "+", "-", "*", "/",
              "^", "(", ")", "{", "}", "[", "]", ";", ",", ".")

MAX_DIAGNOSTICS = 20
MAX_NESTING = 64

GLOBAL_CONSTRAINT_NAMES = frozenset({"alldifferent"})


@dataclass(frozen=True)
class SourceUnit:
    model_text: str
    data_text: str | None = None
    model_file: str = "<model>"
    data_file: str = "<data>"


@dataclass(frozen=True)
class Token:
    kind: str  # ID | INT | REAL | KW | OP | EOF
    text: str
    line: int
    col: int


def _is_ident_start(c: str) -> bool:
    return "a" <= c <= "z" or "A" <= c <= "Z" or c == "_"


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or "0" <= c <= "9"


class _Abort(Exception):
    """Internal: too many diagnostics or an unrecoverable state."""


class _SyntaxIssue(Exception):
    def __init__(self, message: str, token: Token):
        self.message = message
        self.token = token
        super().__init__(message)


def _lex(text: str, file: str, diags: list[Diagnostic]) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = "KW" if word in KEYWORDS else "ID"
            tokens.append(Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        if "0" <= c <= "9":
            j = i
            while j < n and "0" <= text[j] <= "9":
                j += 1
            is_real = False
            if j < n and text[j] == "." and j + 1 < n and "0" <= text[j + 1] <= "9":
                is_real = True
                j += 1
                while j < n and "0" <= text[j] <= "9":
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and "0" <= text[k] <= "9":
                    is_real = True
                    j = k
                    while j < n and "0" <= text[j] <= "9":
                        j += 1
            tokens.append(Token("REAL" if is_real else "INT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("OP", op, line, start_col))
                i += len(op)
                col += len(op)
                break
        else:
            if len(diags) < MAX_DIAGNOSTICS:
                diags.append(
                    Diagnostic("error", f"unexpected character {c!r}", line, start_col, file)
                )
            if len(diags) >= MAX_DIAGNOSTICS:
                raise _Abort()
            i += 1
            col += 1
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], file: str, diags: list[Diagnostic]):
        self.tokens = tokens
        self.file = file
        self.pos = 0
        self.diags = diags
        self.depth = 0

    # ---- token plumbing ----
    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, off: int = 1) -> Token:
        return self.tokens[min(self.pos + off, len(self.tokens) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    def advance(self) -> Token:
        t = self.cur
        if t.kind != "EOF":
            self.pos += 1
        return t

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        want = text or kind.lower()
        got = self.cur.text or "end of input"
        raise _SyntaxIssue(f"expected '{want}', found '{got}'", self.cur)

    def loc(self, tok: Token | None = None) -> Loc:
        t = tok or self.cur
        return Loc(t.line, t.col, self.file)

    def error(self, issue: _SyntaxIssue):
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(
                Diagnostic("error", issue.message, issue.token.line, issue.token.col, self.file)
            )
        if len(self.diags) >= MAX_DIAGNOSTICS:
            raise _Abort()

    def sync_decl(self):
        """Skip to a plausible declaration boundary after an error."""
        while not self.at("EOF"):
            t = self.advance()
            if t.kind == "OP" and t.text in (";", "}"):
                return
            if self.cur.kind == "KW" and self.cur.text in ("class", "enum", "constraint", "main"):
                return

    def sync_stmt(self):
        while not self.at("EOF"):
            if self.at("OP", "}"):
                return
            t = self.advance()
            if t.kind == "OP" and t.text == ";":
                return

    # ---- declarations ----
    def parse_unit(self) -> list[ir.ModelElement]:
        elements: list[ir.ModelElement] = []
        while not self.at("EOF"):
            try:
                elements.extend(self.parse_top_decl())
            except _SyntaxIssue as issue:
                self.error(issue)
                self.sync_decl()
        return elements

    def parse_top_decl(self) -> list[ir.ModelElement]:
        if self.at("KW", "enum"):
            return [self.parse_enum()]
        if self.at("KW", "main") or self.at("KW", "class"):
            return [self.parse_class()]
        if self.at("KW", "constraint"):
            return [self.parse_zone()]
        if self.cur.kind == "ID" or (self.cur.kind == "KW" and self.cur.text in ("int", "real", "bool")):
            return [self.parse_typed_decl()]
        raise _SyntaxIssue(f"expected a declaration, found '{self.cur.text}'", self.cur)

    def parse_enum(self) -> ir.Enumeration:
        start = self.expect("KW", "enum")
        name = self.expect("ID").text
        self.expect("OP", ":=")
        self.expect("OP", "{")
        literals = [self.expect("ID").text]
        while self.accept("OP", ","):
            literals.append(self.expect("ID").text)
        self.expect("OP", "}")
        self.expect("OP", ";")
        return ir.Enumeration(name, tuple(literals), loc=self.loc(start))

    def parse_class(self) -> ir.Class:
        is_main = self.accept("KW", "main") is not None
        start = self.expect("KW", "class")
        name = self.expect("ID").text
        self.expect("OP", "{")
        features: list[ir.ModelFeature] = []
        while not self.at("OP", "}") and not self.at("EOF"):
            try:
                if self.at("KW", "constraint"):
                    features.append(self.parse_zone())
                else:
                    features.append(self.parse_typed_decl())
            except _SyntaxIssue as issue:
                self.error(issue)
                self.sync_stmt()
        self.expect("OP", "}")
        return ir.Class(name, tuple(features), is_main, loc=self.loc(start))

    def parse_typed_decl(self) -> ir.ModelFeature:
        start = self.cur
        if self.cur.kind == "KW" and self.cur.text in ("int", "real", "bool"):
            type_name = self.advance().text
        else:
            type_name = self.expect("ID").text
        is_set = self.accept("KW", "set") is not None
        name = self.expect("ID").text
        if self.at("OP", ":="):
            if is_set:
                raise _SyntaxIssue("constants cannot be sets", self.cur)
            if type_name not in ("int", "real", "bool"):
                raise _SyntaxIssue("constants must be int, real or bool", start)
            self.advance()
            value = self.parse_expression()
            self.expect("OP", ";")
            return ir.Constant(name, type_name, value, loc=self.loc(start))
        dims: list[ir.Expression] = []
        if self.accept("OP", "["):
            dims.append(self.parse_expression())
            while self.accept("OP", ","):
                dims.append(self.parse_expression())
            self.expect("OP", "]")
        domain = None
        if self.accept("KW", "in"):
            domain = self.parse_domain()
        self.expect("OP", ";")
        return ir.Variable(name, type_name, is_set, tuple(dims), domain, loc=self.loc(start))

    def parse_domain(self) -> ir.Domain:
        start = self.cur
        if self.accept("OP", "{"):
            members = [self.parse_expression()]
            while self.accept("OP", ","):
                members.append(self.parse_expression())
            self.expect("OP", "}")
            return ir.SetDomain(tuple(members), loc=self.loc(start))
        lo = self.parse_expression()
        if self.accept("OP", ".."):
            hi = self.parse_expression()
            return ir.IntervalDomain(lo, hi, loc=self.loc(start))
        return ir.ExprDomain(lo, loc=self.loc(start))

    def parse_zone(self) -> ir.ConstraintZone:
        start = self.expect("KW", "constraint")
        name = self.expect("ID").text
        self.expect("OP", "{")
        body = self.parse_stmt_list()
        self.expect("OP", "}")
        return ir.ConstraintZone(name, tuple(body), loc=self.loc(start))

    # ---- statements ----
    def parse_stmt_list(self) -> list[ir.Statement]:
        body: list[ir.Statement] = []
        while not self.at("OP", "}") and not self.at("EOF"):
            try:
                body.append(self.parse_stmt())
            except _SyntaxIssue as issue:
                self.error(issue)
                self.sync_stmt()
        return body

    def parse_stmt(self) -> ir.Statement:
        if self.depth >= MAX_NESTING:
            raise _SyntaxIssue("statements nested too deeply", self.cur)
        if self.at("KW", "forall"):
            return self.parse_forall()
        if self.at("KW", "if"):
            return self.parse_if()
        if (
            self.cur.kind == "ID"
            and self.cur.text in GLOBAL_CONSTRAINT_NAMES
            and self.peek().kind == "OP"
            and self.peek().text == "("
        ):
            return self.parse_global()
        start = self.cur
        expr = self.parse_expression()
        self.expect("OP", ";")
        return ir.ExpressionConstraint(expr, loc=self.loc(start))

    def parse_forall(self) -> ir.ForAll:
        start = self.expect("KW", "forall")
        self.expect("OP", "(")
        iter_var = self.expect("ID").text
        self.expect("KW", "in")
        lower = self.parse_expression()
        self.expect("OP", "..")
        upper = self.parse_expression()
        self.expect("OP", ")")
        self.depth += 1
        try:
            if self.accept("OP", "{"):
                body = self.parse_stmt_list()
                self.expect("OP", "}")
            else:
                body = [self.parse_stmt()]
        finally:
            self.depth -= 1
        return ir.ForAll(iter_var, lower, upper, tuple(body), loc=self.loc(start))

    def parse_if(self) -> ir.If:
        start = self.expect("KW", "if")
        self.expect("OP", "(")
        cond = self.parse_expression()
        self.expect("OP", ")")
        self.depth += 1
        try:
            self.expect("OP", "{")
            then_body = self.parse_stmt_list()
            self.expect("OP", "}")
            else_body = None
            if self.accept("KW", "else"):
                self.expect("OP", "{")
                else_body = tuple(self.parse_stmt_list())
                self.expect("OP", "}")
        finally:
            self.depth -= 1
        return ir.If(cond, tuple(then_body), else_body, loc=self.loc(start))

    def parse_global(self) -> ir.GlobalCtr:
        start = self.expect("ID")
        self.expect("OP", "(")
        params = [self.parse_expression()]
        while self.accept("OP", ","):
            params.append(self.parse_expression())
        self.expect("OP", ")")
        self.expect("OP", ";")
        return ir.GlobalCtr(start.text, tuple(params), loc=self.loc(start))

    # ---- expressions ----
    def parse_expression(self) -> ir.Expression:
        return self.parse_iff()

    def _binary_loop(self, sub, ops: dict, node_type):
        left = sub()
        while True:
            tok = self.cur
            key = tok.text
            if (tok.kind in ("KW", "OP")) and key in ops:
                self.advance()
                right = sub()
                left = node_type(ops[key], left, right, loc=self.loc(tok))
            else:
                return left

    def parse_iff(self):
        return self._binary_loop(self.parse_implies, {"iff": "iff"}, ir.BoolBinaryOp)

    def parse_implies(self):
        return self._binary_loop(self.parse_or, {"implies": "implies"}, ir.BoolBinaryOp)

    def parse_or(self):
        return self._binary_loop(self.parse_and, {"or": "or"}, ir.BoolBinaryOp)

    def parse_and(self):
        return self._binary_loop(self.parse_not, {"and": "and"}, ir.BoolBinaryOp)

    def parse_not(self):
        if self.at("KW", "not"):
            tok = self.advance()
            if self.depth >= MAX_NESTING:
                raise _SyntaxIssue("expression nested too deeply", tok)
            self.depth += 1
            try:
                operand = self.parse_not()
            finally:
                self.depth -= 1
            return ir.BoolUnaryOp("not", operand, loc=self.loc(tok))
        return self.parse_comparison()

    def parse_comparison(self):
        ops = {"=": "=", "!=": "!=", "<=": "<=", ">=": ">=", "<": "<", ">": ">"}
        return self._binary_loop(self.parse_set_union, ops, ir.BoolBinaryOp)

    def parse_set_union(self):
        return self._binary_loop(
            self.parse_set_intersect, {"union": "union", "diff": "diff"}, ir.SetBinaryOp
        )

    def parse_set_intersect(self):
        return self._binary_loop(
            self.parse_additive, {"intersect": "intersect"}, ir.SetBinaryOp
        )

    def parse_additive(self):
        return self._binary_loop(self.parse_multiplicative, {"+": "+", "-": "-"}, ir.AlgBinaryOp)

    def parse_multiplicative(self):
        return self._binary_loop(self.parse_unary, {"*": "*", "/": "/"}, ir.AlgBinaryOp)

    def parse_unary(self):
        if self.at("OP", "-") or self.at("OP", "+"):
            tok = self.advance()
            negative = tok.text == "-"
            # a sign directly on a numeric literal folds into the literal,
            # unless '^' follows (the sign binds below the power: -2^2 = -(2^2))
            followed_by_power = self.peek().kind == "OP" and self.peek().text == "^"
            if self.cur.kind == "INT" and not followed_by_power:
                lit = self.advance()
                v = int(lit.text)
                return ir.IntValue(-v if negative else v, loc=self.loc(tok))
            if self.cur.kind == "REAL" and not followed_by_power:
                lit = self.advance()
                v = float(lit.text)
                return ir.RealValue(-v if negative else v, loc=self.loc(tok))
            if self.depth >= MAX_NESTING:
                raise _SyntaxIssue("expression nested too deeply", tok)
            self.depth += 1
            try:
                operand = self.parse_unary()
            finally:
                self.depth -= 1
            return ir.AlgUnaryOp("neg" if negative else "plus", operand, loc=self.loc(tok))
        return self.parse_power()

    def parse_power(self):
        left = self.parse_postfix()
        if self.at("OP", "^"):
            tok = self.advance()
            right = self.parse_unary()  # right-assoc; exponent may be signed
            return ir.AlgBinaryOp("^", left, right, loc=self.loc(tok))
        return left

    def parse_postfix(self):
        node = self.parse_primary()
        if isinstance(node, ir.VarOccurrence):
            if self.at("OP", "["):
                node = ir.VarOccurrence(node.name, tuple(self.parse_indexes()), loc=node.loc)
            if self.at("OP", "."):
                steps = [node]
                while self.accept("OP", "."):
                    name_tok = self.expect("ID")
                    indexes: tuple[ir.Expression, ...] = ()
                    if self.at("OP", "["):
                        indexes = tuple(self.parse_indexes())
                    steps.append(
                        ir.VarOccurrence(name_tok.text, indexes, loc=self.loc(name_tok))
                    )
                return ir.ObjectOccurrence(tuple(steps), loc=steps[0].loc)
            return node
        if self.at("OP", "[") or self.at("OP", "."):
            raise _SyntaxIssue("only variables can be indexed or navigated", self.cur)
        return node

    def parse_indexes(self) -> list[ir.Expression]:
        self.expect("OP", "[")
        indexes = [self.parse_expression()]
        while self.accept("OP", ","):
            indexes.append(self.parse_expression())
        self.expect("OP", "]")
        return indexes

    def parse_primary(self):
        tok = self.cur
        if tok.kind == "INT":
            self.advance()
            return ir.IntValue(int(tok.text), loc=self.loc(tok))
        if tok.kind == "REAL":
            self.advance()
            return ir.RealValue(float(tok.text), loc=self.loc(tok))
        if tok.kind == "KW" and tok.text in ("true", "false"):
            self.advance()
            return ir.BoolValue(tok.text == "true", loc=self.loc(tok))
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            if self.depth >= MAX_NESTING:
                raise _SyntaxIssue("expression nested too deeply", tok)
            self.depth += 1
            try:
                inner = self.parse_expression()
            finally:
                self.depth -= 1
            self.expect("OP", ")")
            return inner
        if tok.kind == "OP" and tok.text == "{":
            self.advance()
            elems: list[ir.Expression] = []
            if not self.at("OP", "}"):
                self.depth += 1
                try:
                    elems.append(self.parse_expression())
                    while self.accept("OP", ","):
                        elems.append(self.parse_expression())
                finally:
                    self.depth -= 1
            self.expect("OP", "}")
            return ir.SetValue(tuple(elems), loc=self.loc(tok))
        if tok.kind == "KW" and tok.text == "card":
            self.advance()
            self.expect("OP", "(")
            arg = self.parse_expression()
            self.expect("OP", ")")
            return ir.SetFunction("card", arg, loc=self.loc(tok))
        if tok.kind == "ID":
            if self.peek().kind == "OP" and self.peek().text == "(":
                if tok.text in ir.ALG_FUNCTIONS:
                    self.advance()
                    self.advance()
                    args = [self.parse_expression()]
                    while self.accept("OP", ","):
                        args.append(self.parse_expression())
                    self.expect("OP", ")")
                    return ir.AlgFunction(tok.text, tuple(args), loc=self.loc(tok))
                raise _SyntaxIssue(f"unknown function '{tok.text}'", tok)
            self.advance()
            return ir.VarOccurrence(tok.text, loc=self.loc(tok))
        raise _SyntaxIssue(f"expected an expression, found '{tok.text or 'end of input'}'", tok)


def _parse_decls(text: str, file: str, diags: list[Diagnostic], allow_header: bool):
    tokens = _lex(text, file, diags)
    parser = _Parser(tokens, file, diags)
    header_name = None
    if (
        allow_header
        and parser.at("ID", "model")
        and parser.peek().kind == "ID"
        and parser.peek(2).kind == "OP"
        and parser.peek(2).text == ";"
    ):
        parser.advance()
        header_name = parser.advance().text
        parser.advance()
    return parser.parse_unit(), header_name


def parse(src: SourceUnit) -> ir.Model:
    """Parse a source unit into an unresolved model.

    Raises ParseError carrying positioned diagnostics (at most 20).
    """
    diags: list[Diagnostic] = []
    elements: list[ir.ModelElement] = []
    header_name = None
    try:
        if src.data_text is not None:
            data_elements, _ = _parse_decls(src.data_text, src.data_file, diags, False)
            elements.extend(data_elements)
        model_elements, header_name = _parse_decls(src.model_text, src.model_file, diags, True)
        elements.extend(model_elements)
    except _Abort:
        raise ParseError(diags) from None
    if diags:
        raise ParseError(diags)
    name = header_name
    if name is None:
        mains = [e for e in elements if isinstance(e, ir.Class) and e.is_main]
        if mains:
            name = mains[0].name
        else:
            classes = [e for e in elements if isinstance(e, ir.Class)]
            name = classes[0].name if classes else "model"
    return ir.Model(name, tuple(elements))


def parse_expression(text: str, file: str = "<expr>") -> ir.Expression:
    """Parse a standalone expression with the model grammar's precedence."""
    diags: list[Diagnostic] = []
    try:
        tokens = _lex(text, file, diags)
        parser = _Parser(tokens, file, diags)
        expr = parser.parse_expression()
        if not parser.at("EOF"):
            raise _SyntaxIssue(f"unexpected trailing input '{parser.cur.text}'", parser.cur)
    except _SyntaxIssue as issue:
        diags.append(Diagnostic("error", issue.message, issue.token.line, issue.token.col, file))
        raise ParseError(diags) from None
    except _Abort:
        raise ParseError(diags) from None
    if diags:
        raise ParseError(diags)
    return expr
