"""Recursive-descent parser for ``.wl`` sources.

Accepts either a full function (``int f(int x, int* a) { ... return e; }``) or a
bare statement list; the latter is wrapped into a program named ``main`` whose
inputs are the variables read before they are first assigned.
"""
from __future__ import annotations

import re
from typing import List, NamedTuple, Optional, Sequence

from . import ast as A


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: Sequence[str] = ()):
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        where = f"{line}:{col}"
        if self.expected:
            message = f"{message} (expected one of: {', '.join(self.expected)})"
        super().__init__(f"{where}: {message}")


class Token(NamedTuple):
    kind: str  # NUM, IDENT, KW, OP, EOF
    text: str
    line: int
    col: int


KEYWORDS = {"int", "if", "else", "while", "return", "true", "false", "and", "or"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|<=|>=|==|!=|&&|\|\||[-+*/<>!&(){};,])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        text = m.group(0)
        col = pos - line_start + 1
        kind = m.lastgroup
        if kind == "num":
            tokens.append(Token("NUM", text, line, col))
        elif kind == "ident":
            tokens.append(Token("KW" if text in KEYWORDS else "IDENT", text, line, col))
        elif kind == "op":
            # C spellings of the logical connectives
            text = {"&&": "and", "||": "or"}.get(text, text)
            tokens.append(Token("KW" if text in ("and", "or") else "OP", text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


_ARITH_FOLLOW = {"+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!="}


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.toks = tokens
        self.i = 0

    # -- token plumbing --
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("OP", "KW")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"unexpected {self._describe(self.tok)}", [text])
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "IDENT":
            self.fail(f"unexpected {self._describe(self.tok)}", ["identifier"])
        return self.advance()

    def fail(self, msg: str, expected: Sequence[str] = ()):
        raise ParseError(msg, self.tok.line, self.tok.col, expected)

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "EOF" else repr(t.text)

    # -- program --
    def program(self) -> A.Program:
        if self.at("int") and self.toks[self.i + 1].kind == "IDENT" and self.toks[self.i + 2].text == "(":
            return self.function()
        start = self.tok
        stmts = []
        while self.tok.kind != "EOF" and not self.at("return"):
            stmts.append(self.stmt())
        ret = None
        if self.at("return"):
            self.advance()
            ret = self.expr()
            self.expect(";")
        if self.tok.kind != "EOF":
            self.fail(f"unexpected {self._describe(self.tok)}", ["end of input"])
        body = A.Block(tuple(stmts), (start.line, start.col))
        params = tuple(A.Param(n) for n in free_variables(body, ret))
        return A.Program("main", params, body, ret, (start.line, start.col))

    def function(self) -> A.Program:
        start = self.expect("int")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ParseError("duplicate parameter name", start.line, start.col)
        lb = self.expect("{")
        stmts = []
        while not self.at("}") and not self.at("return"):
            if self.tok.kind == "EOF":
                self.fail("unexpected end of input", ["}", "statement"])
            stmts.append(self.stmt())
        ret = None
        if self.at("return"):
            self.advance()
            ret = self.expr()
            self.expect(";")
        self.expect("}")
        if self.tok.kind != "EOF":
            self.fail(f"unexpected {self._describe(self.tok)}", ["end of input"])
        return A.Program(name, tuple(params), A.Block(tuple(stmts), (lb.line, lb.col)), ret,
                         (start.line, start.col))

    def param(self) -> A.Param:
        t = self.expect("int")
        pointer = False
        if self.at("*"):
            self.advance()
            pointer = True
        return A.Param(self.ident().text, pointer, (t.line, t.col))

    # -- statements --
    def block(self) -> A.Block:
        lb = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "EOF":
                self.fail("unexpected end of input", ["}", "statement"])
            stmts.append(self.stmt())
        self.advance()
        return A.Block(tuple(stmts), (lb.line, lb.col))

    def stmt(self) -> A.Stmt:
        t = self.tok
        pos = (t.line, t.col)
        if self.at("if"):
            self.advance()
            self.expect("(")
            pred = self.pred()
            self.expect(")")
            then = self.block()
            orelse = A.Block()
            if self.at("else"):
                self.advance()
                orelse = self.block()
            return A.If(pred, then, orelse, pos)
        if self.at("while"):
            self.advance()
            self.expect("(")
            pred = self.pred()
            self.expect(")")
            return A.While(pred, self.block(), pos)
        decl = False
        if self.at("int"):
            self.advance()
            decl = True
            if self.tok.kind != "IDENT":
                self.fail(f"unexpected {self._describe(self.tok)}", ["identifier"])
            t = self.tok
        if self.at("*"):
            self.advance()
            ptr = self.ident().text
            self.expect(":=")
            e = self.expr()
            self.expect(";")
            return A.DerefWrite(ptr, e, pos)
        if t.kind == "IDENT":
            name = self.advance().text
            self.expect(":=")
            if self.at("&"):
                self.advance()
                target = self.ident().text
                self.expect(";")
                return A.AddrOf(name, target, pos, decl=decl)
            if self.at("*"):
                self.advance()
                ptr = self.ident().text
                self.expect(";")
                return A.DerefRead(name, ptr, pos, decl=decl)
            e = self.expr()
            self.expect(";")
            return A.Assign(name, e, pos, decl=decl)
        self.fail(f"unexpected {self._describe(t)}", ["identifier", "*", "if", "while", "int"])

    # -- predicates: or < and < ! --
    def pred(self) -> A.Pred:
        left = self.pred_and()
        while self.at("or"):
            t = self.advance()
            left = A.Or(left, self.pred_and(), (t.line, t.col))
        return left

    def pred_and(self) -> A.Pred:
        left = self.pred_not()
        while self.at("and"):
            t = self.advance()
            left = A.And(left, self.pred_not(), (t.line, t.col))
        return left

    def pred_not(self) -> A.Pred:
        if self.at("!"):
            t = self.advance()
            return A.Not(self.pred_not(), (t.line, t.col))
        return self.pred_atom()

    def pred_atom(self) -> A.Pred:
        t = self.tok
        pos = (t.line, t.col)
        if self.at("true") or self.at("false"):
            self.advance()
            return A.BoolConst(t.text == "true", pos)
        if self.at("("):
            # "(" may open a nested predicate or a parenthesised arithmetic operand
            save = self.i
            try:
                self.advance()
                inner = self.pred()
                self.expect(")")
                if self.tok.text not in _ARITH_FOLLOW:
                    return inner
            except ParseError:
                pass
            self.i = save
        left = self.expr()
        op = self.tok
        if op.text not in ("<", "<=", ">", ">=", "==", "!=") or op.kind != "OP":
            self.fail(f"unexpected {self._describe(op)}", ["<", "<=", ">", ">=", "==", "!="])
        self.advance()
        right = self.expr()
        if op.text == "==":
            return A.eq(left, right, pos)
        if op.text == "!=":
            return A.ne(left, right, pos)
        return A.Rel(op.text, left, right, pos)

    # -- arithmetic --
    def expr(self) -> A.Expr:
        left = self.term()
        while self.tok.kind == "OP" and self.tok.text in ("+", "-"):
            t = self.advance()
            left = A.BinOp(t.text, left, self.term(), (t.line, t.col))
        return left

    def term(self) -> A.Expr:
        left = self.atom()
        while self.tok.kind == "OP" and self.tok.text in ("*", "/"):
            t = self.advance()
            left = A.BinOp(t.text, left, self.atom(), (t.line, t.col))
        return left

    def atom(self) -> A.Expr:
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            return A.Num(int(t.text), (t.line, t.col))
        if t.kind == "IDENT":
            self.advance()
            return A.Var(t.text, (t.line, t.col))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail(f"unexpected {self._describe(t)}", ["identifier", "number", "("])


def free_variables(body: A.Block, ret: Optional[A.Expr] = None) -> List[str]:
    """Names read before any assignment, in order of first use."""
    seen: List[str] = []
    assigned: set = set()

    def use(names_in_order):
        for n in names_in_order:
            if n not in assigned and n not in seen:
                seen.append(n)

    def ordered(e):
        if isinstance(e, A.Var):
            return [e.name]
        if isinstance(e, A.BinOp):
            return ordered(e.left) + ordered(e.right)
        return []

    def pordered(p):
        if isinstance(p, A.Rel):
            return ordered(p.left) + ordered(p.right)
        if isinstance(p, A.Not):
            return pordered(p.arg)
        if isinstance(p, (A.And, A.Or)):
            return pordered(p.left) + pordered(p.right)
        return []

    def visit(block, assigned_here):
        for s in block:
            if isinstance(s, A.Assign):
                use(ordered(s.expr))
                assigned_here.add(s.var)
                assigned.add(s.var)
            elif isinstance(s, A.DerefWrite):
                use([s.pointer] + ordered(s.expr))
            elif isinstance(s, A.DerefRead):
                use([s.pointer])
                assigned.add(s.var)
            elif isinstance(s, A.AddrOf):
                assigned.add(s.var)
            elif isinstance(s, A.If):
                use(pordered(s.pred))
                visit(s.then, assigned_here)
                visit(s.orelse, assigned_here)
            elif isinstance(s, A.While):
                use(pordered(s.pred))
                visit(s.body, assigned_here)
            elif isinstance(s, A.Block):
                visit(s, assigned_here)

    visit(body, set())
    if ret is not None:
        use(ordered(ret))
    return seen


def parse(source: str) -> A.Program:
    """Parse a ``.wl`` source text into a :class:`Program`."""
    return _Parser(tokenize(source)).program()


def parse_expr(source: str) -> A.Expr:
    p = _Parser(tokenize(source))
    e = p.expr()
    if p.tok.kind != "EOF":
        p.fail(f"unexpected {p._describe(p.tok)}", ["end of input"])
    return e


def parse_pred(source: str) -> A.Pred:
    p = _Parser(tokenize(source))
    e = p.pred()
    if p.tok.kind != "EOF":
        p.fail(f"unexpected {p._describe(p.tok)}", ["end of input"])
    return e
