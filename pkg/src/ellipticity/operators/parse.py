"""Operator input: JSON schema and a small line-oriented DSL.

DSL example::

    w1 = d1 u1 - d2 u2 ; w2 = d2 u1 + d1 u2

Each statement defines one output row; a term is an optional rational
coefficient, one or more derivatives ``dJ`` and exactly one component ``uJ``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .model import Operator, OperatorError


class OperatorParseError(OperatorError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(message + where)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    value: object = None


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<semi>;)|(?P<eq>=)|(?P<plus>\+)|(?P<minus>[-−])"
    r"|(?P<var>[wdu])(?P<idx>\d+)|(?P<num>\d+(?:/\d+)?)|(?P<star>\*)"
)


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise OperatorParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind == "idx":
            kind = m.group("var")
            toks.append(_Tok(kind, text, line, col, int(m.group("idx"))))
        elif kind == "num":
            toks.append(_Tok("num", text, line, col, Fraction(text)))
        elif kind == "nl":
            toks.append(_Tok("sep", text, line, col))
        elif kind == "semi":
            toks.append(_Tok("sep", text, line, col))
        elif kind != "ws":
            toks.append(_Tok(kind, text, line, col))
        if text == "\n":
            line += 1
            col = 1
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str, what: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            found = t.text if t.kind != "eof" else "end of input"
            raise OperatorParseError(f"expected {what}, found {found!r}", t.line, t.col)
        self.i += 1
        return t

    def statements(self):
        out = []
        while True:
            while self.peek().kind == "sep":
                self.i += 1
            if self.peek().kind == "eof":
                return out
            out.append(self.statement())
            t = self.peek()
            if t.kind not in ("sep", "eof"):
                raise OperatorParseError(f"unexpected {t.text!r}", t.line, t.col)

    def statement(self):
        w = self.take("w", "output row 'wJ'")
        self.take("eq", "'='")
        terms = []
        sign = 1
        if self.peek().kind in ("plus", "minus"):
            sign = -1 if self.take(self.peek().kind, "sign").kind == "minus" else 1
        terms.append(self.term(sign, w))
        while self.peek().kind in ("plus", "minus"):
            sign = -1 if self.take(self.peek().kind, "sign").kind == "minus" else 1
            terms.append(self.term(sign, w))
        return w, terms

    def term(self, sign: int, w: _Tok):
        start = self.peek()
        coef = Fraction(sign)
        if start.kind == "num":
            coef *= self.take("num", "coefficient").value
            if self.peek().kind == "star":
                self.i += 1
        derivs = []
        while self.peek().kind == "d":
            derivs.append(self.take("d", "derivative").value)
        if not derivs:
            t = self.peek()
            raise OperatorParseError(f"expected derivative 'dJ', found {t.text or 'end of input'!r}", t.line, t.col)
        u = self.take("u", "component 'uJ'")
        nxt = self.peek()
        if nxt.kind not in ("plus", "minus", "sep", "eof"):
            raise OperatorParseError(f"unexpected {nxt.text!r} after component {u.text}", nxt.line, nxt.col)
        return coef, derivs, u, start


def parse_dsl(src: str, n: int | None = None, name: str | None = None) -> Operator:
    stmts = _Parser(src).statements()
    if not stmts:
        raise OperatorParseError("empty operator", 1, 1)
    rows: dict[int, list] = {}
    order = None
    max_d = 0
    max_u = 0
    for w, terms in stmts:
        if w.value < 1:
            raise OperatorParseError("row indices start at 1", w.line, w.col)
        if w.value in rows:
            raise OperatorParseError(f"row w{w.value} defined twice", w.line, w.col)
        rows[w.value] = terms
        for coef, derivs, u, start in terms:
            if order is None:
                order = len(derivs)
            elif len(derivs) != order:
                raise OperatorParseError(
                    f"term has {len(derivs)} derivatives but the operator has order {order}", start.line, start.col)
            if min(derivs) < 1 or u.value < 1:
                raise OperatorParseError("indices start at 1", start.line, start.col)
            max_d = max(max_d, max(derivs))
            max_u = max(max_u, u.value)
    dim = n if n is not None else max_d
    if max_d > dim:
        raise OperatorParseError(f"derivative index {max_d} exceeds dimension {dim}")
    dim_w = max(rows)
    dim_v = max_u
    acc: dict[tuple, list[list[Fraction]]] = {}
    for r, terms in rows.items():
        for coef, derivs, u, _ in terms:
            alpha = [0] * dim
            for d in derivs:
                alpha[d - 1] += 1
            mat = acc.setdefault(tuple(alpha), [[Fraction(0)] * dim_v for _ in range(dim_w)])
            mat[r - 1][u.value - 1] += coef
    try:
        return Operator(dim, order, dim_v, dim_w, tuple(acc.items()), name)
    except OperatorError as exc:
        raise OperatorParseError(str(exc)) from None


def parse_json(src: str) -> Operator:
    try:
        obj = json.loads(src)
    except json.JSONDecodeError as exc:
        raise OperatorParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return operator_from_obj(obj)


def operator_from_obj(obj) -> Operator:
    if not isinstance(obj, dict):
        raise OperatorParseError("operator JSON must be an object")
    for key in ("n", "k", "dim_v", "dim_w", "terms"):
        if key not in obj:
            raise OperatorParseError(f"missing field {key!r}")
    terms = []
    for t in obj["terms"]:
        if not isinstance(t, dict) or "alpha" not in t or "matrix" not in t:
            raise OperatorParseError("each term needs 'alpha' and 'matrix'")
        try:
            mat = [[Fraction(str(x)) for x in row] for row in t["matrix"]]
        except (ValueError, TypeError):
            raise OperatorParseError(f"non-rational matrix entry in term {t['alpha']}") from None
        terms.append((tuple(t["alpha"]), mat))
    if not terms:
        raise OperatorParseError("empty operator")
    try:
        return Operator(int(obj["n"]), int(obj["k"]), int(obj["dim_v"]), int(obj["dim_w"]), tuple(terms), obj.get("name"))
    except OperatorError as exc:
        raise OperatorParseError(str(exc)) from None


def parse_operator(source: str, n: int | None = None, name: str | None = None) -> Operator:
    """JSON if the text starts with '{', DSL otherwise."""
    if source.lstrip().startswith("{"):
        return parse_json(source)
    return parse_dsl(source, n=n, name=name)
