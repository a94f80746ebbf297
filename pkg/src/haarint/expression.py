"""Expression language: parsing, normalization, expansion and dispatch.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | postfix ('^' int)?
    postfix:= atom "'"*
    atom   := number | ident | ident "'"? '[' int (',' int)? ']'
            | func '(' expr ')' | '(' expr ')'
    func   := abs | conj | re | im | tr

A number may carry an ``i`` suffix (``2i``).  ``M'[i,j]`` means
``conj(M[j,i])``; ``psi[i]`` means ``psi[i,1]``.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from fractions import Fraction

from .algebra import ExactScalar, RationalFunction, as_scalar, ratfunc_eval
from .entrywise import Monomial, MonomialFactor, integrate_monomial
from .errors import ArgumentError, DispatchError, ParseError, PoleError, UnsupportedFormError
from .measures import MeasureSpec, parse_measure
from .tracelogic import Entry, Trace, TraceExpr, trace_integrate

# ---------------------------------------------------------------------------
# AST


class Node:
    def __add__(self, other):
        return Sum((self, _node(other)))

    def __radd__(self, other):
        return Sum((_node(other), self))

    def __sub__(self, other):
        return Sum((self, Neg(_node(other))))

    def __rsub__(self, other):
        return Sum((_node(other), Neg(self)))

    def __mul__(self, other):
        return Product((self, _node(other)))

    def __rmul__(self, other):
        return Product((_node(other), self))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n: int):
        return Power(self, n)

    def __truediv__(self, other):
        return Quotient(self, _node(other))

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True)
class Number(Node):
    value: ExactScalar


@dataclass(frozen=True, eq=True)
class Symbol(Node):
    name: str


@dataclass(frozen=True, eq=True)
class Index(Node):
    name: str
    row: int
    col: int


@dataclass(frozen=True, eq=True)
class Conj(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Abs(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Re(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Im(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Tr(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Adjoint(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Sum(Node):
    children: tuple


@dataclass(frozen=True, eq=True)
class Product(Node):
    children: tuple


@dataclass(frozen=True, eq=True)
class Power(Node):
    base: Node
    exponent: int


@dataclass(frozen=True, eq=True)
class Neg(Node):
    child: Node


@dataclass(frozen=True, eq=True)
class Quotient(Node):
    num: Node
    den: Node


def _node(x) -> Node:
    if isinstance(x, Node):
        return x
    return Number(as_scalar(x))


def sum_of(items) -> Node:
    items = tuple(items)
    return items[0] if len(items) == 1 else Sum(items)


def product_of(items) -> Node:
    items = tuple(items)
    return items[0] if len(items) == 1 else Product(items)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:i(?![A-Za-z0-9]))?)|(?P<ident>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()\[\],']))"
)
_FUNCS = {"abs": Abs, "conj": Conj, "re": Re, "real": Re, "im": Im, "imag": Im, "tr": Tr}


def _tokenize(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, "number, identifier or operator")
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


def _number(tok: str) -> ExactScalar:
    imag = tok.endswith("i")
    v = Fraction(tok[:-1] if imag else tok)
    return ExactScalar(0, v) if imag else ExactScalar(v)


def _all_numbers(nodes) -> bool:
    return all(isinstance(x, Number) for x in nodes)


def _mk_sum(children):
    if len(children) == 1:
        return children[0]
    if _all_numbers(children):
        total = ExactScalar(0)
        for c in children:
            total = total + c.value
        return Number(total)
    return Sum(tuple(children))


def _mk_product(children):
    if len(children) == 1:
        return children[0]
    if _all_numbers(children):
        total = ExactScalar(1)
        for c in children:
            total = total * c.value
        return Number(total)
    return Product(tuple(children))


def _mk_neg(x):
    return Number(-x.value) if isinstance(x, Number) else Neg(x)


def _mk_quot(a, b, pos):
    if isinstance(a, Number) and isinstance(b, Number):
        if b.value.is_zero():
            raise ParseError("division by zero", pos)
        return Number(a.value / b.value)
    return Quotient(a, b)


def _mk_power(b, n):
    if isinstance(b, Number):
        return Number(b.value ** n)
    return Power(b, n)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.peek()
        if v != value or kind == "end":
            raise ParseError(f"unexpected {v or 'end of input'!r}", pos, repr(value))
        return self.take()

    def parse(self):
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", pos, "operator or end of input")
        return node

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            terms.append(_mk_neg(t) if op == "-" else t)
        return _mk_sum(terms)

    def term(self):
        items = [self.factor()]
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1], self.peek()[2]
            f = self.factor()
            if op == "*":
                items.append(f)
            else:
                items = [_mk_quot(_mk_product(items), f, pos)]
        return _mk_product(items)

    def factor(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return _mk_neg(self.factor())
        base = self.postfix()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, v, pos = self.peek()
            if kind != "num" or not v.isdigit():
                raise ParseError(f"unexpected {v or 'end of input'!r}", pos, "non-negative integer exponent")
            self.take()
            return _mk_power(base, int(v))
        return base

    def postfix(self):
        node = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "'":
            self.take()
            node = Number(node.value.conjugate()) if isinstance(node, Number) else Adjoint(node)
        return node

    def _int(self):
        kind, v, pos = self.peek()
        if kind != "num" or not v.isdigit():
            raise ParseError(f"unexpected {v or 'end of input'!r}", pos, "integer index")
        self.take()
        if int(v) < 1:
            raise ParseError("indices start at 1", pos)
        return int(v)

    def _index(self, name, adjoint):
        self.expect("[")
        row = self._int()
        col = 1
        if self.peek()[1] == ",":
            self.take()
            col = self._int()
        self.expect("]")
        if adjoint:
            return Conj(Index(name, col, row))
        return Index(name, row, col)

    def atom(self):
        kind, v, pos = self.peek()
        if kind == "num":
            self.take()
            return Number(_number(v))
        if kind == "ident":
            self.take()
            nxt = self.peek()
            if v in _FUNCS and nxt[1] == "(":
                self.take()
                inner = self.expr()
                self.expect(")")
                return _FUNCS[v](inner)
            if nxt[1] == "[":
                return self._index(v, False)
            if nxt[1] == "'" and self.peek(1)[1] == "[":
                self.take()
                return self._index(v, True)
            return Symbol(v)
        if kind == "op" and v == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos, "number, identifier or '('")


def parse(text: str) -> Node:
    """Parse an integrand.  Purely numeric subexpressions are folded."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# rendering

_ATOM, _POSTFIX, _FACTOR, _TERM, _EXPR = range(5)


def _num_text(v: ExactScalar) -> tuple[str, int]:
    if v.is_real() and v.re.denominator == 1 and v.re >= 0:
        return str(v.re), _ATOM
    if v.re == 0 and v.im.denominator == 1 and v.im > 0:
        return f"{v.im}i", _ATOM
    return f"({_scalar_src(v)})", _ATOM


def _scalar_src(v: ExactScalar) -> str:
    parts = []
    if v.re:
        parts.append(str(v.re))
    if v.im:
        im = v.im
        mag = abs(im)
        txt = f"{mag.numerator}i" if mag.denominator == 1 else f"{mag.numerator}i/{mag.denominator}"
        sign = "-" if im < 0 else ("+" if parts else "")
        parts.append(sign + txt)
    return "".join(parts) or "0"


def _render(e: Node) -> tuple[str, int]:
    if isinstance(e, Number):
        return _num_text(e.value)
    if isinstance(e, Symbol):
        return e.name, _ATOM
    if isinstance(e, Index):
        return f"{e.name}[{e.row},{e.col}]", _ATOM
    for cls, name in ((Conj, "conj"), (Abs, "abs"), (Re, "re"), (Im, "im"), (Tr, "tr")):
        if isinstance(e, cls):
            return f"{name}({render(e.child)})", _ATOM
    if isinstance(e, Adjoint):
        return f"{_wrap(e.child, _POSTFIX)}'", _POSTFIX
    if isinstance(e, Power):
        return f"{_wrap(e.base, _POSTFIX)}^{e.exponent}", _FACTOR
    if isinstance(e, Neg):
        return f"-{_wrap(e.child, _FACTOR)}", _FACTOR
    if isinstance(e, Product):
        return "*".join(_wrap(c, _FACTOR) for c in e.children), _TERM
    if isinstance(e, Quotient):
        return f"{_wrap(e.num, _TERM, allow_quot=True)}/{_wrap(e.den, _FACTOR)}", _TERM
    if isinstance(e, Sum):
        out = _wrap(e.children[0], _TERM)
        for c in e.children[1:]:
            if isinstance(c, Neg):
                out += " - " + _wrap(c.child, _TERM)
            else:
                out += " + " + _wrap(c, _TERM)
        return out, _EXPR
    raise TypeError(f"cannot render {e!r}")


def _wrap(e: Node, level: int, allow_quot=False) -> str:
    text, prec = _render(e)
    if prec > level or (level == _FACTOR and prec == _FACTOR and isinstance(e, Neg)):
        return f"({text})"
    if level == _TERM and prec == _TERM and not allow_quot and isinstance(e, Quotient):
        return f"({text})"
    if level == _TERM and isinstance(e, Sum) and len(e.children) == 1:
        return f"({text})"
    if level == _FACTOR and isinstance(e, (Product, Quotient)):
        return f"({text})"
    return text


def render(e: Node) -> str:
    """Source text that parses back to ``e``."""
    return _render(e)[0]


# ---------------------------------------------------------------------------
# normalization


def _conj(x: Node) -> Node:
    if isinstance(x, Number):
        return Number(x.value.conjugate())
    if isinstance(x, (Symbol, Index)):
        return Conj(x)
    if isinstance(x, Conj):
        return x.child
    if isinstance(x, Adjoint):  # Adjoint(Symbol) leaf
        return Conj(x)
    if isinstance(x, Sum):
        return Sum(tuple(_conj(c) for c in x.children))
    if isinstance(x, Product):
        return Product(tuple(_conj(c) for c in x.children))
    if isinstance(x, Neg):
        return Neg(_conj(x.child))
    if isinstance(x, Quotient):
        return Quotient(_conj(x.num), _conj(x.den))
    if isinstance(x, Power):
        return Power(_conj(x.base), x.exponent)
    if isinstance(x, Tr):
        return Tr(_adj(x.child))
    raise UnsupportedFormError(f"cannot conjugate {render(x)}")


def _adj(x: Node) -> Node:
    if isinstance(x, Number):
        return Number(x.value.conjugate())
    if isinstance(x, Symbol):
        return Adjoint(x)
    if isinstance(x, Adjoint):
        return x.child
    if isinstance(x, Index):
        return Conj(x)
    if isinstance(x, Conj):
        c = x.child
        if isinstance(c, Index):
            return c
        if isinstance(c, Symbol):
            return Conj(Adjoint(c))
        if isinstance(c, Adjoint):
            return Conj(c.child)
    if isinstance(x, Sum):
        return Sum(tuple(_adj(c) for c in x.children))
    if isinstance(x, Product):
        return Product(tuple(_adj(c) for c in reversed(x.children)))
    if isinstance(x, Neg):
        return Neg(_adj(x.child))
    if isinstance(x, Quotient):
        return Quotient(_adj(x.num), _conj(x.den))
    if isinstance(x, Power):
        return Power(_adj(x.base), x.exponent)
    if isinstance(x, Tr):
        return Tr(_adj(x.child))
    raise UnsupportedFormError(f"cannot take the adjoint of {render(x)}")


_HALF = Number(ExactScalar(2))
_TWO_I = Number(ExactScalar(0, 2))


def normalize(e: Node) -> Node:
    """Remove abs/re/im and push conj and adjoint down to the leaves."""
    if isinstance(e, (Number, Symbol, Index)):
        return e
    if isinstance(e, Power):
        if isinstance(e.base, Abs):
            if e.exponent % 2:
                raise UnsupportedFormError(f"abs(...) needs an even power, got {e.exponent}")
            z = normalize(e.base.child)
            if e.exponent == 0:
                return Number(ExactScalar(1))
            pair = Product((z, _conj(z)))
            return pair if e.exponent == 2 else Power(pair, e.exponent // 2)
        return Power(normalize(e.base), e.exponent)
    if isinstance(e, Abs):
        raise UnsupportedFormError("abs(...) needs an even power")
    if isinstance(e, Re):
        z = normalize(e.child)
        return Quotient(Sum((z, _conj(z))), _HALF)
    if isinstance(e, Im):
        z = normalize(e.child)
        return Quotient(Sum((z, Neg(_conj(z)))), _TWO_I)
    if isinstance(e, Conj):
        return _conj(normalize(e.child))
    if isinstance(e, Adjoint):
        return _adj(normalize(e.child))
    if isinstance(e, Tr):
        return Tr(normalize(e.child))
    if isinstance(e, Neg):
        return Neg(normalize(e.child))
    if isinstance(e, Sum):
        return Sum(tuple(normalize(c) for c in e.children))
    if isinstance(e, Product):
        return Product(tuple(normalize(c) for c in e.children))
    if isinstance(e, Quotient):
        return Quotient(normalize(e.num), normalize(e.den))
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# expansion
#
# A scalar polynomial is a dict {(factors, words, dpow): ExactScalar} with
# factors a sorted tuple of MonomialFactor, words a sorted tuple of trace
# words and dpow the power of the dimension symbol.

_ONE_KEY = ((), (), 0)


def _padd(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = out[k] + v if k in out else v
        if s.is_zero():
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _pscale(a: dict, c: ExactScalar) -> dict:
    if c.is_zero():
        return {}
    return {k: v * c for k, v in a.items()}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (f1, w1, p1), c1 in a.items():
        for (f2, w2, p2), c2 in b.items():
            k = (tuple(sorted(f1 + f2)), tuple(sorted(w1 + w2)), p1 + p2)
            v = c1 * c2
            s = out[k] + v if k in out else v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
    return out


def _ppow(a: dict, n: int) -> dict:
    out = {_ONE_KEY: ExactScalar(1)}
    for _ in range(n):
        out = _pmul(out, a)
    return out


def _pconst(c) -> dict:
    c = as_scalar(c)
    return {} if c.is_zero() else {_ONE_KEY: c}


def _scalar_poly(e: Node, dsym: str) -> dict:
    if isinstance(e, Number):
        return _pconst(e.value)
    if isinstance(e, Symbol) or (isinstance(e, Conj) and isinstance(e.child, Symbol)):
        name = e.name if isinstance(e, Symbol) else e.child.name
        if name == dsym:
            return {((), (), 1): ExactScalar(1)}
        raise UnsupportedFormError(f"bare symbol {name!r} used as a scalar; write tr({name}) or an entry")
    if isinstance(e, Index):
        return {((MonomialFactor(e.name, e.row, e.col, False),), (), 0): ExactScalar(1)}
    if isinstance(e, Conj) and isinstance(e.child, Index):
        c = e.child
        return {((MonomialFactor(c.name, c.row, c.col, True),), (), 0): ExactScalar(1)}
    if isinstance(e, Sum):
        out: dict = {}
        for c in e.children:
            out = _padd(out, _scalar_poly(c, dsym))
        return out
    if isinstance(e, Neg):
        return _pscale(_scalar_poly(e.child, dsym), ExactScalar(-1))
    if isinstance(e, Product):
        out = {_ONE_KEY: ExactScalar(1)}
        for c in e.children:
            out = _pmul(out, _scalar_poly(c, dsym))
        return out
    if isinstance(e, Power):
        return _ppow(_scalar_poly(e.base, dsym), e.exponent)
    if isinstance(e, Quotient):
        return _pscale(_scalar_poly(e.num, dsym), _scalar_divisor(e.den, dsym))
    if isinstance(e, Tr):
        out = {}
        for word, coef in _matrix_poly(e.child, dsym).items():
            if word:
                out = _padd(out, _pmul(coef, {((), (word,), 0): ExactScalar(1)}))
            else:
                out = _padd(out, _pmul(coef, {((), (), 1): ExactScalar(1)}))
        return out
    raise UnsupportedFormError(f"{render(e)} is not a scalar polynomial")


def _scalar_divisor(den: Node, dsym: str) -> ExactScalar:
    p = _scalar_poly(den, dsym)
    if set(p) != {_ONE_KEY}:
        raise UnsupportedFormError(f"can only divide by numbers, not by {render(den)}")
    return p[_ONE_KEY].inverse()


def _matrix_letter(e: Node):
    if isinstance(e, Symbol):
        return (e.name, "")
    if isinstance(e, Adjoint) and isinstance(e.child, Symbol):
        return (e.child.name, "'")
    if isinstance(e, Conj) and isinstance(e.child, Symbol):
        return (e.child.name, "*")
    if isinstance(e, Conj) and isinstance(e.child, Adjoint) and isinstance(e.child.child, Symbol):
        return (e.child.child.name, "T")
    return None


def _matrix_poly(e: Node, dsym: str) -> dict:
    """{word: scalar polynomial}; the empty word is the identity."""
    letter = _matrix_letter(e)
    if letter is not None:
        if letter[0] == dsym:
            raise DispatchError(f"{dsym!r} is the dimension symbol and cannot name a matrix")
        return {(letter,): {_ONE_KEY: ExactScalar(1)}}
    if isinstance(e, Sum):
        out: dict = {}
        for c in e.children:
            for w, p in _matrix_poly(c, dsym).items():
                q = _padd(out.get(w, {}), p)
                if q:
                    out[w] = q
                else:
                    out.pop(w, None)
        return out
    if isinstance(e, Neg):
        return {w: _pscale(p, ExactScalar(-1)) for w, p in _matrix_poly(e.child, dsym).items()}
    if isinstance(e, Product):
        out = {(): {_ONE_KEY: ExactScalar(1)}}
        for c in e.children:
            nxt: dict = {}
            for w1, p1 in out.items():
                for w2, p2 in _matrix_poly(c, dsym).items():
                    w = w1 + w2
                    q = _padd(nxt.get(w, {}), _pmul(p1, p2))
                    if q:
                        nxt[w] = q
                    else:
                        nxt.pop(w, None)
            out = nxt
        return out
    if isinstance(e, Power):
        return _matrix_poly(Product((e.base,) * e.exponent), dsym) if e.exponent else {(): _pconst(1)}
    if isinstance(e, Quotient):
        c = _scalar_divisor(e.den, dsym)
        return {w: _pscale(p, c) for w, p in _matrix_poly(e.num, dsym).items()}
    # anything else is a scalar times the identity
    p = _scalar_poly(e, dsym)
    return {(): p} if p else {}


def expand_terms(e: Node, dim_symbol: str = "d") -> dict:
    """Normalized AST -> {(factors, trace words, d power): coefficient}."""
    return _scalar_poly(e, dim_symbol)


def expand(e: Node, dim_symbol: str = "d") -> list[Monomial]:
    """Entrywise expansion into merged monomials (no traces allowed)."""
    out = []
    for (factors, words, dpow), c in expand_terms(e, dim_symbol).items():
        if words or dpow:
            raise UnsupportedFormError("expression contains traces or the dimension symbol; use integrate")
        out.append(Monomial(c, factors))
    return out


def expand_matrix(e: Node, dim_symbol: str = "d") -> dict:
    """Matrix expression -> {word: ExactScalar}."""
    out = {}
    for w, p in _matrix_poly(e, dim_symbol).items():
        if set(p) - {_ONE_KEY}:
            raise UnsupportedFormError("matrix coefficients must be numbers")
        out[w] = p[_ONE_KEY]
    return out


# ---------------------------------------------------------------------------
# dispatch


@dataclass
class IntegrationReport:
    result: object
    measure: MeasureSpec
    engine: str
    degree: int
    monomials: int
    elapsed_ms: float


def _as_measure(spec) -> MeasureSpec:
    return parse_measure(spec) if isinstance(spec, str) else spec


def _check_dispatch(terms: dict, spec: MeasureSpec, haar: str) -> None:
    names = set()
    uses_haar = False
    for factors, words, _ in terms:
        for f in factors:
            names.add(f.symbol)
            uses_haar |= f.symbol == haar
        for w in words:
            for n, _ in w:
                names.add(n)
                uses_haar |= n == haar
    if spec.dim_symbol in names:
        raise DispatchError(f"{spec.dim_symbol!r} is the dimension symbol and cannot name a matrix")
    entry_names = {f.symbol for factors, _, _ in terms for f in factors}
    if not uses_haar and entry_names:
        raise DispatchError(
            f"integrand does not involve the random matrix {haar!r} of {spec}; "
            f"found entries of {sorted(entry_names)}"
        )


def integrate_detailed(expr, spec) -> IntegrationReport:
    t0 = time.perf_counter()
    spec = _as_measure(spec)
    node = parse(expr) if isinstance(expr, str) else expr
    terms = expand_terms(normalize(node), spec.dim_symbol)
    haar = spec.random_symbol
    _check_dispatch(terms, spec, haar)
    total = TraceExpr()
    engines = set()
    degree = 0
    n_mono = 0
    dvar = RationalFunction.var()
    for (factors, words, dpow), c in terms.items():
        rnd = tuple(f for f in factors if f.symbol == haar)
        const = [Entry(((f.symbol, "*" if f.conjugated else ""),), f.row, f.col) for f in factors if f.symbol != haar]
        haar_words = [w for w in words if any(n == haar for n, _ in w)]
        const_words = [w for w in words if not any(n == haar for n, _ in w)]
        if rnd and haar_words:
            raise UnsupportedFormError("a term mixes entries and traces of the random matrix")
        scale = dvar ** dpow if dpow else RationalFunction(1)
        if spec.dim is not None and dpow:
            scale = RationalFunction(spec.dim ** dpow)
        if haar_words:
            engines.add("trace-graph")
            degree = max(degree, sum(len(w) for w in haar_words))
            piece = TraceExpr({tuple(Trace(w) for w in sorted(haar_words)): RationalFunction(1)})
            piece = trace_integrate(piece, spec, haar) * c
        else:
            n_mono += 1
            degree = max(degree, len(rnd))
            if rnd:
                engines.add(f"entrywise:{spec.family}")
            piece = TraceExpr.constant(integrate_monomial(Monomial(c, rnd), spec))
        for w in const_words:
            piece = piece * TraceExpr.trace(w)
        if const:
            piece = piece * TraceExpr({tuple(sorted(const, key=lambda a: a.key())): RationalFunction(1)})
        total = total + piece * scale
    if spec.dim is not None:
        total = total.evaluate(spec.dim)
    if total.is_scalar():
        r = total.scalar()
        result = r.constant_value() if spec.dim is not None else r
    else:
        result = total
    engine = "+".join(sorted(engines)) or "constant"
    return IntegrationReport(result, spec, engine, degree, n_mono, (time.perf_counter() - t0) * 1e3)


def integrate(expr, spec):
    """Average ``expr`` (text or AST) over the measure ``spec``.

    Returns a RationalFunction (symbolic d), an ExactScalar (concrete d) or
    a TraceExpr when constant matrices survive.
    """
    return integrate_detailed(expr, spec).result


def evaluate(r, n: int):
    """Exact value of an integration result at d = n."""
    if isinstance(r, RationalFunction):
        return ratfunc_eval(r, n)
    if isinstance(r, TraceExpr):
        out = r.evaluate(n)
        return out.scalar().constant_value() if out.is_scalar() else out
    if isinstance(r, ExactScalar):
        return r
    if isinstance(r, (list, tuple)):
        return [evaluate(x, n) for x in r]
    raise TypeError(f"cannot evaluate {type(r).__name__}")


def to_ratfunc(e, symbol: str = "d") -> RationalFunction:
    """Read a rational expression in one symbol (``2*n/(n^2+1)``)."""
    node = parse(e) if isinstance(e, str) else e

    def go(x):
        if isinstance(x, Number):
            return RationalFunction.constant(x.value)
        if isinstance(x, Symbol):
            if x.name != symbol:
                raise ArgumentError(f"unknown symbol {x.name!r}; expected {symbol!r}")
            return RationalFunction.var()
        if isinstance(x, Sum):
            out = RationalFunction(0)
            for c in x.children:
                out = out + go(c)
            return out
        if isinstance(x, Product):
            out = RationalFunction(1)
            for c in x.children:
                out = out * go(c)
            return out
        if isinstance(x, Neg):
            return -go(x.child)
        if isinstance(x, Power):
            return go(x.base) ** x.exponent
        if isinstance(x, Quotient):
            den = go(x.den)
            if den.is_zero():
                raise PoleError("everywhere")
            return go(x.num) / den
        raise UnsupportedFormError(f"{render(x)} is not a rational expression")

    return go(node)
