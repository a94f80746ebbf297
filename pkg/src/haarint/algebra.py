"""Exact arithmetic over the formal dimension symbol.

Scalars are Gaussian rationals, polynomials are dense coefficient tuples in
the dimension symbol, and rational functions are kept in a canonical form
(coprime parts, monic denominator) so that equal values compare and hash
equal.  Nothing in here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import InvalidInputError, PoleError, SingularSystemError

__all__ = [
    "ExactScalar",
    "DimPoly",
    "RationalFunction",
    "LaurentSeries",
    "ratfunc_normalize",
    "ratfunc_eval",
    "laurent_expand",
    "bareiss_solve",
    "as_scalar",
    "as_ratfunc",
]


def _mk(re: Fraction, im: Fraction) -> "ExactScalar":
    s = object.__new__(ExactScalar)
    s.re = re
    s.im = im
    return s


_F0 = Fraction(0)
_F1 = Fraction(1)


class ExactScalar:
    """Gaussian rational ``re + i*im`` with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, ExactScalar):
            if im:
                raise TypeError("cannot combine ExactScalar with an imaginary part")
            self.re, self.im = re.re, re.im
            return
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    # construction helpers
    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Inverse of ``str``: accepts ``p/q``, ``a+bi``, ``bi`` forms."""
        t = text.strip().replace(" ", "")
        if not t.endswith("i"):
            return cls(Fraction(t))
        body = t[:-1]
        # split at the last sign that is not at position 0 and not after '/'
        cut = None
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "/eE":
                cut = pos
                break
        if cut is None:
            im = body if body not in ("", "+", "-") else body + "1"
            return cls(0, Fraction(im))
        re, im = body[:cut], body[cut:]
        if im in ("+", "-"):
            im += "1"
        return cls(Fraction(re), Fraction(im))

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def is_real(self) -> bool:
        return not self.im

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "ExactScalar":
        return _mk(self.re, -self.im)

    def __neg__(self) -> "ExactScalar":
        return _mk(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _mk(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _mk(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _mk(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return _mk(self.re * o.re, _F0)
        return _mk(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if not self.im:
            if not self.re:
                raise ZeroDivisionError("division by exact zero")
            return _mk(1 / self.re, _F0)
        n = self.re * self.re + self.im * self.im
        return _mk(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("complex ExactScalar has no float value")
        return float(self.re)

    def __repr__(self):
        return f"ExactScalar({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        im = _imag_str(self.im)
        sep = "" if im.startswith("-") else "+"
        return f"{self.re}{sep}{im}"


def _imag_str(x: Fraction) -> str:
    if x == 1:
        return "i"
    if x == -1:
        return "-i"
    return f"{x}i"


ZERO = _mk(_F0, _F0)
ONE = _mk(_F1, _F0)
I_UNIT = _mk(_F0, _F1)


def _coerce(x) -> ExactScalar | None:
    if type(x) is ExactScalar:
        return x
    if isinstance(x, (int, Fraction)):
        return _mk(Fraction(x), _F0)
    return None


def as_scalar(x) -> ExactScalar:
    s = _coerce(x)
    if s is None:
        if isinstance(x, RationalFunction) and x.is_constant():
            return x.constant_value()
        raise TypeError(f"cannot interpret {x!r} as an exact scalar")
    return s


# ---------------------------------------------------------------------------
# polynomials in d


class DimPoly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``d**i``.

    The zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if type(c) is ExactScalar else as_scalar(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, cs: list) -> "DimPoly":
        while cs and not cs[-1]:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        return p

    @classmethod
    def constant(cls, c) -> "DimPoly":
        return cls((c,))

    @classmethod
    def var(cls) -> "DimPoly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, power: int, c=1) -> "DimPoly":
        return cls([0] * power + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "DimPoly":
        """prod (d - r) over the given roots."""
        p = cls.constant(1)
        for r in roots:
            p = p * cls((-as_scalar(r), 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lead(self) -> ExactScalar:
        return self.coeffs[-1] if self.coeffs else ZERO

    def coeff(self, i: int) -> ExactScalar:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else ZERO

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, DimPoly):
            return self.coeffs == other.coeffs
        s = _coerce(other)
        if s is None:
            return NotImplemented
        return self.coeffs == ((s,) if s else ())

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return DimPoly._raw([-c for c in self.coeffs])

    def __add__(self, other):
        o = _poly(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return DimPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = _poly(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _poly(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _poly(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return DimPoly._raw([])
        if len(b) == 1:
            s = b[0]
            return DimPoly._raw([c * s for c in a])
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return DimPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out, base = DimPoly.constant(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, s) -> "DimPoly":
        s = as_scalar(s)
        return DimPoly._raw([c * s for c in self.coeffs])

    def monic(self) -> "DimPoly":
        if not self.coeffs:
            return self
        inv = self.coeffs[-1].inverse()
        return DimPoly._raw([c * inv for c in self.coeffs])

    def divmod(self, other: "DimPoly") -> tuple["DimPoly", "DimPoly"]:
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return DimPoly._raw([]), self
        inv = other.coeffs[-1].inverse()
        quot = [ZERO] * (len(rem) - db)
        bc = other.coeffs
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if not c:
                continue
            f = c * inv
            quot[i - db] = f
            for j in range(db + 1):
                rem[i - db + j] = rem[i - db + j] - f * bc[j]
        return DimPoly._raw(quot), DimPoly._raw(rem[:db] if db > 0 else [])

    def exact_div(self, other: "DimPoly") -> "DimPoly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __call__(self, x):
        x = as_scalar(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def negate_var(self) -> "DimPoly":
        """p(d) -> p(-d)."""
        return DimPoly._raw([-c if i & 1 else c for i, c in enumerate(self.coeffs)])

    def conjugate(self) -> "DimPoly":
        return DimPoly._raw([c.conjugate() for c in self.coeffs])

    def is_real(self) -> bool:
        return all(not c.im for c in self.coeffs)

    def denominators_lcm(self) -> int:
        m = 1
        for c in self.coeffs:
            m = lcm(m, c.re.denominator, c.im.denominator)
        return m

    def render(self, symbol: str = "d") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                mon = ""
            elif i == 1:
                mon = symbol
            else:
                mon = f"{symbol}^{i}"
            if c.im and c.re:
                cs, neg = f"({c})", False
            elif c.im:
                cs = str(c)
                neg = cs.startswith("-")
                cs = cs.lstrip("-")
            else:
                neg = c.re < 0
                cs = str(abs(c.re))
            if mon:
                if cs == "1":
                    body = mon
                else:
                    body = f"{cs}*{mon}"
            else:
                body = cs
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"DimPoly({self.render()})"

    __str__ = render


def _poly(x) -> DimPoly | None:
    if isinstance(x, DimPoly):
        return x
    s = _coerce(x)
    if s is None:
        return None
    return DimPoly._raw([s])


def poly_gcd(a: DimPoly, b: DimPoly) -> DimPoly:
    """Monic gcd by the Euclidean remainder sequence over Q(i)."""
    while b.coeffs:
        a, b = b, a.divmod(b)[1]
        if b.coeffs:
            b = b.monic()
    return a.monic() if a.coeffs else a


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """Canonical ``num/den``: coprime, monic denominator, zero is ``0/1``."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        n = _poly(num) if not isinstance(num, DimPoly) else num
        d = _poly(den) if not isinstance(den, DimPoly) else den
        if n is None or d is None:
            raise TypeError("RationalFunction parts must be polynomials or scalars")
        if not d.coeffs:
            raise InvalidInputError("rational function with zero denominator")
        if not n.coeffs:
            self.num, self.den = n, _POLY_ONE
            return
        if d.degree > 0 and n.degree >= 0:
            g = poly_gcd(n, d)
            if g.degree > 0:
                n = n.exact_div(g)
                d = d.exact_div(g)
        inv = d.coeffs[-1].inverse()
        if d.coeffs[-1] != ONE:
            n = n.scale(inv)
            d = d.scale(inv)
        self.num, self.den = n, d

    @classmethod
    def _trusted(cls, num: DimPoly, den: DimPoly) -> "RationalFunction":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        s = as_scalar(c)
        return cls._trusted(DimPoly._raw([s]), _POLY_ONE)

    @classmethod
    def var(cls) -> "RationalFunction":
        return cls._trusted(DimPoly.var(), _POLY_ONE)

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def constant_value(self) -> ExactScalar:
        if not self.is_constant():
            raise ValueError("rational function is not constant")
        return self.num.coeff(0)

    def is_real(self) -> bool:
        return self.num.is_real() and self.den.is_real()

    def __bool__(self):
        return bool(self.num.coeffs)

    def __eq__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self):
        return RationalFunction._trusted(-self.num, self.den)

    def __add__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        if not o.num.coeffs:
            return self
        if not self.num.coeffs:
            return o
        if self.den == o.den:
            if self.den.degree == 0:
                return RationalFunction._trusted(self.num + o.num, self.den)
            return RationalFunction(self.num + o.num, self.den)
        if o.den.degree == 0:
            return RationalFunction._trusted(self.num + o.num * self.den, self.den)
        if self.den.degree == 0:
            return RationalFunction._trusted(self.num * o.den + o.num, o.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        if not self.num.coeffs or not o.num.coeffs:
            return RationalFunction._trusted(DimPoly._raw([]), _POLY_ONE)
        if o.is_constant():
            return RationalFunction._trusted(self.num.scale(o.num.coeffs[0]), self.den)
        if self.is_constant():
            return RationalFunction._trusted(o.num.scale(self.num.coeffs[0]), o.den)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num.coeffs:
            raise ZeroDivisionError("inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = as_ratfunc_or_none(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num**n, self.den**n)

    def negate_var(self) -> "RationalFunction":
        """r(d) -> r(-d)."""
        return RationalFunction(self.num.negate_var(), self.den.negate_var())

    def conjugate(self) -> "RationalFunction":
        return RationalFunction._trusted(self.num.conjugate(), self.den.conjugate())

    def __call__(self, n):
        return ratfunc_eval(self, n)

    def integer_parts(self) -> tuple[DimPoly, DimPoly]:
        """Numerator and denominator rescaled to coprime Gaussian-integer coefficients,
        denominator leading coefficient positive."""
        m = lcm(self.num.denominators_lcm(), self.den.denominators_lcm())
        n = self.num.scale(m)
        d = self.den.scale(m)
        g = 0
        for c in n.coeffs + d.coeffs:
            g = gcd(g, int(c.re), int(c.im))
        if g > 1:
            n = n.scale(Fraction(1, g))
            d = d.scale(Fraction(1, g))
        return n, d

    def render(self, symbol: str = "d") -> str:
        """Canonical text form ``num // den`` with integer coefficients; a
        unit denominator is omitted."""
        n, d = self.integer_parts()
        if d.degree == 0 and d.coeffs[0] == ONE:
            return n.render(symbol)
        return f"{n.render(symbol)} // {d.render(symbol)}"

    def pretty(self, symbol: str = "d") -> str:
        n, d = self.integer_parts()
        ns, ds = n.render(symbol), d.render(symbol)
        if d.degree == 0 and d.coeffs[0] == ONE:
            return ns
        if len(n.coeffs) - sum(1 for c in n.coeffs if not c) > 1:
            ns = f"({ns})"
        if len(d.coeffs) - sum(1 for c in d.coeffs if not c) > 1 or "*" in ds:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def to_json(self) -> dict:
        enc = lambda p: [[_frac_str(c.re), _frac_str(c.im)] for c in p.coeffs]
        return {"num": enc(self.num), "den": enc(self.den)}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalFunction":
        dec = lambda cs: DimPoly(ExactScalar(Fraction(re), Fraction(im)) for re, im in cs)
        return cls(dec(obj["num"]), dec(obj["den"]))

    def __repr__(self):
        return f"RationalFunction({self.pretty()})"

    def __str__(self):
        return self.pretty()


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


_POLY_ONE = DimPoly._raw([ONE])


def as_ratfunc_or_none(x) -> RationalFunction | None:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, DimPoly):
        return RationalFunction._trusted(x, _POLY_ONE)
    s = _coerce(x)
    if s is None:
        return None
    return RationalFunction._trusted(DimPoly._raw([s]), _POLY_ONE)


def as_ratfunc(x) -> RationalFunction:
    r = as_ratfunc_or_none(x)
    if r is None:
        raise TypeError(f"cannot interpret {x!r} as a rational function")
    return r


def ratfunc_normalize(n: DimPoly, d: DimPoly) -> RationalFunction:
    return RationalFunction(n, d)


def ratfunc_eval(r: RationalFunction, n) -> ExactScalar:
    """Exact value of r at d = n.  Removable singularities are already gone
    because r is stored in lowest terms."""
    den = r.den(n)
    if not den:
        raise PoleError(n)
    return r.num(n) / den


# ---------------------------------------------------------------------------
# Laurent series in 1/d


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated expansion ``sum_m terms[m] * symbol**(-m)`` for ``m <= order``.

    Negative ``m`` are positive powers of the symbol (polynomial part).
    """

    terms: dict = field(default_factory=dict)
    order: int = 0
    symbol: str = "d"

    def __post_init__(self):
        clean = {m: as_scalar(c) for m, c in self.terms.items() if m <= self.order and as_scalar(c)}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def coefficient(self, m: int) -> ExactScalar:
        return self.terms.get(m, ZERO)

    def truncate(self, order: int) -> "LaurentSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return LaurentSeries({m: c for m, c in self.terms.items() if m <= order}, order, self.symbol)

    def leading_exponent(self) -> int | None:
        return min(self.terms) if self.terms else None

    def to_ratfunc(self) -> RationalFunction:
        out = RationalFunction(0)
        dv = RationalFunction.var()
        for m, c in self.terms.items():
            out = out + RationalFunction.constant(c) * dv ** (-m)
        return out

    def evaluate(self, x) -> complex:
        return sum(complex(c) * complex(x) ** (-m) for m, c in self.terms.items())

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m, c in self.terms.items():
            neg = (c.re < 0) if not c.im else False
            mag = -c if neg else c
            cs = str(mag) if not mag.im or not mag.re else f"({mag})"
            if m == 0:
                body = cs
            elif m < 0:
                mon = self.symbol if m == -1 else f"{self.symbol}^{-m}"
                body = mon if cs == "1" else f"{cs}*{mon}"
            else:
                mon = self.symbol if m == 1 else f"{self.symbol}^{m}"
                if "/" in cs and not cs.startswith("("):
                    cs = f"({cs})"
                body = f"{cs}/{mon}"
            if not out:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __str__(self):
        return self.render()


def laurent_expand(r: RationalFunction, order: int, symbol: str = "d") -> LaurentSeries:
    """Expansion of r in inverse powers of d, keeping d**(-m) for m <= order.

    Substitutes d = 1/x and divides the reversed coefficient sequences as
    power series in x.
    """
    if order < 0:
        raise InvalidInputError("expansion order must be >= 0")
    r = as_ratfunc(r)
    if r.is_zero():
        return LaurentSeries({}, order, symbol)
    nrev = list(reversed(r.num.coeffs))
    drev = list(reversed(r.den.coeffs))
    shift = r.den.degree - r.num.degree  # exponent of 1/d carried by the leading term
    nterms = order - shift + 1
    if nterms <= 0:
        return LaurentSeries({}, order, symbol)
    inv0 = drev[0].inverse()
    series = []
    for j in range(nterms):
        acc = nrev[j] if j < len(nrev) else ZERO
        for i in range(1, min(j, len(drev) - 1) + 1):
            acc = acc - drev[i] * series[j - i]
        series.append(acc * inv0)
    return LaurentSeries({shift + j: c for j, c in enumerate(series)}, order, symbol)


# ---------------------------------------------------------------------------
# fraction-free linear solve


def bareiss_solve(A: Sequence[Sequence], b: Sequence) -> list[RationalFunction]:
    """Solve A x = b over the rational functions of d.

    Fraction-free (Bareiss) forward elimination in the polynomial ring:
    every division is by the previous pivot and is exact.  Back substitution
    then runs in rational-function arithmetic.
    """
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise InvalidInputError("bareiss_solve needs a square system")
    ints = _integer_system(A, b)
    if ints is not None:
        return _bareiss_int(ints, n)
    M = [[_poly(x) if not isinstance(x, DimPoly) else x for x in row] + [_poly(b[i]) if not isinstance(b[i], DimPoly) else b[i]]
         for i, row in enumerate(A)]
    prev = _POLY_ONE
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k]), None)
        if piv is None:
            raise SingularSystemError("linear system is singular")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n + 1):
                v = row_i[j] * pk - mik * row_k[j]
                row_i[j] = v.exact_div(prev) if prev.degree > 0 or prev.coeffs[0] != ONE else v
            row_i[k] = DimPoly._raw([])
        prev = pk
    x: list[RationalFunction] = [RationalFunction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = RationalFunction._trusted(M[i][n], _POLY_ONE)
        for j in range(i + 1, n):
            if M[i][j]:
                acc = acc - RationalFunction._trusted(M[i][j], _POLY_ONE) * x[j]
        x[i] = acc / RationalFunction._trusted(M[i][i], _POLY_ONE)
    return x


# Integer fast path.  Gram systems have integer polynomial entries; doing the
# elimination on plain int lists avoids Fraction overhead entirely.  Bareiss
# divisions are exact in Z[d], so no rationals ever appear until the end.


def _integer_system(A, b):
    rows = []
    for i, row in enumerate(A):
        out = []
        for x in list(row) + [b[i]]:
            p = x if isinstance(x, DimPoly) else _poly(x)
            if p is None:
                return None
            cs = []
            for c in p.coeffs:
                if c.im or c.re.denominator != 1:
                    return None
                cs.append(c.re.numerator)
            out.append(cs)
        rows.append(out)
    return rows


def _imul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _isub(a, b):
    if len(a) < len(b):
        a = a + [0] * (len(b) - len(a))
    out = list(a)
    for i, y in enumerate(b):
        out[i] -= y
    while out and not out[-1]:
        out.pop()
    return out


def _iexact_div(a, b):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    if not a:
        return []
    db = len(b) - 1
    lb = b[-1]
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if not c:
            continue
        f, r = divmod(c, lb)
        if r:
            raise ArithmeticError("integer polynomial division is not exact")
        q[i - db] = f
        for j in range(db + 1):
            a[i - db + j] -= f * b[j]
    if any(a):
        raise ArithmeticError("integer polynomial division is not exact")
    return q


def _bareiss_int(M, n):
    prev = [1]
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k]), None)
        if piv is None:
            raise SingularSystemError("linear system is singular")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n + 1):
                v = _isub(_imul(row_i[j], pk), _imul(mik, row_k[j]))
                row_i[j] = v if prev == [1] else _iexact_div(v, prev)
            row_i[k] = []
        prev = pk
    det = M[n - 1][n - 1]
    # y_i = x_i * det lies in Z[d] by Cramer's rule
    y = [None] * n
    for i in range(n - 1, -1, -1):
        acc = _imul(M[i][n], det)
        for j in range(i + 1, n):
            if M[i][j]:
                acc = _isub(acc, _imul(M[i][j], y[j]))
        y[i] = _iexact_div(acc, M[i][i])
    den = DimPoly(det)
    return [RationalFunction(DimPoly(yi), den) for yi in y]
