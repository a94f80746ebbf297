"""Large-d expansions of integration results."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import LaurentSeries, RationalFunction, laurent_expand
from .errors import ArgumentError, InvalidInputError, NotRationalError
from .measures import MeasureSpec, parse_measure
from .tracelogic import TraceExpr


@dataclass(frozen=True)
class TraceSeries:
    """``sum_m terms[m] * symbol**(-m)`` with TraceExpr coefficients whose
    own coefficients are numbers."""

    terms: dict = field(default_factory=dict)
    order: int = 0
    symbol: str = "d"

    def __post_init__(self):
        clean = {m: t for m, t in self.terms.items() if m <= self.order and not t.is_zero()}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def coefficient(self, m: int) -> TraceExpr:
        return self.terms.get(m, TraceExpr())

    def truncate(self, order: int) -> "TraceSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TraceSeries({m: t for m, t in self.terms.items() if m <= order}, order, self.symbol)

    def __eq__(self, other):
        if not isinstance(other, TraceSeries):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return self.order == other.order and all(self.coefficient(m) == other.coefficient(m) for m in keys)

    def __hash__(self):
        return hash((self.order, tuple(self.terms)))

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for m, t in self.terms.items():
            neg = all(c.constant_value().re < 0 for c in t.terms.values())
            body = (-t if neg else t).render(self.symbol)
            if len(t.terms) > 1 and m != 0:
                body = f"({body})"
            if m > 0:
                body += f"/{self.symbol}" + (f"^{m}" if m > 1 else "")
            elif m < 0:
                body += f"*{self.symbol}" + (f"^{-m}" if m < -1 else "")
            if not out:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out

    def __str__(self):
        return self.render()


def expand_result(r, order: int, symbol: str = "d"):
    """Laurent-expand a RationalFunction or a TraceExpr with RF coefficients."""
    if order < 0:
        raise InvalidInputError("expansion order must be >= 0")
    if isinstance(r, TraceExpr):
        if r.is_scalar():
            return laurent_expand(r.scalar(), order, symbol)
        buckets: dict = {}
        for atoms, c in r.terms.items():
            for m, v in laurent_expand(c, order, symbol).terms.items():
                buckets[m] = buckets.get(m, TraceExpr()) + TraceExpr({atoms: RationalFunction.constant(v)})
        return TraceSeries(buckets, order, symbol)
    return laurent_expand(r, order, symbol)


def asymptotic(e, target, order: int):
    """Expansion in inverse powers of the dimension.

    ``target`` is either a measure (``MeasureSpec`` or text such as
    ``"U(d)"``), in which case ``e`` is integrated first, or a plain symbol
    name, in which case ``e`` is a rational expression (or RationalFunction)
    in that symbol.  A measure with a concrete dimension is expanded in a
    fresh symbol, reported as the ``symbol`` of the returned series.
    """
    from .expression import integrate, to_ratfunc

    if order < 0:
        raise InvalidInputError("expansion order must be >= 0")
    if isinstance(target, str) and "(" in target:
        target = parse_measure(target)
    if isinstance(target, MeasureSpec):
        spec = target
        symbol = spec.dim_symbol
        if spec.dim is not None:
            # the reserved dimension name cannot clash with a matrix, so it
            # serves as the fresh expansion variable
            spec = spec.with_dim(None)
        if isinstance(e, RationalFunction):
            return laurent_expand(e, order, symbol)
        try:
            r = integrate(e, spec)
        except ArgumentError as exc:
            raise NotRationalError(
                f"the average is not a rational function of {symbol} ({exc}); "
                "asymptotic expansion does not apply"
            ) from exc
        return expand_result(r, order, symbol)
    if not isinstance(target, str) or not target.isidentifier():
        raise ArgumentError(f"expansion target must be a measure or a symbol name, got {target!r}")
    if isinstance(e, (RationalFunction, TraceExpr)):
        return expand_result(e, order, target)
    return laurent_expand(to_ratfunc(e, target), order, target)


__all__ = ["LaurentSeries", "TraceSeries", "asymptotic", "expand_result"]
