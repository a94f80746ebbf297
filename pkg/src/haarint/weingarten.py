"""Weingarten functions for U(d), O(d) and Sp(d), symbolic or at a concrete d.

Unitary values come from the character formula with Hook-Content
denominators; orthogonal values come from the Gram system reduced to loop
types; symplectic values are obtained from the orthogonal ones by d -> -d
with a loop-count sign.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from . import combinatorics as comb
from .algebra import DimPoly, ExactScalar, RationalFunction, bareiss_solve
from .errors import DimensionError, InvalidInputError, SingularSystemError

SYMBOLIC = None


@dataclass(frozen=True)
class WgKey:
    family: str  # "unitary" | "orthogonal" | "symplectic"
    degree: int
    classifier: tuple
    dim_mode: object  # None for symbolic, else the integer dimension


class WeingartenCache:
    """Unbounded memo store; concurrent readers, serialized writers."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key):
        try:
            val = self._data[key]
        except KeyError:
            self.misses += 1
            return None
        self.hits += 1
        return val

    def put(self, key, value):
        with self._lock:
            # first writer wins; a racing duplicate is identical anyway
            return self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data


CACHE = WeingartenCache()


def clear_caches() -> None:
    """Drop every memoized value (Weingarten data, characters, Schur dims)."""
    CACHE.clear()
    for fn in (comb._mn, comb.irrep_dimension, comb.schur_at_ones, comb.pair_partitions,
               comb.partitions_of, _orth_structure, _linear_power):
        fn.cache_clear()


def _check_dim(d):
    if d is None:
        return None
    if isinstance(d, bool) or not isinstance(d, int):
        raise DimensionError(f"dimension must be a positive integer or symbolic, got {d!r}")
    return d


# ---------------------------------------------------------------------------
# unitary


@lru_cache(maxsize=None)
def _linear_power(c: int, e: int) -> DimPoly:
    return DimPoly((c, 1)) ** e


def _unitary_symbolic(mu: tuple) -> RationalFunction:
    k = sum(mu)
    kf2 = factorial(k) ** 2
    terms = []
    lcm_mult: Counter = Counter()
    for lam in comb.partitions_of(k):
        chi = comb.mn_character(lam, mu)
        if not chi:
            continue
        f = comb.irrep_dimension(lam)
        coef = Fraction(f * f * chi * prod(comb.hook_lengths(lam)), kf2)
        mult = Counter(comb.contents(lam))
        terms.append((coef, mult))
        for c, m in mult.items():
            if m > lcm_mult[c]:
                lcm_mult[c] = m
    num = DimPoly(())
    for coef, mult in terms:
        p = DimPoly.constant(coef)
        for c, L in lcm_mult.items():
            e = L - mult.get(c, 0)
            if e:
                p = p * _linear_power(c, e)
        num = num + p
    den = DimPoly.constant(1)
    for c, L in sorted(lcm_mult.items()):
        den = den * _linear_power(c, L)
    return RationalFunction(num, den)


def _unitary_concrete(mu: tuple, n: int) -> ExactScalar:
    if n < 1:
        raise DimensionError(f"unitary dimension must be >= 1, got {n}")
    k = sum(mu)
    total = Fraction(0)
    for lam in comb.partitions_of(k):
        if len(lam) > n:
            continue
        chi = comb.mn_character(lam, mu)
        if not chi:
            continue
        f = comb.irrep_dimension(lam)
        s = comb.schur_at_ones(lam)(n)
        total += Fraction(f * f * chi) / s.re
    return ExactScalar(total / factorial(k) ** 2)


def wg_unitary(mu, d=SYMBOLIC):
    """Wg^U for cycle type mu.

    Symbolic d gives a canonical RationalFunction.  A concrete integer d gives
    an ExactScalar computed from the character sum restricted to partitions
    with at most d rows, which stays valid below the stable range d >= k.
    """
    mu = tuple(sorted((int(x) for x in mu), reverse=True))
    if not mu or any(x < 1 for x in mu):
        raise InvalidInputError(f"bad cycle type {mu}")
    d = _check_dim(d)
    key = WgKey("unitary", sum(mu), mu, d)
    val = CACHE.get(key)
    if val is None:
        val = _unitary_symbolic(mu) if d is None else _unitary_concrete(mu, d)
        val = CACHE.put(key, val)
    return val


def unitary_value(mu, dim) -> RationalFunction:
    """wg_unitary as a RationalFunction in either dimension mode."""
    v = wg_unitary(mu, dim)
    return v if isinstance(v, RationalFunction) else RationalFunction.constant(v)


def unitary_class_sum(k: int, dim) -> RationalFunction:
    """sum over all sigma in S_k of Wg^U(sigma)."""
    key = WgKey("unitary", k, ("class-sum",), dim)
    val = CACHE.get(key)
    if val is None:
        val = RationalFunction(0)
        for mu in comb.partitions_of(k):
            val = val + unitary_value(mu, dim) * comb.class_size(mu)
        val = CACHE.put(key, val)
    return val


# ---------------------------------------------------------------------------
# orthogonal


def _loop_count(pp, qp) -> int:
    n = len(pp)
    seen = [False] * n
    count = 0
    for s in range(n):
        if seen[s]:
            continue
        count += 1
        x = s
        while not seen[x]:
            y = pp[x]
            seen[x] = seen[y] = True
            x = qp[y]
    return count


@lru_cache(maxsize=None)
def _orth_structure(k: int):
    """Reduced Gram data for degree 2k.

    Returns (types, counts, powers) where ``counts[mu]`` is the number of q
    with loop type mu against the base pairing p0, and ``powers[nu][mu]`` is
    a Counter {exponent: multiplicity} for sum_{q: type(p0,q)=mu} d^loops(q, r_nu).
    """
    pairings = comb.pair_partitions(2 * k)
    n = 2 * k
    p0 = tuple((2 * i, 2 * i + 1) for i in range(k))
    p0p = comb._partner(p0, n)
    partners = [comb._partner(q, n) for q in pairings]
    qtypes = [comb._loop_type_fast(p0p, qp) for qp in partners]
    types = comb.partitions_of(k)
    reps = {}
    for qp, t in zip(partners, qtypes):
        reps.setdefault(t, qp)
    counts = Counter(qtypes)
    powers = {}
    for nu in types:
        rp = reps[nu]
        row = {mu: Counter() for mu in types}
        for qp, t in zip(partners, qtypes):
            row[t][_loop_count(qp, rp)] += 1
        powers[nu] = row
    return types, dict(counts), powers


def orthogonal_table(k: int, d=SYMBOLIC) -> dict:
    """Map loop type mu ⊢ k -> Wg^O for that type."""
    d = _check_dim(d) if not (isinstance(d, int) and d < 0) else d
    if k < 0:
        raise InvalidInputError("negative degree")
    key = WgKey("orthogonal", k, ("table",), d)
    val = CACHE.get(key)
    if val is not None:
        return val
    if k == 0:
        val = {(): RationalFunction(1) if d is None else ExactScalar(1)}
        return CACHE.put(key, val)
    types, _, powers = _orth_structure(k)
    ident = (1,) * k
    A = []
    for nu in types:
        row = []
        for mu in types:
            pw = powers[nu][mu]
            if d is None:
                deg = max(pw) if pw else -1
                cs = [0] * (deg + 1)
                for e, m in pw.items():
                    cs[e] += m
                row.append(DimPoly(cs))
            else:
                row.append(DimPoly.constant(sum(m * d**e for e, m in pw.items())))
        A.append(row)
    b = [DimPoly.constant(1 if nu == ident else 0) for nu in types]
    try:
        x = bareiss_solve(A, b)
    except SingularSystemError:
        raise SingularSystemError(
            f"orthogonal Gram system of degree {2 * k} is singular at d = {d}"
        ) from None
    if d is None:
        val = dict(zip(types, x))
    else:
        val = {mu: v.constant_value() for mu, v in zip(types, x)}
    return CACHE.put(key, val)


def orthogonal_value(mu, dim) -> RationalFunction:
    v = orthogonal_table(sum(mu), dim)[tuple(mu)]
    return v if isinstance(v, RationalFunction) else RationalFunction.constant(v)


def orthogonal_type_counts(k: int) -> dict:
    """#{q : loop type of (p0, q) = mu} for each mu ⊢ k."""
    return _orth_structure(k)[1] if k else {(): 1}


def wg_orthogonal(p, q, d=SYMBOLIC):
    mu = comb.loop_type(p, q)
    return orthogonal_table(len(p), d)[mu]


# ---------------------------------------------------------------------------
# symplectic


def symplectic_table(k: int, d=SYMBOLIC) -> dict:
    """Map loop type mu -> Wg^Sp = (-1)^len(mu) * Wg^O(mu, -d)."""
    d = _check_dim(d)
    if d is not None and d % 2:
        raise DimensionError(f"symplectic dimension must be even, got {d}")
    key = WgKey("symplectic", k, ("table",), d)
    val = CACHE.get(key)
    if val is not None:
        return val
    if d is None:
        base = orthogonal_table(k, None)
        val = {mu: (r.negate_var() if len(mu) % 2 == 0 else -r.negate_var()) for mu, r in base.items()}
    else:
        base = orthogonal_table(k, -d)
        val = {mu: (v if len(mu) % 2 == 0 else -v) for mu, v in base.items()}
    return CACHE.put(key, val)


def symplectic_value(mu, dim) -> RationalFunction:
    v = symplectic_table(sum(mu), dim)[tuple(mu)]
    return v if isinstance(v, RationalFunction) else RationalFunction.constant(v)


def wg_symplectic(p, q, d=SYMBOLIC):
    mu = comb.loop_type(p, q)
    return symplectic_table(len(p), d)[mu]


def table(family: str, k: int, d=SYMBOLIC) -> dict:
    """Weingarten table keyed by cycle type (U) or loop type (O, Sp)."""
    fam = family.upper()
    if k == 0:
        return {}
    if fam == "U":
        return {mu: wg_unitary(mu, d) for mu in comb.partitions_of(k)}
    if fam == "O":
        return dict(orthogonal_table(k, d))
    if fam == "SP":
        return dict(symplectic_table(k, d))
    raise InvalidInputError(f"unknown Weingarten family {family!r}")
