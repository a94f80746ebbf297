"""Monomial-level integration engines.

Every engine takes a :class:`Monomial` and a dimension (``None`` for the
formal symbol, an int otherwise) and returns a :class:`RationalFunction`;
concrete dimensions give constant rational functions.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb as binomial, factorial

from . import combinatorics as comb
from . import weingarten as wg
from .algebra import DimPoly, ExactScalar, RationalFunction, as_scalar, ratfunc_eval
from .errors import (
    SingularSystemError,
    DegreeGuardError,
    DesignOrderError,
    DispatchError,
    InvalidInputError,
    MeasureError,
    UnsupportedFormError,
)
from .measures import MeasureSpec

ZERO = RationalFunction(0)
ONE = RationalFunction(1)


@dataclass
class EngineConfig:
    max_degree: int = 12


CONFIG = EngineConfig()


@dataclass(frozen=True, order=True)
class MonomialFactor:
    symbol: str
    row: int
    col: int
    conjugated: bool = False

    def __post_init__(self):
        if self.row < 1 or self.col < 1:
            raise InvalidInputError(f"indices start at 1, got {self.symbol}[{self.row},{self.col}]")

    def conj(self) -> "MonomialFactor":
        return replace(self, conjugated=not self.conjugated)

    def __str__(self):
        s = f"{self.symbol}[{self.row},{self.col}]"
        return f"conj({s})" if self.conjugated else s


@dataclass(frozen=True)
class Monomial:
    """coefficient * product of factors; factors are kept sorted so equal
    monomials compare equal."""

    coefficient: ExactScalar
    factors: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coefficient", as_scalar(self.coefficient))
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def symbols(self) -> set:
        return {f.symbol for f in self.factors}

    def scaled(self, c) -> "Monomial":
        return Monomial(self.coefficient * c, self.factors)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.coefficient * other.coefficient, self.factors + other.factors)

    def __str__(self):
        parts = [str(f) for f in self.factors]
        if self.coefficient != 1 or not parts:
            parts.insert(0, f"({self.coefficient})")
        return "*".join(parts)


# ---------------------------------------------------------------------------
# helpers


def check_degree(two_k: int) -> None:
    if two_k > CONFIG.max_degree:
        raise DegreeGuardError(
            f"degree 2k={two_k} exceeds the configured limit {CONFIG.max_degree}"
        )


def _check_indices(m: Monomial, d, col_limit=None) -> None:
    for f in m.factors:
        if d is not None and (f.row > d or f.col > d):
            raise InvalidInputError(f"index out of range for d={d}: {f}")
        if col_limit is not None and f.col > col_limit:
            raise InvalidInputError(f"column index {f.col} exceeds the frame width {col_limit}: {f}")


def _single_symbol(m: Monomial) -> None:
    if len(m.symbols) > 1:
        raise DispatchError(f"monomial mixes random symbols {sorted(m.symbols)}")


def _matching_perms(a, b) -> list:
    """All sigma with a[m] == b[sigma[m]] for every m."""
    k = len(a)
    if Counter(a) != Counter(b):
        return []
    where = defaultdict(list)
    for j, x in enumerate(b):
        where[x].append(j)
    out = []
    cur = [0] * k
    used = [False] * k

    def rec(m):
        if m == k:
            out.append(tuple(cur))
            return
        for j in where[a[m]]:
            if not used[j]:
                used[j] = True
                cur[m] = j
                rec(m + 1)
                used[j] = False

    rec(0)
    return out


def _wg_sum(row_classes, col_classes, k: int, dim) -> RationalFunction:
    """sum over weighted permutation classes of w_r * w_c * Wg^U(sigma tau^-1).

    Each class is (weight, [perms]); a class covering all of S_k collapses to
    the class sum of the Weingarten function.
    """
    full = factorial(k)
    total = ZERO
    types: Counter = Counter()
    for wr, pr in row_classes:
        for wc, pc in col_classes:
            w = wr * wc
            if not w:
                continue
            if len(pr) == full or len(pc) == full:
                other = len(pc) if len(pr) == full else len(pr)
                total = total + wg.unitary_class_sum(k, dim) * (w * other)
                continue
            counts = Counter(comb.cycle_type(comb.compose(s, comb.inverse(t))) for s in pr for t in pc)
            for mu, c in counts.items():
                types[mu] += w * c
    for mu, c in types.items():
        if c:
            total = total + wg.unitary_value(mu, dim) * c
    return total


def _unitary_core(u, ub, dim) -> RationalFunction:
    """u, ub: lists of (row, col) for U and conj(U) entries."""
    k = len(u)
    if k != len(ub):
        return ZERO
    if k == 0:
        return ONE
    check_degree(2 * k)
    vr = _matching_perms([r for r, _ in u], [r for r, _ in ub])
    if not vr:
        return ZERO
    vc = _matching_perms([c for _, c in u], [c for _, c in ub])
    if not vc:
        return ZERO
    return _wg_sum([(1, vr)], [(1, vc)], k, dim)


def _split_conj(m: Monomial):
    u = [(f.row, f.col) for f in m.factors if not f.conjugated]
    ub = [(f.row, f.col) for f in m.factors if f.conjugated]
    return u, ub


def _times_coef(m: Monomial, r: RationalFunction) -> RationalFunction:
    return r * m.coefficient if m.coefficient != 1 else r


# ---------------------------------------------------------------------------
# compact groups


def integrate_unitary(m: Monomial, d=None) -> RationalFunction:
    _single_symbol(m)
    _check_indices(m, d)
    u, ub = _split_conj(m)
    return _times_coef(m, _unitary_core(u, ub, d))


def integrate_su(m: Monomial, d=None) -> RationalFunction:
    """Same as U(d).  Unbalanced monomials return 0 even where the
    determinant constraint of SU(d) would make them nonzero."""
    return integrate_unitary(m, d)


def _matching_pairings(labels, signer=None) -> list:
    """Perfect matchings of positions with equal labels under ``signer``.

    Returns a list of (weight, partner-array).  Without ``signer`` positions
    pair when labels are equal (weight 1).  With it, ``signer(x, y)`` gives
    the weight of pairing label x (smaller position) with label y, 0 meaning
    not allowed.
    """
    n = len(labels)
    out = []
    partner = [-1] * n

    def rec(weight):
        try:
            a = partner.index(-1)
        except ValueError:
            out.append((weight, tuple(partner)))
            return
        for b in range(a + 1, n):
            if partner[b] != -1:
                continue
            if signer is None:
                w = 1 if labels[a] == labels[b] else 0
            else:
                w = signer(labels[a], labels[b])
            if not w:
                continue
            partner[a], partner[b] = b, a
            rec(weight * w)
            partner[a] = partner[b] = -1

    if n % 2 == 0:
        rec(1)
    return out


def _double_pair_sum(vr, vc, k: int, value, oriented=False) -> RationalFunction:
    """sum_p sum_q w_p w_q value(looptype(p, q)), times the J orientation
    sign of (p, q) when ``oriented``."""
    if not vr or not vc:
        return ZERO
    types: Counter = Counter()
    for wp, pp in vr:
        for wq, qp in vc:
            w = wp * wq
            if oriented:
                w *= comb.loop_orientation_sign(pp, qp)
            types[comb._loop_type_fast(pp, qp)] += w
    total = ZERO
    for mu, c in types.items():
        if c:
            total = total + value(mu) * c
    return total


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _below_stable_range(compute, d) -> RationalFunction:
    """Run ``compute(dim)``; when the concrete Gram system is singular
    (d below the stable range) evaluate the symbolic-d result at d instead."""
    try:
        return compute(d)
    except SingularSystemError:
        if d is None:
            raise
    return RationalFunction.constant(ratfunc_eval(compute(None), d))


def integrate_orthogonal(m: Monomial, d=None) -> RationalFunction:
    _single_symbol(m)
    _check_indices(m, d)
    n = m.degree
    if n % 2:
        return ZERO
    if n == 0:
        return _times_coef(m, ONE)
    check_degree(n)
    k = n // 2
    vr = _matching_pairings([f.row for f in m.factors])
    vc = _matching_pairings([f.col for f in m.factors])
    if not vr or not vc:
        return ZERO
    n_all = _double_factorial(n - 1)

    def compute(dim):
        if len(vr) == n_all or len(vc) == n_all:
            # summing Wg over every p (or q) gives the same value for any partner
            other = len(vc) if len(vr) == n_all else len(vr)
            s = ZERO
            for mu, cnt in wg.orthogonal_type_counts(k).items():
                s = s + wg.orthogonal_value(mu, dim) * cnt
            return s * other
        return _double_pair_sum(vr, vc, k, lambda mu: wg.orthogonal_value(mu, dim))

    return _times_coef(m, _below_stable_range(compute, d))


def _sp_slot(i: int, d):
    """Index -> (base, block).  Symbolic d treats every literal index as a
    first-block slot."""
    if d is None:
        return (i, 0)
    half = d // 2
    return (i, 0) if i <= half else (i - half, 1)


def _j_entry(x, y) -> int:
    """J[x, y] for J = [[0, I], [-I, 0]] on (base, block) slots."""
    if x[0] != y[0] or x[1] == y[1]:
        return 0
    return 1 if x[1] == 0 else -1


def _sp_sign(slot) -> int:
    return 1 if slot[1] == 0 else -1


def _sp_bar(slot):
    return (slot[0], 1 - slot[1])


def integrate_symplectic(m: Monomial, d=None) -> RationalFunction:
    """Haar average over Sp(d) (unitary symplectic, J = [[0, I], [-I, 0]]).

    Conjugated entries are rewritten with conj(S)_ij = J_i J_j S_{i' j'}
    where ' swaps the block and J_i is +1 on the first block, -1 on the
    second.
    """
    _single_symbol(m)
    if d is not None and d % 2:
        raise MeasureError(f"symplectic dimension must be even, got {d}")
    _check_indices(m, d)
    n = m.degree
    if n % 2:
        return ZERO
    if n == 0:
        return _times_coef(m, ONE)
    check_degree(n)
    sign = 1
    rows, cols = [], []
    for f in m.factors:
        r, c = _sp_slot(f.row, d), _sp_slot(f.col, d)
        if f.conjugated:
            sign *= _sp_sign(r) * _sp_sign(c)
            r, c = _sp_bar(r), _sp_bar(c)
        rows.append(r)
        cols.append(c)
    vr = _matching_pairings(rows, _j_entry)
    vc = _matching_pairings(cols, _j_entry)
    res = _below_stable_range(
        lambda dim: _double_pair_sum(vr, vc, n // 2, lambda mu: wg.symplectic_value(mu, dim), oriented=True), d
    )
    return _times_coef(m, res * sign if sign != 1 else res)


# ---------------------------------------------------------------------------
# permutations and friends


def _falling_inverse(k: int, d) -> RationalFunction:
    if d is None:
        den = DimPoly.constant(1)
        for j in range(k):
            den = den * DimPoly((-j, 1))
        return RationalFunction(DimPoly.constant(1), den)
    if k > d:
        return ZERO
    return RationalFunction.constant(ExactScalar(Fraction(factorial(d - k), factorial(d))))


def _perm_pairs(pairs, d) -> RationalFunction:
    distinct = set(pairs)
    rows = Counter(r for r, _ in distinct)
    cols = Counter(c for _, c in distinct)
    if any(v > 1 for v in rows.values()) or any(v > 1 for v in cols.values()):
        return ZERO
    return _falling_inverse(len(distinct), d)


def integrate_permutation(m: Monomial, d=None) -> RationalFunction:
    _single_symbol(m)
    _check_indices(m, d)
    return _times_coef(m, _perm_pairs([(f.row, f.col) for f in m.factors], d))


def integrate_centered_permutation(m: Monomial, d=None) -> RationalFunction:
    """Y = P - 1/d, expanded binomially over the factors."""
    _single_symbol(m)
    _check_indices(m, d)
    pairs = [(f.row, f.col) for f in m.factors]
    shift = (RationalFunction(DimPoly.constant(-1), DimPoly.var()) if d is None
             else RationalFunction.constant(ExactScalar(Fraction(-1, d))))
    by_pair = Counter(pairs)
    keys = list(by_pair)
    total = ZERO
    # choose how many copies of each distinct entry come from P; P_ij^a = P_ij
    def rec(i, chosen, weight, powers):
        nonlocal total
        if i == len(keys):
            total = total + _perm_pairs(chosen, d) * weight * (shift ** powers if powers else ONE)
            return
        key = keys[i]
        mult = by_pair[key]
        for a in range(mult + 1):
            rec(i + 1, chosen + ([key] if a else []), weight * binomial(mult, a), powers + mult - a)

    rec(0, [], 1, 0)
    return _times_coef(m, total)


def integrate_diag_unitary(m: Monomial, d=None) -> RationalFunction:
    _single_symbol(m)
    _check_indices(m, d)
    if any(f.row != f.col for f in m.factors):
        return ZERO
    plain = Counter(f.row for f in m.factors if not f.conjugated)
    bar = Counter(f.row for f in m.factors if f.conjugated)
    return _times_coef(m, ONE) if plain == bar else ZERO


def integrate_stiefel(m: Monomial, d=None, k_width: int = 1) -> RationalFunction:
    if d is not None and k_width > d:
        raise MeasureError(f"Stiefel frame width {k_width} exceeds d={d}")
    _check_indices(m, d, col_limit=k_width)
    return integrate_unitary(m, d)


def integrate_pure_state(m: Monomial, d=None) -> RationalFunction:
    return integrate_stiefel(m, d, 1)


def integrate_design(m: Monomial, d=None, t: int = 1) -> RationalFunction:
    if t < 1:
        raise MeasureError(f"design order must be >= 1, got {t}")
    u, ub = _split_conj(m)
    if len(u) != len(ub):
        return ZERO
    if len(u) > t:
        raise DesignOrderError(len(u), t)
    return integrate_unitary(m, d)


# ---------------------------------------------------------------------------
# Gaussian and Ginibre ensembles (entrywise Wick sums)


def _wick(items, contract) -> int:
    if not items:
        return 1
    if len(items) % 2:
        return 0
    first, rest = items[0], items[1:]
    total = 0
    for j, other in enumerate(rest):
        w = contract(first, other)
        if w:
            total += w * _wick(rest[:j] + rest[j + 1:], contract)
    return total


def integrate_gaussian(m: Monomial, d=None, flavor: str = "GUE") -> RationalFunction:
    _single_symbol(m)
    _check_indices(m, d)
    if flavor == "GSE":
        raise UnsupportedFormError(
            "entrywise GSE moments are not defined here; integrate trace moments instead"
        )
    if m.degree % 2:
        return ZERO
    check_degree(m.degree)
    if flavor == "GUE":
        # Hermitian: conj(H_ij) = H_ji;  <H_ij H_kl> = delta_il delta_jk
        items = [((f.col, f.row) if f.conjugated else (f.row, f.col)) for f in m.factors]

        def contract(a, b):
            return 1 if a[0] == b[1] and a[1] == b[0] else 0
    elif flavor == "GOE":
        items = [(f.row, f.col) for f in m.factors]

        def contract(a, b):
            return (a == b) + (a[0] == b[1] and a[1] == b[0])
    else:
        raise InvalidInputError(f"unknown Gaussian flavor {flavor!r}")
    return _times_coef(m, RationalFunction(_wick(items, contract)))


def integrate_ginibre(m: Monomial, d=None, flavor: str = "GinUE") -> RationalFunction:
    _single_symbol(m)
    _check_indices(m, d)
    if flavor == "GinSE":
        raise UnsupportedFormError(
            "entrywise GinSE moments are not defined here; integrate trace moments instead"
        )
    if m.degree % 2:
        return ZERO
    check_degree(m.degree)
    items = [(f.row, f.col, f.conjugated) for f in m.factors]
    if flavor == "GinUE":
        def contract(a, b):
            return 1 if a[2] != b[2] and a[:2] == b[:2] else 0
    elif flavor == "GinOE":
        def contract(a, b):
            return 1 if a[:2] == b[:2] else 0
    else:
        raise InvalidInputError(f"unknown Ginibre flavor {flavor!r}")
    return _times_coef(m, RationalFunction(_wick(items, contract)))


# ---------------------------------------------------------------------------
# circular ensembles


def _component_weight(k2: int, edges, dim, signed: bool):
    """Sum over internal column indices of a delta network.

    ``edges`` are (v, w, parity) constraints between the 2k internal
    variables.  Unsigned: each component gives a factor d.  Signed (CSE):
    variables carry a block bit and a sign (-1)^bit; components of odd size
    cancel, even ones give +-d.  Returns (sign, components) or None when the
    network sums to zero.
    """
    parent = list(range(k2))
    par = [0] * k2

    def find(x):
        if parent[x] == x:
            return x, 0
        r, p = find(parent[x])
        parent[x] = r
        par[x] ^= p
        return r, par[x]

    for v, w, p in edges:
        rv, pv = find(v)
        rw, pw = find(w)
        if rv == rw:
            if signed and (pv ^ pw) != p:
                return None
            continue
        parent[rv] = rw
        par[rv] = pv ^ pw ^ p
    comps: dict = defaultdict(lambda: [0, 0])
    for v in range(k2):
        r, p = find(v)
        comps[r][0] += 1
        comps[r][1] += p
    sign = 1
    if signed:
        for size, off in comps.values():
            if size % 2:
                return None
            if off % 2:
                sign = -sign
    return sign, len(comps)


def integrate_circular(m: Monomial, d=None, flavor: str = "COE") -> RationalFunction:
    """COE: S = U U^T.  CSE: S = U J U^T J^T.

    Each S entry becomes a product of two U entries sharing an internal
    column index; the internal indices are summed by counting components of
    the delta network produced by each column permutation.
    """
    _single_symbol(m)
    if flavor not in ("COE", "CSE"):
        raise InvalidInputError(f"unknown circular flavor {flavor!r}")
    if flavor == "CSE" and d is not None and d % 2:
        raise MeasureError(f"CSE dimension must be even, got {d}")
    _check_indices(m, d)
    plain = [f for f in m.factors if not f.conjugated]
    bar = [f for f in m.factors if f.conjugated]
    if len(plain) != len(bar):
        return ZERO
    ks = len(plain)
    if ks == 0:
        return _times_coef(m, ONE)
    k = 2 * ks
    check_degree(2 * k)
    signed = flavor == "CSE"
    sign = 1
    u_rows, u_cols, b_rows, b_cols = [], [], [], []
    for group, rows, cols, offset in ((plain, u_rows, u_cols, 0), (bar, b_rows, b_cols, ks)):
        for t, f in enumerate(group):
            v = offset + t
            if signed:
                # S_ij = s(j) sum_a s(a) U_{i a} U_{j' a'}
                ri, rj = _sp_slot(f.row, d), _sp_slot(f.col, d)
                sign *= _sp_sign(rj)
                rows += [ri, _sp_bar(rj)]
                cols += [(v, 0), (v, 1)]
            else:
                rows += [f.row, f.col]
                cols += [(v, 0), (v, 0)]
    vr = _matching_perms(u_rows, b_rows)
    if not vr:
        return ZERO
    dpoly = DimPoly.var() if d is None else DimPoly.constant(d)
    classes: dict = defaultdict(list)
    for tau in comb.all_permutations(k):
        edges = [(u_cols[a][0], b_cols[tau[a]][0], u_cols[a][1] ^ b_cols[tau[a]][1]) for a in range(k)]
        res = _component_weight(k, edges, d, signed)
        if res is not None:
            classes[res].append(tau)
    col_classes = [(RationalFunction(dpoly ** c) * s, perms) for (s, c), perms in classes.items()]
    res = _wg_sum([(1, vr)], col_classes, k, d)
    return _times_coef(m, res * sign if sign != 1 else res)


# ---------------------------------------------------------------------------
# dispatch


def integrate_monomial(m: Monomial, spec: MeasureSpec) -> RationalFunction:
    """Route a monomial to the engine for ``spec``'s family."""
    fam = spec.base_family
    d = spec.dim
    if not m.factors:
        return RationalFunction.constant(m.coefficient)
    if fam == "U":
        return integrate_unitary(m, d)
    if fam == "SU":
        return integrate_su(m, d)
    if fam == "O":
        return integrate_orthogonal(m, d)
    if fam == "Sp":
        return integrate_symplectic(m, d)
    if fam == "Perm":
        return integrate_permutation(m, d)
    if fam == "CPerm":
        return integrate_centered_permutation(m, d)
    if fam == "DiagU":
        return integrate_diag_unitary(m, d)
    if fam == "Stiefel":
        return integrate_stiefel(m, d, spec.extra)
    if fam == "Psi":
        return integrate_pure_state(m, d)
    if fam == "Design":
        return integrate_design(m, d, spec.extra)
    if fam in ("GUE", "GOE", "GSE"):
        return integrate_gaussian(m, d, fam)
    if fam in ("GinUE", "GinOE", "GinSE"):
        return integrate_ginibre(m, d, fam)
    if fam in ("COE", "CSE"):
        return integrate_circular(m, d, fam)
    raise DispatchError(f"no entrywise engine for {spec.family}")


def integrate_monomials(monomials, spec: MeasureSpec) -> RationalFunction:
    total = ZERO
    for m in monomials:
        total = total + integrate_monomial(m, spec)
    return total
