import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import D, rf
from haarint import combinatorics as comb
from haarint import entrywise as ew
from haarint import weingarten as wg
from haarint.algebra import RationalFunction, ratfunc_eval
from haarint.entrywise import Monomial, MonomialFactor as F
from haarint.errors import DegreeGuardError, DesignOrderError, MeasureError, InvalidInputError
from haarint.measures import MeasureSpec, parse_measure


def mono(*factors, c=1):
    return Monomial(c, factors)


def u(i, j, s="U"):
    return F(s, i, j)


def ub(i, j, s="U"):
    return F(s, i, j, True)


def val(r, n):
    return ratfunc_eval(r, n) if not r.is_constant() else r.constant_value()


def frac(x):
    x = x if not isinstance(x, RationalFunction) else x.constant_value()
    assert x.im == 0
    return Fraction(x.re)


# ---------------------------------------------------------------------------
# golden values


def test_unitary_examples():
    assert ew.integrate_unitary(mono(u(1, 1), ub(1, 1))) == 1 / D
    assert ew.integrate_unitary(mono(u(1, 1), ub(1, 2), u(2, 2), ub(2, 1))) == -1 / (D * (D * D - 1))
    assert ew.integrate_unitary(mono(u(1, 1), u(1, 1), ub(1, 1), ub(1, 1))) == 2 / (D * (D + 1))


def test_su_examples():
    assert ew.integrate_su(mono(u(1, 1), ub(1, 1))) == 1 / D
    assert ew.integrate_su(mono(u(1, 1))).is_zero()
    assert ew.integrate_su(mono(u(1, 1), u(2, 2)), 2).is_zero()


def test_orthogonal_examples():
    o = lambda: F("O", 1, 1)
    assert ew.integrate_orthogonal(mono(o(), o())) == 1 / D
    assert ew.integrate_orthogonal(mono(o(), o(), o(), o())) == 3 / (D * (D + 2))
    assert ew.integrate_orthogonal(mono(o(), o(), o())).is_zero()


def test_symplectic_examples():
    s = lambda i, j, c=False: F("Sp", i, j, c)
    m = mono(s(1, 1), s(1, 1, True), s(1, 2), s(1, 2, True))
    assert ew.integrate_symplectic(m) == 1 / (D + D * D)
    assert ew.integrate_symplectic(mono(s(1, 1), s(1, 1, True))) == 1 / D
    assert ew.integrate_symplectic(mono(s(1, 1), s(1, 1, True), s(2, 2))).is_zero()
    with pytest.raises(MeasureError):
        ew.integrate_symplectic(mono(s(1, 1), s(1, 1, True)), 3)


def test_permutation_examples():
    p = lambda i, j: F("P", i, j)
    assert ew.integrate_permutation(mono(p(1, 1), p(2, 2))) == 1 / (D * (D - 1))
    assert ew.integrate_permutation(mono(p(1, 1), p(1, 1), p(1, 1))) == 1 / D
    assert ew.integrate_permutation(mono(p(1, 1), p(1, 2))).is_zero()


def test_centered_permutation_examples():
    y = lambda: F("Y", 1, 1)
    assert ew.integrate_centered_permutation(mono(y(), y())) == (D - 1) / (D * D)
    assert ew.integrate_centered_permutation(mono(y())).is_zero()
    # (P - 1/10)^4 with E[P^m] = 1/10 for m >= 1
    n = Fraction(1, 10)
    expect = sum(
        Fraction(comb_n) * (-n) ** (4 - m) * (n if m else 1)
        for m, comb_n in enumerate((1, 4, 6, 4, 1))
    )
    assert frac(ew.integrate_centered_permutation(mono(y(), y(), y(), y()), 10)) == expect


def test_diag_unitary_examples():
    dd = lambda i, j, c=False: F("D", i, j, c)
    assert ew.integrate_diag_unitary(mono(dd(1, 1), dd(1, 1, True))) == RationalFunction(1)
    assert ew.integrate_diag_unitary(mono(dd(1, 1), dd(2, 2, True))).is_zero()
    assert ew.integrate_diag_unitary(mono(dd(1, 2))).is_zero()
    assert ew.integrate_diag_unitary(mono(dd(1, 1), dd(2, 2), dd(2, 2, True), dd(1, 1, True))) == RationalFunction(1)


def test_stiefel_and_pure_state():
    v = mono(F("V", 1, 1), F("V", 1, 1, True))
    assert ew.integrate_stiefel(v, None, 2) == 1 / D
    psi = lambda: F("psi", 1, 1)
    assert ew.integrate_pure_state(mono(psi(), psi().conj())) == 1 / D
    assert ew.integrate_pure_state(mono(psi(), psi(), psi().conj(), psi().conj())) == 2 / (D * (D + 1))
    with pytest.raises(InvalidInputError):
        ew.integrate_stiefel(mono(F("V", 1, 3), F("V", 1, 3, True)), None, 2)
    with pytest.raises(MeasureError):
        parse_measure("Stiefel(2,3)")


def test_design():
    spec = MeasureSpec("Design", None, 2)
    assert ew.integrate_monomial(mono(u(1, 1), ub(1, 1)), spec) == 1 / D
    with pytest.raises(DesignOrderError) as err:
        ew.integrate_monomial(mono(*[u(1, 1)] * 3, *[ub(1, 1)] * 3), spec)
    assert "3" in str(err.value) and "2" in str(err.value)
    assert ew.integrate_monomial(mono(u(1, 1)), MeasureSpec("Design", None, 1)).is_zero()


def test_gaussian_examples():
    from haarint import integrate

    assert integrate("tr(H^2)", "GUE(d)") == D**2
    assert integrate("tr(H^4)", "GUE(d)") == 2 * D**3 + D
    assert integrate("tr(H^6)", "GUE(d)") == 5 * D**4 + 10 * D**2
    assert integrate("tr(H^2)", "GSE(d)") == D**2 - D
    with pytest.raises(MeasureError):
        parse_measure("GSE(3)")


def test_ginibre_examples():
    from haarint import integrate

    assert integrate("tr(G*G')", "GinUE(d)") == D**2
    assert integrate("tr(G*G')^2", "GinUE(d)") == D**4 + D**2
    assert integrate("tr(G*G'*G*G')", "GinUE(d)") == 2 * D**3
    with pytest.raises(MeasureError):
        parse_measure("GinSE(5)")


def test_circular_examples():
    s = lambda i, j, c=False: F("S", i, j, c)
    assert ew.integrate_circular(mono(s(1, 1), s(1, 1, True)), None, "COE") == 2 / (D + 1)
    assert ew.integrate_circular(mono(s(1, 1), s(1, 1, True)), None, "CSE") == 1 / (D - 1)
    assert ew.integrate_circular(mono(s(1, 1)), None, "COE").is_zero()
    with pytest.raises(MeasureError):
        ew.integrate_circular(mono(s(1, 1), s(1, 1, True)), 3, "CSE")


# ---------------------------------------------------------------------------
# independent oracles


def _random_unitary_monomial(draw, n, k, sym="U"):
    idx = st.integers(1, n)
    fs = [F(sym, draw(idx), draw(idx)) for _ in range(k)]
    fs += [F(sym, draw(idx), draw(idx), True) for _ in range(k)]
    return mono(*fs)


@st.composite
def unitary_case(draw):
    n = draw(st.integers(2, 4))
    k = draw(st.integers(1, 3))
    return n, _random_unitary_monomial(draw, n, k)


@given(unitary_case())
def test_unitary_matches_gram_inverse(case):
    n, m = case
    u_ = tuple((f.row - 1, f.col - 1) for f in m.factors if not f.conjugated)
    b_ = tuple((f.row - 1, f.col - 1) for f in m.factors if f.conjugated)
    expect = oracles.unitary(u_, b_, n)
    assert frac(ew.integrate_unitary(m, n)) == expect
    assert frac(val(ew.integrate_unitary(m, None), n)) == expect if n >= m.degree // 2 else True


@st.composite
def orthogonal_case(draw):
    n = draw(st.integers(2, 4))
    deg = draw(st.sampled_from([2, 4, 6]))
    idx = st.integers(1, n)
    return n, mono(*[F("O", draw(idx), draw(idx)) for _ in range(deg)])


@given(orthogonal_case())
def test_orthogonal_matches_gram_inverse(case):
    n, m = case
    expect = oracles.orthogonal([(f.row - 1, f.col - 1) for f in m.factors], n)
    assert frac(ew.integrate_orthogonal(m, n)) == expect


@st.composite
def symplectic_case(draw):
    n = draw(st.sampled_from([2, 4, 6]))
    deg = draw(st.sampled_from([2, 4] if n == 6 else [2, 4, 6]))
    idx = st.integers(1, n)
    return n, mono(*[F("Sp", draw(idx), draw(idx), draw(st.booleans())) for _ in range(deg)])


@settings(max_examples=40)
@given(symplectic_case())
def test_symplectic_matches_j_gram_inverse(case):
    n, m = case
    expect = oracles.symplectic([(f.row, f.col, f.conjugated) for f in m.factors], n)
    assert frac(ew.integrate_symplectic(m, n)) == expect


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize(
    "entries",
    [
        [(1, 1, False), (1, 1, True)],
        [(1, 2, False), (1, 2, True)],
        [(1, 2, False), (2, 1, True)],
        [(1, 1, False), (2, 2, False), (1, 1, True), (2, 2, True)],
        [(1, 1, False), (1, 1, False), (1, 1, True), (1, 1, True)],
        [(1, 2, False), (2, 1, False), (1, 1, True), (2, 2, True)],
    ],
)
def test_coe_matches_substitution(n, entries):
    m = mono(*[F("S", i, j, c) for i, j, c in entries])
    assert frac(ew.integrate_circular(m, n, "COE")) == oracles.circular(entries, n, "COE")
    assert frac(val(ew.integrate_circular(m, None, "COE"), n)) == oracles.circular(entries, n, "COE")


@pytest.mark.parametrize("n", [2, 4])
@pytest.mark.parametrize(
    "entries",
    [
        [(1, 1, False), (1, 1, True)],
        [(1, 2, False), (1, 2, True)],
        [(1, 1, False), (1, 1, False), (1, 1, True), (1, 1, True)],
        [(1, 1, False), (2, 2, False), (1, 1, True), (2, 2, True)],
    ],
)
def test_cse_matches_substitution(n, entries):
    m = mono(*[F("S", i, j, c) for i, j, c in entries])
    assert frac(ew.integrate_circular(m, n, "CSE")) == oracles.circular(entries, n, "CSE")


def _all_pair_monomials(n, max_deg):
    cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    for deg in range(1, max_deg + 1):
        yield from itertools.combinations_with_replacement(cells, deg)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_permutation_brute_force(n):
    for pairs in _all_pair_monomials(n, 4 if n < 5 else 3):
        m = mono(*[F("P", i, j) for i, j in pairs])
        assert frac(ew.integrate_permutation(m, n)) == oracles.permutation(pairs, n), pairs


@pytest.mark.parametrize("n", [3, 4])
def test_centered_permutation_brute_force(n):
    for pairs in _all_pair_monomials(n, 3):
        m = mono(*[F("Y", i, j) for i, j in pairs])
        assert frac(ew.integrate_centered_permutation(m, n)) == oracles.centered_permutation(pairs, n)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("L", [2, 4, 6])
def test_gaussian_trace_matches_explicit_wick(n, L):
    from haarint import integrate

    for flavor in ("GUE", "GOE"):
        assert frac(integrate(f"tr(H^{L})", f"{flavor}({n})")) == oracles.wick_trace(L, n, flavor)
    word = "*".join(["G", "G'"] * (L // 2))
    assert frac(integrate(f"tr({word})", f"GinUE({n})")) == oracles.wick_trace(L, n, "GinUE")


# ---------------------------------------------------------------------------
# invariants


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_row_normalization(n):
    total = sum(frac(ew.integrate_unitary(mono(u(1, j), ub(1, j)), n)) for j in range(1, n + 1))
    assert total == 1


@given(st.lists(st.tuples(st.integers(1, 3), st.integers(1, 3), st.booleans()), min_size=1, max_size=6))
def test_unbalanced_and_odd_vanish(fs):
    nu = sum(1 for f in fs if not f[2])
    if nu != len(fs) - nu:
        m = mono(*[F("U", *f) for f in fs])
        assert ew.integrate_unitary(m).is_zero()
        assert ew.integrate_su(m).is_zero()
    if len(fs) % 2:
        assert ew.integrate_orthogonal(mono(*[F("O", i, j) for i, j, _ in fs])).is_zero()
        assert ew.integrate_symplectic(mono(*[F("Sp", *f) for f in fs])).is_zero()
        assert ew.integrate_gaussian(mono(*[F("H", i, j) for i, j, _ in fs]), None, "GUE").is_zero()


@pytest.mark.parametrize(
    "entries",
    [
        [(1, 1, False), (1, 1, True)],
        [(1, 1, False), (1, 1, True), (1, 2, False), (1, 2, True)],
        [(1, 1, False), (1, 1, False), (1, 1, True), (1, 1, True)],
        [(1, 1, False), (2, 2, False), (1, 1, True), (2, 2, True)],
        [(1, 1, False), (1, 1, True), (1, 1, False), (1, 1, True), (2, 1, False), (2, 1, True)],
    ],
)
def test_symplectic_orthogonal_consistency(entries):
    m = mono(*[F("Sp", *e) for e in entries])
    sign = 1
    rows, cols = [], []
    for f in m.factors:
        r, c = ew._sp_slot(f.row, None), ew._sp_slot(f.col, None)
        if f.conjugated:
            sign *= ew._sp_sign(r) * ew._sp_sign(c)
            r, c = ew._sp_bar(r), ew._sp_bar(c)
        rows.append(r)
        cols.append(c)
    vr = ew._matching_pairings(rows, ew._j_entry)
    vc = ew._matching_pairings(cols, ew._j_entry)
    via_o = lambda mu: (-1) ** len(mu) * wg.orthogonal_value(mu, None).negate_var()
    k = len(entries) // 2
    assert ew._double_pair_sum(vr, vc, k, via_o, oriented=True) * sign == ew.integrate_symplectic(m)


def test_degree_guard():
    m = mono(*[u(1, 1)] * 7, *[ub(1, 1)] * 7)
    with pytest.raises(DegreeGuardError):
        ew.integrate_unitary(m)
    old = ew.CONFIG.max_degree
    try:
        ew.CONFIG.max_degree = 14
        assert ew.integrate_unitary(m, 3) is not None
    finally:
        ew.CONFIG.max_degree = old


def test_index_bounds():
    with pytest.raises(InvalidInputError):
        ew.integrate_unitary(mono(u(3, 1), ub(3, 1)), 2)
    with pytest.raises(InvalidInputError):
        F("U", 0, 1)


def test_inputs_not_mutated():
    m = mono(u(2, 1), ub(2, 1), u(1, 1), ub(1, 1))
    before = (m.coefficient, m.factors)
    ew.integrate_unitary(m)
    assert (m.coefficient, m.factors) == before


# ---------------------------------------------------------------------------
# statistical


@pytest.mark.slow
def test_monte_carlo_unitary_d3():
    rng = np.random.default_rng(7)
    acc = np.zeros(3)
    total = 10**6
    for _ in range(10):
        U = oracles.haar_unitary(3, total // 10, rng)
        a = np.abs(U[:, 0, 0]) ** 2
        mixed = U[:, 0, 0] * np.conj(U[:, 0, 1]) * U[:, 1, 1] * np.conj(U[:, 1, 0])
        acc += [a.sum(), (a**2).sum(), mixed.real.sum()]
    est = acc / total
    exact = [
        ew.integrate_unitary(mono(u(1, 1), ub(1, 1)), 3),
        ew.integrate_unitary(mono(u(1, 1), u(1, 1), ub(1, 1), ub(1, 1)), 3),
        ew.integrate_unitary(mono(u(1, 1), ub(1, 2), u(2, 2), ub(2, 1)), 3),
    ]
    for e, x in zip(est, exact):
        assert abs(e - float(frac(x))) < 5e-3


@pytest.mark.parametrize(
    "n,entries",
    [
        (2, [(1, 1)] * 6),
        (2, [(1, 1), (1, 1), (1, 2), (1, 2), (2, 1), (2, 1)]),
        (2, [(1, 1), (1, 2), (2, 1), (2, 2), (1, 1), (2, 2)]),
        (3, [(1, 1)] * 4 + [(2, 3)] * 4),
    ],
)
def test_orthogonal_below_stable_range(n, entries):
    m = mono(*[F("O", i, j) for i, j in entries])
    assert frac(ew.integrate_orthogonal(m, n)) == oracles.orthogonal([(i - 1, j - 1) for i, j in entries], n)


@pytest.mark.parametrize(
    "entries",
    [
        [(1, 1, False), (1, 1, True)] * 2,
        [(1, 1, False), (1, 1, True), (1, 2, False), (1, 2, True)],
        [(1, 1, False), (1, 1, True)] * 3,
        [(1, 1, False), (2, 2, False), (1, 2, True), (2, 1, False), (1, 1, True), (2, 2, True)],
    ],
)
def test_symplectic_below_stable_range(entries):
    m = mono(*[F("Sp", *e) for e in entries])
    assert frac(ew.integrate_symplectic(m, 2)) == oracles.symplectic(entries, 2)
