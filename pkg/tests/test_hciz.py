import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

import oracles
from haarint.errors import ArgumentError, DegenerateSpectrumError, InvalidInputError, UnsupportedFormError
from haarint.hciz import hciz_eigen, hciz_formal, hciz_matrices, perturb_degenerate, superfactorial


def test_one_by_one():
    s, t = sympy.symbols("s t")
    assert sympy.simplify(hciz_eigen([s], [t]).value - sympy.exp(s * t)) == 0
    assert abs(complex(hciz_eigen([0.3], [2.0])) - math.exp(0.6)) < 1e-14


def test_two_by_two_exact():
    v = hciz_eigen([0, 1], [0, 1])
    assert v.symbolic
    assert sympy.simplify(v.value - (sympy.E - 1)) == 0
    assert abs(float(hciz_eigen([0.0, 1.0], [0.0, 1.0])) - (math.e - 1)) < 1e-12


def test_formal():
    v = hciz_formal(2).value
    a1, a2, b1, b2 = sympy.symbols("a1 a2 b1 b2")
    expect = (sympy.exp(a1 * b1 + a2 * b2) - sympy.exp(a1 * b2 + a2 * b1)) / ((a2 - a1) * (b2 - b1))
    assert sympy.simplify(v - expect) == 0
    a1_, b1_ = sympy.symbols("a1 b1")
    assert sympy.simplify(hciz_formal(1).value - sympy.exp(a1_ * b1_)) == 0
    with pytest.raises(ArgumentError):
        hciz_formal("d")


def test_superfactorial():
    assert [superfactorial(d) for d in range(1, 6)] == [1, 1, 2, 12, 288]


def test_matrices():
    s, t, u, v = sympy.symbols("s t u v")
    m = hciz_matrices([[s, 0], [0, t]], [[u, 0], [0, v]]).value
    assert sympy.simplify(m - hciz_eigen([s, t], [u, v]).value) == 0
    assert abs(float(hciz_matrices([[0, 0], [0, 1]], [[0, 0], [0, 1]])) - (math.e - 1)) < 1e-12
    with pytest.raises(UnsupportedFormError):
        hciz_matrices([[s, 1, 0], [1, t, 0], [0, 0, u]], [[1, 0, 0], [0, 2, 0], [0, 0, 3]])


def test_symbolic_two_by_two_general():
    s = sympy.symbols("s")
    v = hciz_matrices([[s, 1], [1, s]], [[0, 0], [0, 1]]).value
    # eigenvalues s-1, s+1
    assert sympy.simplify(v - hciz_eigen([s - 1, s + 1], [0, 1]).value) == 0


def test_errors():
    s = sympy.symbols("s")
    with pytest.raises(DegenerateSpectrumError):
        hciz_eigen([s, s], [0, 1])
    with pytest.raises(InvalidInputError):
        hciz_eigen([1, 2], [1])
    with pytest.raises(InvalidInputError):
        hciz_matrices([[0, 1], [0, 0]], [[1, 0], [0, 2]])


def test_perturbation():
    eps = 1e-12
    assert perturb_degenerate([1.0, 1.0]) == [1.0 + 1j * eps, 1.0 + 2j * eps]
    assert perturb_degenerate([2.0, 1.0]) == [1.0, 2.0]
    p = perturb_degenerate([0, 0, 0])
    assert len(set(p)) == 3


def test_degenerate_numeric_is_finite():
    v = hciz_eigen([0.0, 0.0], [0.3, 1.7])
    assert v.perturbed and abs(complex(v) - 1.0) < 1e-10


@pytest.mark.parametrize(
    "a,b,limit",
    [
        ([0.5, 0.5], [0.0, 1.0], math.exp(0.5)),
        ([0.0, 1.0], [1.0, 1.0], math.exp(1.0)),
        ([1.0, 1.0], [1.0, 1.0], math.exp(2.0)),
    ],
)
def test_confluent_limit_scalar_cases(a, b, limit):
    # A or B proportional to the identity makes the integrand constant
    assert abs(complex(hciz_eigen(a, b)) - limit) < 1e-10 * limit


def test_confluent_limit_by_lhopital():
    x, e = sympy.symbols("x e")
    # d = 2, a = (x, x + e), b = (0, 1): take e -> 0 analytically
    exact = hciz_eigen([x, x + e], [0, 1]).value
    lim = sympy.limit(exact, e, 0).subs(x, sympy.Rational(1, 3))
    got = complex(hciz_eigen([1 / 3, 1 / 3], [0.0, 1.0]))
    assert abs(got - complex(sympy.N(lim))) < 1e-10


def test_confluent_limit_three_by_three():
    e = sympy.symbols("e")
    exact = hciz_eigen([0, e, 1], [0, sympy.Rational(1, 2), 2]).value
    lim = complex(sympy.N(sympy.limit(exact, e, 0)))
    got = complex(hciz_eigen([0.0, 0.0, 1.0], [0.0, 0.5, 2.0]))
    assert abs(got - lim) < 1e-10 * abs(lim)


@pytest.mark.parametrize("seed", range(5))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    d = 3 + seed % 2
    a = list(rng.uniform(-1, 1, d))
    b = list(rng.uniform(-1, 1, d))
    v0 = complex(hciz_eigen(a, b))
    pa, pb = rng.permutation(d), rng.permutation(d)
    v1 = complex(hciz_eigen([a[i] for i in pa], [b[i] for i in pb]))
    assert abs(v1 - v0) < 1e-10 * abs(v0)


def test_permutation_invariance_exact():
    a = [Fraction(1, 2), 0, 2]
    b = [1, Fraction(-1, 3), 0]
    v0 = hciz_eigen(a, b).value
    v1 = hciz_eigen(a[::-1], [b[1], b[2], b[0]]).value
    assert sympy.simplify(v0 - v1) == 0


@pytest.mark.slow
@pytest.mark.parametrize("d", [2, 3])
def test_monte_carlo(d):
    rng = np.random.default_rng(11 + d)
    a = rng.uniform(-1, 1, d)
    b = rng.uniform(-1, 1, d)
    U = oracles.haar_unitary(d, 100_000, rng)
    w = np.abs(U) ** 2  # tr(A U B U') = sum_ij a_i b_j |U_ij|^2
    est = np.exp(np.einsum("i,sij,j->s", a, w, b)).mean()
    exact = float(hciz_eigen(list(a), list(b)))
    assert abs(est - exact) < 0.02 * abs(exact)
