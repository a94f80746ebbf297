from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import D
from haarint import integrate
from haarint.algebra import ExactScalar, LaurentSeries, ratfunc_eval
from haarint.asymptotics import TraceSeries, asymptotic
from haarint.errors import ArgumentError, InvalidInputError, NotRationalError
from haarint.measures import parse_measure
from haarint.tracelogic import TraceExpr


def test_entry_moment_series():
    s = asymptotic("abs(U[1,1])^4", "U(d)", 4)
    assert s.render() == "2/d^2 - 2/d^3 + 2/d^4"


def test_purity_series():
    s = asymptotic("2*n/(n^2+1)", "n", 5)
    assert s.render() == "2/n - 2/n^3 + 2/n^5"


def test_trace_polynomial_series():
    s = asymptotic("tr(U*A*U'*B*U*C*U'*E)", "U(d)", 3)
    assert isinstance(s, TraceSeries)
    assert s.render() == (
        "(tr(A)*tr(B*E)*tr(C) + tr(A*C)*tr(B)*tr(E))/d^2"
        " - (tr(A)*tr(B)*tr(C)*tr(E) + tr(A*C)*tr(B*E))/d^3"
    )


def test_concrete_measure_uses_fresh_symbol():
    s = asymptotic("abs(U[1,1])^4", "U(5)", 3)
    assert s.symbol == "d"
    t = asymptotic("d*abs(U[1,1])^2", parse_measure("U(5)"), 2)
    assert t.symbol == "d" and t.render() == "1"
    assert asymptotic("abs(U[1,1])^4", "U(n)", 3).render() == "2/n^2 - 2/n^3"


def test_not_rational():
    with pytest.raises(NotRationalError):
        asymptotic("abs(tr(U))^4", "U(d)", 3)


def test_unknown_symbol():
    with pytest.raises(ArgumentError):
        asymptotic("2*m/(n^2+1)", "n", 3)


def test_negative_order():
    with pytest.raises(InvalidInputError):
        asymptotic("1/n", "n", -1)


CASES = [
    ("abs(U[1,1])^4", "U(d)"),
    ("abs(U[1,1])^2*abs(U[2,2])^2", "U(d)"),
    ("U[1,1]*conj(U[1,2])*U[2,2]*conj(U[2,1])", "U(d)"),
    ("O[1,1]^4", "O(d)"),
    ("abs(S[1,1])^4", "COE(d)"),
    ("abs(Sp[1,1])^2*abs(Sp[1,2])^2", "Sp(d)"),
]


@pytest.mark.parametrize("expr,measure", CASES)
@pytest.mark.parametrize("order", [3, 5, 7])
def test_series_consistency_at_large_d(expr, measure, order):
    exact = integrate(expr, measure)
    s = asymptotic(expr, measure, order)
    n = 1000
    x = float(ratfunc_eval(exact, n).re)
    approx = float(sum(c.re * Fraction(1, n) ** m for m, c in s.terms.items()))
    assert abs(approx - x) <= abs(x) * 10 ** (-(order - 1))


@given(st.sampled_from(CASES), st.integers(1, 6), st.data())
def test_truncation_nesting(case, n, data):
    m = data.draw(st.integers(0, n))
    expr, measure = case
    assert asymptotic(expr, measure, n).truncate(m) == asymptotic(expr, measure, m)


def test_trace_series_nesting():
    big = asymptotic("tr(U*A*U'*B*U*C*U'*E)", "U(d)", 5)
    assert big.truncate(3) == asymptotic("tr(U*A*U'*B*U*C*U'*E)", "U(d)", 3)


def test_rational_function_input():
    s = asymptotic(2 / (D * (D + 1)), "d", 4)
    assert isinstance(s, LaurentSeries)
    assert s.render() == "2/d^2 - 2/d^3 + 2/d^4"
