"""Harish-Chandra-Itzykson-Zuber integrals.

    E_U exp(tr(A U B U')) = prod_{p<d} p! * det[exp(a_i b_j)] / (Delta(a) Delta(b))

with Delta(a) = prod_{i<j} (a_j - a_i).  Symbolic and exact-rational input
gives a sympy expression; floating-point input is evaluated with mpmath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number as _Num

import mpmath
import numpy as np
import sympy

from .errors import (
    ArgumentError,
    DegenerateSpectrumError,
    InvalidInputError,
    UnsupportedFormError,
)

# Working precision for the numeric path.  Perturbed spectra make both
# Vandermonde factors as small as eps^(d(d-1)/2), so doubles are not enough.
NUMERIC_DPS = 60
REL_EPS = 1e-12


@dataclass(frozen=True)
class HcizValue:
    value: object  # sympy.Expr (exact/symbolic) or complex/float
    dim: int
    symbolic: bool
    perturbed: bool = False

    def __complex__(self):
        return complex(self.value) if not self.symbolic else complex(sympy.N(self.value))

    def __float__(self):
        return complex(self).real

    def __str__(self):
        return str(self.value)


def superfactorial(d: int) -> int:
    return math.prod(math.factorial(p) for p in range(1, d))


def _is_numeric(x) -> bool:
    return isinstance(x, (_Num, np.number)) and not isinstance(x, bool)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool)


def _to_sympy(x):
    if isinstance(x, str):
        return sympy.sympify(x)
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def perturb_degenerate(a) -> list:
    """Sort by (re, im); if values repeat, shift entry i by i*eps*1j."""
    vals = sorted((complex(x) for x in a), key=lambda z: (z.real, z.imag))
    if len(set(vals)) == len(vals):
        return [v if v.imag else v.real for v in vals]
    eps = max(max((abs(v) for v in vals), default=0.0), 1.0) * REL_EPS
    return [v + (i + 1) * eps * 1j for i, v in enumerate(vals)]


def _numeric(a, b) -> HcizValue:
    d = len(a)
    pa, pb = perturb_degenerate(a), perturb_degenerate(b)
    perturbed =len(set(map(complex, a))) < d or len(set(map(complex, b))) < d
    with mpmath.workdps(NUMERIC_DPS):
        ma = [mpmath.mpmathify(x) for x in pa]
        mb = [mpmath.mpmathify(x) for x in pb]
        M = mpmath.matrix(d, d)
        for i in range(d):
            for j in range(d):
                M[i, j] = mpmath.exp(ma[i] * mb[j])
        num = mpmath.det(M) * superfactorial(d)
        den = mpmath.mpf(1)
        for i in range(d):
            for j in range(i + 1, d):
                den *= (ma[j] - ma[i]) * (mb[j] - mb[i])
        val = complex(num / den)
    real_input = all(complex(x).imag == 0 for x in list(a) + list(b))
    return HcizValue(val.real if real_input else val, d, False, perturbed)


def _symbolic(a, b) -> HcizValue:
    d = len(a)
    sa = [_to_sympy(x) for x in a]
    sb = [_to_sympy(x) for x in b]
    for name, vals in (("a", sa), ("b", sb)):
        for i in range(d):
            for j in range(i + 1, d):
                if sympy.simplify(vals[j] - vals[i]) == 0:
                    raise DegenerateSpectrumError(
                        f"spectrum {name} has equal entries {vals[i]} at positions {i + 1} and {j + 1}; "
                        "the formula needs distinct eigenvalues; take the limit analytically "
                        "or pass numeric values to use the perturbed evaluation"
                    )
    if d == 1:
        return HcizValue(sympy.exp(sa[0] * sb[0]), 1, True)
    M = sympy.Matrix(d, d, lambda i, j: sympy.exp(sa[i] * sb[j]))
    num = sympy.powsimp(sympy.expand(M.det(method="berkowitz")))
    den = sympy.Integer(1)
    for i in range(d):
        for j in range(i + 1, d):
            den *= (sa[j] - sa[i]) * (sb[j] - sb[i])
    return HcizValue(superfactorial(d) * num / den, d, True)


def hciz_eigen(a, b) -> HcizValue:
    """HCIZ integral from the two spectra.

    Symbols (str or sympy) or exact rationals with distinct values give an
    exact expression; anything else is evaluated numerically, perturbing
    degenerate spectra.
    """
    a, b = list(a), list(b)
    if len(a) != len(b) or not a:
        raise InvalidInputError(f"spectra must have the same positive length, got {len(a)} and {len(b)}")
    vals = a + b
    if all(_is_numeric(x) for x in vals):
        exact = all(_is_exact(x) for x in vals)
        if exact and len(set(a)) == len(a) and len(set(b)) == len(b):
            return _symbolic(a, b)
        return _numeric(a, b)
    return _symbolic(a, b)


def _has_symbols(M) -> bool:
    return any(not _is_numeric(x) for row in M for x in row)


def _eigs_symbolic(M) -> list:
    n = len(M)
    S = sympy.Matrix([[_to_sympy(x) for x in row] for row in M])
    if all(S[i, j] == 0 for i in range(n) for j in range(n) if i != j):
        return [S[i, i] for i in range(n)]
    if n == 2:
        tr = S[0, 0] + S[1, 1]
        disc = sympy.sqrt(tr**2 - 4 * S.det())
        return [(tr - disc) / 2, (tr + disc) / 2]
    raise UnsupportedFormError(
        "symbolic non-diagonal matrices larger than 2x2 are not supported; "
        "supply the eigenvalues with hciz_eigen"
    )


def _eigs_numeric(M) -> list:
    A = np.asarray(M, dtype=complex)
    if not np.allclose(A, A.conj().T, atol=1e-12):
        raise InvalidInputError("numeric matrices must be Hermitian")
    return [float(x) for x in np.linalg.eigvalsh(A)]


def hciz_matrices(A, B) -> HcizValue:
    """HCIZ integral from two square matrices (lists of rows)."""
    A, B = [list(r) for r in A], [list(r) for r in B]
    n = len(A)
    if n == 0 or any(len(r) != n for r in A) or len(B) != n or any(len(r) != n for r in B):
        raise InvalidInputError("A and B must be square matrices of the same size")
    if _has_symbols(A) or _has_symbols(B):
        return hciz_eigen(_eigs_symbolic(A), _eigs_symbolic(B))
    return hciz_eigen(_eigs_numeric(A), _eigs_numeric(B))


def hciz_formal(d) -> HcizValue:
    """The formula over fresh symbols a_1..a_d, b_1..b_d."""
    if not isinstance(d, int) or isinstance(d, bool):
        raise ArgumentError("symbolic dimensions are not supported here; give a concrete integer d")
    if d < 1:
        raise InvalidInputError("d must be >= 1")
    a = sympy.symbols(f"a1:{d + 1}")
    b = sympy.symbols(f"b1:{d + 1}")
    return _symbolic(list(a), list(b))
