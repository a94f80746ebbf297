"""Independent exact oracles used by the tests.

Each oracle recomputes an average from first principles (explicit Gram
matrices inverted with sympy, explicit index sums, brute-force group
averages) without going through the engines under test.
"""

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial

import sympy

from haarint import combinatorics as comb


def _pinv(G):
    try:
        return G.inv()
    except ValueError:
        return G.pinv()


@lru_cache(maxsize=None)
def unitary_wg_matrix(k, n):
    perms = comb.all_permutations(k)
    G = sympy.Matrix(len(perms), len(perms), lambda a, b: sympy.Integer(n) ** comb.cycle_count(comb.compose(perms[a], comb.inverse(perms[b]))))
    return perms, _pinv(G)


def unitary(u, ub, n):
    """E prod U[i,j] for (i,j) in u times prod conj U[i,j] for (i,j) in ub over U(n)."""
    if len(u) != len(ub):
        return Fraction(0)
    k = len(u)
    if k == 0:
        return Fraction(1)
    perms, W = unitary_wg_matrix(k, n)
    total = sympy.Integer(0)
    for a, s in enumerate(perms):
        if any(u[t][0] != ub[s[t]][0] for t in range(k)):
            continue
        for b, t_ in enumerate(perms):
            if any(u[t][1] != ub[t_[t]][1] for t in range(k)):
                continue
            total += W[a, b]
    return Fraction(int(total.p), int(total.q))


@lru_cache(maxsize=None)
def orthogonal_wg_matrix(k, n):
    pp = comb.pair_partitions(2 * k)
    G = sympy.Matrix(len(pp), len(pp), lambda a, b: sympy.Integer(n) ** comb.loops(pp[a], pp[b]))
    return pp, _pinv(G)


def orthogonal(entries, n):
    m = len(entries)
    if m % 2:
        return Fraction(0)
    if m == 0:
        return Fraction(1)
    pp, W = orthogonal_wg_matrix(m // 2, n)
    rows = [e[0] for e in entries]
    cols = [e[1] for e in entries]
    ok_r = [all(rows[a] == rows[b] for a, b in p) for p in pp]
    ok_c = [all(cols[a] == cols[b] for a, b in p) for p in pp]
    total = sum((W[a, b] for a in range(len(pp)) if ok_r[a] for b in range(len(pp)) if ok_c[b]), sympy.Integer(0))
    return Fraction(int(total.p), int(total.q))


# symplectic: J = [[0, I], [-I, 0]] on 0-based indices 0..2h-1


def j_entry(x, y, h):
    if x < h and y == x + h:
        return 1
    if x >= h and y == x - h:
        return -1
    return 0


def _delta_j(p, idx, h):
    out = 1
    for a, b in p:
        out *= j_entry(idx[a], idx[b], h)
        if not out:
            return 0
    return out


@lru_cache(maxsize=None)
def symplectic_wg_matrix(k, n):
    h = n // 2
    pp = comb.pair_partitions(2 * k)
    vecs = [[_delta_j(p, i, h) for i in itertools.product(range(n), repeat=2 * k)] for p in pp]
    G = sympy.Matrix(len(pp), len(pp), lambda a, b: sum(x * y for x, y in zip(vecs[a], vecs[b])))
    return pp, _pinv(G)


def symplectic(entries, n):
    """entries: (row, col, conjugated) with 1-based indices over Sp(n)."""
    h = n // 2
    sign = 1
    plain = []
    for i, j, c in entries:
        i, j = i - 1, j - 1
        if c:
            s = lambda x: 1 if x < h else -1
            bar = lambda x: x + h if x < h else x - h
            sign *= s(i) * s(j)
            i, j = bar(i), bar(j)
        plain.append((i, j))
    m = len(plain)
    if m % 2:
        return Fraction(0)
    pp, W = symplectic_wg_matrix(m // 2, n)
    rows = [e[0] for e in plain]
    cols = [e[1] for e in plain]
    dr = [_delta_j(p, rows, h) for p in pp]
    dc = [_delta_j(p, cols, h) for p in pp]
    total = sum((dr[a] * dc[b] * W[a, b] for a in range(len(pp)) if dr[a] for b in range(len(pp)) if dc[b]), sympy.Integer(0))
    total *= sign
    return Fraction(int(total.p), int(total.q))


def _jmat(n):
    h = n // 2
    return [[j_entry(x, y, h) for y in range(n)] for x in range(n)]


def circular(entries, n, flavor):
    """COE: S = U U^T; CSE: S = U J U^T J^T.  Expand every S entry into U
    entries over explicit internal indices and average with :func:`unitary`."""
    J = _jmat(n) if flavor == "CSE" else None

    def expand_s(i, j):
        # list of (coef, [(row,col) of U, (row,col) of U])
        out = []
        if flavor == "COE":
            for a in range(n):
                out.append((1, [(i, a), (j, a)]))
        else:
            for a in range(n):
                for b in range(n):
                    if not J[a][b]:
                        continue
                    for c in range(n):
                        jt = J[j][c]  # (J^T)[c, j] = J[j, c]
                        if jt:
                            out.append((J[a][b] * jt, [(i, a), (c, b)]))
        return out

    total = Fraction(0)
    pieces = [(expand_s(i - 1, j - 1), conj) for i, j, conj in entries]
    for combo in itertools.product(*[p for p, _ in pieces]):
        coef = 1
        u, ub = [], []
        for (c, pair), (_, conj) in zip(combo, pieces):
            coef *= c
            (ub if conj else u).extend(pair)
        if len(u) != len(ub):
            continue
        total += coef * unitary(tuple(u), tuple(ub), n)
    return total


def permutation(pairs, n):
    """Brute-force average of prod P[i,j] over all n! permutation matrices."""
    hits = 0
    for perm in itertools.permutations(range(n)):
        if all(perm[i - 1] == j - 1 for i, j in pairs):
            hits += 1
    return Fraction(hits, factorial(n))


def centered_permutation(pairs, n):
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        v = Fraction(1)
        for i, j in pairs:
            v *= (1 if perm[i - 1] == j - 1 else 0) - Fraction(1, n)
        total += v
    return total / factorial(n)


def wick_trace(word_len, n, flavor):
    """E tr(H^L) (GUE/GOE) or E tr((G G')^{L/2}) (GinUE) by explicit index
    sums and perfect matchings at concrete n."""
    L = word_len
    total = 0
    for idx in itertools.product(range(n), repeat=L):
        if flavor in ("GUE", "GOE"):
            ents = [(idx[t], idx[(t + 1) % L], False) for t in range(L)]
        else:
            ents = []
            for t in range(L):
                a, b = idx[t], idx[(t + 1) % L]
                ents.append((a, b, False) if t % 2 == 0 else (b, a, True))
        total += _wick(ents, flavor)
    return total


def _wick(ents, flavor):
    if not ents:
        return 1
    (i, j, c), rest = ents[0], ents[1:]
    s = 0
    for t, (k, l, c2) in enumerate(rest):
        if flavor == "GUE":
            w = 1 if (i == l and j == k) else 0
        elif flavor == "GOE":
            w = (i == k and j == l) + (i == l and j == k)
        else:  # GinUE: G with conj(G) only
            w = 1 if (c != c2 and i == k and j == l) else 0
        if w:
            s += w * _wick(rest[:t] + rest[t + 1 :], flavor)
    return s


# trace words ---------------------------------------------------------------


def _letter_matrix(M, flag):
    M = sympy.Matrix(M)
    if flag == "'":
        return M.H
    if flag == "T":
        return M.T
    if flag == "*":
        return M.conjugate()
    return M


def eval_trace_expr(t, n, mats):
    """Value of a TraceExpr at d = n with constant matrices substituted."""
    from haarint.algebra import ratfunc_eval
    from haarint.tracelogic import Trace

    total = sympy.Integer(0)
    for atoms, coef in t.terms.items():
        c = ratfunc_eval(coef, n)
        v = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)
        for a in atoms:
            assert isinstance(a, Trace)
            P = sympy.eye(n)
            for name, flag in a.word:
                M = _jmat(n) if name == "J" else mats[name]
                P = P * _letter_matrix(M, flag)
            v *= P.trace()
        total += v
    return sympy.nsimplify(sympy.expand(total))


def trace_word_average(words, n, mats, haar, family):
    """E prod_w tr(w) by explicit index sums; haar letters become entries
    averaged with the Gram-inverse oracles, constants are substituted."""
    slots = sum(len(w) for w in words)
    total = sympy.Integer(0)
    for idx in itertools.product(range(n), repeat=slots):
        pos = 0
        coef = sympy.Integer(1)
        ents = []
        for w in words:
            L = len(w)
            for t, (name, flag) in enumerate(w):
                i, j = idx[pos + t], idx[pos + (t + 1) % L]
                if name == haar:
                    if flag in ("'", "T"):
                        i, j = j, i
                    ents.append((i, j, flag in ("'", "*")))
                else:
                    coef *= _letter_matrix(mats[name], flag)[i, j]
                    if coef == 0:
                        break
            if coef == 0:
                break
            pos += L
        if coef == 0:
            continue
        if family == "U":
            u = tuple((i, j) for i, j, c in ents if not c)
            ub = tuple((i, j) for i, j, c in ents if c)
            avg = unitary(u, ub, n)
        elif family == "O":
            avg = orthogonal([(i, j) for i, j, _ in ents], n)
        else:
            avg = symplectic([(i + 1, j + 1, c) for i, j, c in ents], n)
        if avg:
            total += coef * sympy.Rational(avg.numerator, avg.denominator)
    return sympy.nsimplify(sympy.expand(total))


def haar_unitary(n, size, rng):
    """``size`` Haar-random n x n unitaries (QR of complex Ginibre, phases fixed)."""
    import numpy as np

    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]
