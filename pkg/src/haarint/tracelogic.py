"""Coordinate-free integration of trace polynomials.

A trace word is a tuple of letters ``(name, flag)`` with flag one of
``""`` (M), ``"'"`` (adjoint), ``"T"`` (transpose), ``"*"`` (entrywise
conjugate).  Integration wires the index slots of the random-matrix letters
according to the Weingarten (or Wick) contractions and reads the resulting
closed cycles back as traces of constant words; a cycle with no constant
letter is a factor d.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from fractions import Fraction
from math import prod

from . import combinatorics as comb
from . import weingarten as wg
from .algebra import DimPoly, ExactScalar, RationalFunction, as_ratfunc, ratfunc_eval
from .entrywise import Monomial, MonomialFactor, check_degree, integrate_monomial
from .errors import (
    ArgumentError,
    DesignOrderError,
    DispatchError,
    InvalidInputError,
    SingularSystemError,
    UnsupportedFormError,
)
from .measures import MeasureSpec

J_NAME = "J"
X_NAME = "_X"  # formal matrix unit used to read off matrix entries

_T = {"": "T", "T": "", "'": "*", "*": "'"}
_ADJ = {"": "'", "'": "", "T": "*", "*": "T"}
_CONJ = {"": "*", "*": "", "T": "'", "'": "T"}


def projector_name(rank: int) -> str:
    return f"Pi_{rank}"


def is_projector(name: str) -> bool:
    return name.startswith("Pi_")


def _is_special(name: str) -> bool:
    return name == J_NAME or is_projector(name) or name == X_NAME


def transpose_word(word) -> tuple:
    return tuple((n, _T[f]) for n, f in reversed(word))


def adjoint_word(word) -> tuple:
    return tuple((n, _ADJ[f]) for n, f in reversed(word))


def conj_word(word) -> tuple:
    return tuple((n, _CONJ[f]) for n, f in word)


def apply_flag(word, flag: str) -> tuple:
    if flag == "":
        return tuple(word)
    if flag == "T":
        return transpose_word(word)
    if flag == "'":
        return adjoint_word(word)
    return conj_word(word)


def letter_str(letter) -> str:
    name, flag = letter
    if is_projector(name):
        name = f"Pi{name[3:]}"
    if flag == "'":
        return f"{name}'"
    if flag == "T":
        return f"transpose({name})"
    if flag == "*":
        return f"conj({name})"
    return name


def word_str(word) -> str:
    return "*".join(letter_str(x) for x in word)


# ---------------------------------------------------------------------------
# word simplification and canonical forms


def _simplify(word, cyclic: bool):
    """Apply J^T = -J, JJ = -I, Pi Pi = Pi.  Returns (sign, word)."""
    sign = 1
    out = []
    for name, flag in word:
        if name == J_NAME:
            if flag in ("T", "'"):
                sign = -sign
            flag = ""
        elif is_projector(name):
            flag = ""
        letter = (name, flag)
        if out and out[-1] == letter:
            if name == J_NAME:
                out.pop()
                sign = -sign
                continue
            if is_projector(name):
                continue
        out.append(letter)
    if cyclic:
        while len(out) >= 2 and out[0] == out[-1] and (out[0][0] == J_NAME or is_projector(out[0][0])):
            if out[0][0] == J_NAME:
                out.pop()
                out.pop(0)
                sign = -sign
            else:
                out.pop()
    return sign, tuple(out)


def _rotations(word):
    return [word[i:] + word[:i] for i in range(len(word))]


def canonical_trace(word):
    """tr(word) -> (sign, d_power, word or None).

    sign 0 means the trace vanishes.  ``word`` None means a pure number:
    sign * d^d_power (projector-only words give their rank in ``sign``).
    """
    sign, w = _simplify(word, True)
    if not w:
        return sign, 1, None
    if w == ((J_NAME, ""),):
        return 0, 0, None
    names = {n for n, _ in w}
    if all(is_projector(n) for n in names):
        if len(names) == 1:
            return sign * int(next(iter(names))[3:]), 0, None
        return sign * min(int(n[3:]) for n in names), 0, None
    st, wt = _simplify(transpose_word(w), True)
    best = min(_rotations(w) + _rotations(wt))
    in_w = best in _rotations(w)
    in_t = best in _rotations(wt)
    if in_w and in_t and st != 1:
        return 0, 0, None
    return (sign if in_w else sign * st), 0, best


class Trace:
    __slots__ = ("word",)

    def __init__(self, word):
        self.word = tuple(word)

    def key(self):
        return (0, self.word)

    def __eq__(self, other):
        return isinstance(other, Trace) and self.word == other.word

    def __hash__(self):
        return hash(("tr", self.word))

    def __str__(self):
        return f"tr({word_str(self.word)})"

    __repr__ = __str__


class Entry:
    """(word)[row, col] with 1-based indices."""

    __slots__ = ("word", "row", "col")

    def __init__(self, word, row: int, col: int):
        self.word = tuple(word)
        self.row = row
        self.col = col

    def key(self):
        return (1, self.word, self.row, self.col)

    def __eq__(self, other):
        return isinstance(other, Entry) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        w = word_str(self.word)
        if len(self.word) > 1:
            w = f"({w})"
        return f"{w}[{self.row},{self.col}]"

    __repr__ = __str__


def _sorted_atoms(atoms) -> tuple:
    return tuple(sorted(atoms, key=lambda a: a.key()))


# ---------------------------------------------------------------------------
# TraceExpr


class TraceExpr:
    """Sum of RationalFunction coefficients times products of atoms."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for atoms, c in terms.items():
                c = as_ratfunc(c)
                if not c.is_zero():
                    self.terms[atoms] = c

    @classmethod
    def constant(cls, c) -> "TraceExpr":
        return cls({(): as_ratfunc(c)})

    @classmethod
    def atom(cls, atom, coef=1) -> "TraceExpr":
        return cls({(atom,): as_ratfunc(coef)})

    @classmethod
    def trace(cls, word, coef=1) -> "TraceExpr":
        """tr(word) in canonical form (may reduce to a number)."""
        sign, dpow, w = canonical_trace(word)
        c = as_ratfunc(coef) * sign
        if dpow:
            c = c * RationalFunction(DimPoly.monomial(dpow))
        if w is None:
            return cls.constant(c)
        return cls({(Trace(w),): c})

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(not k for k in self.terms)

    def scalar(self) -> RationalFunction:
        if not self.is_scalar():
            raise ArgumentError("expression still contains traces of constant matrices")
        return self.terms.get((), RationalFunction(0))

    def atoms(self) -> set:
        return {a for k in self.terms for a in k}

    def __add__(self, other):
        other = _as_texpr(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return TraceExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return TraceExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_texpr(other))

    def __rsub__(self, other):
        return _as_texpr(other) - self

    def __mul__(self, other):
        other = _as_texpr(other)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _sorted_atoms(k1 + k2)
                c = c1 * c2
                out[k] = out[k] + c if k in out else c
        return TraceExpr(out)

    __rmul__ = __mul__

    def map_coefficients(self, fn) -> "TraceExpr":
        return TraceExpr({k: fn(c) for k, c in self.terms.items()})

    def evaluate(self, n: int) -> "TraceExpr":
        return self.map_coefficients(lambda c: RationalFunction.constant(ratfunc_eval(c, n)))

    def __eq__(self, other):
        try:
            other = _as_texpr(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms))

    def render(self, symbol: str = "d") -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda ks: (-len(ks), [a.key() for a in ks])):
            parts.append(_render_term(k, self.terms[k], symbol))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"TraceExpr({self.render()})"


def _render_term(atoms, c: RationalFunction, symbol: str) -> str:
    if not atoms:
        return c.pretty(symbol)
    body = "*".join(str(a) for a in atoms)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    num, den = c.num, c.den
    if num.is_constant() and num.lead().is_real():
        v = num.lead().re
        lead = "-" if v < 0 else ""
        v = abs(v)
        head = body if v == 1 else f"{v}*{body}"
        if den.is_constant():
            return lead + head
        dtext = den.render(symbol)
        if den.degree > 1 or len(dtext.split()) > 1:
            dtext = f"({dtext})"
        return f"{lead}{head}/{dtext}"
    return f"({c.pretty(symbol)})*{body}"


def _as_texpr(x) -> TraceExpr:
    if isinstance(x, TraceExpr):
        return x
    return TraceExpr.constant(x)


# ---------------------------------------------------------------------------
# family rewrites


def _rewrite_word(word, spec: MeasureSpec, haar: str):
    """Replace random-matrix letters by products over the Haar variable."""
    fam = spec.base_family
    out = []
    for name, flag in word:
        if name != haar:
            out.append((name, flag))
            continue
        if fam == "Sp":
            if flag == "*":
                out += [(J_NAME, ""), (haar, ""), (J_NAME, "T")]
            elif flag == "'":
                out += [(J_NAME, ""), (haar, "T"), (J_NAME, "T")]
            else:
                out.append((name, flag))
            continue
        if fam == "COE":
            base = ((haar, ""), (haar, "T"))
        elif fam == "CSE":
            base = ((haar, ""), (J_NAME, ""), (haar, "T"), (J_NAME, "T"))
        elif fam in ("Psi", "Stiefel"):
            rank = 1 if fam == "Psi" else spec.extra
            base = ((haar, ""), (projector_name(rank), ""))
        else:
            out.append((name, flag))
            continue
        out += apply_flag(base, flag)
    return tuple(out)


# ---------------------------------------------------------------------------
# graph engine


class _Graph:
    """Index slots of a set of cyclic words.  Node 2t is the row (left) slot of
    letter t, node 2t+1 its column (right) slot."""

    def __init__(self, words, haar: str):
        self.n = 0
        self.base = []
        self.haar = []
        for w in words:
            L = len(w)
            start = self.n
            self.n += 2 * L
            for t, (name, flag) in enumerate(w):
                i_node, o_node = start + 2 * t, start + 2 * t + 1
                self.base.append((o_node, start + 2 * ((t + 1) % L), None))
                if name == haar:
                    self.haar.append((i_node, o_node, flag))
                else:
                    self.base.append((i_node, o_node, (name, flag)))

    def cycles(self, extra):
        edges = self.base + extra
        inc = [[] for _ in range(self.n)]
        for ei, (u, v, _) in enumerate(edges):
            inc[u].append(ei)
            inc[v].append(ei)
        used = [False] * len(edges)
        words = []
        for e0 in range(len(edges)):
            if used[e0]:
                continue
            x = edges[e0][0]
            e = e0
            word = []
            while not used[e]:
                used[e] = True
                u, v, lab = edges[e]
                if x == u:
                    y = v
                    if lab is not None:
                        word.append(lab)
                else:
                    y = u
                    if lab is not None:
                        word.append((lab[0], _T[lab[1]]))
                x = y
                a, b = inc[x]
                e = b if a == e else a
            words.append(tuple(word))
        return words


def _slots_unitary(node):
    """(row, col, conjugated) of an entry of U / U' / U^T / conj(U)."""
    i, o, flag = node
    if flag == "":
        return i, o, False
    if flag == "T":
        return o, i, False
    if flag == "'":
        return o, i, True
    return i, o, True


def _slots_real(node):
    i, o, flag = node
    return (i, o) if flag in ("", "*") else (o, i)


def _wirings(graph: _Graph, fam: str):
    """Yield (extra_edges, integer weight, weight key) for each contraction."""
    H = graph.haar
    if fam == "U":
        ents = [_slots_unitary(h) for h in H]
        u = [e for e in ents if not e[2]]
        b = [e for e in ents if e[2]]
        if len(u) != len(b):
            return
        k = len(u)
        check_degree(2 * k)
        perms = comb.all_permutations(k)
        for s in perms:
            rows = [(u[m][0], b[s[m]][0], None) for m in range(k)]
            for t in perms:
                cols = [(u[m][1], b[t[m]][1], None) for m in range(k)]
                yield rows + cols, 1, comb.cycle_type(comb.compose(s, comb.inverse(t)))
        return
    n = len(H)
    if n % 2:
        return
    check_degree(n)
    if fam in ("O", "Sp"):
        ents = [_slots_real(h) for h in H]
        P = comb.pair_partitions(n)
        partners = [comb._partner(p, n) for p in P]
        lab = (J_NAME, "") if fam == "Sp" else None
        for p, pp in zip(P, partners):
            rows = [(ents[a][0], ents[b][0], lab) for a, b in p]
            for q, qp in zip(P, partners):
                cols = [(ents[a][1], ents[b][1], lab) for a, b in q]
                w = comb.loop_orientation_sign(pp, qp) if fam == "Sp" else 1
                yield rows + cols, w, comb._loop_type_fast(pp, qp)
        return
    if fam in ("GUE", "GOE"):
        ents = [(h[0], h[1]) if h[2] in ("", "'") else (h[1], h[0]) for h in H]
        for p in comb.pair_partitions(n):
            if fam == "GUE":
                yield [e for a, b in p for e in ((ents[a][0], ents[b][1], None), (ents[a][1], ents[b][0], None))], 1, None
                continue
            options = []
            for a, b in p:
                ra, ca = ents[a]
                rb, cb = ents[b]
                options.append(([(ra, cb, None), (ca, rb, None)], [(ra, rb, None), (ca, cb, None)]))
            for choice in itertools.product(*options):
                yield [e for pair in choice for e in pair], 1, None
        return
    if fam in ("GinUE", "GinOE"):
        ents = [_slots_unitary(h) for h in H]
        for p in comb.pair_partitions(n):
            if fam == "GinUE" and any(ents[a][2] == ents[b][2] for a, b in p):
                continue
            yield [e for a, b in p for e in ((ents[a][0], ents[b][0], None), (ents[a][1], ents[b][1], None))], 1, None
        return
    raise UnsupportedFormError(f"no trace engine for family {fam}")


def _engine_family(spec: MeasureSpec) -> str:
    fam = spec.base_family
    if fam in ("U", "SU", "Design", "COE", "CSE", "Psi", "Stiefel"):
        return "U"
    if fam in ("O", "Sp", "GUE", "GOE", "GinUE", "GinOE"):
        return fam
    if fam in ("GSE", "GinSE"):
        return fam
    raise UnsupportedFormError(f"trace expressions are not supported for {spec.family}")


def _weight_value(fam: str, key, dim) -> RationalFunction:
    if key is None:
        return RationalFunction(1)
    if fam == "U":
        return wg.unitary_value(key, dim)
    if fam == "O":
        return wg.orthogonal_value(key, dim)
    return wg.symplectic_value(key, dim)


def _graph_integrate(words, fam: str, haar: str, dim) -> TraceExpr:
    graph = _Graph(words, haar)
    acc: Counter = Counter()
    for extra, w, key in _wirings(graph, fam):
        sign = w
        dpow = 0
        atoms = []
        for cyc in graph.cycles(extra):
            s, dp, cw = canonical_trace(cyc)
            if not s:
                sign = 0
                break
            sign *= s
            dpow += dp
            if cw is not None:
                atoms.append(Trace(cw))
        if sign:
            acc[(_sorted_atoms(atoms), dpow, key)] += sign
    dvar = DimPoly.var() if dim is None else DimPoly.constant(dim)
    terms: dict = defaultdict(lambda: RationalFunction(0))
    wcache: dict = {}
    for (atoms, dpow, key), c in acc.items():
        if not c:
            continue
        if key not in wcache:
            wcache[key] = _weight_value(fam, key, dim)
        terms[atoms] = terms[atoms] + wcache[key] * RationalFunction(dvar ** dpow) * c
    return TraceExpr(dict(terms))


# ---------------------------------------------------------------------------
# library fast paths and pure trace moments


def library_lookup(t: TraceExpr, haar: str = "U"):
    """Closed forms for tr(U A U' B) and tr(U A U'); None when no pattern
    applies."""
    if len(t.terms) != 1:
        return None
    (atoms, coef), = t.terms.items()
    if len(atoms) != 1 or not isinstance(atoms[0], Trace):
        return None
    word = atoms[0].word
    for rot in _rotations(word) + _rotations(transpose_word(word)):
        if len(rot) == 3 and rot[0] == (haar, "") and rot[2] == (haar, "'") and rot[1][0] != haar:
            return TraceExpr.trace((rot[1],), coef)
        if (len(rot) == 4 and rot[0] == (haar, "") and rot[2] == (haar, "'")
                and rot[1][0] != haar and rot[3][0] != haar):
            inv_d = RationalFunction(DimPoly.constant(1), DimPoly.var())
            return TraceExpr.trace((rot[1],)) * TraceExpr.trace((rot[3],)) * (inv_d * coef)
    return None


def pure_trace_moment(k: int, n) -> int:
    """E|tr U|^{2k} over U(n): sum over lambda |- k with <= n rows of (f^lambda)^2."""
    if n is None or not isinstance(n, int):
        raise ArgumentError(
            "pure trace moments are step functions of the dimension; give a concrete integer d"
        )
    if k < 0 or n < 1:
        raise InvalidInputError("need k >= 0 and n >= 1")
    return sum(comb.irrep_dimension(lam) ** 2 for lam in comb.partitions_of(k) if len(lam) <= n)


def _pure_words(words, haar: str) -> bool:
    """Every word is made only of U letters or only of U' letters."""
    for w in words:
        flags = {(n, f) for n, f in w}
        if flags != {(haar, "")} and flags != {(haar, "'")}:
            return False
    return True


# ---------------------------------------------------------------------------
# main entry points


_INDEX_FAMILIES = ("Perm", "CPerm", "DiagU")


def _index_expand(words, spec: MeasureSpec, haar: str) -> TraceExpr:
    """Sum over explicit index assignments (concrete d only), then integrate
    each entry monomial of the random matrix."""
    d = spec.dim
    if d is None:
        raise UnsupportedFormError(
            f"traces over {spec.family} are expanded in indices and need a concrete dimension"
        )
    acc = {((), ()): ExactScalar(1)}
    for w in words:
        L = len(w)
        nxt: dict = {}
        for idx in itertools.product(range(1, d + 1), repeat=L):
            coef = ExactScalar(1)
            factors, atoms = [], []
            for t, (name, flag) in enumerate(w):
                i, j = idx[t], idx[(t + 1) % L]
                if name == haar:
                    r, c = (j, i) if flag in ("'", "T") else (i, j)
                    factors.append(MonomialFactor(name, r, c, flag in ("'", "*")))
                elif name == J_NAME or is_projector(name):
                    coef = coef * _entry_value(((name, flag),), i, j, d)
                    if coef.is_zero():
                        break
                else:
                    atoms.append(Entry(((name, flag),), i, j))
            if coef.is_zero():
                continue
            for (f0, a0), c0 in acc.items():
                key = (tuple(sorted(f0 + tuple(factors))), _sorted_atoms(a0 + tuple(atoms)))
                nxt[key] = nxt.get(key, ExactScalar(0)) + c0 * coef
        acc = {k: v for k, v in nxt.items() if not v.is_zero()}
    out = TraceExpr()
    for (factors, atoms), c in acc.items():
        val = integrate_monomial(Monomial(c, factors), spec)
        if val.is_zero():
            continue
        out = out + TraceExpr({atoms: val})
    return out


def _integrate_words(words, spec: MeasureSpec, haar: str) -> TraceExpr:
    if spec.base_family in _INDEX_FAMILIES:
        return _index_expand(words, spec, haar)
    fam = _engine_family(spec)
    dim = spec.dim
    words = [_rewrite_word(w, spec, haar) for w in words]
    if fam in ("GSE", "GinSE"):
        return _symplectic_gaussian(words, spec, haar)
    if fam == "U":
        n_u = sum(1 for w in words for n, f in w if n == haar and f in ("", "T"))
        n_b = sum(1 for w in words for n, f in w if n == haar and f in ("'", "*"))
        if n_u != n_b:
            return TraceExpr()
        if spec.base_family == "Design" and n_u > spec.extra:
            raise DesignOrderError(n_u, spec.extra)
        check_degree(2 * n_u)
        if spec.base_family in ("U", "SU", "Design") and _pure_words(words, haar):
            if dim is None and n_u >= 2:
                raise ArgumentError(
                    "constant-free trace moments of U are not rational in d below the stable "
                    "range; give a concrete integer dimension"
                )
            if dim is not None and all(len(w) == 1 for w in words):
                return TraceExpr.constant(pure_trace_moment(n_u, dim))
        if spec.base_family in ("U", "SU", "Design") and len(words) == 1:
            hit = library_lookup(TraceExpr({(Trace(words[0]),): RationalFunction(1)}), haar)
            if hit is not None:
                return hit if dim is None else hit.evaluate(dim)
    if fam in ("O", "Sp") and dim is not None:
        try:
            return _graph_integrate(words, fam, haar, dim)
        except SingularSystemError:
            return _graph_integrate(words, fam, haar, None).evaluate(dim)
    return _graph_integrate(words, fam, haar, dim)


def _symplectic_gaussian(words, spec: MeasureSpec, haar: str) -> TraceExpr:
    """<tr W>_{GSE}(d) = (-1)^{L/2+1} <tr W>_{GOE}(-d) for a single word of
    L random letters (same rule for GinSE against GinOE)."""
    if len(words) != 1 or any(n != haar for n, _ in words[0]):
        raise UnsupportedFormError(
            f"{spec.family} supports single traces of words in {haar} only (duality rule)"
        )
    L = len(words[0])
    if L % 2:
        return TraceExpr()
    base = "GOE" if spec.base_family == "GSE" else "GinOE"
    val = _graph_integrate(words, base, haar, None).scalar().negate_var()
    if (L // 2 + 1) % 2:
        val = -val
    if spec.dim is not None:
        val = RationalFunction.constant(ratfunc_eval(val, spec.dim))
    return TraceExpr.constant(val)


def _check_names(t: TraceExpr, spec: MeasureSpec, haar: str) -> None:
    for a in t.atoms():
        for n, _ in a.word:
            if n == spec.dim_symbol:
                raise DispatchError(f"{n!r} is the dimension symbol and cannot name a matrix")
            if n == J_NAME and spec.base_family in ("Sp", "CSE"):
                raise DispatchError("J is reserved for the symplectic form under this measure")


def trace_integrate(t: TraceExpr, spec: MeasureSpec, haar: str | None = None) -> TraceExpr:
    """Average every term of ``t`` over ``spec``; traces containing the
    random symbol are integrated, all other atoms are constants."""
    haar = haar or spec.random_symbol
    _check_names(t, spec, haar)
    out = TraceExpr()
    for atoms, coef in t.terms.items():
        hw = [a.word for a in atoms if isinstance(a, Trace) and any(n == haar for n, _ in a.word)]
        rest = [a for a in atoms if not (isinstance(a, Trace) and any(n == haar for n, _ in a.word))]
        if any(isinstance(a, Entry) and any(n == haar for n, _ in a.word) for a in rest):
            raise UnsupportedFormError("entries of the random matrix cannot appear inside constant atoms")
        if not hw:
            piece = TraceExpr.constant(coef)
        else:
            piece = _integrate_words(hw, spec, haar) * coef
        if rest:
            piece = piece * TraceExpr({_sorted_atoms(rest): RationalFunction(1)})
        out = out + piece
    if spec.dim is not None:
        out = out.evaluate(spec.dim)
    return out


def purity(n_a: int, n_b: int | None = None):
    """E tr(rho_A^2) for a Haar-random pure state on C^{n_a} ⊗ C^{n_b}.

    Built entrywise from psi[i] conj(psi[j]) with :func:`partial_trace` and
    integrated over Psi(n_a n_b).
    """
    from .expression import Index, Conj, integrate, product_of, sum_of

    n_b = n_a if n_b is None else n_b
    dim = n_a * n_b
    rho = [[Index("psi", i + 1, 1) * Conj(Index("psi", j + 1, 1)) for j in range(dim)] for i in range(dim)]
    rho_a = partial_trace(rho, (n_a, n_b), 2)
    expr = sum_of(product_of([rho_a[i][j], rho_a[j][i]]) for i in range(n_a) for j in range(n_a))
    return integrate(expr, MeasureSpec("Psi", dim))


# ---------------------------------------------------------------------------
# matrix-valued integration and partial trace


def _shape_of(word, spec: MeasureSpec, haar: str):
    def dims(letter):
        name, flag = letter
        if name == haar and spec.base_family in ("Psi", "Stiefel"):
            r, c = spec.dim, (1 if spec.base_family == "Psi" else spec.extra)
        else:
            r = c = spec.dim
        return (c, r) if flag in ("'", "T") else (r, c)

    if not word:
        return spec.dim, spec.dim
    shapes = [dims(x) for x in word]
    for (_, c), (r, _) in zip(shapes, shapes[1:]):
        if c != r:
            raise InvalidInputError(f"inconsistent matrix product {word_str(word)}")
    return shapes[0][0], shapes[-1][1]


def _special_matrix(name: str, d: int):
    if name == J_NAME:
        n = d // 2
        M = [[0] * d for _ in range(d)]
        for i in range(n):
            M[i][n + i] = 1
            M[n + i][i] = -1
        return M
    r = int(name[3:])
    return [[1 if (i == j and i < r) else 0 for j in range(d)] for i in range(d)]


def _entry_value(word, i: int, j: int, d: int):
    """Exact (word)[i, j] when every letter is J or a projector; else None."""
    if any(not (n == J_NAME or is_projector(n)) for n, _ in word):
        return None
    vec = [1 if c == j - 1 else 0 for c in range(d)]
    for name, flag in reversed(word):
        M = _special_matrix(name, d)
        if flag in ("T", "'"):
            M = [list(r) for r in zip(*M)]
        vec = [sum(M[r][c] * vec[c] for c in range(d) if M[r][c]) for r in range(d)]
    return vec[i - 1]


def _read_entry(t: TraceExpr, i: int, j: int, d: int) -> TraceExpr:
    """Replace the atom tr(X W) in each term by W[i, j]."""
    out = TraceExpr()
    for atoms, coef in t.terms.items():
        xs = [a for a in atoms if isinstance(a, Trace) and any(n == X_NAME for n, _ in a.word)]
        if len(xs) != 1:
            raise InvalidInputError("matrix expression is not linear")
        rest = [a for a in atoms if a is not xs[0]]
        word = xs[0].word
        sign = 1
        if (X_NAME, "T") in word:
            sign, word = _simplify(transpose_word(word), True)
        pos = word.index((X_NAME, ""))
        W = word[pos + 1:] + word[:pos]
        s2, W = _simplify(W, False)
        sign *= s2
        if not W:
            piece = TraceExpr.constant(coef * (sign if i == j else 0))
        else:
            v = _entry_value(W, i, j, d)
            if v is not None:
                piece = TraceExpr.constant(coef * (sign * v))
            else:
                piece = TraceExpr.atom(Entry(W, i, j), coef * sign)
        if rest:
            piece = piece * TraceExpr({_sorted_atoms(rest): RationalFunction(1)})
        out = out + piece
    return out


def matrix_integrate(expr, spec: MeasureSpec):
    """Entrywise average of a matrix-valued expression (sum of words).

    Returns a list of rows; entries are ExactScalar when no constant matrix
    survives, TraceExpr otherwise.
    """
    from .expression import expand_matrix, parse, normalize

    if spec.dim is None:
        raise ArgumentError(
            "matrix-valued integration needs a concrete dimension; scalarize the expression "
            "(e.g. take a trace) for symbolic d"
        )
    if isinstance(expr, str):
        expr = parse(expr)
    haar = spec.random_symbol
    words = expand_matrix(normalize(expr))
    shape = None
    total = TraceExpr()
    for word, coef in words.items():
        s = _shape_of(word, spec, haar)
        if shape is not None and s != shape:
            raise InvalidInputError("summands have different shapes")
        shape = s
        total = total + TraceExpr({(Trace(word + ((X_NAME, ""),)),): RationalFunction.constant(coef)})
    if shape is None:
        return []
    avg = trace_integrate(total, spec, haar)
    rows, cols = shape
    out = []
    for i in range(1, rows + 1):
        row = []
        for j in range(1, cols + 1):
            e = _read_entry(avg, i, j, spec.dim)
            row.append(e.scalar().constant_value() if e.is_scalar() else e)
        out.append(row)
    return out


def partial_trace(M, dims, subsystem: int):
    """Trace out subsystem 1 or 2 of a (dA dB) x (dA dB) matrix.

    Row-major tensor convention: index (a, b) maps to a*dB + b.  Entries may
    be any objects supporting ``+``.
    """
    try:
        dA, dB = (int(x) for x in dims)
    except (TypeError, ValueError):
        raise InvalidInputError("dims must be a pair of positive integers") from None
    if dA < 1 or dB < 1:
        raise InvalidInputError("dims must be positive")
    if subsystem not in (1, 2):
        raise InvalidInputError(f"subsystem must be 1 or 2, got {subsystem}")
    n = dA * dB
    if len(M) != n or any(len(r) != n for r in M):
        raise InvalidInputError(f"matrix must be {n}x{n} for dims {dA}x{dB}")

    def total(items):
        items = list(items)
        acc = items[0]
        for x in items[1:]:
            acc = acc + x
        return acc

    if subsystem == 1:
        return [[total(M[a * dB + i][a * dB + j] for a in range(dA)) for j in range(dB)] for i in range(dB)]
    return [[total(M[i * dB + b][j * dB + b] for b in range(dB)) for j in range(dA)] for i in range(dA)]


def trace_of(M):
    acc = M[0][0]
    for i in range(1, len(M)):
        acc = acc + M[i][i]
    return acc
