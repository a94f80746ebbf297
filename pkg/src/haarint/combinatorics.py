"""Partitions, symmetric-group characters, permutations and pair partitions.

Conventions: partitions are weakly decreasing tuples; permutations are
0-based one-line tuples (``perm[i]`` is the image of ``i``); pair partitions
are sorted tuples of sorted pairs over ``range(2k)``.
"""

from __future__ import annotations

import threading
from collections import Counter
from functools import lru_cache
from itertools import permutations
from math import factorial, prod

from .algebra import DimPoly, ExactScalar
from .errors import InvalidInputError

Partition = tuple
Permutation = tuple
PairPartition = tuple

_memo_lock = threading.Lock()


def _check_partition(lam) -> Partition:
    lam = tuple(int(x) for x in lam)
    if any(x < 1 for x in lam) or any(a < b for a, b in zip(lam, lam[1:])):
        raise InvalidInputError(f"{lam} is not a partition")
    return lam


@lru_cache(maxsize=None)
def partitions_of(k: int) -> tuple[Partition, ...]:
    """All partitions of k in reverse lexicographic order."""
    if k < 0:
        raise InvalidInputError("cannot partition a negative integer")

    def gen(n, largest):
        if n == 0:
            yield ()
            return
        for first in range(min(n, largest), 0, -1):
            for rest in gen(n - first, first):
                yield (first,) + rest

    return tuple(gen(k, k))


def conjugate(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > j) for j in range(lam[0]))


def hook_lengths(lam: Partition) -> list[int]:
    conj = conjugate(lam)
    return [lam[i] - j + conj[j] - i - 1 for i in range(len(lam)) for j in range(lam[i])]


def contents(lam: Partition) -> list[int]:
    return [j - i for i in range(len(lam)) for j in range(lam[i])]


@lru_cache(maxsize=None)
def irrep_dimension(lam: Partition) -> int:
    """f^lambda by the hook length formula."""
    lam = _check_partition(lam)
    return factorial(sum(lam)) // prod(hook_lengths(lam))


@lru_cache(maxsize=None)
def schur_at_ones(lam: Partition) -> DimPoly:
    """s_lambda(1^d) = prod over cells of (d + content) / hook."""
    lam = _check_partition(lam)
    p = DimPoly.constant(1)
    for c in contents(lam):
        p = p * DimPoly((c, 1))
    return p.scale(ExactScalar(1) / prod(hook_lengths(lam)))


def _to_beta(lam: Partition) -> tuple[int, ...]:
    n = len(lam)
    return tuple(lam[i] + n - 1 - i for i in range(n))


def _from_beta(beta) -> Partition:
    b = sorted(beta, reverse=True)
    n = len(b)
    return tuple(x for x in (b[i] - (n - 1 - i) for i in range(n)) if x > 0)


@lru_cache(maxsize=None)
def _mn(lam: Partition, mu: Partition) -> int:
    if not mu:
        return 1 if not lam else 0
    r, rest = mu[0], mu[1:]
    beta = _to_beta(lam)
    bset = set(beta)
    total = 0
    for b in beta:
        t = b - r
        if t < 0 or t in bset:
            continue
        height = sum(1 for x in beta if t < x < b)
        new = _from_beta([x for x in beta if x != b] + [t])
        val = _mn(new, rest)
        if val:
            total += -val if height & 1 else val
    return total


def mn_character(lam: Partition, mu: Partition) -> int:
    """chi_lambda evaluated on the class of cycle type mu (Murnaghan-Nakayama).

    Border strips are removed on the beta-set (abacus) representation, with
    mu consumed largest part first.
    """
    lam = _check_partition(lam)
    mu = tuple(sorted((int(x) for x in mu), reverse=True))
    if sum(lam) != sum(mu):
        raise InvalidInputError(f"size mismatch: |{lam}| != |{mu}|")
    return _mn(lam, mu)


def class_size(mu: Partition) -> int:
    """Number of permutations of cycle type mu: k! / prod(m_j! j^m_j)."""
    mult = Counter(mu)
    return factorial(sum(mu)) // prod(factorial(m) * j**m for j, m in mult.items())


def cycle_type(perm: Permutation) -> Partition:
    n = len(perm)
    seen = [False] * n
    lengths = []
    for s in range(n):
        if seen[s]:
            continue
        length = 0
        x = s
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        lengths.append(length)
    lengths.sort(reverse=True)
    return tuple(lengths)


def cycle_count(perm: Permutation) -> int:
    return len(cycle_type(perm))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """(a∘b)(i) = a[b[i]]."""
    return tuple(a[i] for i in b)


def inverse(a: Permutation) -> Permutation:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def is_permutation(a) -> bool:
    return sorted(a) == list(range(len(a)))


@lru_cache(maxsize=16)
def all_permutations(k: int) -> tuple[Permutation, ...]:
    return tuple(permutations(range(k)))


# ---------------------------------------------------------------------------
# pair partitions


@lru_cache(maxsize=None)
def pair_partitions(two_k: int) -> tuple[PairPartition, ...]:
    """All perfect matchings of range(two_k), canonical and in a fixed order."""
    if two_k < 0 or two_k % 2:
        raise InvalidInputError(f"pair partitions need an even ground set, got {two_k}")

    def gen(items):
        if not items:
            yield ()
            return
        a, rest = items[0], items[1:]
        for i, b in enumerate(rest):
            for tail in gen(rest[:i] + rest[i + 1:]):
                yield ((a, b),) + tail

    return tuple(gen(tuple(range(two_k))))


def canonical_pairing(pairs) -> PairPartition:
    return tuple(sorted(tuple(sorted(p)) for p in pairs))


def _partner(p: PairPartition, n: int) -> list[int]:
    out = [-1] * n
    for a, b in p:
        out[a] = b
        out[b] = a
    return out


def _check_ground(p, q) -> int:
    sp = sorted(x for pair in p for x in pair)
    sq = sorted(x for pair in q for x in pair)
    if sp != sq:
        raise InvalidInputError("pair partitions are over different ground sets")
    return sp


def loop_type(p: PairPartition, q: PairPartition) -> Partition:
    """Half-lengths of the cycles of the multigraph p ∪ q, as a partition of k."""
    ground = _check_ground(p, q)
    if ground != list(range(len(ground))):
        remap = {x: i for i, x in enumerate(ground)}
        p = [(remap[a], remap[b]) for a, b in p]
        q = [(remap[a], remap[b]) for a, b in q]
    return _loop_type_fast(_partner(p, len(ground)), _partner(q, len(ground)))


def _loop_type_fast(pp: list[int], qp: list[int]) -> Partition:
    n = len(pp)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        length = 0
        x = s
        while not seen[x]:
            y = pp[x]
            seen[x] = seen[y] = True
            x = qp[y]
            length += 1
        out.append(length)
    out.sort(reverse=True)
    return tuple(out)


def loops(p: PairPartition, q: PairPartition) -> int:
    """Number of cycles of the multigraph with edge set p ∪ q."""
    return len(loop_type(p, q))


def loop_orientation_sign(pp: list[int], qp: list[int]) -> int:
    """Sign picked up by the J-contraction Gram entry of (p, q).

    Each pair contributes J[i_a, i_b] with a < b.  Walking a loop of p ∪ q
    with 2m edges gives tr(J^{2m}) = (-1)^m d, times -1 for every edge whose
    a < b orientation runs against the walk.
    """
    n = len(pp)
    seen = [False] * n
    sign = 1
    for start in range(n):
        if seen[start]:
            continue
        x = start
        flips = 0
        while True:
            y = pp[x]
            seen[x] = seen[y] = True
            z = qp[y]
            flips += 1 + (x > y) + (y > z)
            x = z
            if x == start:
                break
        if flips % 2:
            sign = -sign
    return sign
