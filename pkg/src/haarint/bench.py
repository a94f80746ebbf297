"""Cold-cache timing harness mirroring the native benchmark table."""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import InvalidInputError
from .expression import integrate
from .tracelogic import purity
from .weingarten import clear_caches


@dataclass(frozen=True)
class BenchCase:
    group: str
    label: str
    expr: str | None
    measure: str
    dimension: str

    def run(self):
        if self.expr is None:  # bipartite purity application, total dimension 6
            return purity(2, 3)
        return integrate(self.expr, self.measure)


def _entry(fam, sym, p, dim, group, label=None, abs_=True):
    e = f"abs({sym}[1,1])^{p}" if abs_ else f"{sym}[1,1]^{p}"
    return BenchCase(group, label or f"|{sym}11|^{p}", e, f"{fam}({dim})", "symbolic" if dim == "d" else dim)


SUITES: dict[str, list[BenchCase]] = {
    "entry-moments": [
        _entry("U", "U", 6, "d", "Unitary"),
        _entry("U", "U", 8, "d", "Unitary"),
        _entry("U", "U", 10, "d", "Unitary"),
        _entry("U", "U", 10, "10", "Unitary"),
        _entry("U", "U", 10, "50", "Unitary"),
    ],
    "orthogonal": [
        _entry("O", "O", 2, "d", "Orthogonal", "O11^2", False),
        _entry("O", "O", 4, "d", "Orthogonal", "O11^4", False),
        _entry("O", "O", 6, "10", "Orthogonal", "O11^6", False),
        _entry("O", "O", 8, "20", "Orthogonal", "O11^8", False),
        _entry("O", "O", 10, "20", "Orthogonal", "O11^10", False),
        _entry("O", "O", 10, "50", "Orthogonal", "O11^10", False),
    ],
    "symplectic": [
        _entry("Sp", "Sp", 8, "10", "Symplectic"),
        _entry("Sp", "Sp", 10, "10", "Symplectic"),
        _entry("Sp", "Sp", 10, "20", "Symplectic"),
    ],
    "ginibre": [
        BenchCase("GinUE", "tr(GG')", "tr(G*G')", "GinUE(d)", "symbolic"),
        BenchCase("GinUE", "tr(GG')", "tr(G*G')", "GinUE(4)", "4"),
    ],
    "circular": [
        _entry("COE", "S", 2, "d", "Circ. Orthogonal"),
        _entry("COE", "S", 4, "d", "Circ. Orthogonal"),
        _entry("COE", "S", 6, "d", "Circ. Orthogonal"),
        _entry("CSE", "S", 2, "d", "Circ. Symplectic"),
        _entry("CSE", "S", 4, "d", "Circ. Symplectic"),
        _entry("CSE", "S", 6, "d", "Circ. Symplectic"),
    ],
    "permutation": [
        BenchCase("Permutation", "prod P_ii, i=1..10", "*".join(f"P[{i},{i}]" for i in range(1, 11)), "Perm(100)", "100"),
        BenchCase("Permutation", "tr(PA)^2", "tr(P*A)^2", "Perm(4)", "4"),
        BenchCase("Centered Perm.", "Y11^4", "Y[1,1]^4", "CPerm(10)", "10"),
    ],
    "application": [BenchCase("Application", "Bipartite purity", None, "Psi(6)", "6")],
}
SUITES["all"] = [c for name in list(SUITES) for c in SUITES[name]]


@dataclass
class BenchRow:
    group: str
    integrand: str
    dimension: str
    median_ms: float
    samples: int

    def as_dict(self):
        return {
            "group": self.group,
            "integrand": self.integrand,
            "dimension": self.dimension,
            "median_ms": round(self.median_ms, 4),
            "samples": self.samples,
        }


def time_case(case: BenchCase, samples: int) -> BenchRow:
    times = []
    for _ in range(samples):
        clear_caches()
        t0 = time.perf_counter()
        case.run()
        times.append((time.perf_counter() - t0) * 1e3)
    return BenchRow(case.group, case.label, case.dimension, statistics.median(times), samples)


def run_suite(name: str, samples: int = 30, threads: int = 1) -> list[BenchRow]:
    """Median cold-cache wall time per row.  Rows may run in parallel when
    ``threads > 1``; caches are shared, so parallel timings are only
    indicative."""
    if name not in SUITES:
        raise InvalidInputError(f"unknown benchmark suite {name!r}; choose from {sorted(SUITES)}")
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    cases = SUITES[name]
    if threads <= 1:
        return [time_case(c, samples) for c in cases]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: time_case(c, samples), cases))
