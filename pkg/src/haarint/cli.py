"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 dispatch/measure error, 4 engine
error (poles, guards), 5 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import weingarten as wg
from .algebra import ExactScalar, LaurentSeries, RationalFunction, ratfunc_eval
from .asymptotics import TraceSeries, asymptotic, expand_result
from .bench import SUITES, run_suite
from .entrywise import check_degree
from .errors import HaarIntError, InvalidInputError, ParseError
from .expression import evaluate, integrate_detailed
from .hciz import HcizValue, hciz_eigen, hciz_matrices
from .measures import parse_measure
from .tracelogic import TraceExpr


def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def to_json_value(r):
    """JSON-ready encoding of any result type."""
    if isinstance(r, RationalFunction):
        return {"type": "ratfunc", **r.to_json(), "text": r.render()}
    if isinstance(r, ExactScalar):
        return {"type": "scalar", "re": _frac(r.re), "im": _frac(r.im), "text": str(r)}
    if isinstance(r, TraceExpr):
        terms = [
            {"atoms": [str(a) for a in atoms], "coefficient": c.to_json()}
            for atoms, c in sorted(r.terms.items(), key=lambda kv: [a.key() for a in kv[0]])
        ]
        return {"type": "trace", "terms": terms, "text": r.render()}
    if isinstance(r, LaurentSeries):
        return {
            "type": "series",
            "symbol": r.symbol,
            "order": r.order,
            "terms": {str(m): {"re": _frac(c.re), "im": _frac(c.im)} for m, c in r.terms.items()},
            "text": r.render(),
        }
    if isinstance(r, TraceSeries):
        return {
            "type": "trace-series",
            "symbol": r.symbol,
            "order": r.order,
            "terms": {str(m): to_json_value(t) for m, t in r.terms.items()},
            "text": r.render(),
        }
    if isinstance(r, HcizValue):
        out = {"type": "hciz", "text": str(r.value), "symbolic": r.symbolic, "perturbed": r.perturbed}
        if not r.symbolic:
            z = complex(r.value)
            out["value"] = [z.real, z.imag]
        return out
    if isinstance(r, list):
        return [to_json_value(x) for x in r]
    raise TypeError(f"cannot encode {type(r).__name__}")


def to_text(r) -> str:
    if isinstance(r, RationalFunction):
        return r.render()
    if isinstance(r, list):
        return "\n".join("  ".join(to_text(x) for x in row) if isinstance(row, list) else to_text(row) for row in r)
    return str(r)


def _emit(args, record: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_integrate(args) -> int:
    if args.cold:
        wg.clear_caches()
    spec = parse_measure(args.measure, symbol=args.symbol)
    hits0 = wg.CACHE.hits
    t0 = time.perf_counter()
    rep = integrate_detailed(args.expr, spec)
    result = rep.result
    symbol = spec.dim_symbol
    if args.dim_override is not None:
        if spec.dim is not None:
            raise InvalidInputError("--dim-override needs a symbolic measure dimension")
        result = evaluate(result, args.dim_override)
    if args.asymptotic is not None:
        if args.dim_override is not None:
            raise InvalidInputError("--asymptotic and --dim-override are exclusive")
        if spec.dim is not None:
            result = asymptotic(args.expr, spec, args.asymptotic)
        else:
            result = expand_result(result, args.asymptotic, symbol)
        symbol = result.symbol
    elapsed = (time.perf_counter() - t0) * 1e3
    record = {
        "result": to_json_value(result),
        "measure": str(spec),
        "dimension": "symbolic" if spec.dim is None else spec.dim,
        "engine": rep.engine,
        "degree": rep.degree,
        "cache_hits": wg.CACHE.hits - hits0,
        "elapsed_ms": round(elapsed, 4),
    }
    if args.asymptotic is not None:
        record["expansion_symbol"] = symbol
    _emit(args, record, to_text(result))
    return 0


def cmd_asymptotic(args) -> int:
    t0 = time.perf_counter()
    target = args.measure or args.symbol
    series = asymptotic(args.expr, target, args.order)
    record = {
        "result": to_json_value(series),
        "measure": args.measure,
        "dimension": "symbolic",
        "engine": "laurent",
        "expansion_symbol": series.symbol,
        "elapsed_ms": round((time.perf_counter() - t0) * 1e3, 4),
    }
    _emit(args, record, series.render())
    return 0


def cmd_wg(args) -> int:
    if args.cold:
        wg.clear_caches()
    check_degree(2 * args.degree)
    t0 = time.perf_counter()
    tab = wg.table(args.family, args.degree, args.dim)
    rows = sorted(tab.items(), key=lambda kv: kv[0], reverse=True)
    if args.dim is not None:
        rows = [(k, v if isinstance(v, ExactScalar) else ratfunc_eval(v, args.dim)) for k, v in rows]
    record = {
        "result": {str(list(k)): to_json_value(v) for k, v in rows},
        "measure": f"{args.family}({args.dim if args.dim is not None else 'd'})",
        "dimension": "symbolic" if args.dim is None else args.dim,
        "engine": "weingarten",
        "elapsed_ms": round((time.perf_counter() - t0) * 1e3, 4),
    }
    width = max((len(str(list(k))) for k, _ in rows), default=0)
    text = "\n".join(f"{str(list(k)):<{width}}  {to_text(v)}" for k, v in rows)
    _emit(args, record, text)
    return 0


def _spectrum(text: str):
    p = Path(text)
    if p.suffix == ".json" and p.exists():
        return json.loads(p.read_text()), True
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            raise InvalidInputError(f"empty entry in eigenvalue list {text!r}")
        try:
            vals.append(int(tok))
        except ValueError:
            try:
                vals.append(float(tok))
            except ValueError:
                vals.append(tok)
    return vals, False


def cmd_hciz(args) -> int:
    t0 = time.perf_counter()
    a, a_mat = _spectrum(args.a)
    b, b_mat = _spectrum(args.b)
    if a_mat != b_mat:
        raise InvalidInputError("give two eigenvalue lists or two matrix files")
    val = hciz_matrices(a, b) if a_mat else hciz_eigen(a, b)
    record = {
        "result": to_json_value(val),
        "measure": f"U({val.dim})",
        "dimension": val.dim,
        "engine": "hciz-" + ("exact" if val.symbolic else "numeric"),
        "elapsed_ms": round((time.perf_counter() - t0) * 1e3, 4),
    }
    _emit(args, record, str(val.value))
    return 0


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    rows = run_suite(args.suite, args.samples, args.threads)
    if args.format == "json":
        record = {
            "result": {"suite": args.suite, "rows": [r.as_dict() for r in rows]},
            "measure": None,
            "dimension": None,
            "engine": "bench",
            "elapsed_ms": round((time.perf_counter() - t0) * 1e3, 4),
        }
        print(json.dumps(record, sort_keys=True))
        return 0
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["group", "integrand", "dimension", "median_ms", "samples"])
    w.writeheader()
    for r in rows:
        w.writerow(r.as_dict())
    print(buf.getvalue(), end="")
    return 0


def cmd_cache_clear(args) -> int:
    t0 = time.perf_counter()
    n = len(wg.CACHE)
    wg.clear_caches()
    record = {
        "result": {"cleared": n},
        "measure": None,
        "dimension": None,
        "engine": "cache",
        "elapsed_ms": round((time.perf_counter() - t0) * 1e3, 4),
    }
    _emit(args, record, f"cleared {n} cached entries")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="haarint", description="Exact Haar and random-matrix integrals.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("integrate", parents=[common], help="integrate an expression")
    q.add_argument("expr")
    q.add_argument("--measure", required=True, help='e.g. "U(d)", "Sp(6)", "Stiefel(d,2)"')
    q.add_argument("--symbol", help="name of the random matrix (default depends on the family)")
    q.add_argument("--asymptotic", type=int, metavar="N", help="expand the result to order N in 1/d")
    q.add_argument("--dim-override", type=int, metavar="n", help="evaluate a symbolic result at d = n")
    q.add_argument("--cold", action="store_true", help="clear caches first")
    q.set_defaults(func=cmd_integrate)

    q = sub.add_parser("asymptotic", parents=[common], help="expand a rational expression in 1/symbol")
    q.add_argument("expr")
    q.add_argument("--symbol", default="d")
    q.add_argument("--measure", help="integrate over this measure first")
    q.add_argument("--order", type=int, default=3)
    q.set_defaults(func=cmd_asymptotic)

    q = sub.add_parser("wg", parents=[common], help="Weingarten table")
    q.add_argument("family", choices=("U", "O", "Sp"))
    q.add_argument("degree", type=int)
    q.add_argument("--dim", type=int)
    q.add_argument("--cold", action="store_true")
    q.set_defaults(func=cmd_wg)

    q = sub.add_parser("hciz", parents=[common], help="HCIZ integral")
    q.add_argument("a", help="comma-separated eigenvalues or a JSON matrix file")
    q.add_argument("b")
    q.set_defaults(func=cmd_hciz)

    q = sub.add_parser("bench", parents=[common], help="cold-cache benchmark medians")
    q.add_argument("suite", help=f"one of {', '.join(sorted(SUITES))}")
    q.add_argument("samples", type=int, nargs="?", default=30)
    q.add_argument("--threads", type=int, default=1)
    q.set_defaults(func=cmd_bench)

    q = sub.add_parser("cache-clear", parents=[common], help="drop memoized Weingarten data")
    q.set_defaults(func=cmd_cache_clear)
    return p


def _error_record(exc: Exception, code: int) -> dict:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ParseError):
        rec["position"] = exc.position
        rec["expected"] = exc.expected
    return rec


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HaarIntError as e:
        exc, code = e, e.exit_code
    except Exception as e:  # noqa: BLE001 - last-resort internal error
        exc, code = e, 5
    if getattr(args, "format", "text") == "json":
        print(json.dumps(_error_record(exc, code), sort_keys=True))
    else:
        print(f"error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
