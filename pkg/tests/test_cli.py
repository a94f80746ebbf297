import json

import pytest

from haarint import integrate
from haarint.algebra import RationalFunction
from haarint.cli import main
from haarint.errors import ParseError

REQUIRED = {"result", "measure", "dimension", "engine", "elapsed_ms"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_integrate_text(capsys):
    assert run(capsys, "integrate", "abs(U[1,1])^2", "--measure", "U(d)")[:2] == (0, "1 // d")
    assert run(capsys, "integrate", "abs(tr(U))^4", "--measure", "U(10)")[:2] == (0, "2")


def test_design_error_exit(capsys):
    code, _, err = run(capsys, "integrate", "abs(U[1,1])^6", "--measure", "Design(d,2)")
    assert code == 4 and "design" in err.lower()


def test_exit_codes(capsys):
    assert run(capsys, "integrate", "abs(U[1,1)^2", "--measure", "U(d)")[0] == ParseError.exit_code == 2
    assert run(capsys, "integrate", "abs(U[1,1])^2", "--measure", "Q(d)")[0] == 3
    assert run(capsys, "integrate", "abs(X[1,1])^2", "--measure", "U(d)")[0] == 3
    assert run(capsys, "integrate", "abs(U[1,1])^14", "--measure", "U(d)")[0] == 4
    assert run(capsys, "bench", "nonsense")[0] == 4
    assert run(capsys, "integrate", "abs(U[1,1])^2", "--measure", "U(d)", "--dim-override", "0")[0] == 4


def test_parse_error_json(capsys):
    code, rec = run_json(capsys, "integrate", "abs(U[1,1)^2", "--measure", "U(d)")
    assert code == 2
    assert rec["error"] == "ParseError" and rec["position"] == 9 and rec["exit_code"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("integrate", "abs(U[1,1])^4", "--measure", "U(d)"),
        ("integrate", "abs(U[1,1])^4", "--measure", "U(4)"),
        ("integrate", "tr(U*A*U'*B)", "--measure", "U(d)"),
        ("integrate", "abs(U[1,1])^4", "--measure", "U(d)", "--asymptotic", "3"),
        ("asymptotic", "2*n/(n^2+1)", "--symbol", "n", "--order", "5"),
        ("wg", "U", "3"),
        ("hciz", "0,1", "0,1"),
        ("bench", "ginibre", "2"),
        ("cache-clear",),
    ],
)
def test_json_schema(capsys, argv):
    code, rec = run_json(capsys, *argv)
    assert code == 0
    assert REQUIRED <= set(rec)


def test_json_deterministic_keys(capsys):
    _, a, _ = run(capsys, "integrate", "abs(U[1,1])^2", "--measure", "U(d)", "--format", "json")
    keys = list(json.loads(a))
    assert keys == sorted(keys)


@pytest.mark.parametrize(
    "expr,measure",
    [
        ("abs(U[1,1])^2", "U(d)"),
        ("U[1,1]*conj(U[1,2])*U[2,2]*conj(U[2,1])", "U(d)"),
        ("O[1,1]^4", "O(d)"),
        ("abs(S[1,1])^2", "CSE(d)"),
        ("Y[1,1]^2", "CPerm(d)"),
    ],
)
def test_text_json_equivalence(capsys, expr, measure):
    _, text, _ = run(capsys, "integrate", expr, "--measure", measure)
    _, rec = run_json(capsys, "integrate", expr, "--measure", measure)
    r = RationalFunction.from_json(rec["result"])
    assert r == integrate(expr, measure)
    assert r.render() == text == rec["result"]["text"]


def test_dim_override(capsys):
    code, out, _ = run(capsys, "integrate", "abs(U[1,1])^4", "--measure", "U(d)", "--dim-override", "3")
    assert code == 0 and out == "1/6"


def test_asymptotic_flag(capsys):
    code, out, _ = run(capsys, "integrate", "abs(U[1,1])^4", "--measure", "U(d)", "--asymptotic", "4")
    assert out == "2/d^2 - 2/d^3 + 2/d^4"
    code, rec = run_json(capsys, "integrate", "abs(U[1,1])^4", "--measure", "U(7)", "--asymptotic", "2")
    assert code == 0 and rec["expansion_symbol"] == "d" and rec["result"]["text"] == "2/d^2"


def test_wg_tables(capsys):
    code, rec = run_json(capsys, "wg", "U", "2")
    assert code == 0
    table = {k: RationalFunction.from_json(v) for k, v in rec["result"].items()}
    d = RationalFunction.var()
    assert table["[1, 1]"] == 1 / (d * d - 1)
    assert table["[2]"] == -1 / (d * (d * d - 1))
    _, rec = run_json(capsys, "wg", "O", "1")
    assert [RationalFunction.from_json(v) for v in rec["result"].values()] == [1 / d]
    _, rec = run_json(capsys, "wg", "U", "0")
    assert rec["result"] == {}
    assert run(capsys, "wg", "U", "7")[0] == 4


def test_wg_concrete_text(capsys):
    code, out, _ = run(capsys, "wg", "U", "2", "--dim", "3")
    assert code == 0 and "1/8" in out and "-1/24" in out


def test_hciz_cli(capsys, tmp_path):
    code, rec = run_json(capsys, "hciz", "0.0,1.0", "0.0,1.0")
    assert code == 0 and abs(rec["result"]["value"][0] - 1.718281828459045) < 1e-12
    a = tmp_path / "a.json"
    a.write_text(json.dumps([[0.0, 0.0], [0.0, 1.0]]))
    code, rec = run_json(capsys, "hciz", str(a), str(a))
    assert code == 0 and abs(rec["result"]["value"][0] - 1.718281828459045) < 1e-12
    assert run(capsys, "hciz", "0,1", "1")[0] == 4


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "entry-moments", "1")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "group,integrand,dimension,median_ms,samples"
    assert len(lines) == 6 and "|U11|^6" in lines[1]


def test_bench_orthogonal_rows(capsys):
    _, rec = run_json(capsys, "bench", "orthogonal", "1")
    labels = [(r["integrand"], r["dimension"]) for r in rec["result"]["rows"]]
    assert ("O11^10", "50") in labels


def test_cold_and_cache_clear(capsys):
    run(capsys, "integrate", "abs(U[1,1])^6", "--measure", "U(d)")
    code, rec = run_json(capsys, "integrate", "abs(U[1,1])^6", "--measure", "U(d)")
    assert rec["cache_hits"] > 0
    code, rec = run_json(capsys, "integrate", "abs(U[1,1])^6", "--measure", "U(d)", "--cold")
    assert code == 0 and rec["result"]["text"]
    code, out, _ = run(capsys, "cache-clear")
    assert code == 0 and out.startswith("cleared")
