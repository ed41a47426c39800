import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from qinstanton import instanton as inst
from qinstanton.cli import main
from qinstanton.expr import ExprSyntaxError, parse_ast, print_ast
from qinstanton.qalgebras import AlgebraId, build
from qinstanton.scalar import PMode
from qinstanton.suites import SuiteReport, run_suite


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_normalize_swap(capsys):
    rc, out, _ = run(capsys, "normalize", "--algebra", "MIq", "x21*x11 - q^2*x11*x21")
    assert rc == 0 and out.strip() == "0"


def test_normalize_inverse(capsys):
    rc, out, _ = run(capsys, "normalize", "--algebra", "MIq_deltaloc", "delta*delta^-1 - 1")
    assert rc == 0 and out.strip() == "0"


def test_negative_power_is_input_error(capsys):
    rc, _, err = run(capsys, "normalize", "--algebra", "MIq", "x11^-1")
    assert rc == 2 and "error" in err


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as e:
        build(AlgebraId.MIq).parse("x11 * * x12")
    assert e.value.pos == 6


def test_unknown_algebra(capsys):
    rc, _, _ = run(capsys, "normalize", "--algebra", "XYZ", "1")
    assert rc == 2


def test_bad_adhm_file(tmp_path, capsys):
    f = tmp_path / "bad.adhm"
    f.write_text("n = 1\nc = 1\n")
    rc, _, _ = run(capsys, "adhm", "--input", str(f))
    assert rc == 2
    rc, _, _ = run(capsys, "verify", "--suite", "adhm", "--adhm", str(tmp_path / "missing"))
    assert rc == 2


def test_usage_error(capsys):
    assert main(["verify"]) == 2
    capsys.readouterr()


def test_hilbert_command(capsys):
    rc, out, _ = run(capsys, "hilbert", "--algebra", "Mpq", "--p", "q", "--max-degree", "3")
    assert rc == 0
    assert [l.split("\t") for l in out.strip().splitlines()] == [
        ["0", "1"], ["1", "6"], ["2", "20"], ["3", "50"]]


def test_catalog(capsys):
    rc, out, _ = run(capsys, "catalog", "list")
    assert rc == 0 and "Fpq" in out
    rc, out, _ = run(capsys, "catalog", "dump", "--algebra", "GL2q")
    assert rc == 0 and out.startswith("presentation GL2q")


def test_adhm_command(tmp_path, capsys):
    f = tmp_path / "ref.adhm"
    f.write_text(inst.format_adhm(inst.reference_datum()))
    out_json = tmp_path / "r.json"
    rc, out, _ = run(capsys, "adhm", "--input", str(f), "--json", str(out_json))
    assert rc == 0
    data = json.loads(out_json.read_text())
    assert data["schema"] == 1
    status = {c["check"]: c.get("status", "pass" if c["pass"] else "fail") for c in data["checks"]}
    assert status["equations"] == "pass" and status["monad[I]"] == "pass"
    assert status["curvature[I,q]"] == "deviation"
    rc, _, _ = run(capsys, "adhm", "--input", str(f), "--checks", "curvature", "--strict")
    assert rc == 1


def test_adhm_command_unknown_check(tmp_path, capsys):
    f = tmp_path / "ref.adhm"
    f.write_text(inst.format_adhm(inst.reference_datum()))
    rc, _, _ = run(capsys, "adhm", "--input", str(f), "--checks", "frobnicate")
    assert rc == 2


def test_rmatrix_suite_passes():
    rep = run_suite("rmatrix", PMode.P_EQ_Q)
    assert rep.passed and rep.counts()["fail"] == 0 and rep.counts()["deviation"] == 0


def test_report_round_trip():
    rep = run_suite("rmatrix")
    d = rep.to_dict(timings=False)
    assert SuiteReport.from_dict(d).to_dict(timings=False) == d
    assert d["schema"] == 1


def test_verify_deterministic_json(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        proc = subprocess.run([sys.executable, "-m", "qinstanton.cli", "verify", "--suite", "all",
                               "--json", str(p), "--no-timings", "--quiet"],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


# -- parse / print round trip -------------------------------------------------------

MI = build(AlgebraId.MIq)
coeffs = st.sampled_from(["1", "-1", "2", "1/2", "i", "-3i", "q", "q^-1", "q^2", "s", "(1+i)",
                          "(q - q^-1)", "(1/3 + 2i)", "s^-3"])
letters = st.sampled_from(MI.base_generators)
terms = st.tuples(coeffs, st.lists(letters, min_size=0, max_size=4))


@settings(max_examples=200)
@given(st.lists(terms, min_size=1, max_size=4))
def test_normal_form_print_parse_round_trip(ts):
    text = " + ".join("*".join([c] + w) for c, w in ts)
    p = MI.parse(text)
    printed = str(p)
    again = MI.parse(printed)
    assert again == p
    assert str(again) == printed


@settings(max_examples=100)
@given(st.lists(terms, min_size=1, max_size=3))
def test_ast_round_trip(ts):
    text = " - ".join("*".join([c] + w) for c, w in ts)
    ast = parse_ast(text)
    assert parse_ast(print_ast(ast)) == ast


def test_random_order_normalization_matches():
    rng = random.Random(0)
    P = build(AlgebraId.Fpq, PMode.P_EQ_QINV)
    gens = [P.index[n] for n in P.base_generators]
    from qinstanton.scalar import ONE
    for _ in range(30):
        w = tuple(rng.choice(gens) for _ in range(3))
        assert P.normalize_unordered({w: ONE}, rng) == P.normalize_terms({w: ONE})
