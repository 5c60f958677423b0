import csv
import io
import json
import math
from pathlib import Path

import pytest

from absmom import cli
from absmom.quadrature import IntegrandError

GOLDEN = Path(__file__).with_name("golden")
SCHEMA = json.loads((GOLDEN / "moment_schema.json").read_text())

TYPES = {
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
    "string": lambda v: isinstance(v, str),
    "null": lambda v: v is None,
}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def conforms(value, kinds: str) -> bool:
    return any(TYPES[k](value) for k in kinds.split("|"))


def check_schema(doc, kind):
    shape = SCHEMA[kind]
    assert list(doc) == shape["top"]
    assert doc["command"] == kind
    for row in doc["rows"]:
        assert list(row) == list(shape["row"])
        for key, kinds in shape["row"].items():
            assert conforms(row[key], kinds), (key, row[key])


def check_error(text, code):
    doc = json.loads(text)
    assert list(doc) == ["error"]
    for key, kinds in SCHEMA["error"].items():
        assert conforms(doc["error"][key], kinds)
    assert doc["error"]["exit_code"] == code
    return doc["error"]


def test_field_lists_match_schema():
    assert cli.ROW_FIELDS == list(SCHEMA["moment"]["row"])
    assert cli.CDF_FIELDS == list(SCHEMA["cdf"]["row"])
    assert cli.VERIFY_FIELDS == list(SCHEMA["verify"]["row"])


@pytest.mark.parametrize("golden, argv", [
    ("moment_exponential.json",
     ["moment", "--dist", "exponential", "--s", "0.5,1.5", "--method", "thm1prime,thm2,thm5"]),
    ("cdf_exponential.json",
     ["cdf", "--dist", "exponential", "--x", "1", "--method", "eq2,eq3,eq4"]),
])
def test_golden_output(capsys, golden, argv):
    code, out, _ = run(capsys, *argv)
    assert code == cli.EXIT_OK
    doc = json.loads(out)
    check_schema(doc, argv[0])
    expected = json.loads((GOLDEN / golden).read_text())
    assert doc["distribution"] == expected["distribution"]
    assert len(doc["rows"]) == len(expected["rows"])
    for got, want in zip(doc["rows"], expected["rows"]):
        for key, value in want.items():
            if key in ("value", "error_estimate"):
                assert got[key] == pytest.approx(value, rel=1e-9, abs=1e-15), key
            else:
                assert got[key] == value, key


def test_moment_values_against_closed_form(capsys):
    code, out, _ = run(capsys, "moment", "--dist", "gamma:alpha=2,beta=1", "--s", "0.5,1.5",
                       "--method", "thm1prime,thm2,thm5")
    assert code == 0
    for row in json.loads(out)["rows"]:
        truth = math.gamma(2 + row["s"]) / math.gamma(2)
        assert abs(row["value"] - truth) <= 1e-6 * truth


def test_default_order_and_method(capsys):
    code, out, _ = run(capsys, "moment", "--dist", "exponential")
    assert code == 0
    (row,) = json.loads(out)["rows"]
    assert row["s"] == 1.0
    assert row["value"] == pytest.approx(1.0, rel=1e-8)


def test_infinite_moment_is_a_result(capsys):
    code, out, _ = run(capsys, "moment", "--dist", "half-cauchy", "--s", "1.5", "--method", "thm1prime,thm2")
    assert code == cli.EXIT_OK
    doc = json.loads(out)
    check_schema(doc, "moment")
    for row in doc["rows"]:
        assert row["infinite"] is True
        assert row["value"] is None


def test_negative_order_methods_report_negative_s(capsys):
    code, out, _ = run(capsys, "moment", "--dist", "exponential", "--s", "0.5", "--method", "eq28,ramanujan")
    assert code == 0
    for row in json.loads(out)["rows"]:
        assert row["s"] == -0.5
        assert row["value"] == pytest.approx(math.gamma(0.5), rel=1e-6)


def test_csv_format(capsys):
    code, out, _ = run(capsys, "moment", "--dist", "exponential", "--s", "0.5,2.5", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == cli.ROW_FIELDS
    assert [float(r["s"]) for r in rows] == [0.5, 2.5]
    assert float(rows[1]["value"]) == pytest.approx(math.gamma(3.5), rel=1e-6)


def test_csv_infinite_value_is_blank(capsys):
    code, out, _ = run(capsys, "moment", "--dist", "pareto:alpha=1.5", "--s", "1.6", "--method", "thm1prime",
                       "--format", "csv")
    assert code == 0
    (row,) = csv.DictReader(io.StringIO(out))
    assert row["value"] == ""
    assert row["infinite"] == "True"


def test_cdf_three_forms_agree(capsys):
    code, out, _ = run(capsys, "cdf", "--dist", "gamma:alpha=2", "--x", "0.5,3", "--method", "eq2,eq3,eq4")
    assert code == 0
    doc = json.loads(out)
    check_schema(doc, "cdf")
    for row in doc["rows"]:
        x = row["x"]
        truth = 1 - math.exp(-x) * (1 + x)
        assert abs(row["value"] - truth) < 1e-6
        assert row["clamped"] is False


def test_cdf_sine_forms_need_nonnegative_support(capsys):
    code, out, _ = run(capsys, "cdf", "--dist", "normal", "--x", "0", "--method", "eq3")
    assert code == cli.EXIT_VALIDATION
    check_error(out, 2)


def test_out_writes_atomically(tmp_path, capsys):
    target = tmp_path / "result.json"
    target.write_text("stale")
    code, out, _ = run(capsys, "moment", "--dist", "exponential", "--s", "0.5", "--out", str(target))
    assert code == 0
    assert out == ""
    check_schema(json.loads(target.read_text()), "moment")
    assert [p.name for p in tmp_path.iterdir()] == ["result.json"]


def test_failed_write_leaves_no_temporary(tmp_path, monkeypatch):
    target = tmp_path / "kept.json"
    target.write_text("original")

    def broken_replace(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(cli.os, "replace", broken_replace)
    with pytest.raises(OSError):
        cli.write_atomic(str(target), "new")
    assert target.read_text() == "original"
    assert [p.name for p in tmp_path.iterdir()] == ["kept.json"]


@pytest.mark.parametrize("argv", [
    ["moment", "--dist", "nope"],
    ["moment", "--dist", "gamma:alpha=-1"],
    ["moment", "--dist", "exponential", "--s", "2"],
    ["moment", "--dist", "exponential", "--s", "abc"],
    ["moment", "--dist", "exponential", "--s", ""],
    ["moment", "--dist", "exponential", "--method", "bogus"],
    ["moment", "--dist", "exponential", "--tol", "2"],
    ["moment", "--dist", "exponential", "--max-panels", "1"],
    ["moment", "--dist", "exponential", "--n", "-1"],
    ["moment", "--dist", "normal", "--s", "0.5", "--method", "thm2"],
    ["moment", "--dist", "uniform", "--s", "0.5", "--method", "ramanujan"],
    ["cdf", "--dist", "exponential"],
    ["frobnicate"],
    [],
])
def test_validation_errors_exit_2(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == cli.EXIT_VALIDATION
    check_error(out, 2)


def test_every_pair_checked_before_integration(capsys, monkeypatch):
    calls = []
    entry = cli.METHODS["thm1prime"]
    monkeypatch.setitem(cli.METHODS, "thm1prime",
                        cli.MethodEntry(run=lambda *a: calls.append(a), check=entry.check))
    code, _, _ = run(capsys, "moment", "--dist", "exponential", "--s", "0.5,2", "--method", "thm1prime")
    assert code == 2
    assert calls == []


def test_ingestion_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,f\n0,1\n1,-0.5\n2,0\n")
    code, out, _ = run(capsys, "moment", "--dist", f"csv:{bad}", "--s", "0.5")
    assert code == cli.EXIT_VALIDATION
    assert "line" in check_error(out, 2)["message"]

    code, out, _ = run(capsys, "moment", "--dist", f"csv:{tmp_path / 'missing.csv'}")
    assert code == cli.EXIT_IO
    check_error(out, 4)


def test_ingested_table_moment(tmp_path, capsys):
    path = tmp_path / "exp.csv"
    rows = [f"{x:.17g},{math.exp(-x):.17g}" for x in (i * 0.01 for i in range(4001))]
    path.write_text("x,f\n" + "\n".join(rows) + "\n")
    code, out, _ = run(capsys, "moment", "--dist", f"csv:{path}", "--s", "0.5", "--method", "thm5")
    assert code == 0
    (row,) = json.loads(out)["rows"]
    assert row["value"] == pytest.approx(math.gamma(1.5), rel=1e-4)


def test_unwritable_output_exits_4(tmp_path, capsys):
    code, out, _ = run(capsys, "moment", "--dist", "exponential", "--out", str(tmp_path / "no" / "x.json"))
    assert code == cli.EXIT_IO
    check_error(out, 4)


def test_starved_budget_exits_3(capsys):
    # half-Cauchy near zero: a slowly decaying sine tail that eight panels cannot settle
    code, out, _ = run(capsys, "cdf", "--dist", "half-cauchy", "--x", "0.001", "--max-panels", "8",
                       "--tol", "1e-14")
    assert code == cli.EXIT_NUMERICAL
    assert check_error(out, 3)["type"] == "numerical"


def test_non_finite_integrand_exits_3(capsys, monkeypatch):
    def blow_up(*args):
        raise IntegrandError(3.0, float("nan"))

    entry = cli.METHODS["thm2"]
    monkeypatch.setitem(cli.METHODS, "thm2", cli.MethodEntry(run=blow_up, check=entry.check))
    code, out, _ = run(capsys, "moment", "--dist", "exponential", "--s", "0.5", "--method", "thm2")
    assert code == cli.EXIT_NUMERICAL
    assert "not finite" in check_error(out, 3)["message"]


def test_verify_kernels_passes_report(capsys):
    code, out, err = run(capsys, "verify", "kernels")
    doc = json.loads(out)
    check_schema(doc, "verify")
    assert [r["criterion"] for r in doc["rows"]] == [9]
    assert ("PASS" if doc["passed"] else "FAIL") in err
    assert code == (0 if doc["passed"] else cli.EXIT_NUMERICAL)


def test_verify_lemmas_exit_zero(capsys):
    code, out, err = run(capsys, "verify", "lemmas")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert [r["criterion"] for r in doc["rows"]] == [1, 2]
    assert err.count("PASS") == 2


def test_verify_detects_injected_sign_bug(capsys, monkeypatch):
    from absmom import kernels

    honest = kernels.eval_g
    monkeypatch.setattr(kernels, "eval_g", lambda n, t: -honest(n, t))
    code, out, err = run(capsys, "verify", "kernels")
    assert code != 0
    assert json.loads(out)["passed"] is False
    assert "FAIL [9]" in err


def test_verify_lemmas_detects_injected_sign_bug(capsys, monkeypatch):
    from absmom import kernels

    honest = kernels.eval_q
    monkeypatch.setattr(kernels, "eval_q", lambda n, t: -honest(n, t))
    code, _, err = run(capsys, "verify", "lemmas")
    assert code == cli.EXIT_NUMERICAL
    assert "FAIL [1]" in err
