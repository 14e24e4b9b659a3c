import io
import json
import math

import pytest
from hypothesis import given, strategies as st

from sparsecc import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return cli.read_csv(io.StringIO(text))[1]


# -- record formatting --------------------------------------------------------

@given(st.lists(st.tuples(st.floats(allow_nan=False), st.integers(-10**6, 10**6),
                          st.sampled_from([None, True, False, "alpha0"]))))
def test_csv_round_trip_is_byte_identical(records):
    recs = [{"a": a, "b": b, "c": c} for a, b, c in records]
    first = io.StringIO()
    cli.write_csv(recs, ("a", "b", "c"), first)
    header, parsed = cli.read_csv(io.StringIO(first.getvalue()))
    assert header == ["a", "b", "c"]
    second = io.StringIO()
    cli.write_csv(parsed, header, second)
    assert second.getvalue() == first.getvalue()


def test_csv_uses_lf_and_shortest_floats():
    buf = io.StringIO()
    cli.write_csv([{"x": 0.1, "y": None}], ("x", "y"), buf)
    assert buf.getvalue() == "x,y\n0.1,\n"


def test_parse_config_text():
    cfg = cli.parse_config_text("# sweep\nn = 100\nk=5  # sparsity\nalpha_list = 0.1, 0.5\n\nsignal_kind = binary\n")
    assert cfg == {"n": 100, "k": 5, "alpha_list": (0.1, 0.5), "signal_kind": "binary"}


@pytest.mark.parametrize("text,fragment", [
    ("n = 10\nk: 3\n", "cfg:2: expected 'key = value'"),
    ("n = 10\nk = three\n", "cfg:2: field 'k'"),
    ("colour = red\n", "cfg:1: unknown field 'colour'"),
    ("alpha_list = 0.1, x\n", "cfg:1: field 'alpha_list'"),
])
def test_config_errors_name_line_and_field(text, fragment):
    with pytest.raises(cli.UsageError, match=fragment.replace("'", ".")):
        cli.parse_config_text(text, "cfg")


# -- cdf ------------------------------------------------------------------------

def test_cdf_half(capsys):
    code, out, _ = run(capsys, "cdf", "--alpha", "0.5", "--t", "1,0")
    assert code == 0
    one, zero = rows(out)
    assert one["F_quadrature"] == pytest.approx(0.5, abs=1e-9) and one["F_closed"] == 0.5
    assert zero["F_quadrature"] == 0.0 and zero["F_closed"] == 0.0
    assert one["F_mc"] is None and one["mc_stderr"] is None


def test_cdf_limit_column_only_on_request(capsys):
    _, out, _ = run(capsys, "cdf", "--alpha", "0.3", "--t", "2")
    assert rows(out)[0]["F_closed"] is None
    _, out, _ = run(capsys, "cdf", "--alpha", "0.3", "--t", "2", "--limit0")
    assert rows(out)[0]["F_closed"] == pytest.approx(2 / 3)


def test_cdf_monte_carlo(capsys):
    code, out, _ = run(capsys, "cdf", "--alpha", "0.3", "--t", "2", "--mc", "1000000", "--seed", "1")
    (rec,) = rows(out)
    assert code == 0
    assert abs(rec["F_mc"] - rec["F_quadrature"]) < 3 * rec["mc_stderr"]
    _, again, _ = run(capsys, "cdf", "--alpha", "0.3", "--t", "2", "--mc", "1000000", "--seed", "1")
    assert again == out


def test_cdf_argument_errors(capsys):
    assert run(capsys, "cdf", "--alpha", "0.3", "--t", "1", "--mc", "10")[0] == cli.EXIT_USAGE
    assert run(capsys, "cdf", "--alpha", "1.3", "--t", "1")[0] == cli.EXIT_USAGE
    assert run(capsys, "cdf", "--alpha", "0.3", "--t=-1")[0] == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        cli.main(["cdf", "--alpha", "0.3", "--t", "a,b"])
    assert info.value.code == 2


# -- complexity -------------------------------------------------------------------

def test_complexity_alpha0(capsys):
    code, out, _ = run(capsys, "complexity", "--k", "10", "--n", "10000", "--delta", "0.01",
                       "--gamma", "0.1", "--regime", "alpha0")
    (rec,) = rows(out)
    assert code == 0
    assert rec["coefficient_exact"] == pytest.approx(15.525, abs=0.001)
    assert rec["coefficient_approx"] == pytest.approx(15.820, abs=0.001)
    assert rec["M"] == 215 == math.ceil(rec["coefficient_exact"] * math.log(1e6))


def test_complexity_worst_and_alpha1(capsys):
    _, out, _ = run(capsys, "complexity", "--k", "10", "--n", "10000", "--delta", "0.01",
                    "--regime", "worst", "--regime", "alpha1")
    worst, a1 = rows(out)
    assert worst["coefficient_approx"] == pytest.approx(27.18, abs=0.01)
    assert worst["coefficient_exact"] == a1["coefficient_exact"]
    assert (worst["regime"], a1["regime"]) == ("worst", "alpha1")


def test_complexity_errors(capsys):
    assert run(capsys, "complexity", "--k", "10", "--n", "100", "--delta", "0.01")[0] == cli.EXIT_USAGE
    assert run(capsys, "complexity", "--k", "10", "--n", "100", "--delta", "2", "--gamma", "0.1")[0] == cli.EXIT_USAGE


# -- hcurve -----------------------------------------------------------------------

def test_hcurve_optimize_near_alpha_one(capsys):
    _, out, _ = run(capsys, "hcurve", "--alpha", "0.95", "--epsilon", "0.5,1", "--optimize")
    half, one = rows(out)
    assert abs(half["lambda"] - 1) < 0.1 and abs(half["h"] / math.exp(-1) - 1) < 0.1
    assert abs(one["lambda"] - math.sqrt(2)) < 0.1
    assert half["K_over_h"] == pytest.approx(1 / half["h"])


def test_hcurve_optimum_dominates_fixed_lambda(capsys):
    alphas = "0.1,0.3,0.5,0.7,0.9"
    _, opt, _ = run(capsys, "hcurve", "--alpha", alphas, "--epsilon", "0.5", "--optimize", "--k", "10")
    _, fixed, _ = run(capsys, "hcurve", "--alpha", alphas, "--epsilon", "0.5", "--lambda", "1,2", "--k", "10")
    best = {r["alpha"]: r["K_over_h"] for r in rows(opt)}
    for r in rows(fixed):
        assert best[r["alpha"]] <= r["K_over_h"] + 1e-9


def test_hcurve_needs_lambda_or_optimize(capsys):
    assert run(capsys, "hcurve", "--alpha", "0.5", "--epsilon", "0.5")[0] == cli.EXIT_USAGE


# -- simulate ---------------------------------------------------------------------

SMALL = ("simulate", "--n", "300", "--k", "4", "--nu", "0.8", "--alpha", "0.1", "--inv-gamma", "2",
         "--trials", "1", "--seed", "9")


def test_simulate_is_deterministic(capsys):
    _, a, _ = run(capsys, *SMALL)
    _, b, _ = run(capsys, *SMALL)
    assert a == b
    (rec,) = rows(a)
    assert list(rec) == list(cli.SIMULATE_COLUMNS)
    assert rec["trials"] == 1 and rec["seed"] == 9


def test_simulate_json_and_out(capsys, tmp_path):
    path = tmp_path / "cells.json"
    assert run(capsys, *SMALL, "--json", "--out", str(path))[0] == 0
    _, csv_text, _ = run(capsys, *SMALL)
    (rec,) = json.loads(path.read_text())
    assert rec == rows(csv_text)[0]


def test_simulate_config_file_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("n = 300\nk = 4\nnu_list = 0.8\nalpha_list = 0.1\ninv_gamma_list = 2\ntrials = 1\nmaster_seed = 9\n")
    _, from_file, _ = run(capsys, "simulate", "--config", str(cfg))
    _, inline, _ = run(capsys, *SMALL)
    assert from_file == inline
    _, overridden, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "10")
    assert rows(overridden)[0]["seed"] == 10


def test_simulate_errors(capsys, tmp_path):
    assert run(capsys, "simulate", "--n", "100", "--k", "3")[0] == cli.EXIT_USAGE  # no seed
    bad = tmp_path / "bad.cfg"
    bad.write_text("n = 100\nk = x\n")
    code, _, err = run(capsys, "simulate", "--config", str(bad), "--seed", "1")
    assert code == cli.EXIT_USAGE and "bad.cfg:2" in err and "'k'" in err
    assert run(capsys, "simulate", "--config", str(tmp_path / "missing.cfg"), "--seed", "1")[0] == cli.EXIT_USAGE


def test_simulate_numerical_failure(capsys):
    code, _, err = run(capsys, "simulate", "--n", "2000", "--k", "5", "--nu", "1", "--alpha", "0.002",
                       "--inv-gamma", "1", "--trials", "1", "--seed", "1")
    assert code == cli.EXIT_NUMERICAL and "numerical failure" in err


@pytest.mark.parametrize("kind,bound", [("binary", 1e-6), ("folded_gaussian", 0.05)])
def test_simulate_desk_cell(capsys, kind, bound):
    _, out, _ = run(capsys, "simulate", "--n", "10000", "--k", "10", "--nu", "2", "--alpha", "0.05",
                    "--inv-gamma", "5", "--trials", "20", "--seed", "42", "--signal", kind)
    (rec,) = rows(out)
    assert rec["median_error"] <= bound
    assert rec["M"] == 277


# -- validate ---------------------------------------------------------------------

def test_validate_binomial_suite(capsys):
    code, out, _ = run(capsys, "validate", "--suite", "appendixB")
    assert code == cli.EXIT_OK
    assert out.splitlines()[-1] == "== suite appendixB: PASS"
    assert "FAIL" not in out


def test_validate_reports_failures(capsys, monkeypatch):
    from sparsecc import validate

    def broken(seed, workers):
        yield validate.close("always off", 1.0, 2.0, 0.1)

    monkeypatch.setitem(validate._SUITES, "appendixB", broken)
    code, out, _ = run(capsys, "validate", "--suite", "appendixB")
    assert code == cli.EXIT_VALIDATION
    assert "FAIL  always off: observed=1.0 expected=2.0 tol=0.1" in out
