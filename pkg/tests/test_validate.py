import io

import pytest
from hypothesis import given, strategies as st

from sparsecc import analysis as A
from sparsecc import validate as V


@given(st.integers(1, 40), st.floats(0.01, 1.0), st.integers(1, 200), st.booleans())
def test_exact_probability_reduces_to_closed_form(k, gamma, m, zero):
    assert V.exact_error_prob(k, gamma, m, 0.5, 0.0, zero) == pytest.approx(
        A.err_prob_alpha0(k, gamma, m, zero), rel=1e-9, abs=1e-300)


def test_exact_probability_moves_with_alpha():
    limit = A.err_prob_alpha0(3, 0.4, 10, True)
    finite = [V.exact_error_prob(3, 0.4, 10, 0.5, a, True) for a in (0.01, 0.03, 0.1)]
    assert limit < finite[0] < finite[1] < finite[2]


def test_check_lines():
    assert V.close("x", 1.0, 1.05, 0.1).line() == "PASS  x: observed=1.0 expected=1.05 tol=0.1"
    assert V.at_most("y", 2.0, 1.0).line() == "FAIL  y: observed=2.0 upper=1.0 tol=0.0"


def test_brute_binomial_helper():
    assert V.brute_inv_one_plus_binomial(2, 0.5) == pytest.approx(7 / 12)


def test_run_suite_output():
    out = io.StringIO()
    assert V.run_suite("appendixB", out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "== suite appendixB" and lines[-1] == "== suite appendixB: PASS"
    assert all(line.startswith("PASS") for line in lines[1:-1])
