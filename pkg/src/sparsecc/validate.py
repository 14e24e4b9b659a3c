"""Self-check suites behind ``sparsecc validate``.

Each suite yields :class:`Check` rows (observed, expected, tolerance) and is
considered passed only if every row passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Callable, Iterator

import numpy as np

from . import analysis, experiments, ratio_cdf
from .rng import derive_stream

SUITES = ("lemma1", "appendixB", "lemma3", "worstcase")


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    expected: float
    tolerance: float
    passed: bool
    kind: str = "close"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        target = {"at_most": "upper", "at_least": "lower"}.get(self.kind, "expected")
        return (f"{status}  {self.name}: observed={self.observed!r} {target}={self.expected!r} "
                f"tol={self.tolerance!r}")


def close(name: str, observed: float, expected: float, tol: float) -> Check:
    return Check(name, float(observed), float(expected), float(tol), bool(abs(observed - expected) <= tol))


def at_most(name: str, observed: float, bound: float, slack: float = 0.0) -> Check:
    return Check(name, float(observed), float(bound), float(slack), bool(observed <= bound + slack), "at_most")


def brute_inv_one_plus_binomial(k: int, gamma: float) -> float:
    """sum_n 1/(1+n) C(K,n) g^n (1-g)^(K-n), term by term."""
    return math.fsum(math.comb(k, n) * gamma**n * (1 - gamma) ** (k - n) / (n + 1) for n in range(k + 1))


def exact_error_prob(k: int, gamma: float, m: int, epsilon: float, alpha: float, x_is_zero: bool) -> float:
    """[1 - gamma E F_alpha((eps^alpha/eta)^(1/(1-alpha)))]^M with binomial eta (binary signal)."""
    trials = k if x_is_zero else k - 1
    f = analysis.f_at_counts(alpha, epsilon, trials)
    pmf = np.array([math.comb(trials, j) * gamma**j * (1 - gamma) ** (trials - j) for j in range(trials + 1)])
    return (1.0 - gamma * float(pmf @ f)) ** m


def suite_ratio_cdf(seed: int = 2013, workers: int = 1) -> Iterator[Check]:
    for t in (0.01, 0.1, 1.0, 10.0, 100.0):
        yield close(f"F_0.5({t}) quadrature vs arctan form", ratio_cdf.cdf_ratio(0.5, t),
                    ratio_cdf.cdf_ratio_half(t), 1e-6)
    for t in (0.1, 1.0, 10.0):
        yield close(f"F_0.02({t}) quadrature vs t/(1+t)", ratio_cdf.cdf_ratio(0.02, t),
                    ratio_cdf.cdf_ratio_limit0(t), 5e-3)
    ts = (0.5, 1.0, 2.0)
    for a in (0.1, 0.3, 0.5, 0.7):
        stream = derive_stream(seed, ("validate", "lemma1", repr(a)))
        est, se = ratio_cdf.cdf_ratio_mc_many(a, ts, 10**6, stream)
        quad = ratio_cdf.cdf_ratio_many(a, ts)
        for t, e, s, q in zip(ts, est, se, quad):
            yield close(f"F_{a}({t}) Monte Carlo (1e6) vs quadrature, 3 stderr", e, q, 3 * s)


def suite_binomial_identity(seed: int = 2013, workers: int = 1) -> Iterator[Check]:
    for g in (0.01, 0.1, 0.5, 0.9, 1.0):
        worst = max(abs(analysis.expected_inv_one_plus_binomial(k, g) - brute_inv_one_plus_binomial(k, g))
                    for k in range(31))
        yield at_most(f"E[1/(1+Bin(K,{g}))] closed form vs sum, max over K<=30", worst, 1e-12)
    gaps = [analysis.inv_binomial_gap(g, k) for g in np.linspace(0.01, 0.99, 99) for k in range(1, 51)]
    yield Check("min of 1/g - (1-g)^(K+1)/g - K(1-g)^(K+1) - 1 over grid (must be >= 0)",
                float(min(gaps)), 0.0, 1e-12, bool(min(gaps) >= -1e-12), "at_least")


def suite_overestimation(seed: int = 2013, workers: int = 1, trials: int = 10_000) -> Iterator[Check]:
    n, k, gamma, alpha, eps = 50, 3, 0.4, 0.03, 0.5
    for m in (10, 20, 40):
        rates = experiments.empirical_error_prob(n, k, gamma, alpha, m, eps, trials, seed, workers)
        for zero, obs, se in ((True, rates.rate_zero_coords, rates.stderr_zero),
                              (False, rates.rate_support_coords, rates.stderr_support)):
            which = "x_i=0" if zero else "x_i=1"
            expected = exact_error_prob(k, gamma, m, eps, alpha, zero)
            limit = analysis.err_prob_alpha0(k, gamma, m, zero)
            # floor the tolerance so a zero-hit cell still has a meaningful band
            tol = 3 * max(se, math.sqrt(expected * (1 - expected) / (rates.n_zero if zero else rates.n_support)))
            yield close(f"M={m} {which} empirical vs exact alpha={alpha} probability, 3 stderr", obs, expected, tol)
            yield Check(f"M={m} {which} alpha->0+ closed form (reference, not scored)",
                        float(obs), float(limit), float(tol), True, "reference")


def suite_worst_case(seed: int = 2013, workers: int = 1) -> Iterator[Check]:
    r10 = analysis.measurements_worst(10, 10_000, 0.01)
    yield close("worst-case coefficient at K=10", r10.coefficient, 28.028193927489532, 1e-9)
    r200 = analysis.measurements_worst(200, 10_000, 0.01)
    yield close("worst-case coefficient / (e K) at K=200", r200.coefficient / (200 * math.e), 1.0, 0.01)
    for a in (0.1, 0.3, 0.5, 0.7, 0.9):
        for eps in (0.1, 0.5, 1.0):
            _, h_star = analysis.optimize_lambda(eps, a)
            yield at_most(f"1/h* at alpha={a}, eps={eps} vs e (1 + 5%)", 1.0 / h_star, math.e * 1.05)
    for k, g, m in ((1, 1.0, 1), (3, 0.4, 10), (10, 0.1, 100), (50, 0.02, 500)):
        lo = analysis.err_prob_alpha0(k, g, m, False)
        mid = analysis.err_prob_alpha0(k, g, m, True)
        hi = analysis.err_upper_alpha0(k, g, m)
        yield at_most(f"alpha->0+ error chain K={k} gamma={g} M={m}: support <= zero", lo, mid, 1e-15)
        yield at_most(f"alpha->0+ error chain K={k} gamma={g} M={m}: zero <= bound", mid, hi, 1e-15)


_SUITES: dict[str, Callable[..., Iterator[Check]]] = {
    "lemma1": suite_ratio_cdf,
    "appendixB": suite_binomial_identity,
    "lemma3": suite_overestimation,
    "worstcase": suite_worst_case,
}


def run_suite(name: str, out: IO[str], seed: int = 2013, workers: int = 1) -> bool:
    ok = True
    out.write(f"== suite {name}\n")
    for check in _SUITES[name](seed=seed, workers=workers):
        out.write(check.line() + "\n")
        ok &= check.passed
    out.write(f"== suite {name}: {'PASS' if ok else 'FAIL'}\n")
    return ok
