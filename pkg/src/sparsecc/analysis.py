"""Error probabilities and sample complexity of the min-ratio decoder.

All complexities are reported as a coefficient ``c`` with
``M = ceil(c * log(N / delta))`` (natural log).  The per-measurement
quantities follow from

    Pr(x_hat_i > x_i + eps) = [1 - gamma E F_alpha((eps^alpha / eta)^(1/(1-alpha)))]^M

with eta the masked interference count.  ``alpha = 0`` is accepted wherever
F_alpha is needed and means the alpha -> 0+ limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

from .ratio_cdf import DEFAULT_QUAD, QuadratureSpec, cdf_ratio_log

LAMBDA_BRACKET = (1e-3, 10.0)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _pow1m(gamma: float, k: float) -> float:
    """(1 - gamma)^k, accurate for small gamma."""
    if gamma == 1.0:
        return 0.0 if k > 0 else 1.0
    return math.exp(k * math.log1p(-gamma))


def _check_k_gamma(k: int, gamma: float) -> None:
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma!r}")


# -- error probabilities -----------------------------------------------------

def err_prob_alpha0(k: int, gamma: float, m: int, x_is_zero: bool) -> float:
    """Exact alpha -> 0+ probability that a coordinate is overestimated by more than eps."""
    _check_k_gamma(k, gamma)
    if k < 1:
        raise ValueError("k must be >= 1")
    kk = k + 1 if x_is_zero else k
    hit = -math.expm1(kk * math.log1p(-gamma)) / kk if gamma < 1 else 1.0 / kk
    if hit >= 1.0:
        return 0.0 if m > 0 else 1.0
    return math.exp(m * math.log1p(-hit))


def err_upper_alpha0(k: int, gamma: float, m: int) -> float:
    """Jensen bound [1 - 1/(1/gamma + K)]^M, valid for every coordinate."""
    _check_k_gamma(k, gamma)
    return (1.0 - 1.0 / (1.0 / gamma + k)) ** m


def err_upper_half(k_sum_sqrt: float, gamma: float, m: int, epsilon: float) -> float:
    """alpha = 0.5 bound with ``k_sum_sqrt`` = sum_t sqrt(x_t)."""
    if k_sum_sqrt <= 0:
        raise ValueError("k_sum_sqrt must be positive")
    _check_k_gamma(1, gamma)
    hit = gamma * 2.0 / math.pi * math.atan(math.sqrt(epsilon) / (gamma * k_sum_sqrt))
    return (1.0 - hit) ** m


def expected_inv_one_plus_binomial(k: int, gamma: float) -> float:
    """E[1 / (1 + B)] for B ~ Binomial(k, gamma), in closed form."""
    _check_k_gamma(k, gamma)
    if gamma == 1.0:
        return 1.0 / (k + 1)
    return -math.expm1((k + 1) * math.log1p(-gamma)) / ((k + 1) * gamma)


def inv_binomial_gap(gamma: float, k: int) -> float:
    """1/g - (1-g)^(K+1)/g - K (1-g)^(K+1) - 1, nonnegative on (0,1) x {K >= 1}.

    Its sign is what makes the exact alpha -> 0+ error probability no larger
    than the [1 - 1/(1/gamma + K)]^M bound.
    """
    q = _pow1m(gamma, k + 1)
    return 1.0 / gamma - q / gamma - k * q - 1.0


# -- sample complexity -------------------------------------------------------

@dataclass(frozen=True)
class ComplexityQuery:
    k: int
    n: int
    delta: float
    gamma: float = 1.0
    epsilon: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError("alpha must lie in [0, 1); 0 means the alpha -> 0+ limit")

    @property
    def log_n_delta(self) -> float:
        return math.log(self.n / self.delta)


@dataclass(frozen=True)
class ComplexityResult:
    m_exact: int
    coefficient: float
    formula_id: str
    coefficient_approx: float | None = None


def _result(coef: float, log_n_delta: float, formula_id: str, approx: float | None) -> ComplexityResult:
    return ComplexityResult(math.ceil(coef * log_n_delta), coef, formula_id, approx)


def coefficient_from_hit(hit: float) -> float:
    """1 / -log(1 - hit): measurements per unit of log(N/delta)."""
    if not (0.0 < hit <= 1.0):
        raise ValueError(f"per-measurement success probability must lie in (0, 1], got {hit!r}")
    if hit == 1.0:
        return 0.0
    return -1.0 / math.log1p(-hit)


def measurements_alpha0(query: ComplexityQuery) -> ComplexityResult:
    """alpha -> 0+ complexity (epsilon plays no role), with K / (1 - e^(-gamma K))."""
    k, g = query.k, query.gamma
    hit = g * expected_inv_one_plus_binomial(k, g)
    approx = k / -math.expm1(-g * k)
    return _result(coefficient_from_hit(hit), query.log_n_delta, "alpha0", approx)


def _worst_hit(k: int) -> float:
    g = 1.0 / (k + 1)
    return g * _pow1m(g, k)


def measurements_worst(k: int, n: int, delta: float) -> ComplexityResult:
    """Worst case over alpha at gamma = 1/(K+1); approximated by e K."""
    q = ComplexityQuery(k, n, delta)
    return _result(coefficient_from_hit(_worst_hit(k)), q.log_n_delta, "worst", math.e * k)


def measurements_alpha1(k: int, n: int, delta: float) -> ComplexityResult:
    """alpha -> 1- at gamma = 1/(K+1); assumes every nonzero x_i exceeds epsilon."""
    q = ComplexityQuery(k, n, delta)
    return _result(coefficient_from_hit(_worst_hit(k)), q.log_n_delta, "alpha1", math.e * k)


def measurements_binary(query: ComplexityQuery, quad: QuadratureSpec = DEFAULT_QUAD) -> ComplexityResult:
    """Binary-signal complexity through the exact binomial H, with K/H as the approximation."""
    big_h = h_exact_binomial(query.gamma, query.k, query.epsilon, query.alpha, quad)
    return _result(coefficient_from_hit(big_h / query.k), query.log_n_delta, "binary_h", query.k / big_h)


# -- H and h functions ---------------------------------------------------------

def _check_alpha_eps(alpha: float, epsilon: float) -> None:
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1); 0 means the alpha -> 0+ limit")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")


@lru_cache(maxsize=256)
def _f_at_counts(alpha: float, epsilon: float, kmax: int, nodes: int) -> np.ndarray:
    """F_alpha((eps^alpha / k)^(1/(1-alpha))) for k = 0..kmax, with F = 1 at k = 0."""
    k = np.arange(1, kmax + 1, dtype=np.float64)
    log_t = (alpha * math.log(epsilon) - np.log(k)) / (1.0 - alpha)
    f = np.empty(kmax + 1)
    f[0] = 1.0
    f[1:] = cdf_ratio_log(alpha, log_t, QuadratureSpec(nodes))
    f.flags.writeable = False
    return f


def f_at_counts(alpha: float, epsilon: float, kmax: int, quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    _check_alpha_eps(alpha, epsilon)
    return _f_at_counts(float(alpha), float(epsilon), int(kmax), quad.nodes_per_axis)


def h_exact_binomial(gamma: float, k: int, epsilon: float, alpha: float,
                     quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """H(gamma, K; eps, alpha) = gamma K E F_alpha(...) with eta ~ Binomial(K, gamma)."""
    _check_k_gamma(k, gamma)
    if k < 1:
        raise ValueError("k must be >= 1")
    f = f_at_counts(alpha, epsilon, k, quad)
    pmf = stats.binom.pmf(np.arange(k + 1), k, gamma)
    return float(gamma * k * (pmf @ f))


def h_lower_half(lam: float, epsilon: float) -> float:
    """Jensen lower bound of H at alpha = 0.5: lambda (2/pi) arctan(sqrt(eps)/lambda)."""
    return lam * 2.0 / math.pi * math.atan(math.sqrt(epsilon) / lam)


def poisson_cutoff(lam: float, tail_tol: float) -> int:
    """Smallest k_max with Pr(Poisson(lam) > k_max) < tail_tol."""
    kmax = max(1, int(math.ceil(lam)))
    while stats.poisson.sf(kmax, lam) >= tail_tol:
        kmax = 2 * kmax if kmax < 16 else kmax + 8
    # walk back to the smallest admissible cutoff
    while kmax > 1 and stats.poisson.sf(kmax - 1, lam) < tail_tol:
        kmax -= 1
    return kmax


def h_poisson(lam: float, epsilon: float, alpha: float, quad: QuadratureSpec = DEFAULT_QUAD,
              tail_tol: float = 1e-12) -> float:
    """h(lambda; eps, alpha) = lambda E F_alpha(...) with eta ~ Poisson(lambda)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    kmax = poisson_cutoff(lam, tail_tol)
    f = f_at_counts(alpha, epsilon, kmax, quad)
    pmf = stats.poisson.pmf(np.arange(kmax + 1), lam)
    return float(lam * (pmf @ f))


def h_limit_alpha1(lam: float, epsilon: float) -> float:
    """h as alpha -> 1-: only eta in {0, 1} contributes, and eta = 1 only at eps = 1."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if epsilon > 1:
        raise ValueError("the alpha -> 1- limit is only defined here for epsilon <= 1")
    base = lam * math.exp(-lam)
    return base * (1.0 + lam / 2.0) if epsilon == 1 else base


def optimize_lambda(epsilon: float, alpha: float, quad: QuadratureSpec = DEFAULT_QUAD,
                    lam_max: float = LAMBDA_BRACKET[1], tol: float = 1e-4,
                    tail_tol: float = 1e-12) -> tuple[float, float]:
    """Maximise h_poisson over lambda in (0, lam_max]; returns (lambda*, h*).

    A coarse log-spaced scan picks the bracket, then golden-section search
    narrows it to width ``tol``.
    """
    _check_alpha_eps(alpha, epsilon)
    lo, hi = LAMBDA_BRACKET[0], lam_max

    def h(lam: float) -> float:
        return h_poisson(lam, epsilon, alpha, quad, tail_tol)

    grid = np.geomspace(lo, hi, 61)
    vals = np.array([h(x) for x in grid])
    i = int(np.argmax(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
    hc, hd = h(c), h(d)
    while b - a > tol:
        if hc >= hd:
            b, d, hd = d, c, hc
            c = b - _INVPHI * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + _INVPHI * (b - a)
            hd = h(d)
    best = max([(hc, c), (hd, d), (vals[i], grid[i])])
    return float(best[1]), float(best[0])
