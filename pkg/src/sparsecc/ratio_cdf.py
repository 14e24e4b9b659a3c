"""CDF of the stable ratio power (S2/S1)^(alpha/(1-alpha)).

For i.i.d. S1, S2 ~ S(alpha, 1, 1),

    F_alpha(t) = pi^-2 * int_0^pi int_0^pi dU1 dU2 / (1 + Q_alpha(u1, u2) / t)

which is evaluated with a tensor-product Gauss-Legendre rule on (0, pi)^2.
The integrand is bounded and the nodes are interior, so endpoint behaviour
of Q_alpha never has to be evaluated.  Two closed forms are exact:
F_0+(t) = t / (1 + t) and F_0.5(t) = (2/pi) arctan(sqrt(t)).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import expit

from .rng import RngStream
from .stable_sampler import StableParams, sample_ratio_power_array


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_axis: int = 128

    def __post_init__(self):
        if int(self.nodes_per_axis) != self.nodes_per_axis or self.nodes_per_axis < 8:
            raise ValueError(f"nodes_per_axis must be an integer >= 8, got {self.nodes_per_axis!r}")


DEFAULT_QUAD = QuadratureSpec()


def _check_alpha(alpha: float) -> float:
    return StableParams(alpha).alpha


def log_q_alpha(alpha: float, u1, u2):
    """log Q_alpha, vectorized over broadcastable ``u1``, ``u2``."""
    a = alpha
    p = a / (1.0 - a)
    return (
        p * (np.log(np.sin(a * u2)) - np.log(np.sin(a * u1)))
        + (np.log(np.sin(u1)) - np.log(np.sin(u2))) / (1.0 - a)
        + np.log(np.sin((1.0 - a) * u2))
        - np.log(np.sin((1.0 - a) * u1))
    )


def q_alpha(alpha: float, u1: float, u2: float) -> float:
    alpha = _check_alpha(alpha)
    for name, u in (("u1", u1), ("u2", u2)):
        if not (0.0 < u < np.pi):
            raise ValueError(f"{name} must lie strictly inside (0, pi), got {u!r}")
    return float(np.exp(log_q_alpha(alpha, u1, u2)))


@lru_cache(maxsize=8)
def _nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return np.pi / 2 * (x + 1.0), w / 2.0  # weights already divided by pi


@lru_cache(maxsize=64)
def _log_q_grid(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened log Q_alpha over the node grid and the matching weights."""
    u, w = _nodes(n)
    lq = log_q_alpha(alpha, u[:, None], u[None, :])
    return lq.ravel(), np.outer(w, w).ravel()


def cdf_ratio_many(alpha: float, t, quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """Vectorized :func:`cdf_ratio` over an array of ``t`` values."""
    alpha = _check_alpha(alpha)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("t must be nonnegative")
    with np.errstate(divide="ignore"):
        return cdf_ratio_log(alpha, np.log(t), quad, closed_forms=False)


def cdf_ratio(alpha: float, t: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return float(cdf_ratio_many(alpha, [t], quad)[0])


def cdf_ratio_limit0(t: float) -> float:
    """Limit of F_alpha(t) as alpha -> 0+."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if np.isinf(t):
        return 1.0
    return t / (1.0 + t)


def cdf_ratio_half(t: float) -> float:
    """F_0.5(t) = (2/pi) arctan(sqrt(t))."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return float(2.0 / np.pi * np.arctan(np.sqrt(t)))


def cdf_ratio_mc(alpha: float, t: float, n_samples: int, stream: RngStream) -> tuple[float, float]:
    """Monte Carlo estimate of F_alpha(t) and its binomial standard error."""
    est, se = cdf_ratio_mc_many(alpha, [t], n_samples, stream)
    return float(est[0]), float(se[0])


def cdf_ratio_mc_many(alpha: float, t, n_samples: int, stream: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`cdf_ratio_mc` but shares one set of draws across many ``t``."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    r = np.sort(sample_ratio_power_array(alpha, stream, n_samples))
    p = np.searchsorted(r, t, side="right") / n_samples
    return p, np.sqrt(p * (1.0 - p) / n_samples)


def cdf_ratio_log(
    alpha: float, log_t, quad: QuadratureSpec = DEFAULT_QUAD, closed_forms: bool = True
) -> np.ndarray:
    """F_alpha evaluated at ``exp(log_t)`` without forming ``t``.

    With ``closed_forms`` the exact formula replaces quadrature at
    alpha = 0.5, and ``alpha = 0`` selects the alpha -> 0+ limit.
    ``log_t = +inf`` maps to 1 and ``-inf`` to 0.
    """
    log_t = np.atleast_1d(np.asarray(log_t, dtype=np.float64))
    if closed_forms and alpha == 0.0:
        return expit(log_t)
    if closed_forms and alpha == 0.5:
        return 2.0 / np.pi * np.arctan(np.exp(log_t / 2.0))
    alpha = _check_alpha(alpha)
    lq, wts = _log_q_grid(alpha, quad.nodes_per_axis)
    out = np.empty(log_t.shape)
    for k, lt in enumerate(log_t):
        if np.isposinf(lt):
            out[k] = 1.0
        elif np.isneginf(lt):
            out[k] = 0.0
        else:
            out[k] = wts @ expit(lt - lq)
    return np.clip(out, 0.0, 1.0)
