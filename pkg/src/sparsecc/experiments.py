"""Seeded Monte Carlo recovery experiments.

A cell is one ``(alpha, 1/gamma, nu)`` combination with
``M = ceil(nu K log(N/delta))``.  Each trial draws a signal from the label
``("signal", trial)``, shared by all cells so that cells are compared on the
same signals, and a design from a label built from the cell's parameter
values and the trial number.  Labels never involve grid positions, so a
cell's numbers do not change when the grid is reordered or extended.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .codec import (
    SIGNAL_KINDS,
    DesignParams,
    Estimate,
    Signal,
    decode_min,
    encode,
    generate_signal,
    normalized_error,
)
from .rng import derive_key, derive_stream

T = TypeVar("T")
R = TypeVar("R")


def measurement_count(nu: float, k: int, n: int, delta: float) -> int:
    """M = ceil(nu K ln(N/delta))."""
    return math.ceil(nu * k * math.log(n / delta))


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    k: int
    signal_kind: str = "binary"
    nu_list: tuple[float, ...] = (2.0,)
    delta: float = 0.01
    alpha_list: tuple[float, ...] = (0.05,)
    inv_gamma_list: tuple[float, ...] = (1,)
    trials: int = 20
    epsilon: float = 0.5
    master_seed: int = 0

    def __post_init__(self):
        for name in ("nu_list", "alpha_list", "inv_gamma_list"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.signal_kind not in SIGNAL_KINDS:
            raise ValueError(f"signal_kind must be one of {SIGNAL_KINDS}, got {self.signal_kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not self.nu_list or any(nu <= 0 for nu in self.nu_list):
            raise ValueError("nu_list must be nonempty with positive entries")
        if not self.alpha_list or any(not 0 < a < 1 for a in self.alpha_list):
            raise ValueError("every alpha must lie in (0, 1)")
        if not self.inv_gamma_list or any(not 1 <= v <= self.k for v in self.inv_gamma_list):
            raise ValueError(f"every 1/gamma must lie in [1, K={self.k}]")

    def cells(self) -> list[tuple[float, float, float]]:
        """Grid order: alpha outermost, then 1/gamma, then nu."""
        return [(a, g, nu) for a in self.alpha_list for g in self.inv_gamma_list for nu in self.nu_list]


@dataclass(frozen=True)
class TrialResult:
    normalized_error: float
    any_failure: bool
    uncovered_count: int
    # smallest x_hat_i - x_i over covered coordinates; never negative
    min_excess: float


@dataclass(frozen=True)
class CellResult:
    alpha: float
    inv_gamma: float
    nu: float
    m: int
    median_error: float
    failure_rate: float
    mean_uncovered: float
    trials: int
    seed: int
    min_excess: float = field(default=math.inf, compare=False)

    @property
    def gamma(self) -> float:
        return 1.0 / self.inv_gamma


def lower_median(values: Sequence[float]) -> float:
    s = sorted(values)
    return s[(len(s) - 1) // 2]


def _cell_label(alpha: float, inv_gamma: float, nu: float) -> tuple[str, ...]:
    return ("cell", f"alpha={alpha!r}", f"inv_gamma={float(inv_gamma)!r}", f"nu={float(nu)!r}")


def trial_signal(config: ExperimentConfig, trial_id: int) -> Signal:
    stream = derive_stream(config.master_seed, ("signal", trial_id))
    return generate_signal(config.signal_kind, config.n, config.k, stream)


def trial_design(config: ExperimentConfig, alpha: float, inv_gamma: float, nu: float, trial_id: int) -> DesignParams:
    seed = derive_key(config.master_seed, _cell_label(alpha, inv_gamma, nu) + ("trial", trial_id, "design"))
    m = measurement_count(nu, config.k, config.n, config.delta)
    return DesignParams(config.n, m, alpha, 1.0 / inv_gamma, seed)


def score_trial(truth: Signal, est: Estimate, epsilon: float) -> TrialResult:
    x = truth.to_dense()
    excess = (est.values - x)[est.covered]
    return TrialResult(
        normalized_error(truth, est),
        bool(np.any(excess > epsilon)),
        est.uncovered_count,
        float(excess.min()) if excess.size else math.inf,
    )


def run_trial(config: ExperimentConfig, alpha: float, inv_gamma: float, nu: float, trial_id: int) -> TrialResult:
    truth = trial_signal(config, trial_id)
    params = trial_design(config, alpha, inv_gamma, nu, trial_id)
    est = decode_min(encode(truth, params), params)
    return score_trial(truth, est, config.epsilon)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Ordered map; with ``workers > 1`` items run on a thread pool."""
    items = list(items)
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def aggregate(config: ExperimentConfig, cell: tuple[float, float, float], trials: Sequence[TrialResult]) -> CellResult:
    alpha, inv_gamma, nu = cell
    return CellResult(
        alpha=alpha,
        inv_gamma=inv_gamma,
        nu=nu,
        m=measurement_count(nu, config.k, config.n, config.delta),
        median_error=lower_median([t.normalized_error for t in trials]),
        failure_rate=sum(t.any_failure for t in trials) / len(trials),
        mean_uncovered=sum(t.uncovered_count for t in trials) / len(trials),
        trials=len(trials),
        seed=config.master_seed,
        min_excess=min(t.min_excess for t in trials),
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[CellResult]:
    """Full grid sweep in :meth:`ExperimentConfig.cells` order."""
    cells = config.cells()
    jobs = [(cell, t) for cell in cells for t in range(config.trials)]
    results = parallel_map(lambda job: run_trial(config, *job[0], job[1]), jobs, workers)
    out = []
    for c, cell in enumerate(cells):
        out.append(aggregate(config, cell, results[c * config.trials:(c + 1) * config.trials]))
    return out


@dataclass(frozen=True)
class ErrorRates:
    """Per-(trial, coordinate) overestimation rates split by true value.

    A coordinate with empty T_i counts as a failure (its min ranges over an
    empty set); ``uncovered_*`` report how many of the failures were of that
    kind.
    """

    rate_zero_coords: float
    rate_support_coords: float
    stderr_zero: float
    stderr_support: float
    n_zero: int
    n_support: int
    uncovered_zero: float
    uncovered_support: float


def _bridge_trial(n: int, k: int, gamma: float, alpha: float, m: int, epsilon: float,
                  master_seed: int, trial_id: int) -> tuple[int, int, int, int]:
    truth = generate_signal("binary", n, k, derive_stream(master_seed, ("bridge", trial_id, "signal")))
    params = DesignParams(n, m, alpha, gamma, derive_key(master_seed, ("bridge", trial_id, "design")))
    est = decode_min(encode(truth, params), params)
    x = truth.to_dense()
    fail = (est.values > x + epsilon) | ~est.covered
    on = x > 0
    return (
        int(np.count_nonzero(fail & ~on)),
        int(np.count_nonzero(fail & on)),
        int(np.count_nonzero(~est.covered & ~on)),
        int(np.count_nonzero(~est.covered & on)),
    )


def empirical_error_prob(n: int, k: int, gamma: float, alpha: float, m: int, epsilon: float,
                         trials: int, master_seed: int, workers: int = 1) -> ErrorRates:
    """Monte Carlo frequency of x_hat_i > x_i + eps on binary signals."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    counts = parallel_map(
        lambda t: _bridge_trial(n, k, gamma, alpha, m, epsilon, master_seed, t), range(trials), workers
    )
    fz, fs, uz, us = (int(v) for v in np.sum(np.array(counts, dtype=np.int64), axis=0))
    nz, ns = trials * (n - k), trials * k
    pz, ps = fz / nz, fs / ns
    return ErrorRates(
        pz, ps,
        math.sqrt(pz * (1 - pz) / nz), math.sqrt(ps * (1 - ps) / ns),
        nz, ns, uz / nz, us / ns,
    )
