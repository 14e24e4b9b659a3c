"""Encoding through the sparsified stable design and min-ratio decoding.

The design matrix is never stored.  Entry ``(j, i)`` is regenerated from the
counter-based stream labelled ``(master_seed, "col", j, i)``:

    draw 0 -> mask uniform, r_ij = 1 iff U < gamma
    draw 1 -> angle u    } S(alpha, 1, 1) via the CMS transform
    draw 2 -> exponential w

The stable value does not depend on the mask, so a masked-out entry never
shifts any other draw.  Encoding touches only the ``M x K`` entries on the
signal support; decoding scans all ``M x N`` mask bits and regenerates the
``~gamma M N`` surviving stable entries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import IO, Iterable

import numpy as np

from .rng import RngStream, bits_to_open_uniform, child_keys, counter_bits, derive_key
from .stable_sampler import StableParams, draws_from_bits, stable_from_draws

SIGNAL_KINDS = ("binary", "folded_gaussian")
FOLDED_SIGMA = 5.0

# upper bound on M x block entries held in memory while decoding
_DECODE_BLOCK_ENTRIES = 1 << 21


@dataclass(frozen=True)
class DesignParams:
    n: int
    m: int
    alpha: float
    gamma: float
    master_seed: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")
        StableParams(self.alpha)
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma!r}")


@dataclass(frozen=True, eq=False)
class Signal:
    """Nonnegative sparse vector stored as sorted (index, value) pairs."""

    n: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-d arrays of equal length")
        if idx.size and (idx[0] < 0 or idx[-1] >= self.n or np.any(np.diff(idx) <= 0)):
            raise ValueError("indices must be unique, sorted and inside [0, n)")
        if np.any(~(val > 0)) or not np.all(np.isfinite(val)):
            raise ValueError("stored signal values must be finite and strictly positive")
        idx.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def k(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.n)
        x[self.indices] = self.values
        return x

    @classmethod
    def from_dense(cls, x) -> "Signal":
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < 0):
            raise ValueError("signal entries must be nonnegative")
        idx = np.flatnonzero(x)
        return cls(x.size, idx, x[idx])

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class Measurements:
    values: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.values, dtype=np.float64)
        if y.ndim != 1 or np.any(y < 0):
            raise ValueError("measurements must be a 1-d array of nonnegative values")
        y.flags.writeable = False
        object.__setattr__(self, "values", y)

    @property
    def m(self) -> int:
        return int(self.values.size)

    def __eq__(self, other):
        if not isinstance(other, Measurements):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class Estimate:
    """Decoded coordinates; ``covered[i]`` is False when T_i was empty."""

    values: np.ndarray
    covered: np.ndarray = field(repr=False)

    def __post_init__(self):
        val = np.asarray(self.values, dtype=np.float64)
        cov = np.asarray(self.covered, dtype=bool)
        if val.shape != cov.shape:
            raise ValueError("values and covered must have the same shape")
        if np.any(val[~cov] != 0):
            raise ValueError("uncovered coordinates must be estimated as 0")
        val.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "values", val)
        object.__setattr__(self, "covered", cov)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def uncovered_count(self) -> int:
        return int(self.n - np.count_nonzero(self.covered))


# -- signals ---------------------------------------------------------------

def generate_signal(kind: str, n: int, k: int, stream: RngStream) -> Signal:
    """K-sparse nonnegative signal on uniformly chosen distinct coordinates.

    ``binary`` puts 1 on every chosen coordinate; ``folded_gaussian`` draws
    |Z| with Z ~ N(0, 5^2), redrawing exact zeros.
    """
    if kind not in SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    idx = stream.sample_without_replacement(n, k)
    if kind == "binary":
        return Signal(n, idx, np.ones(k))
    vals = np.abs(FOLDED_SIGMA * stream.normal(k))
    while np.any(vals == 0.0):
        zero = vals == 0.0
        vals[zero] = np.abs(FOLDED_SIGMA * stream.normal(int(zero.sum())))
    return Signal(n, idx, vals)


# -- design ----------------------------------------------------------------

@lru_cache(maxsize=32)
def _column_keys(master_seed: int, m: int) -> np.ndarray:
    keys = np.array([derive_key(master_seed, ("col", j)) for j in range(m)], dtype=np.uint64)
    keys.flags.writeable = False
    return keys


def column_keys(params: DesignParams) -> np.ndarray:
    return _column_keys(params.master_seed, params.m)


def design_entries(params: DesignParams, rows: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mask and stable values for the grid ``rows x cols`` of measurement/coordinate indices.

    Returns ``(mask, s)`` with shape ``(len(rows), len(cols))``; ``s`` is NaN
    wherever the mask is 0.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    keys = child_keys(column_keys(params)[rows][:, None], cols[None, :])
    mask = bits_to_open_uniform(counter_bits(keys, 0)) < params.gamma
    s = np.full(keys.shape, np.nan)
    live = keys[mask]
    u, w = draws_from_bits(counter_bits(live, 1), counter_bits(live, 2))
    s[mask] = stable_from_draws(params.alpha, u, w)
    return mask, s


def design_column(params: DesignParams, j: int) -> list[tuple[int, float]]:
    """The surviving entries ``(i, s_ij)`` of measurement row ``j``, by ascending i."""
    if not 0 <= j < params.m:
        raise IndexError(f"measurement index {j} outside [0, {params.m})")
    mask, s = design_entries(params, np.array([j]), np.arange(params.n))
    idx = np.flatnonzero(mask[0])
    return [(int(i), float(v)) for i, v in zip(idx, s[0, idx])]


def materialize_design(params: DesignParams) -> np.ndarray:
    """Dense ``M x N`` masked design with zeros where r_ij = 0.  Test-sized problems only."""
    a = np.zeros((params.m, params.n))
    for j in range(params.m):
        for i, v in design_column(params, j):
            a[j, i] = v
    return a


# -- encode / decode -------------------------------------------------------

def encode(signal: Signal, params: DesignParams) -> Measurements:
    """y_j = sum_i x_i s_ij r_ij, accumulated over the support in ascending index order."""
    if signal.n != params.n:
        raise ValueError(f"signal dimension {signal.n} does not match design n={params.n}")
    y = np.zeros(params.m)
    if signal.k == 0:
        return Measurements(y)
    mask, s = design_entries(params, np.arange(params.m), signal.indices)
    for col, x in enumerate(signal.values):
        y = y + np.where(mask[:, col], x * s[:, col], 0.0)
    return Measurements(y)


def decode_min(measurements: Measurements, params: DesignParams) -> Estimate:
    """Min-ratio estimate x_i = min_{j in T_i} y_j / s_ij for every coordinate."""
    y = measurements.values
    if y.size != params.m:
        raise ValueError(f"got {y.size} measurements for a design with m={params.m}")
    rows = np.arange(params.m)
    block = max(1, _DECODE_BLOCK_ENTRIES // params.m)
    est = np.zeros(params.n)
    covered = np.zeros(params.n, dtype=bool)
    for start in range(0, params.n, block):
        cols = np.arange(start, min(start + block, params.n))
        mask, s = design_entries(params, rows, cols)
        ratio = np.where(mask, y[:, None] / np.where(mask, s, 1.0), np.inf)
        best = ratio.min(axis=0)
        cov = mask.any(axis=0)
        est[cols] = np.where(cov, best, 0.0)
        covered[cols] = cov
    return Estimate(est, covered)


def normalized_error(truth: Signal, estimate: Estimate) -> float:
    """sqrt(sum (x - x_hat)^2 / sum x^2)."""
    if truth.n != estimate.n:
        raise ValueError("truth and estimate dimensions differ")
    denom = float(np.sum(truth.values**2))
    if denom == 0.0:
        raise ValueError("normalized error is undefined for an all-zero signal")
    diff = estimate.values.copy()
    diff[truth.indices] -= truth.values
    return float(np.sqrt(np.sum(diff**2) / denom))


# -- text formats ----------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v))


def write_signal(signal: Signal, fh: IO[str]) -> None:
    fh.write(f"{signal.n} {signal.k}\n")
    for i, v in zip(signal.indices, signal.values):
        fh.write(f"{int(i)} {_fmt(v)}\n")


def read_signal(fh: IO[str] | Iterable[str]) -> Signal:
    lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise ValueError("empty signal file")
    try:
        n, k = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"line 1: expected header 'n k', got {lines[0]!r}") from exc
    if len(lines) - 1 != k:
        raise ValueError(f"header declares {k} entries but {len(lines) - 1} follow")
    idx, val = [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'index value', got {ln!r}")
        idx.append(int(parts[0]))
        val.append(float(parts[1]))
    return Signal(n, np.array(idx, dtype=np.int64), np.array(val))


def write_estimate(estimate: Estimate, fh: IO[str]) -> None:
    """Nonzero estimates in the signal format; coverage flags are not stored."""
    write_signal(Signal.from_dense(estimate.values), fh)


def write_measurements(measurements: Measurements, fh: IO[str]) -> None:
    for v in measurements.values:
        fh.write(_fmt(v) + "\n")


def read_measurements(fh: IO[str] | Iterable[str]) -> Measurements:
    return Measurements(np.array([float(ln) for ln in (raw.strip() for raw in fh) if ln]))
