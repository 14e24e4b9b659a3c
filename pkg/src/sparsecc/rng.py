"""Deterministic, splittable random streams.

Every random quantity in the package is a pure function of a master seed and
a label path such as ``("trial", 3, "col", 17)``.  Keys are derived by
hashing one label component at a time,

    key(seed, [])          = mix(seed)
    key(seed, path + [p])  = mix(key(seed, path) ^ component_hash(p))

and a stream with key ``k`` emits the SplitMix64 sequence
``mix(k + (n + 1) * GOLDEN)`` for ``n = 0, 1, 2, ...``.  Because the output at
position ``n`` only depends on ``(k, n)`` the generator is counter based: the
design matrix entry for ``(j, i)`` can be regenerated in bulk with numpy
without walking any sequential state, and results never depend on the order
in which sibling streams were created.
"""
from __future__ import annotations

import hashlib
from typing import Iterable, Sequence, Union

import numpy as np

Label = Union[int, str]

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INT_SALT = 0xD1B54A32D192ED03

_U64 = np.uint64
_TWO_M52 = 2.0**-52


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (bijection of the 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64`; ``z`` must be a uint64 array."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _U64(_M1)
        z = (z ^ (z >> _U64(27))) * _U64(_M2)
        return z ^ (z >> _U64(31))


def component_hash(part: Label) -> int:
    if isinstance(part, (bool, np.bool_)):
        raise TypeError("boolean label components are ambiguous")
    if isinstance(part, (int, np.integer)):
        return mix64((int(part) + _INT_SALT) & MASK64)
    if isinstance(part, str):
        digest = hashlib.blake2b(part.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"label components must be int or str, got {type(part).__name__}")


def derive_key(master_seed: int, label: Iterable[Label] = ()) -> int:
    key = mix64(int(master_seed) & MASK64)
    for part in label:
        key = mix64(key ^ component_hash(part))
    return key


def child_keys(parent_key: int | np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Keys of the children ``parent + [i]`` for an array of integer labels.

    Matches ``derive_key(seed, path + [i])`` exactly, so bulk and scalar
    derivations can be mixed freely.
    """
    idx = np.asarray(indices, dtype=np.int64).astype(_U64)
    with np.errstate(over="ignore"):
        h = mix64_array(idx + _U64(_INT_SALT))
    parent = np.asarray(parent_key, dtype=_U64)
    return mix64_array(parent ^ h)


def counter_bits(keys: np.ndarray, counter: int | np.ndarray) -> np.ndarray:
    """Raw 64-bit output number ``counter`` of the streams with the given keys."""
    keys = np.asarray(keys, dtype=_U64)
    c = np.asarray(counter, dtype=np.int64).astype(_U64)
    with np.errstate(over="ignore"):
        return mix64_array(keys + (c + _U64(1)) * _U64(GOLDEN))


def bits_to_open_uniform(bits: np.ndarray) -> np.ndarray:
    """Map 64-bit words to uniforms on the open interval (0, 1).

    The top 52 bits are offset by half a step, so the range is
    [2**-53, 1 - 2**-53] and both endpoints are unreachable.
    """
    return ((bits >> _U64(12)).astype(np.float64) + 0.5) * _TWO_M52


class RngStream:
    """A labelled counter-based stream.

    Draw methods advance an internal counter; two streams built from the same
    ``(master_seed, label)`` yield identical sequences.  A stream is meant to
    be used by one thread at a time.
    """

    __slots__ = ("key", "label", "counter")

    def __init__(self, key: int, label: Sequence[Label] = ()):
        self.key = int(key) & MASK64
        self.label = tuple(label)
        self.counter = 0

    def __repr__(self) -> str:
        return f"RngStream(label={self.label!r}, counter={self.counter})"

    def child(self, *parts: Label) -> "RngStream":
        key = self.key
        for part in parts:
            key = mix64(key ^ component_hash(part))
        return RngStream(key, self.label + parts)

    def bits(self, size: int) -> np.ndarray:
        out = counter_bits(np.array([self.key], dtype=_U64), np.arange(self.counter, self.counter + size))
        self.counter += size
        return out

    def uniform(self, size: int | None = None):
        """Uniform draws on (0, 1); a float when ``size`` is None."""
        n = 1 if size is None else size
        u = bits_to_open_uniform(self.bits(n))
        return float(u[0]) if size is None else u

    def exponential(self, size: int | None = None):
        n = 1 if size is None else size
        w = -np.log(bits_to_open_uniform(self.bits(n)))
        return float(w[0]) if size is None else w

    def normal(self, size: int) -> np.ndarray:
        """Standard normals by Box-Muller (two uniforms per variate)."""
        u = bits_to_open_uniform(self.bits(2 * size)).reshape(2, size)
        return np.sqrt(-2.0 * np.log(u[0])) * np.cos(2.0 * np.pi * u[1])

    def randbelow(self, n: int) -> int:
        """Integer uniform on ``range(n)``."""
        return min(int(self.uniform() * n), n - 1)

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct sorted indices from ``range(n)`` (Floyd's algorithm)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot choose k={k} items out of n={n}")
        chosen: set[int] = set()
        for top in range(n - k, n):
            t = self.randbelow(top + 1)
            chosen.add(top if t in chosen else t)
        return np.array(sorted(chosen), dtype=np.int64)


def derive_stream(master_seed: int, label: Sequence[Label] = ()) -> RngStream:
    label = tuple(label)
    return RngStream(derive_key(master_seed, label), label)
