"""Shared data model: alphabets, symbol sequences, pmfs and log-domain helpers.

All logarithms are base 2. A log-probability is a plain ``float`` with
``LOG_ZERO`` (negative infinity) standing for log 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

LogProb = float
LOG_ZERO: LogProb = float("-inf")

PMF_ATOL = 1e-9


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Symbols ``0 .. size-1``. Degenerate alphabets (size 1) are rejected."""

    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 2:
            raise AlphabetError(f"alphabet size must be an integer >= 2, got {self.size!r}")

    def __contains__(self, symbol) -> bool:
        return 0 <= symbol < self.size


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """A finite-alphabet time series. ``data`` is stored as a read-only int64 array."""

    alphabet: Alphabet
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.int64).reshape(-1)
        if arr.size and (arr.min() < 0 or arr.max() >= self.alphabet.size):
            raise AlphabetError(
                f"symbols must lie in 0..{self.alphabet.size - 1}, "
                f"found range [{arr.min()}, {arr.max()}]"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_symbols(cls, symbols: Iterable[int], size: int | None = None) -> "SymbolSequence":
        """Build a sequence, inferring the alphabet as ``max(symbol) + 1`` (at least 2)."""
        arr = np.asarray(list(symbols) if not isinstance(symbols, np.ndarray) else symbols,
                         dtype=np.int64)
        if size is None:
            size = max(2, int(arr.max()) + 1 if arr.size else 2)
        return cls(Alphabet(size), arr)

    def __len__(self) -> int:
        return int(self.data.shape[0])

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return SymbolSequence(self.alphabet, self.data[idx])
        return int(self.data[idx])

    def __iter__(self):
        return iter(self.data.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolSequence):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.data, other.data)

    def tolist(self) -> list[int]:
        return self.data.tolist()

    @property
    def size(self) -> int:
        return self.alphabet.size


def _check_weights(weights: np.ndarray, atol: float) -> None:
    if weights.size == 0 or np.any(~np.isfinite(weights)):
        raise ValueError("pmf weights must be finite and nonempty")
    if np.any(weights < 0):
        raise ValueError(f"pmf weights must be nonnegative, got min {weights.min()}")
    total = float(weights.sum())
    if abs(total - 1.0) > atol:
        raise ValueError(f"pmf weights sum to {total!r}, not 1")


@dataclass(frozen=True, eq=False)
class Pmf:
    alphabet: Alphabet
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != self.alphabet.size:
            raise ValueError(f"expected {self.alphabet.size} weights, got {w.shape[0]}")
        _check_weights(w, PMF_ATOL)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "Pmf":
        return cls(Alphabet(len(weights)), np.asarray(weights, dtype=float))

    def __getitem__(self, q: int) -> float:
        return float(self.weights[q])

    def __len__(self) -> int:
        return self.alphabet.size

    def tolist(self) -> list[float]:
        return self.weights.tolist()


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint pmf over ``x_alphabet x y_alphabet``; ``weights[x, y]``."""

    x_alphabet: Alphabet
    y_alphabet: Alphabet
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        shape = (self.x_alphabet.size, self.y_alphabet.size)
        if w.size != shape[0] * shape[1]:
            raise ValueError(f"expected {shape[0]}x{shape[1]} weights, got {w.size}")
        w = w.reshape(shape)
        _check_weights(w, PMF_ATOL)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_matrix(cls, matrix) -> "JointPmf":
        m = np.asarray(matrix, dtype=float)
        return cls(Alphabet(m.shape[0]), Alphabet(m.shape[1]), m)

    @classmethod
    def from_super(cls, pmf: Pmf, x_size: int, y_size: int) -> "JointPmf":
        """Reshape a pmf over paired super-symbols ``x*|Y| + y``."""
        return cls(Alphabet(x_size), Alphabet(y_size), pmf.weights.reshape(x_size, y_size))

    def marginal_x(self) -> Pmf:
        return Pmf(self.x_alphabet, self.weights.sum(axis=1))

    def marginal_y(self) -> Pmf:
        return Pmf(self.y_alphabet, self.weights.sum(axis=0))


# --- log-domain arithmetic -------------------------------------------------

def log2_add(a: LogProb, b: LogProb) -> LogProb:
    """log2(2**a + 2**b) without leaving the log domain."""
    if a < b:
        a, b = b, a
    if b == LOG_ZERO:
        return a
    return a + math.log2(1.0 + 2.0 ** (b - a))


def log2_sum(values: Iterable[LogProb]) -> LogProb:
    vals = list(values)
    if not vals:
        return LOG_ZERO
    top = max(vals)
    if top == LOG_ZERO:
        return LOG_ZERO
    return top + math.log2(sum(2.0 ** (v - top) for v in vals))


def normalize_log_pmf(logs: Sequence[LogProb]) -> Pmf:
    """Turn unnormalized base-2 log weights into a pmf, shifting by the max first."""
    vals = [float(v) for v in logs]
    if not vals:
        raise ValueError("no log weights given")
    top = max(vals)
    if top == LOG_ZERO or math.isnan(top):
        raise ValueError("all log weights are log 0")
    lin = [0.0 if v == LOG_ZERO else 2.0 ** (v - top) for v in vals]
    total = math.fsum(lin)
    return Pmf(Alphabet(len(vals)), np.array([w / total for w in lin]))


# --- super symbols ---------------------------------------------------------

def pair_symbols(x: SymbolSequence, y: SymbolSequence) -> SymbolSequence:
    """Encode ``(x_i, y_i)`` as ``x_i * |Y| + y_i`` over the product alphabet."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    my = y.alphabet.size
    return SymbolSequence(Alphabet(x.alphabet.size * my), x.data * my + y.data)


def unpair_symbols(z: SymbolSequence, x_size: int, y_size: int) -> tuple[SymbolSequence, SymbolSequence]:
    if z.alphabet.size != x_size * y_size:
        raise ValueError(f"super alphabet {z.alphabet.size} != {x_size}*{y_size}")
    xs, ys = np.divmod(z.data, y_size)
    return SymbolSequence(Alphabet(x_size), xs), SymbolSequence(Alphabet(y_size), ys)


# --- quantization ----------------------------------------------------------

DOWN, FLAT, UP = 0, 1, 2


def quantize_returns(values: Sequence[float], threshold: float = 0.008,
                     log_returns: bool = False) -> SymbolSequence:
    """Ternary day-over-day change: 0 = down, 1 = flat, 2 = up.

    A move counts as up/down only when it is *strictly* beyond ``threshold``.
    With ``log_returns`` the change is ``ln(v_i / v_{i-1})`` instead of the
    simple relative change.
    """
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("no values to quantize")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if np.any(~(arr > 0)):
        bad = int(np.flatnonzero(~(arr > 0))[0])
        raise ValueError(f"value at position {bad} is not positive: {arr[bad]!r}")
    if log_returns:
        change = np.log(arr[1:] / arr[:-1])
    else:
        change = (arr[1:] - arr[:-1]) / arr[:-1]
    out = np.full(change.shape, FLAT, dtype=np.int64)
    out[change > threshold] = UP
    out[change < -threshold] = DOWN
    return SymbolSequence(Alphabet(3), out)
