"""Ground truth: closed-form rates and exact directed information by enumeration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ENUMERATION_LIMIT = 2 ** 24


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def markov_bsc_rate(p: float, eps: float) -> float:
    """Rate of I(Y -> X) when a symmetric binary Markov chain X (flip prob ``p``)
    is observed through a BSC with crossover ``eps``."""
    if not (0.0 < p < 1.0 and 0.0 < eps < 1.0):
        raise ValueError("p and eps must lie strictly inside (0, 1)")
    pb, eb = 1.0 - p, 1.0 - eps
    a = p * eps + pb * eb
    b = pb * eps + p * eb
    return (binary_entropy(p)
            - a * binary_entropy(p * eps / a)
            - b * binary_entropy(pb * eps / b))


class CoupledRates(NamedTuple):
    di: float
    reverse_di: float
    mi: float


def coupled_bsc_rates(alpha: float, beta: float) -> CoupledRates:
    """Stationary rates for ``Y_i = X_i + BSC(alpha)``, ``X_{i+1} = Y_i + BSC(beta)``."""
    if not (0.0 <= alpha <= 0.5 and 0.0 <= beta <= 0.5):
        raise ValueError("alpha and beta must lie in [0, 1/2]")
    conv = binary_entropy(alpha * (1 - beta) + (1 - alpha) * beta)
    di = conv - binary_entropy(alpha)
    rev = conv - binary_entropy(beta)
    return CoupledRates(di, rev, di + rev)


def ctw_redundancy_bound(gamma: int, states: int, n: int) -> float:
    """``C5 log n + C6`` for a Markov source with ``states`` states over ``gamma`` symbols."""
    if gamma < 2 or states < 1 or n < 2:
        raise ValueError("need gamma >= 2, states >= 1, n >= 2")
    c5 = (gamma - 1) * states / 2
    c6 = (c5 * math.log2(1.0 / states)
          + states * (gamma / (gamma - 1) + math.log2(gamma))
          - 1.0 / (gamma - 1))
    return c5 * math.log2(n) + c6


# --- exact enumeration -----------------------------------------------------

@dataclass
class JointProcessModel:
    """Joint process over super-symbols ``z = x * y_size + y`` with finite memory.

    ``initial`` has shape ``(K,) * memory`` and gives the law of the first
    ``memory`` super-symbols; ``kernel`` has shape ``(K,) * (memory + 1)``
    where ``kernel[z_{i-m}, ..., z_{i-1}, z_i]`` is the next-step probability.
    """

    x_size: int
    y_size: int
    memory: int
    initial: np.ndarray
    kernel: np.ndarray

    def __post_init__(self):
        k = self.x_size * self.y_size
        self.initial = np.asarray(self.initial, dtype=float)
        self.kernel = np.asarray(self.kernel, dtype=float)
        if self.memory < 1:
            raise ValueError("memory must be at least 1")
        if self.initial.shape != (k,) * self.memory:
            raise ValueError(f"initial must have shape {(k,) * self.memory}")
        if self.kernel.shape != (k,) * (self.memory + 1):
            raise ValueError(f"kernel must have shape {(k,) * (self.memory + 1)}")
        if np.any(self.kernel < 0) or np.any(self.initial < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(self.initial.sum() - 1.0) > 1e-12:
            raise ValueError("initial distribution does not sum to 1")
        if np.max(np.abs(self.kernel.sum(axis=-1) - 1.0)) > 1e-12:
            raise ValueError("kernel rows do not sum to 1")

    @property
    def k(self) -> int:
        return self.x_size * self.y_size

    def transition_matrix(self) -> np.ndarray:
        """Chain on the last ``memory`` super-symbols."""
        k, m = self.k, self.memory
        states = k ** m
        t = np.zeros((states, states))
        flat = self.kernel.reshape(states, k)
        for s in range(states):
            tail = (s * k) % states
            for z in range(k):
                t[s, tail + z] += flat[s, z]
        return t

    def stationary(self) -> np.ndarray:
        """Stationary law of the memory state, solved from the balance equations."""
        t = self.transition_matrix()
        s = t.shape[0]
        a = np.vstack([t.T - np.eye(s), np.ones((1, s))])
        b = np.zeros(s + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(a, b, rcond=None)
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
        if np.max(np.abs(pi @ t - pi)) > 1e-12:
            raise ArithmeticError("balance equations not solved to 1e-12")
        return pi.reshape((self.k,) * self.memory)

    def with_stationary_start(self) -> "JointProcessModel":
        return JointProcessModel(self.x_size, self.y_size, self.memory, self.stationary(), self.kernel)

    def swapped(self) -> "JointProcessModel":
        """Same process with the roles of X and Y exchanged."""
        mx, my, m = self.x_size, self.y_size, self.memory

        def swap(arr: np.ndarray, count: int) -> np.ndarray:
            a = arr.reshape((mx, my) * count)
            order = []
            for j in range(count):
                order += [2 * j + 1, 2 * j]
            return a.transpose(order).reshape((my * mx,) * count)

        return JointProcessModel(my, mx, m, swap(self.initial, m), swap(self.kernel, m + 1))

    # constructors for the experimental systems

    @classmethod
    def markov_bsc(cls, p: float, eps: float) -> "JointProcessModel":
        """X symmetric Markov (flip ``p``), Y = X through BSC(``eps``); X_1 uniform."""
        bsc = np.array([[1 - eps, eps], [eps, 1 - eps]])
        flip = np.array([[1 - p, p], [p, 1 - p]])
        kernel = np.zeros((4, 4))
        for xp in range(2):
            for yp in range(2):
                for x in range(2):
                    for y in range(2):
                        kernel[xp * 2 + yp, x * 2 + y] = flip[xp, x] * bsc[x, y]
        init = np.array([0.5 * bsc[x, y] for x in range(2) for y in range(2)])
        return cls(2, 2, 1, init, kernel)

    @classmethod
    def coupled_bsc(cls, alpha: float, beta: float) -> "JointProcessModel":
        """``Y_i = X_i + BSC(alpha)``, ``X_{i+1} = Y_i + BSC(beta)``; X_1 ~ Bernoulli(1/2)."""
        fa = np.array([[1 - alpha, alpha], [alpha, 1 - alpha]])
        fb = np.array([[1 - beta, beta], [beta, 1 - beta]])
        kernel = np.zeros((4, 4))
        for xp in range(2):
            for yp in range(2):
                for x in range(2):
                    for y in range(2):
                        kernel[xp * 2 + yp, x * 2 + y] = fb[yp, x] * fa[x, y]
        init = np.array([0.5 * fa[x, y] for x in range(2) for y in range(2)])
        return cls(2, 2, 1, init, kernel)

    @classmethod
    def iid_pair(cls, px, py, copy: bool = False) -> "JointProcessModel":
        """Memoryless pair: independent components, or ``Y = X`` when ``copy``."""
        px = np.asarray(px, dtype=float)
        py = np.asarray(py, dtype=float)
        if copy:
            if px.shape != py.shape:
                raise ValueError("copy requires equal alphabets")
            step = np.diag(px).reshape(-1)
        else:
            step = np.outer(px, py).reshape(-1)
        k = step.size
        return cls(px.size, py.size, 1, step, np.tile(step, (k, 1)))

    @classmethod
    def random(cls, rng: np.random.Generator, x_size: int = 2, y_size: int = 2,
               memory: int = 1) -> "JointProcessModel":
        k = x_size * y_size
        kernel = rng.dirichlet(np.ones(k), size=k ** memory).reshape((k,) * (memory + 1))
        init = rng.dirichlet(np.ones(k ** memory)).reshape((k,) * memory)
        return cls(x_size, y_size, memory, init, kernel)


class ExactRates(NamedTuple):
    """Per-symbol (divided by n) exact information quantities."""

    di: float             # I(X^n -> Y^n) / n
    reverse_di: float     # I(Y^{n-1} -> X^n) / n
    mi: float             # I(X^n; Y^n) / n
    lagged_di: float      # I(X^{n-1} -> Y^n) / n
    instantaneous: float  # sum_i I(X_i; Y_i | X^{i-1}, Y^{i-1}) / n
    entropy_y: float      # H(Y^n) / n


def joint_sequence_pmf(model: JointProcessModel, n: int) -> np.ndarray:
    """P(x^n, y^n) as an array indexed ``[x1, y1, x2, y2, ...]``."""
    k, m = model.k, model.memory
    if n < m:
        raise ValueError(f"n={n} shorter than the model memory {m}")
    if float(k) ** n > ENUMERATION_LIMIT:
        raise ValueError(f"{k}^{n} joint sequences exceed the enumeration limit {ENUMERATION_LIMIT}")
    with np.errstate(divide="ignore"):
        logp = np.log2(model.initial)
        logk = np.log2(model.kernel)
    for i in range(m, n):
        # broadcast the kernel over the last m axes of the prefix table
        shape = (1,) * (i - m) + (k,) * (m + 1)
        logp = logp[..., None] + logk.reshape(shape)
    p = np.exp2(logp)
    return p.reshape((model.x_size, model.y_size) * n)


def _entropy(p: np.ndarray) -> float:
    q = p[p > 0]
    return float(-(q * np.log2(q)).sum())


def exact_di(model: JointProcessModel, n: int) -> ExactRates:
    """Exact rates by enumerating every joint sequence of length ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    p = joint_sequence_pmf(model, n)
    axes = 2 * n

    cache: dict[tuple[int, int], float] = {}

    def h(a: int, b: int) -> float:
        """H(X^a, Y^b)."""
        key = (a, b)
        if key not in cache:
            keep = [2 * j for j in range(a)] + [2 * j + 1 for j in range(b)]
            drop = tuple(ax for ax in range(axes) if ax not in keep)
            cache[key] = _entropy(p.sum(axis=drop)) if drop else _entropy(p)
        return cache[key]

    h_x, h_y, h_xy = h(n, 0), h(0, n), h(n, n)
    causal_y = sum(h(i, i) - h(i, i - 1) for i in range(1, n + 1))        # H(Y^n || X^n)
    causal_x = sum(h(i, i - 1) - h(i - 1, i - 1) for i in range(1, n + 1))  # H(X^n || Y^{n-1})
    lagged_y = sum(h(i - 1, i) - h(i - 1, i - 1) for i in range(1, n + 1))  # H(Y^n || X^{n-1})
    inst = sum(
        (h(i, i - 1) - h(i - 1, i - 1)) + (h(i - 1, i) - h(i - 1, i - 1)) - (h(i, i) - h(i - 1, i - 1))
        for i in range(1, n + 1)
    )
    return ExactRates(
        di=(h_y - causal_y) / n,
        reverse_di=(h_x - causal_x) / n,
        mi=(h_x + h_y - h_xy) / n,
        lagged_di=(h_y - lagged_y) / n,
        instantaneous=inst / n,
        entropy_y=h_y / n,
    )
