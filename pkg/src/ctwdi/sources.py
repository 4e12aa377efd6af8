"""Seeded synthetic generators for the experimental systems.

Randomness comes from numpy's PCG64 bit generator. A configuration seed is
expanded with ``SeedSequence(seed).spawn(k)`` into one independent substream
per noise source, always in the order the sources are listed in each
generator's docstring, so outputs are reproducible across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Alphabet, SymbolSequence
from .estimators import CausalPair

Seed = Union[int, np.random.SeedSequence, None]

BINARY = Alphabet(2)


def _rng(seed: Seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value} outside [0, 1]")


def _check_binary(x: SymbolSequence) -> None:
    if x.alphabet.size != 2:
        raise ValueError(f"expected a binary sequence, got alphabet size {x.alphabet.size}")


def gen_markov_binary(p: float, n: int, seed: Seed = None) -> SymbolSequence:
    """Symmetric binary Markov chain: X_1 ~ Bernoulli(1/2), then flip with probability ``p``."""
    _check_prob("p", p)
    rng = _rng(seed)
    u = rng.random(n)
    steps = (u < p).astype(np.int64)
    if n:
        steps[0] = int(u[0] < 0.5)
    return SymbolSequence(BINARY, np.cumsum(steps) & 1)


def bsc(x: SymbolSequence, eps: float, seed: Seed = None) -> SymbolSequence:
    """Binary symmetric channel: flip each symbol independently with probability ``eps``."""
    _check_binary(x)
    _check_prob("eps", eps)
    noise = (_rng(seed).random(len(x)) < eps).astype(np.int64)
    return SymbolSequence(BINARY, x.data ^ noise)


def isi_delay_channel(x: SymbolSequence, delay: int, eps: float, seed: Seed = None) -> SymbolSequence:
    """``Y_i = X_{i-delay} xor X_{i-delay-1} xor W_i`` with W ~ Bernoulli(eps).

    Inputs before the start of ``x`` are taken to be 0.
    """
    _check_binary(x)
    _check_prob("eps", eps)
    if delay < 0:
        raise ValueError("delay must be nonnegative")
    n = len(x)
    padded = np.concatenate((np.zeros(delay + 1, dtype=np.int64), x.data))
    a = padded[1:n + 1]   # X_{i-delay}
    b = padded[0:n]       # X_{i-delay-1}
    noise = (_rng(seed).random(n) < eps).astype(np.int64)
    return SymbolSequence(BINARY, a ^ b ^ noise)


def coupled_bsc_system(alpha: float, beta: float, n: int, seed: Seed = None) -> CausalPair:
    """Forward BSC(alpha) from X_i to Y_i, backward BSC(beta) from Y_i to X_{i+1}.

    Substreams: X_1, forward noise, backward noise.
    """
    _check_prob("alpha", alpha)
    _check_prob("beta", beta)
    s_init, s_fwd, s_bwd = _spawn(seed, 3)
    x1 = int(_rng(s_init).random() < 0.5)
    a = (_rng(s_fwd).random(n) < alpha).astype(np.int64)
    b = (_rng(s_bwd).random(n) < beta).astype(np.int64)
    # X_{i+1} = X_i ^ a_i ^ b_i
    increments = np.concatenate(([x1], (a ^ b)[:n - 1])) if n else a
    x = np.cumsum(increments) & 1
    y = x ^ a
    return CausalPair(SymbolSequence(BINARY, x), SymbolSequence(BINARY, y))


def iid_pair(q: float, n: int, copy: bool = False, seed: Seed = None) -> CausalPair:
    """X i.i.d. Bernoulli(q); Y = X when ``copy`` else an independent Bernoulli(q) draw.

    Substreams: X, Y.
    """
    _check_prob("q", q)
    s_x, s_y = _spawn(seed, 2)
    x = (_rng(s_x).random(n) < q).astype(np.int64)
    y = x.copy() if copy else (_rng(s_y).random(n) < q).astype(np.int64)
    return CausalPair(SymbolSequence(BINARY, x), SymbolSequence(BINARY, y))


def _spawn(seed: Seed, k: int) -> list[np.random.SeedSequence]:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(k)


# --- configurations --------------------------------------------------------

@dataclass(frozen=True)
class MarkovBsc:
    p: float = 0.3
    eps: float = 0.2


@dataclass(frozen=True)
class IsiDelay:
    p: float = 0.3      # input chain flip probability (artifact default)
    delay: int = 2
    eps: float = 0.1    # channel noise (artifact default)


@dataclass(frozen=True)
class CoupledBsc:
    alpha: float = 0.1
    beta: float = 0.2


@dataclass(frozen=True)
class IidPair:
    q: float = 0.5
    copy: bool = False


Variant = Union[MarkovBsc, IsiDelay, CoupledBsc, IidPair]
VARIANTS = {"markov-bsc": MarkovBsc, "isi": IsiDelay, "coupled-bsc": CoupledBsc, "iid": IidPair}


@dataclass(frozen=True)
class SourceConfig:
    variant: Variant
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        for name in ("p", "eps", "alpha", "beta", "q"):
            if hasattr(self.variant, name):
                _check_prob(name, getattr(self.variant, name))
        if getattr(self.variant, "delay", 0) < 0:
            raise ValueError("delay must be nonnegative")

    @property
    def name(self) -> str:
        for key, cls in VARIANTS.items():
            if isinstance(self.variant, cls):
                return key
        raise TypeError(self.variant)


def generate(config: SourceConfig) -> CausalPair:
    """Sample the pair ``(X, Y)`` described by ``config``.

    Markov-BSC and ISI use substreams (input chain, channel noise).
    """
    v, n = config.variant, config.n
    if isinstance(v, MarkovBsc):
        s_x, s_w = _spawn(config.seed, 2)
        x = gen_markov_binary(v.p, n, s_x)
        return CausalPair(x, bsc(x, v.eps, s_w))
    if isinstance(v, IsiDelay):
        s_x, s_w = _spawn(config.seed, 2)
        x = gen_markov_binary(v.p, n, s_x)
        return CausalPair(x, isi_delay_channel(x, v.delay, v.eps, s_w))
    if isinstance(v, CoupledBsc):
        return coupled_bsc_system(v.alpha, v.beta, n, np.random.SeedSequence(config.seed))
    if isinstance(v, IidPair):
        return iid_pair(v.q, n, v.copy, np.random.SeedSequence(config.seed))
    raise TypeError(f"unknown source variant {v!r}")
