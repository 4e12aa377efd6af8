"""Universal directed-information estimators built on CTW.

Four estimates of the directed information rate from ``X`` to ``Y`` share a
single sequential pass: a CTW tree over the paired super-symbols
``z_i = x_i * |Y| + y_i`` and a separate CTW tree over ``Y`` alone.

At step ``i`` (``i = D+1 .. n``, the first ``D`` symbols only seed the
context) the joint tree predicts ``Q(x_i, y_i | past)`` and the Y tree
predicts ``Q(y_i | y past)``. The estimators average, over those steps:

* I1: ``log Q(y_i | x_i, past) - log Q(y_i | y past)`` on the realized symbols
* I2: ``H(Q(. | y past)) - f(Q(., . | past))``
* I3: ``D(Q(. | x_i, past) || Q(. | y past))``
* I4: ``D(Q(., . | past) || Q(. | y past) Q_x(. | past))``

All quantities are in bits and every average is normalized by ``n - D``.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import Alphabet, JointPmf, Pmf, SymbolSequence
from .ctw import ContextTree

_LN2 = math.log(2.0)


class EstimatorMethod(enum.IntEnum):
    I1 = 1
    I2 = 2
    I3 = 3
    I4 = 4

    @classmethod
    def parse(cls, value) -> "EstimatorMethod":
        if isinstance(value, cls):
            return value
        text = str(value).strip().upper().lstrip("I")
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"unknown estimator {value!r}; expected 1, 2, 3 or 4") from None


ALL_METHODS = tuple(EstimatorMethod)


@dataclass(frozen=True)
class CausalPair:
    """Candidate cause ``x`` and candidate effect ``y`` of equal length."""

    x: SymbolSequence
    y: SymbolSequence

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError(f"length mismatch: x has {len(self.x)}, y has {len(self.y)}")

    def __len__(self) -> int:
        return len(self.x)

    @classmethod
    def from_lists(cls, x, y, x_size: int | None = None, y_size: int | None = None) -> "CausalPair":
        return cls(SymbolSequence.from_symbols(x, x_size), SymbolSequence.from_symbols(y, y_size))

    def swapped(self) -> "CausalPair":
        return CausalPair(self.y, self.x)


@dataclass
class EstimatorTrace:
    """Running estimate after each coded step.

    ``steps[k]`` is the prefix length ``i`` and ``values[k]`` the estimate on
    ``x^i, y^i``; ``skip`` symbols at the start only provide context.
    """

    method: EstimatorMethod
    depth: int
    skip: int
    steps: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def final(self) -> float:
        return float(self.values[-1])

    @property
    def n(self) -> int:
        return int(self.steps[-1])

    def at(self, i: int) -> float:
        """Estimate on the length-``i`` prefix."""
        k = i - self.skip - 1
        if not 0 <= k < len(self.values):
            raise IndexError(f"prefix length {i} outside [{self.skip + 1}, {self.n}]")
        return float(self.values[k])

    def rows(self) -> Iterable[tuple[int, float]]:
        return zip(self.steps.tolist(), self.values.tolist())

    def to_csv(self, every: int = 1) -> str:
        buf = io.StringIO()
        buf.write("i,estimate_bits\n")
        for k, (i, v) in enumerate(self.rows()):
            if (k + 1) % every == 0 or k == len(self.values) - 1:
                buf.write(f"{i},{v:.10f}\n")
        return buf.getvalue()

    def summary(self) -> str:
        return f"method=I{int(self.method)},n={self.n},depth={self.depth},final_bits={self.final:.10f}"


@dataclass
class StepTerms:
    """Per-step ingredients of all four estimators from one pass (bits)."""

    depth: int
    n: int
    y_size: int
    logloss_y: np.ndarray          # -log Q(y_i | y past)
    logloss_y_given_x: np.ndarray  # -log Q(y_i | x_i, past)
    entropy_y: np.ndarray          # H(Q(. | y past))
    f_joint: np.ndarray            # f(Q(., . | past))
    kl_conditional: np.ndarray     # I3 summand
    kl_joint: np.ndarray           # I4 summand
    cross_y: np.ndarray            # sum_{x,y} Q(x,y|past) log 1/Q(y|y past)

    @property
    def count(self) -> int:
        return self.n - self.depth

    def summands(self, method: EstimatorMethod) -> np.ndarray:
        if method == EstimatorMethod.I1:
            return self.logloss_y - self.logloss_y_given_x
        if method == EstimatorMethod.I2:
            return self.entropy_y - self.f_joint
        if method == EstimatorMethod.I3:
            return self.kl_conditional
        if method == EstimatorMethod.I4:
            return self.kl_joint
        raise ValueError(method)

    def trace(self, method: EstimatorMethod) -> EstimatorTrace:
        method = EstimatorMethod.parse(method)
        k = np.arange(1, self.count + 1, dtype=float)
        values = np.cumsum(self.summands(method)) / k
        steps = np.arange(self.depth + 1, self.n + 1, dtype=np.int64)
        return EstimatorTrace(method, self.depth, self.depth, steps, values)


# --- pmf functionals -------------------------------------------------------

def conditional_entropy_functional(P: JointPmf) -> float:
    """H(Y|X) in bits of a joint pmf ``P[x, y]``; empty rows contribute nothing."""
    w = P.weights
    total = 0.0
    for row in w:
        px = float(row.sum())
        if px <= 0.0:
            continue
        for p in row:
            if p > 0.0:
                total -= p * math.log2(p / px)
    return min(max(total, 0.0), math.log2(P.y_alphabet.size))


def _as_joint(joint, y_size: int | None) -> np.ndarray:
    if isinstance(joint, JointPmf):
        return joint.weights
    if y_size is None:
        raise ValueError("y_size is required for a flat super-symbol pmf")
    w = joint.weights if isinstance(joint, Pmf) else np.asarray(joint, dtype=float)
    return w.reshape(-1, y_size)


def marginalize_x(joint, y_size: int | None = None) -> Pmf:
    """Q(x | past) = sum_y Q(x, y | past)."""
    w = _as_joint(joint, y_size)
    return Pmf(Alphabet(w.shape[0]), w.sum(axis=1))


def condition_on_x(joint, observed_x: int, y_size: int | None = None) -> Pmf:
    """Q(y | x, past) = Q(x, y | past) / sum_y' Q(x, y' | past)."""
    w = _as_joint(joint, y_size)
    row = w[observed_x]
    mass = float(row.sum())
    if not mass > 0.0:
        raise ArithmeticError(f"zero marginal probability for x={observed_x}")
    return Pmf(Alphabet(w.shape[1]), row / mass)


def relative_entropy(p: Iterable[float], q: Iterable[float]) -> float:
    """D(p || q) in bits with 0 log(0/q) = 0; q must be positive wherever p is."""
    total = 0.0
    for a, b in zip(p, q):
        if a > 0.0:
            assert b > 0.0, "relative entropy against a zero-probability symbol"
            total += a * math.log2(a / b)
    return max(total, 0.0)


# --- the one-pass engine ---------------------------------------------------

def _validate(pair: CausalPair, depth: int) -> None:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if len(pair) <= depth:
        raise ValueError(f"need more than depth={depth} symbols, got {len(pair)}")


def step_terms(pair: CausalPair, depth: int) -> StepTerms:
    """Run the joint and Y-only CTW trees over the pair once."""
    _validate(pair, depth)
    mx, my = pair.x.alphabet.size, pair.y.alphabet.size
    xs, ys = pair.x.tolist(), pair.y.tolist()
    zs = [a * my + b for a, b in zip(xs, ys)]
    n = len(xs)
    count = n - depth

    joint = ContextTree(depth, mx * my)
    ytree = ContextTree(depth, my)
    log_my = math.log2(my)

    ll_y = np.empty(count)
    ll_yx = np.empty(count)
    h_y = np.empty(count)
    f_j = np.empty(count)
    kl3 = np.empty(count)
    kl4 = np.empty(count)
    cross = np.empty(count)

    log2 = math.log2
    xrange_ = range(mx)
    yrange_ = range(my)
    for k in range(count):
        i = depth + k
        zctx = zs[i - depth:i][::-1]
        yctx = ys[i - depth:i][::-1]
        qz = joint.predict_weights(zctx)
        qy = ytree.predict_weights(yctx)
        xi = xs[i]
        yi = ys[i]

        lqy = [log2(q) for q in qy]
        hy = -sum(q * l for q, l in zip(qy, lqy))

        qx = [sum(qz[a * my:(a + 1) * my]) for a in xrange_]
        f = 0.0
        d4 = 0.0
        g = 0.0
        for a in xrange_:
            base = a * my
            pa = qx[a]
            lpa = log2(pa)
            for b in yrange_:
                p = qz[base + b]
                lp = log2(p)
                f -= p * (lp - lpa)
                d4 += p * (lp - lqy[b] - lpa)
                g -= p * lqy[b]

        row = qz[xi * my:(xi + 1) * my]
        cond = [p / qx[xi] for p in row]
        d3 = 0.0
        for b in yrange_:
            c = cond[b]
            d3 += c * (log2(c) - lqy[b])

        ll_y[k] = -lqy[yi]
        ll_yx[k] = -log2(cond[yi])
        h_y[k] = min(max(hy, 0.0), log_my)
        f_j[k] = min(max(f, 0.0), log_my)
        kl3[k] = d3 if d3 > 0.0 else 0.0
        kl4[k] = d4 if d4 > 0.0 else 0.0
        cross[k] = g

        joint.update(zs[i], zctx)
        ytree.update(yi, yctx)

    return StepTerms(depth, n, my, ll_y, ll_yx, h_y, f_j, kl3, kl4, cross)


def estimate_all(pair: CausalPair, depth: int,
                 methods: Iterable = ALL_METHODS) -> dict[EstimatorMethod, EstimatorTrace]:
    terms = step_terms(pair, depth)
    return {EstimatorMethod.parse(m): terms.trace(EstimatorMethod.parse(m)) for m in methods}


def estimate_di(pair: CausalPair, method, depth: int) -> EstimatorTrace:
    """Estimate the directed information rate from ``pair.x`` to ``pair.y``."""
    method = EstimatorMethod.parse(method)
    return step_terms(pair, depth).trace(method)


def i4_via_decomposition(terms: StepTerms) -> float:
    """I4 as ``G_n - H2(Y||X)``, an independent route to the same number."""
    return float(np.mean(terms.cross_y) - np.mean(terms.f_joint))


def h1_causal(pair: CausalPair, depth: int) -> float:
    """-(1/(n-D)) sum log Q(y_i | x^i, y^{i-1}) from the joint tree."""
    return float(np.mean(step_terms(pair, depth).logloss_y_given_x))


def h2_causal(pair: CausalPair, depth: int) -> float:
    """(1/(n-D)) sum f(Q(x_i, y_i | past)) from the joint tree."""
    return float(np.mean(step_terms(pair, depth).f_joint))


def _y_only(y: SymbolSequence, depth: int) -> tuple[np.ndarray, np.ndarray]:
    if len(y) <= depth:
        raise ValueError(f"need more than depth={depth} symbols, got {len(y)}")
    tree = ContextTree(depth, y.alphabet)
    ys = y.tolist()
    ll = []
    ent = []
    for i in range(depth, len(ys)):
        ctx = ys[i - depth:i][::-1]
        q = tree.predict_weights(ctx)
        ent.append(-sum(p * math.log2(p) for p in q))
        ll.append(-tree.update(ys[i], ctx))
    return np.array(ll), np.array(ent)


def h1_entropy(y: SymbolSequence, depth: int) -> float:
    """-(1/(n-D)) log Q(y^n) with a Y-only tree (the empty-side causal entropy)."""
    return float(np.mean(_y_only(y, depth)[0]))


def h2_entropy(y: SymbolSequence, depth: int) -> float:
    return float(np.mean(_y_only(y, depth)[1]))


# --- reverse, mutual and shifted variants ----------------------------------

def reverse_pair(pair: CausalPair, placeholder: int = 0) -> CausalPair:
    """``(W, X)`` with ``W_i = Y_{i-1}`` and ``W_1 = placeholder``."""
    y = pair.y.data
    w = np.concatenate(([placeholder], y[:-1])) if len(y) else y
    return CausalPair(SymbolSequence(pair.y.alphabet, w), pair.x)


def reverse_di(pair: CausalPair, method, depth: int) -> EstimatorTrace:
    """Estimate the reverse directed information rate ``I(Y^{n-1} -> X^n) / n``."""
    return estimate_di(reverse_pair(pair), method, depth)


def mutual_info(pair: CausalPair, method, depth: int) -> float:
    """Mutual information rate as directed plus reverse directed information."""
    return estimate_di(pair, method, depth).final + reverse_di(pair, method, depth).final


def shifted_pair(pair: CausalPair, d: int) -> CausalPair:
    """``(V, X')`` with ``V_i = Y_{i+d}`` and ``X' = X`` truncated to ``n - d``."""
    if d < 0:
        raise ValueError("shift must be nonnegative")
    n = len(pair)
    if d >= n:
        raise ValueError(f"shift {d} leaves no data for length {n}")
    return CausalPair(pair.y[d:], pair.x[:n - d])


def shifted_di(pair: CausalPair, d: int, method, depth: int) -> float:
    """Estimate ``I(Y_{d+1}^n -> X^{n-d}) / (n - d)``."""
    if len(pair) <= d + depth:
        raise ValueError(f"length {len(pair)} must exceed shift {d} + depth {depth}")
    return estimate_di(shifted_pair(pair, d), method, depth).final
