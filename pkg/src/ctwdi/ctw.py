"""Context-tree weighting over an M-ary alphabet.

Contexts are read most-recent-first: the root branches on ``x[i-1]``, a
depth-``k`` node on ``x[i-k]``. Every probability held by the tree is a base-2
logarithm. Children are allocated lazily; a missing child has seen no symbols,
so it contributes a factor 1 to its parent's product and predicts uniformly.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .core import Alphabet, LogProb, Pmf, SymbolSequence

import numpy as np

# |log beta| above this saturates beta/(1+beta) to 0 or 1
_BETA_SATURATION = 50.0


def kt_sequential(counts: Sequence[int], q: int) -> float:
    """Krichevsky-Trofimov probability that the next symbol is ``q``."""
    m = len(counts)
    if not 0 <= q < m:
        raise ValueError(f"symbol {q} outside alphabet of size {m}")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be nonnegative")
    return (counts[q] + 0.5) / (sum(counts) + m / 2)


def kt_log_block(counts: Sequence[int]) -> LogProb:
    """log2 of the KT block probability of any sequence with these counts."""
    m = len(counts)
    n = sum(counts)
    val = math.lgamma(m / 2) - m * math.lgamma(0.5) - math.lgamma(n + m / 2)
    val += sum(math.lgamma(c + 0.5) for c in counts)
    return val / math.log(2)


def _log2_add(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    return a + math.log2(1.0 + 2.0 ** (b - a))


def _mix_weight(log_beta: float) -> float:
    """beta / (1 + beta) from log2(beta)."""
    if log_beta > _BETA_SATURATION:
        return 1.0
    if log_beta < -_BETA_SATURATION:
        return 0.0
    return 2.0 ** (log_beta - math.log2(1.0 + 2.0 ** log_beta))


class ContextTreeNode:
    __slots__ = ("counts", "total", "log_pe", "log_pw", "children")

    def __init__(self, m: int):
        self.counts = [0] * m
        self.total = 0
        self.log_pe = 0.0
        self.log_pw = 0.0
        self.children: list[ContextTreeNode | None] | None = None

    def child_log_pw(self) -> float:
        if self.children is None:
            return 0.0
        return sum(c.log_pw for c in self.children if c is not None)

    def log_beta(self) -> float:
        return self.log_pe - self.child_log_pw()


class ContextTree:
    """Sequential CTW probability assignment of fixed depth.

    ``update(symbol, context)`` and ``predict(context)`` take the context as
    the ``depth`` most recent symbols, most recent first.
    """

    def __init__(self, depth: int, alphabet: Alphabet | int):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.depth = int(depth)
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        self.m = self.alphabet.size
        self.root = ContextTreeNode(self.m)
        self.symbols_seen = 0
        self._uniform = [1.0 / self.m] * self.m
        self._half_m = self.m / 2

    def _check_context(self, context: Sequence[int]) -> None:
        if len(context) != self.depth:
            raise ValueError(f"context must have exactly {self.depth} symbols, got {len(context)}")

    def _path(self, context: Sequence[int], create: bool) -> list[ContextTreeNode]:
        """Nodes from the root down the context path; stops at the first missing node."""
        node = self.root
        path = [node]
        m = self.m
        for sym in context:
            children = node.children
            if children is None:
                if not create:
                    break
                children = node.children = [None] * m
            child = children[sym]
            if child is None:
                if not create:
                    break
                child = children[sym] = ContextTreeNode(m)
            node = child
            path.append(node)
        return path

    def update(self, symbol: int, context: Sequence[int]) -> float:
        """Absorb ``symbol`` seen after ``context``; returns log2 Q(symbol | past)."""
        if len(context) != self.depth:
            self._check_context(context)
        if not 0 <= symbol < self.m:
            raise ValueError(f"symbol {symbol} outside alphabet of size {self.m}")
        path = self._path(context, create=True)
        before = self.root.log_pw
        half_m = self._half_m
        depth = self.depth
        # leaf to root
        for level in range(depth, -1, -1):
            node = path[level]
            node.log_pe += math.log2((node.counts[symbol] + 0.5) / (node.total + half_m))
            node.counts[symbol] += 1
            node.total += 1
            if level == depth:
                node.log_pw = node.log_pe
            else:
                kids = 0.0
                for c in node.children:
                    if c is not None:
                        kids += c.log_pw
                a = node.log_pe
                if a >= kids:
                    node.log_pw = a + math.log2(1.0 + 2.0 ** (kids - a)) - 1.0
                else:
                    node.log_pw = kids + math.log2(1.0 + 2.0 ** (a - kids)) - 1.0
        self.symbols_seen += 1
        return self.root.log_pw - before

    def predict_weights(self, context: Sequence[int]) -> list[float]:
        """Q(. | past) as a plain list; the hot path behind :meth:`predict`."""
        if len(context) != self.depth:
            self._check_context(context)
        path = self._path(context, create=False)
        m = self.m
        half_m = self._half_m
        if len(path) == self.depth + 1:
            leaf = path[-1]
            denom = leaf.total + half_m
            pmf = [(c + 0.5) / denom for c in leaf.counts]
            inner = path[:-1]
        else:
            # the path ends in an unvisited subtree
            pmf = self._uniform
            inner = path
        for node in reversed(inner):
            kids = 0.0
            if node.children is not None:
                for c in node.children:
                    if c is not None:
                        kids += c.log_pw
            w = _mix_weight(node.log_pe - kids)
            denom = node.total + half_m
            v = 1.0 - w
            pmf = [w * (c + 0.5) / denom + v * p for c, p in zip(node.counts, pmf)]
        return pmf

    def predict(self, context: Sequence[int]) -> Pmf:
        return Pmf(self.alphabet, np.array(self.predict_weights(context)))

    def assignment_logprob(self) -> LogProb:
        """log2 Q(x^n) of everything absorbed so far."""
        return self.root.log_pw

    def copy(self) -> "ContextTree":
        return copy.deepcopy(self)

    def nodes(self) -> Iterator[tuple[tuple[int, ...], ContextTreeNode]]:
        """Depth-first (path, node) pairs in lexicographic path order."""
        stack: list[tuple[tuple[int, ...], ContextTreeNode]] = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            if node.children is not None:
                for sym in range(self.m - 1, -1, -1):
                    child = node.children[sym]
                    if child is not None:
                        stack.append((path + (sym,), child))

    def dump(self) -> str:
        """Deterministic text dump: ``path counts log_pe log_pw`` per node.

        The path lists context symbols most recent first; the root is ``-``.
        """
        lines = [f"# ctw depth={self.depth} alphabet={self.m} symbols_seen={self.symbols_seen}"]
        for path, node in self.nodes():
            name = "".join(str(s) if s < 10 else f"<{s}>" for s in path) or "-"
            counts = ",".join(str(c) for c in node.counts)
            lines.append(f"{name} {counts} {node.log_pe:.12f} {node.log_pw:.12f}")
        return "\n".join(lines) + "\n"

    def node_at(self, path: Sequence[int]) -> ContextTreeNode | None:
        node: ContextTreeNode | None = self.root
        for sym in path:
            if node is None or node.children is None:
                return None
            node = node.children[sym]
        return node


def contexts(seq: Sequence[int], depth: int, i: int) -> list[int]:
    """The ``depth`` symbols before position ``i``, most recent first."""
    if i < depth:
        raise ValueError(f"position {i} has fewer than {depth} predecessors")
    return [seq[i - k] for k in range(1, depth + 1)]


def fit(seq: SymbolSequence | Sequence[int], depth: int, alphabet: int | None = None,
        pad: bool = False) -> ContextTree:
    """Build a tree over a whole sequence.

    The first ``depth`` symbols serve as initial context and are not coded
    unless ``pad`` is set, in which case the history is padded with symbol 0.
    """
    if isinstance(seq, SymbolSequence):
        alphabet = seq.alphabet.size if alphabet is None else alphabet
        data = seq.tolist()
    else:
        data = list(seq)
        if alphabet is None:
            alphabet = max(2, max(data, default=0) + 1)
    tree = ContextTree(depth, alphabet)
    if pad:
        data = [0] * depth + data
    for i in range(depth, len(data)):
        tree.update(data[i], data[i - depth:i][::-1])
    return tree


@dataclass
class MixtureAssignment:
    """Per-step mixture ``a_n * uniform + (1 - a_n) * base`` (default ``a_n = 1/n``)."""

    base: ContextTree
    schedule: Callable[[int], float] = lambda n: 1.0 / n

    def weight(self, n: int) -> float:
        if n < 1:
            raise ValueError("mixture step index starts at 1")
        a = float(self.schedule(n))
        if not 0.0 < a <= 1.0:
            raise ValueError(f"mixing weight a_n={a} outside (0, 1]")
        return a


def mixture_predict(mix: MixtureAssignment, context: Sequence[int], n: int) -> Pmf:
    a = mix.weight(n)
    base = mix.base.predict_weights(context)
    u = a / mix.base.m
    return Pmf(mix.base.alphabet, np.array([u + (1.0 - a) * p for p in base]))
