"""Shared test helpers: an independent, non-sequential CTW oracle."""
from __future__ import annotations

import math
from collections import defaultdict

import numpy as np
import pytest


def kt_block_log2(counts) -> float:
    """log2 P_e via the closed Gamma-function form; no sequential updates."""
    m = len(counts)
    n = sum(counts)
    v = math.lgamma(m / 2) - math.lgamma(n + m / 2)
    v += sum(math.lgamma(c + 0.5) - math.lgamma(0.5) for c in counts)
    return v / math.log(2)


def brute_ctw_log2(seq, depth: int, m: int) -> float:
    """log2 of the CTW weighted probability at the root, from whole-sequence counts.

    The first ``depth`` symbols are context only. Counts are gathered for every
    context suffix up front, then P_w is evaluated bottom-up from its
    definition.
    """
    counts: dict[tuple, list[int]] = defaultdict(lambda: [0] * m)
    for i in range(depth, len(seq)):
        ctx = tuple(seq[i - k] for k in range(1, depth + 1))
        for level in range(depth + 1):
            counts[ctx[:level]][seq[i]] += 1

    def pw(path: tuple) -> float:
        pe = kt_block_log2(counts[path]) if path in counts else 0.0
        if len(path) == depth:
            return pe
        kids = sum(pw(path + (a,)) for a in range(m) if path + (a,) in counts)
        hi, lo = max(pe, kids), min(pe, kids)
        return hi + math.log2(1 + 2 ** (lo - hi)) - 1

    return pw(())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
