import itertools
import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctwdi.oracle import (JointProcessModel, binary_entropy, coupled_bsc_rates,
                          ctw_redundancy_bound, exact_di, joint_sequence_pmf, markov_bsc_rate)

probs = st.floats(0.0, 0.5)


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.2) == pytest.approx(0.7219, abs=5e-5)
    with pytest.raises(ValueError):
        binary_entropy(1.1)


def test_markov_bsc_rate_values():
    assert markov_bsc_rate(0.5, 0.2) == pytest.approx(1 - binary_entropy(0.2), abs=1e-12)
    assert markov_bsc_rate(0.5, 0.2) == pytest.approx(0.2781, abs=5e-5)
    assert markov_bsc_rate(0.3, 0.5) == pytest.approx(0.0, abs=1e-12)
    assert markov_bsc_rate(0.3, 0.2) == pytest.approx(0.23611, abs=1e-5)
    for bad in ((0.0, 0.2), (0.3, 1.0)):
        with pytest.raises(ValueError):
            markov_bsc_rate(*bad)


def test_coupled_rates_values():
    r = coupled_bsc_rates(0.1, 0.2)
    assert (r.di, r.reverse_di, r.mi) == pytest.approx((0.35775, 0.10482, 0.46257), abs=1e-5)
    assert coupled_bsc_rates(0.5, 0.5) == pytest.approx((0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        coupled_bsc_rates(0.6, 0.1)


@given(probs, probs)
def test_coupled_rates_ordering(a, b):
    r = coupled_bsc_rates(a, b)
    assert r.mi >= -1e-12
    assert r.mi == pytest.approx(r.di + r.reverse_di)
    if a <= b:
        assert r.di >= r.reverse_di - 1e-12
    if a == b:
        assert r.di == r.reverse_di


def test_redundancy_bound():
    assert ctw_redundancy_bound(2, 1, 256) == pytest.approx(6.0)
    assert ctw_redundancy_bound(2, 2, 2) == pytest.approx(1.0 + 4.0)
    vals = [ctw_redundancy_bound(3, 4, n) for n in range(2, 200)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        ctw_redundancy_bound(1, 1, 10)


# --- the model -------------------------------------------------------------

def test_model_validation():
    with pytest.raises(ValueError):
        JointProcessModel(2, 2, 1, np.full(4, 0.3), np.full((4, 4), 0.25))
    with pytest.raises(ValueError):
        JointProcessModel(2, 2, 1, np.full(4, 0.25), np.full((4, 4), 0.3))
    with pytest.raises(ValueError):
        JointProcessModel(2, 2, 1, np.full(2, 0.5), np.full((4, 4), 0.25))
    with pytest.raises(ValueError):
        JointProcessModel(2, 2, 0, np.full(4, 0.25), np.full((4, 4), 0.25))


def test_stationary_start(rng):
    model = JointProcessModel.random(rng, memory=2)
    st_model = model.with_stationary_start()
    pi = st_model.initial.reshape(-1)
    assert pi @ model.transition_matrix() == pytest.approx(pi, abs=1e-12)
    # the hidden-Markov system already starts stationary
    m = JointProcessModel.markov_bsc(0.3, 0.2)
    assert m.stationary() == pytest.approx(m.initial, abs=1e-12)


def test_swap_roundtrip(rng):
    model = JointProcessModel.random(rng, x_size=2, y_size=3, memory=1)
    back = model.swapped().swapped()
    assert np.array_equal(back.kernel, model.kernel)
    assert np.array_equal(back.initial, model.initial)
    p = joint_sequence_pmf(model, 3)
    q = joint_sequence_pmf(model.swapped(), 3)
    assert np.allclose(p, q.transpose(1, 0, 3, 2, 5, 4))


def test_enumeration_guard():
    with pytest.raises(ValueError):
        exact_di(JointProcessModel.iid_pair([0.5, 0.5], [0.5, 0.5]), 13)
    with pytest.raises(ValueError):
        exact_di(JointProcessModel.iid_pair([0.5, 0.5], [0.5, 0.5]), 0)


# --- exact directed information --------------------------------------------

def _definition_di(p: np.ndarray, n: int) -> float:
    """sum_i I(X^i; Y_i | Y^{i-1}) straight from the definition, via dict marginals."""
    probs = {}
    for idx in itertools.product(*[range(s) for s in p.shape]):
        if p[idx] > 0:
            probs[idx] = p[idx]

    def H(keep):
        acc = defaultdict(float)
        for idx, v in probs.items():
            acc[tuple(idx[k] for k in keep)] += v
        return -sum(v * math.log2(v) for v in acc.values() if v > 0)

    total = 0.0
    for i in range(1, n + 1):
        xs = [2 * j for j in range(i)]
        ypast = [2 * j + 1 for j in range(i - 1)]
        yi = [2 * (i - 1) + 1]
        # I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
        total += H(xs + ypast) + H(yi + ypast) - H(xs + yi + ypast) - H(ypast)
    return total / n


def test_exact_di_matches_definition(rng):
    for _ in range(5):
        model = JointProcessModel.random(rng, memory=1)
        for n in (1, 2, 4):
            p = joint_sequence_pmf(model, n)
            assert exact_di(model, n).di == pytest.approx(_definition_di(p, n), abs=1e-12)


def test_exact_di_independent_and_copy():
    r = exact_di(JointProcessModel.iid_pair([0.3, 0.7], [0.6, 0.4]), 5)
    assert (r.di, r.reverse_di, r.mi) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
    r = exact_di(JointProcessModel.iid_pair([0.25, 0.75], [0.25, 0.75], copy=True), 4)
    assert r.di == pytest.approx(binary_entropy(0.25), abs=1e-12)
    assert r.reverse_di == pytest.approx(0.0, abs=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_conservation_laws(seed, n):
    model = JointProcessModel.random(np.random.default_rng(seed), memory=1)
    r = exact_di(model, n)
    assert r.mi == pytest.approx(r.di + r.reverse_di, abs=1e-9)
    assert r.mi == pytest.approx(r.lagged_di + r.reverse_di + r.instantaneous, abs=1e-9)
    assert -1e-12 <= r.di <= min(r.entropy_y, 1.0) + 1e-12
    assert r.reverse_di >= -1e-12 and r.instantaneous >= -1e-12


def test_closed_forms_match_enumeration():
    hidden = JointProcessModel.markov_bsc(0.3, 0.2).swapped()
    assert exact_di(hidden, 10).di == pytest.approx(markov_bsc_rate(0.3, 0.2), abs=0.02)
    r = exact_di(JointProcessModel.coupled_bsc(0.1, 0.2), 10)
    want = coupled_bsc_rates(0.1, 0.2)
    assert r.di == pytest.approx(want.di, abs=0.02)
    assert r.reverse_di == pytest.approx(want.reverse_di, abs=0.02)
    assert r.mi == pytest.approx(want.mi, abs=0.02)


def test_ternary_alphabets(rng):
    model = JointProcessModel.random(rng, x_size=3, y_size=2, memory=1)
    r = exact_di(model, 3)
    assert r.mi == pytest.approx(r.di + r.reverse_di, abs=1e-9)
    assert r.di <= 1.0 + 1e-12
