"""Representation-switching criteria and the mode automaton."""

import numpy as np
import pytest

from almbtrack import (CriteriaThresholds, DglmbDensity, Hypothesis, Label,
                       Mode, RepresentationState, Trigger,
                       association_entropy, decide_switch, kl_criterion,
                       kl_divergence, lmb_to_dglmb)
from almbtrack.lmb import lmb_update
from almbtrack import SensorModel

from conftest import single
from oracles import random_lmb_instance, switch_cases

L1, L2 = Label(0, 0), Label(0, 1)


def test_kl_identical_is_zero():
    p = np.array([0.2, 0.5, 0.3])
    assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-15)


def test_kl_nonnegative_random(rng):
    for _ in range(50):
        n = int(rng.integers(2, 8))
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n))
        assert kl_divergence(p, q) >= -1e-12


def test_kl_support_mismatch_is_infinite():
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == np.inf


def test_kl_pads_shorter_distribution():
    # Same distribution written with trailing zeros.
    assert kl_divergence([0.3, 0.7], [0.3, 0.7, 0.0]) == pytest.approx(0.0)
    assert kl_divergence([0.3, 0.7, 0.0], [0.3, 0.7]) == pytest.approx(0.0)


def test_kl_known_value():
    val = kl_divergence([0.75, 0.25], [0.5, 0.5])
    expected = 0.75 * np.log(1.5) + 0.25 * np.log(0.5)
    assert val == pytest.approx(expected, abs=1e-12)


def test_criterion_correlated_pair_is_ln2():
    # Perfectly correlated pair: cardinality [1/2, 0, 1/2]; the LMB
    # approximation with r = 1/2 each gives [1/4, 1/2, 1/4]; KL = ln 2.
    g = single([0.0], [[1.0]])
    d = DglmbDensity((L1, L2), [
        Hypothesis((), 0.5, {}),
        Hypothesis((L1, L2), 0.5, {L1: g, L2: g}),
    ])
    assert kl_criterion(d) == pytest.approx(np.log(2.0), abs=1e-12)


def test_criterion_zero_for_independent_density(rng):
    # An LMB expanded to delta-GLMB form carries no extra cardinality
    # information, so the criterion must vanish.
    for _ in range(50):
        lmb, _ = random_lmb_instance(rng, max_tracks=4, max_measurements=0)
        assert kl_criterion(lmb_to_dglmb(lmb)) < 1e-10


def test_criterion_positive_after_contested_update(rng):
    # Two overlapping tracks fighting for one measurement leave real
    # cardinality correlation behind.
    from almbtrack import LmbDensity, Track
    lmb = LmbDensity({
        L1: Track(L1, 0.5, single([0.0, 0.0], np.eye(2))),
        L2: Track(L2, 0.5, single([0.5, 0.0], np.eye(2))),
    })
    sensor = SensorModel(np.eye(2), np.eye(2), 0.9, 1e-4)
    out = lmb_update(lmb, [[0.2, 0.0]], sensor)
    assert kl_criterion(out.full.posterior) > 1e-4


def test_entropy_certain_association_is_zero():
    assert association_entropy(np.array([[1.0], [0.0]])) == pytest.approx(
        0.0, abs=1e-12)


def test_entropy_even_split_is_ln2():
    assert association_entropy(np.array([[0.5], [0.5]])) == pytest.approx(
        np.log(2.0), abs=1e-12)


def test_entropy_mild_split_value():
    got = association_entropy(np.array([[0.98], [0.02]]))
    expected = -0.98 * np.log(0.98) - 0.02 * np.log(0.02)
    assert got == pytest.approx(expected, abs=1e-12)


def test_entropy_sums_over_columns():
    m = np.array([[0.5, 0.3], [0.5, 0.7]])
    expected = (-0.5 * np.log(0.5) * 2
                - 0.3 * np.log(0.3) - 0.7 * np.log(0.7))
    assert association_entropy(m) == pytest.approx(expected, abs=1e-12)


def test_entropy_permutation_invariant(rng):
    m = rng.uniform(0.01, 0.5, (4, 3))
    perm = rng.permutation(4)
    assert association_entropy(m[perm]) == pytest.approx(
        association_entropy(m), abs=1e-12)


def test_entropy_empty_matrix_is_zero():
    assert association_entropy(np.zeros((0, 0))) == 0.0
    assert association_entropy(np.zeros((3, 0))) == 0.0


def test_switch_automaton_exhaustive():
    thresholds = CriteriaThresholds(kl=1e-4, entropy=0.5)
    for state, kl, entropy, expected in switch_cases(thresholds):
        got = decide_switch(state, kl, entropy, thresholds)
        assert got.mode is expected.mode and got.trigger is expected.trigger, \
            (state, kl, entropy, got, expected)


def test_switch_kl_checked_before_entropy():
    thresholds = CriteriaThresholds(kl=1e-4, entropy=0.5)
    state = RepresentationState(Mode.LMB, Trigger.NONE)
    out = decide_switch(state, 1.0, 1.0, thresholds)
    assert out.trigger is Trigger.KL


def test_switch_back_only_on_own_criterion():
    thresholds = CriteriaThresholds(kl=1e-4, entropy=0.5)
    # KL-triggered group ignores entropy staying high.
    state = RepresentationState(Mode.DGLMB, Trigger.KL)
    out = decide_switch(state, 0.0, 10.0, thresholds)
    assert out.mode is Mode.LMB
    # Entropy-triggered group ignores KL staying high.
    state = RepresentationState(Mode.DGLMB, Trigger.ENTROPY)
    out = decide_switch(state, 10.0, 0.0, thresholds)
    assert out.mode is Mode.LMB


def test_lmb_state_never_carries_a_trigger():
    thresholds = CriteriaThresholds()
    state = RepresentationState(Mode.DGLMB, Trigger.KL)
    back = decide_switch(state, 0.0, 0.0, thresholds)
    assert back.mode is Mode.LMB and back.trigger is Trigger.NONE
