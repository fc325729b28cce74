"""delta-GLMB prediction, update, and pruning against brute-force oracles."""

import numpy as np
import pytest

from almbtrack import (DglmbDensity, Hypothesis, Label, LmbDensity,
                       SensorModel, Track, UsageError, dglmb_predict,
                       dglmb_prune, dglmb_update, existence_from_dglmb,
                       gm_kalman_update, lmb_to_dglmb)
from almbtrack.gaussian import MotionModel

from conftest import cv_motion, scalar_sensor, single
from oracles import brute_dglmb_update, random_lmb_instance

L0 = Label(0, 0)
LB = Label(1, 0)


def one_track_density(existence=1.0, mean=(0.0,), cov=((1.0,),)):
    gm = single(mean, cov)
    if existence >= 1.0:
        return DglmbDensity((L0,), [Hypothesis((L0,), 1.0, {L0: gm})])
    return lmb_to_dglmb(LmbDensity({L0: Track(L0, existence, gm)}))


def hyp_map(d):
    out = {}
    for h in d.hypotheses:
        out[h.labels] = out.get(h.labels, 0.0) + h.weight
    return out


def test_predict_survival_split():
    motion = MotionModel(np.eye(1), np.zeros((1, 1)), 0.99)
    out = dglmb_predict(one_track_density(), motion, None)
    w = hyp_map(out)
    assert w[()] == pytest.approx(0.01, abs=1e-12)
    assert w[(L0,)] == pytest.approx(0.99, abs=1e-12)


def test_predict_unit_survival_identity_weights():
    motion = MotionModel(np.eye(1), np.zeros((1, 1)), 1.0)
    prior = one_track_density(existence=0.5)
    out = dglmb_predict(prior, motion, None)
    assert hyp_map(out) == pytest.approx(hyp_map(prior))


def test_predict_birth_from_empty():
    motion = MotionModel(np.eye(1), np.zeros((1, 1)), 0.99)
    empty = DglmbDensity((), [Hypothesis((), 1.0, {})])
    birth = LmbDensity({LB: Track(LB, 0.05, single([2.0], [[9.0]]))})
    out = dglmb_predict(empty, motion, birth)
    w = hyp_map(out)
    assert w[()] == pytest.approx(0.95, abs=1e-12)
    assert w[(LB,)] == pytest.approx(0.05, abs=1e-12)
    born = [h for h in out.hypotheses if h.labels == (LB,)][0]
    np.testing.assert_allclose(born.spatial[LB].components[0].mean, [2.0])


def test_predict_survival_crossed_with_birth():
    motion = MotionModel(np.eye(1), np.zeros((1, 1)), 0.99)
    prior = one_track_density(existence=0.5)
    birth = LmbDensity({LB: Track(LB, 0.1, single([0.0], [[1.0]]))})
    out = dglmb_predict(prior, motion, birth)
    w = hyp_map(out)
    assert w[()] == pytest.approx(0.5 * 0.9 + 0.5 * 0.01 * 0.9, abs=1e-12)
    assert w[(LB,)] == pytest.approx(0.5 * 0.1 + 0.5 * 0.01 * 0.1, abs=1e-12)
    assert w[(L0,)] == pytest.approx(0.5 * 0.99 * 0.9, abs=1e-12)
    assert w[(L0, LB)] == pytest.approx(0.5 * 0.99 * 0.1, abs=1e-12)


def test_predict_applies_kalman_prediction():
    motion = cv_motion(dt=1.0, accel_var=0.0, survival=1.0)
    gm = single([0.0, 0.0, 3.0, -1.0], np.eye(4))
    d = DglmbDensity((L0,), [Hypothesis((L0,), 1.0, {L0: gm})])
    out = dglmb_predict(d, motion, None)
    np.testing.assert_allclose(out.hypotheses[0].spatial[L0].components[0].mean,
                               [3.0, -1.0, 3.0, -1.0])


def test_predict_label_collision_raises():
    motion = MotionModel(np.eye(1), np.zeros((1, 1)), 0.99)
    birth = LmbDensity({L0: Track(L0, 0.05, single([0.0], [[1.0]]))})
    with pytest.raises(UsageError):
        dglmb_predict(one_track_density(), motion, birth)


def test_update_empty_measurement_set():
    # With no measurements every label multiplies by (1 - p_D).
    sensor = scalar_sensor(1.0, detection_prob=0.5, clutter_density=1e-3)
    prior = lmb_to_dglmb(LmbDensity({
        L0: Track(L0, 0.3, single([0.0], [[1.0]])),
        LB: Track(LB, 0.8, single([5.0], [[1.0]])),
    }))
    out = dglmb_update(prior, [], sensor)
    raw = {h.labels: h.weight * 0.5 ** len(h.labels)
           for h in prior.hypotheses}
    tot = sum(raw.values())
    got = hyp_map(out.posterior)
    for key, val in raw.items():
        assert got[key] == pytest.approx(val / tot, abs=1e-12)
    assert out.assoc_marginals.shape == (2, 0)


def test_update_miss_and_hit_thirds():
    # One certain track, one zero-innovation measurement, p_D = 1/2 and
    # clutter density chosen so p_D g / kappa = 1: posterior splits 1/3
    # miss, 2/3 hit.
    g = 1.0 / np.sqrt(4.0 * np.pi)
    sensor = scalar_sensor(1.0, detection_prob=0.5, clutter_density=0.5 * g)
    out = dglmb_update(one_track_density(), [[0.0]], sensor)
    weights = sorted(h.weight for h in out.posterior.hypotheses)
    np.testing.assert_allclose(weights, [1.0 / 3.0, 2.0 / 3.0], atol=1e-12)
    np.testing.assert_allclose(out.assoc_marginals, [[2.0 / 3.0]], atol=1e-12)
    assert existence_from_dglmb(out.posterior, L0) == pytest.approx(1.0)
    # The hit branch carries the Kalman posterior (variance 1/2).
    hit = max(out.posterior.hypotheses, key=lambda h: h.weight)
    np.testing.assert_allclose(hit.spatial[L0].components[0].covariance,
                               [[0.5]], atol=1e-12)


def test_update_certain_detection_no_clutter():
    sensor = scalar_sensor(1.0, detection_prob=1.0, clutter_density=0.0)
    out = dglmb_update(one_track_density(), [[2.0]], sensor)
    assert len(out.posterior.hypotheses) == 1
    hyp = out.posterior.hypotheses[0]
    assert hyp.weight == pytest.approx(1.0)
    expected, _ = gm_kalman_update(single([0.0], [[1.0]]), [2.0],
                                   scalar_sensor(1.0))
    np.testing.assert_allclose(hyp.spatial[L0].components[0].mean,
                               expected.components[0].mean, atol=1e-12)


def test_update_gated_out_measurement_is_pure_clutter():
    sensor = scalar_sensor(1.0, detection_prob=0.5, clutter_density=1e-2)
    prior = one_track_density(existence=0.5)
    far = dglmb_update(prior, [[1000.0]], sensor, gate_sq=9.0)
    none = dglmb_update(prior, [], sensor)
    assert hyp_map(far.posterior) == pytest.approx(hyp_map(none.posterior),
                                                   abs=1e-12)
    assert float(far.assoc_marginals.sum()) == pytest.approx(0.0, abs=1e-12)


def test_update_matches_brute_force(rng):
    sensor = SensorModel(np.eye(2), 4.0 * np.eye(2), 0.9, 1e-3)
    for trial in range(25):
        lmb, Z = random_lmb_instance(rng, max_tracks=3, max_measurements=3)
        prior = lmb_to_dglmb(lmb)
        out = dglmb_update(prior, Z, sensor)
        weights, existence, marginals, means = brute_dglmb_update(
            prior, Z, sensor)
        got = np.sort(out.posterior.weights())
        np.testing.assert_allclose(got, weights, atol=1e-9)
        labels = sorted(prior.label_space)
        for i, lab in enumerate(labels):
            assert existence_from_dglmb(out.posterior, lab) == pytest.approx(
                existence[lab], abs=1e-9)
        row = {lab: i for i, lab in enumerate(out.labels)}
        for i, lab in enumerate(labels):
            np.testing.assert_allclose(out.assoc_marginals[row[lab]],
                                       marginals[i], atol=1e-9)


def test_update_marginals_bounded_by_existence(rng):
    sensor = SensorModel(np.eye(2), 4.0 * np.eye(2), 0.85, 1e-3)
    for _ in range(10):
        lmb, Z = random_lmb_instance(rng)
        prior = lmb_to_dglmb(lmb)
        out = dglmb_update(prior, Z, sensor)
        for i, lab in enumerate(out.labels):
            r = existence_from_dglmb(out.posterior, lab)
            assert float(out.assoc_marginals[i].sum()) <= r + 1e-10


def test_prune_threshold_and_cap():
    g = single([0.0], [[1.0]])
    d = DglmbDensity((L0,), [
        Hypothesis((), 0.7, {}),
        Hypothesis((L0,), 0.25, {L0: g}),
        Hypothesis((L0,), 0.05, {L0: g}),
    ])
    out = dglmb_prune(d, 0.1, 10)
    w = sorted(h.weight for h in out.hypotheses)
    np.testing.assert_allclose(w, [0.25 / 0.95, 0.7 / 0.95], atol=1e-12)
    out = dglmb_prune(d, 0.0, 1)
    assert len(out.hypotheses) == 1
    assert out.hypotheses[0].weight == pytest.approx(1.0)
    assert out.hypotheses[0].labels == ()


def test_prune_keeps_heaviest_when_all_below():
    g = single([0.0], [[1.0]])
    d = DglmbDensity((L0,), [Hypothesis((L0,), 1.0, {L0: g})])
    out = dglmb_prune(d, 2.0, 10)
    assert len(out.hypotheses) == 1
    assert out.hypotheses[0].weight == pytest.approx(1.0)


def test_capped_update_keeps_best_assignments(rng):
    # Capped output weights must be the top of the uncapped ranking,
    # renormalized.
    sensor = SensorModel(np.eye(2), 4.0 * np.eye(2), 0.9, 1e-3)
    lmb, Z = random_lmb_instance(rng, max_tracks=2, max_measurements=3)
    prior = lmb_to_dglmb(lmb)
    full = dglmb_update(prior, Z, sensor)
    capped = dglmb_update(prior, Z, sensor, cap=4)
    w_full = np.sort(full.posterior.weights())[::-1]
    w_capped = np.sort(capped.posterior.weights())[::-1]
    k = len(w_capped)
    np.testing.assert_allclose(w_capped, w_full[:k] / w_full[:k].sum(),
                               atol=1e-9)
