"""delta-GLMB filter recursion.

Prediction expands each hypothesis over survival subsets and birth label
subsets; the update expands each hypothesis over ranked association maps.
All weight arithmetic runs in the log domain.  Hypotheses that end up
with the same label set and the same per-label spatial densities (same
mixture provenance, or numerically indistinguishable after their Kalman
chains converged) are merged by summing weights.
"""

import math
from dataclasses import dataclass

import numpy as np

from .assignment import ranked_assignments
from .densities import (DglmbDensity, Hypothesis, lmb_to_dglmb,
                        top_weighted_subsets)
from .errors import NumericalError, UsageError
from .gaussian import gm_kalman_update_log, gm_predict, mahalanobis_sq


@dataclass(eq=False)
class UpdateOutput:
    """Posterior density plus association bookkeeping.

    ``labels`` fixes the row order of ``assoc_marginals``; entry (i, j)
    is the posterior probability that label i exists and generated
    measurement j.
    """

    posterior: DglmbDensity
    assoc_marginals: np.ndarray
    labels: tuple


def _logsumexp(values):
    values = np.asarray(values, dtype=float)
    top = np.max(values)
    if not np.isfinite(top):
        return float(top)
    return float(top + np.log(np.sum(np.exp(values - top))))


def _spatial_key(labels, spatial):
    return (labels, tuple(spatial[lab].uid for lab in labels))


def _dedup(entries):
    """Merge entries with identical label sets and spatial provenance.

    ``entries`` are tuples ``(labels, log_w, spatial, extra)``; weights of
    merged entries add up, the first occurrence keeps its ``extra``.
    """
    merged = {}
    order = []
    for labels, log_w, spatial, extra in entries:
        key = _spatial_key(labels, spatial)
        if key in merged:
            prev = merged[key]
            merged[key] = (labels, np.logaddexp(prev[1], log_w), spatial, prev[3])
        else:
            merged[key] = (labels, log_w, spatial, extra)
            order.append(key)
    return [merged[key] for key in order]


_CONSOLIDATE_ATOL = 1e-2


def _signature(labels, spatial):
    """Flat vector of all component weights, means and covariances, in
    label then component order."""
    parts = []
    for lab in labels:
        for c in spatial[lab].components:
            parts.append((c.weight,))
            parts.append(c.mean)
            parts.append(c.covariance.ravel())
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)


def _consolidate(entries, atol=None):
    """Merge entries whose label sets match and whose spatial densities
    coincide within ``atol`` elementwise.

    Association histories whose Kalman chains have converged are one
    hypothesis for every future purpose; keeping them apart only burns
    cap slots that should hold genuinely distinct alternatives.  The
    heaviest entry of a cluster is the representative.
    """
    if atol is None:
        atol = _CONSOLIDATE_ATOL
    entries = sorted(entries, key=lambda e: (-(e[1]), e[0]))
    kept = []
    buckets = {}
    for labels, log_w, spatial, extra in entries:
        sig = _signature(labels, spatial)
        key = (labels, sig.size)
        bucket = buckets.get(key)
        if bucket is None:
            bucket = buckets[key] = [np.empty((8, sig.size)), 0, []]
        buf, count, indices = bucket
        hit = -1
        if count:
            close = np.abs(buf[:count] - sig).max(axis=1) <= atol \
                if sig.size else np.ones(count, dtype=bool)
            where = np.flatnonzero(close)
            if where.size:
                hit = int(where[0])
        if hit >= 0:
            idx = indices[hit]
            prev = kept[idx]
            kept[idx] = (labels, np.logaddexp(prev[1], log_w), prev[2],
                         prev[3])
            continue
        if count == buf.shape[0]:
            bucket[0] = buf = np.vstack([buf, np.empty_like(buf)])
        buf[count] = sig
        bucket[1] = count + 1
        indices.append(len(kept))
        kept.append((labels, log_w, spatial, extra))
    return kept


def _finalize(entries, label_space, cap):
    """Normalize, cap and renormalize log-weighted hypothesis entries."""
    entries = [e for e in _dedup(entries) if np.isfinite(e[1])]
    if not entries:
        raise NumericalError("all hypothesis weights vanished",
                             {"hypotheses": 0})
    total = _logsumexp([e[1] for e in entries])
    if not np.isfinite(total):
        raise NumericalError("all hypothesis weights vanished",
                             {"hypotheses": len(entries)})
    if cap is not None:
        entries = _consolidate(entries)
    # Sort by weight, breaking ties by label set for reproducibility.
    entries.sort(key=lambda e: (-(e[1]), e[0]))
    if cap is not None:
        entries = entries[: int(cap)]
    log_ws = np.array([e[1] for e in entries])
    w = np.exp(log_ws - _logsumexp(log_ws))
    hyps = [Hypothesis(e[0], float(wi), e[2]) for e, wi in zip(entries, w)]
    return DglmbDensity(label_space, hyps), [e[3] for e in entries], w


def _per_hypothesis_quota(weights, cap):
    if cap is None:
        return [None] * len(weights)
    return [int(math.ceil(cap * w)) + 1 for w in weights]


def dglmb_predict(d, motion, birth, cap=None):
    """Predict a delta-GLMB density one scan ahead.

    Each hypothesis spawns children over subsets of surviving labels
    (weight factor ``p_S**|L| (1-p_S)**(|I|-|L|)``) crossed with subsets
    of the birth LMB's labels.  Spatial densities of survivors are
    Kalman-predicted; birth labels carry their birth mixtures verbatim.
    ``cap`` bounds the number of retained children.
    """
    birth_labels = set(birth.labels()) if birth is not None else set()
    if birth_labels & set(d.label_space):
        raise UsageError("birth labels collide with existing label space")
    p_s = motion.survival_prob
    d = d.normalized()

    predicted = {}

    def predict_gm(gm):
        if gm.uid not in predicted:
            predicted[gm.uid] = gm_predict(gm, motion)
        return predicted[gm.uid]

    if birth is not None and len(birth):
        birth_d = lmb_to_dglmb(birth, cap)
        birth_parts = [(h.labels, math.log(h.weight) if h.weight > 0 else -np.inf,
                        h.spatial) for h in birth_d.hypotheses]
    else:
        birth_parts = [((), 0.0, {})]

    quotas = _per_hypothesis_quota([h.weight for h in d.hypotheses], cap)
    entries = []
    for hyp, quota in zip(d.hypotheses, quotas):
        labels = hyp.labels
        log_w = math.log(hyp.weight) if hyp.weight > 0 else -np.inf
        if p_s >= 1.0:
            subsets = [(tuple(range(len(labels))), 0.0)]
        elif p_s <= 0.0:
            subsets = [((), 0.0)]
        else:
            lo = math.log(p_s) - math.log1p(-p_s)
            # top_weighted_subsets reports weights relative to the best
            # subset; shift back to absolute log p_S**|L| (1-p_S)**(|I|-|L|).
            offset = len(labels) * (math.log1p(-p_s) + max(lo, 0.0))
            subsets = [(s, lw + offset) for s, lw in
                       top_weighted_subsets([lo] * len(labels), quota)]
        for subset, log_surv in subsets:
            kept = tuple(labels[i] for i in subset)
            spatial_s = {lab: predict_gm(hyp.spatial[lab]) for lab in kept}
            for b_labels, log_b, b_spatial in birth_parts:
                spatial = dict(spatial_s)
                spatial.update(b_spatial)
                entries.append((tuple(sorted(kept + b_labels)),
                                log_w + log_surv + log_b, spatial, None))
    label_space = tuple(sorted(set(d.label_space) | birth_labels))
    posterior, _, _ = _finalize(entries, label_space, cap)
    return posterior


def dglmb_update(d, measurements, sensor, cap=None, gate_sq=None,
                 method="auto"):
    """Measurement-update a delta-GLMB density.

    Per hypothesis an association cost matrix is built from the log
    factors: miss ``1 - p_D``, assignment ``p_D g(z|track) / kappa(z)``;
    pairs outside the ``gate_sq`` Mahalanobis gate are forbidden.  Ranked
    assignments expand each hypothesis into children whose weights are
    globally renormalized; ``cap`` keeps the heaviest children.

    Returns an :class:`UpdateOutput` carrying the posterior, the
    track-to-measurement association marginals of the retained children
    and the label row order.
    """
    d = d.normalized()
    Z = [np.asarray(z, dtype=float).reshape(-1) for z in measurements]
    m = len(Z)
    log_pd = math.log(sensor.detection_prob) if sensor.detection_prob > 0 \
        else -np.inf
    log_qd = math.log1p(-sensor.detection_prob) \
        if sensor.detection_prob < 1.0 else -np.inf
    log_kappa = sensor.log_clutter()

    cache = {}

    def measurement_factor(gm, j):
        # (posterior mixture, log eta) for assigning measurement j.
        key = (gm.uid, j)
        if key not in cache:
            if gate_sq is not None and mahalanobis_sq(Z[j], gm, sensor) >= gate_sq:
                cache[key] = (None, -np.inf)
            else:
                post, log_lik = gm_kalman_update_log(gm, Z[j], sensor)
                cache[key] = (post, log_pd + log_lik - log_kappa)
        return cache[key]

    quotas = _per_hypothesis_quota([h.weight for h in d.hypotheses], cap)
    entries = []
    for hyp, quota in zip(d.hypotheses, quotas):
        labels = hyp.labels
        n = len(labels)
        log_w = math.log(hyp.weight) if hyp.weight > 0 else -np.inf
        cost = np.full((n, m + n), np.inf)
        for i, lab in enumerate(labels):
            gm = hyp.spatial[lab]
            for j in range(m):
                _, log_eta = measurement_factor(gm, j)
                cost[i, j] = -log_eta
            cost[i, m + i] = -log_qd
        k_best = quota if quota is not None else None
        if k_best is None:
            # Uncapped: enumerate every association map.
            maps = ranked_assignments(cost, _assignment_count(n, m),
                                      method="enumerate")
        else:
            maps = ranked_assignments(cost, k_best, method=method)
        for theta, score in maps:
            spatial = {}
            for i, lab in enumerate(labels):
                if theta[i] == 0:
                    spatial[lab] = hyp.spatial[lab]
                else:
                    spatial[lab] = cache[(hyp.spatial[lab].uid, theta[i] - 1)][0]
            entries.append((labels, log_w - score, spatial,
                            dict(zip(labels, theta))))
    posterior, thetas, w = _finalize(entries, d.label_space, cap)
    marginals = np.zeros((len(d.label_space), m))
    row = {lab: i for i, lab in enumerate(d.label_space)}
    for hyp, theta, wi in zip(posterior.hypotheses, thetas, w):
        for lab in hyp.labels:
            j = theta[lab]
            if j > 0:
                marginals[row[lab], j - 1] += wi
    return UpdateOutput(posterior, marginals, d.label_space)


def _assignment_count(n, m):
    total = 0
    for k in range(min(n, m) + 1):
        total += (math.comb(n, k) * math.perm(m, k))
    return total


def dglmb_prune(d, weight_threshold, cap):
    """Drop hypotheses at or below ``weight_threshold``, keep the ``cap``
    heaviest, renormalize.  The heaviest hypothesis always survives."""
    hyps = sorted(d.hypotheses, key=lambda h: (-h.weight, h.labels))
    kept = [h for h in hyps if h.weight > weight_threshold]
    if not kept:
        kept = hyps[:1]
    if cap is not None:
        kept = kept[: int(cap)]
    tot = sum(h.weight for h in kept)
    return DglmbDensity(
        d.label_space,
        [Hypothesis(h.labels, h.weight / tot, h.spatial) for h in kept])
