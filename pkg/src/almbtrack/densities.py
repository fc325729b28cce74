"""Labeled multi-object densities: LMB and delta-GLMB forms.

An LMB density is a set of statistically independent Bernoulli tracks,
one per label.  A delta-GLMB density is a weighted list of hypotheses;
each hypothesis fixes a label set and one spatial density per label in
that set.  The conversions between the two forms and the cardinality
distributions they induce live here.
"""

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .gaussian import GaussianMixture

# Existence probabilities of exactly one are clamped so hypothesis
# weights (products of r and 1 - r) stay finite.
_R_CLAMP = 1.0 - 1e-9


@dataclass(frozen=True, order=True)
class Label:
    """Track label: birth scan index plus a per-scan counter."""

    birth_step: int
    birth_index: int

    def __repr__(self):
        return "L(%d,%d)" % (self.birth_step, self.birth_index)


@dataclass(eq=False)
class Track:
    """Bernoulli track: existence probability and spatial mixture."""

    label: Label
    existence: float
    spatial: GaussianMixture

    def __post_init__(self):
        self.existence = float(self.existence)
        if not 0.0 <= self.existence <= 1.0:
            raise UsageError("existence probability outside [0, 1]")


@dataclass(eq=False)
class LmbDensity:
    """LMB density: tracks keyed by label."""

    tracks: dict = field(default_factory=dict)

    def __post_init__(self):
        for label, track in self.tracks.items():
            if track.label != label:
                raise UsageError("track keyed under a different label")

    def labels(self):
        return sorted(self.tracks)

    def __len__(self):
        return len(self.tracks)


@dataclass(eq=False)
class Hypothesis:
    """One delta-GLMB hypothesis: label set, weight, per-label spatials."""

    labels: tuple
    weight: float
    spatial: dict

    def __post_init__(self):
        self.labels = tuple(sorted(self.labels))
        self.weight = float(self.weight)
        if set(self.labels) != set(self.spatial):
            raise UsageError("hypothesis spatial map does not cover its labels")


@dataclass(eq=False)
class DglmbDensity:
    """delta-GLMB density: label space plus weighted hypotheses."""

    label_space: tuple
    hypotheses: list

    def __post_init__(self):
        self.label_space = tuple(sorted(self.label_space))
        space = set(self.label_space)
        for hyp in self.hypotheses:
            if not set(hyp.labels) <= space:
                raise UsageError("hypothesis uses labels outside the label space")

    def weights(self):
        return np.array([h.weight for h in self.hypotheses])

    def normalized(self):
        tot = float(self.weights().sum())
        if tot <= 0.0:
            raise UsageError("hypothesis weights sum to zero")
        return DglmbDensity(
            self.label_space,
            [Hypothesis(h.labels, h.weight / tot, h.spatial)
             for h in self.hypotheses],
        )


def top_weighted_subsets(log_odds, limit=None):
    """Enumerate subsets of ``range(len(log_odds))`` by descending
    ``sum(log_odds[i] for i in subset)``.

    Yields ``(subset_tuple, relative_log_weight)`` with the relative log
    weight of the best subset equal to zero.  ``limit`` bounds the number
    of subsets produced; ``None`` enumerates all ``2**n``.  Items with
    ``log_odds = -inf`` are never included.
    """
    finite = [(i, lo) for i, lo in enumerate(log_odds) if np.isfinite(lo)]
    best = frozenset(i for i, lo in finite if lo > 0.0)
    # Toggling item i off the best subset (or on, if it is out) costs |lo|.
    costs = sorted(((abs(lo), i) for i, lo in finite), key=lambda t: (t[0], t[1]))
    n = len(costs)
    if limit is None:
        if n >= 60:
            raise UsageError("subset enumeration without a limit needs < 60 items")
        limit = 2 ** n
    else:
        limit = min(int(limit), 2 ** n if n < 60 else int(limit))
    out = []
    seq = itertools.count()
    # Heap over toggle sets of the sorted cost list; each subset of
    # toggles is generated exactly once via extend/replace on the last
    # toggled position.
    heap = [(0.0, next(seq), -1, ())]
    while heap and len(out) < limit:
        cost, _, last, toggles = heapq.heappop(heap)
        subset = set(best)
        for t in toggles:
            i = costs[t][1]
            subset.symmetric_difference_update((i,))
        out.append((tuple(sorted(subset)), -cost))
        nxt = last + 1
        if nxt < n:
            heapq.heappush(heap, (cost + costs[nxt][0], next(seq), nxt,
                                  toggles + (nxt,)))
            if toggles:
                heapq.heappush(heap, (cost - costs[last][0] + costs[nxt][0],
                                      next(seq), nxt, toggles[:-1] + (nxt,)))
    return out


def _bernoulli_log_odds(existence):
    r = min(float(existence), _R_CLAMP)
    if r <= 0.0:
        return -np.inf, 0.0
    return math.log(r) - math.log1p(-r), math.log1p(-r)


def lmb_to_dglmb(lmb, max_hypotheses=None):
    """Expand an LMB density into the equivalent delta-GLMB density.

    Hypothesis weights follow the independent-Bernoulli product; each
    hypothesis reuses the tracks' spatial mixtures unchanged.  When
    ``max_hypotheses`` is given only the heaviest label subsets are kept
    and their weights renormalized.
    """
    labels = lmb.labels()
    log_odds, base = [], 0.0
    for label in labels:
        lo, lbase = _bernoulli_log_odds(lmb.tracks[label].existence)
        log_odds.append(lo)
        base += lbase
    subsets = top_weighted_subsets(log_odds, max_hypotheses)
    log_w = np.array([lw for _, lw in subsets])
    w = np.exp(log_w - log_w.max())
    w /= w.sum()
    hyps = []
    for (subset, _), weight in zip(subsets, w):
        chosen = tuple(labels[i] for i in subset)
        spatial = {lab: lmb.tracks[lab].spatial for lab in chosen}
        hyps.append(Hypothesis(chosen, float(weight), spatial))
    return DglmbDensity(tuple(labels), hyps)


def dglmb_to_lmb(d, normalize=True):
    """Collapse a delta-GLMB density to its best-fitting LMB density.

    Per label the existence is the summed weight of hypotheses containing
    it and the spatial density is the weight-averaged mixture of the
    per-hypothesis spatials.  Labels with zero existence are dropped.
    """
    weights = d.weights()
    tot = float(weights.sum())
    existence = {label: 0.0 for label in d.label_space}
    parts = {label: [] for label in d.label_space}
    for hyp in d.hypotheses:
        w = hyp.weight / tot if (normalize and tot > 0.0) else hyp.weight
        for label in hyp.labels:
            existence[label] += w
            parts[label].append((w, hyp.spatial[label]))
    tracks = {}
    for label in d.label_space:
        r = existence[label]
        if r <= 0.0:
            continue
        comps = []
        for w, gm in parts[label]:
            comps.extend(gm.scaled(w / (r * gm.total_weight())).components)
        tracks[label] = Track(label, min(r, 1.0), GaussianMixture(comps))
    return LmbDensity(tracks)


def lmb_cardinality(lmb):
    """Cardinality pmf of an LMB density (Bernoulli convolution)."""
    rho = np.array([1.0])
    for label in lmb.labels():
        r = lmb.tracks[label].existence
        rho = np.convolve(rho, [1.0 - r, r])
    return rho


def dglmb_cardinality(d):
    """Cardinality pmf of a delta-GLMB density (weight sums by |I|)."""
    rho = np.zeros(len(d.label_space) + 1)
    for hyp in d.hypotheses:
        rho[len(hyp.labels)] += hyp.weight
    return rho


def existence_from_dglmb(d, label):
    """Marginal existence probability of one label; zero if absent."""
    return float(sum(h.weight for h in d.hypotheses if label in h.labels))


def mean_cardinality(rho):
    """Mean of a cardinality pmf."""
    rho = np.asarray(rho, dtype=float)
    return float(np.arange(rho.size) @ rho)
