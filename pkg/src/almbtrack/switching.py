"""Representation-switching criteria and the switching automaton.

Two scalar criteria compare the exact delta-GLMB update output with its
LMB approximation: the Kullback-Leibler divergence between the two
cardinality distributions, and the entropy of the track-to-measurement
association marginals.  A group switches from LMB to delta-GLMB
representation when either criterion exceeds its threshold and switches
back only when the criterion that triggered the switch falls to the
threshold or below.  All information measures use natural logarithms.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .densities import dglmb_cardinality, dglmb_to_lmb, lmb_cardinality
from .errors import UsageError


class Mode(enum.Enum):
    LMB = "lmb"
    DGLMB = "dglmb"


class Trigger(enum.Enum):
    NONE = "none"
    KL = "kl"
    ENTROPY = "entropy"
    # Pinned groups never consult the automaton; the tag records why a
    # group is held in delta-GLMB form.
    PINNED = "pinned"


@dataclass(frozen=True)
class RepresentationState:
    """Automaton state: current representation and what triggered it."""

    mode: Mode = Mode.LMB
    trigger: Trigger = Trigger.NONE

    def __post_init__(self):
        if (self.mode is Mode.LMB) != (self.trigger is Trigger.NONE):
            raise UsageError("LMB mode pairs with trigger NONE only")


@dataclass(frozen=True)
class CriteriaThresholds:
    kl: float = 1e-4
    entropy: float = 0.5


def kl_divergence(p, q):
    """Kullback-Leibler divergence in nats between two pmfs.

    Shorter vectors are zero-padded.  Terms with ``p_i = 0`` contribute
    nothing; any ``p_i > 0`` with ``q_i = 0`` makes the divergence
    infinite.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    size = max(p.size, q.size)
    p = np.pad(p, (0, size - p.size))
    q = np.pad(q, (0, size - q.size))
    mask = p > 0.0
    if np.any(q[mask] <= 0.0):
        return float(np.inf)
    # Rounding can leave a tiny negative sum when p ~ q; KL is >= 0.
    return max(0.0, float(np.sum(p[mask] * np.log(p[mask] / q[mask]))))


def kl_criterion(full):
    """KL divergence from a delta-GLMB posterior's cardinality pmf to the
    cardinality pmf of its LMB approximation."""
    rho_exact = dglmb_cardinality(full)
    rho_approx = lmb_cardinality(dglmb_to_lmb(full))
    # An existence within one ulp of 1 zeroes cells of the product
    # cardinality outright while the exact side keeps matching
    # sub-precision mass, which would read as a support mismatch and pin
    # the group in delta-GLMB form; mass that small decides nothing.
    rho_exact = np.where(rho_exact > 1e-15, rho_exact, 0.0)
    return kl_divergence(rho_exact, rho_approx)


def association_entropy(marginals):
    """Entropy (nats) of track-to-measurement association marginals.

    Sums ``-r log r`` over all track/measurement entries; zero entries
    contribute nothing, and a measurement-free scan yields zero.
    """
    r = np.asarray(marginals, dtype=float)
    if r.size == 0:
        return 0.0
    mask = r > 0.0
    # + 0.0 turns the -0.0 of an all-certain matrix into plain zero.
    return float(-np.sum(r[mask] * np.log(r[mask])) + 0.0)


def decide_switch(state, kl, entropy, thresholds):
    """Advance the switching automaton by one update.

    In LMB mode the KL criterion is consulted first, then entropy; the
    first one above its threshold triggers the switch to delta-GLMB.  In
    delta-GLMB mode only the criterion that caused the switch is
    consulted, and the group returns to LMB once it is at or below its
    threshold.
    """
    if state.mode is Mode.LMB:
        if kl > thresholds.kl:
            return RepresentationState(Mode.DGLMB, Trigger.KL)
        if entropy > thresholds.entropy:
            return RepresentationState(Mode.DGLMB, Trigger.ENTROPY)
        return state
    if state.trigger is Trigger.KL:
        if kl <= thresholds.kl:
            return RepresentationState(Mode.LMB, Trigger.NONE)
        return state
    if state.trigger is Trigger.ENTROPY:
        if entropy <= thresholds.entropy:
            return RepresentationState(Mode.LMB, Trigger.NONE)
        return state
    return state
