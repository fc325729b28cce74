"""Group-structured multi-object tracking pipeline.

Each scan processes statistically independent density groups through a
fixed stage order: birth injection, prediction, gating, merging of
groups that compete for measurements, measurement update with optional
representation switching, pruning, splitting of groups whose tracks no
longer interact, and track extraction.

Three policies share this pipeline: ``"lmb"`` keeps every group in LMB
form (always approximating after the exact update), ``"dglmb"`` keeps
every group in delta-GLMB form (never approximating), and ``"almb"``
switches each group's representation per the criteria automaton.
"""

from dataclasses import dataclass, field

import numpy as np

from .densities import (DglmbDensity, Hypothesis, Label, LmbDensity, Track,
                        dglmb_to_lmb, lmb_to_dglmb)
from .dglmb import _dedup, dglmb_predict, dglmb_prune, dglmb_update
from .errors import UsageError
from .gaussian import (GaussianMixture, gate_mask, gm_reduce, map_point,
                       predicted_measurement)
from .lmb import lmb_predict, lmb_update
from .switching import (CriteriaThresholds, Mode, RepresentationState,
                        Trigger, association_entropy, decide_switch,
                        kl_criterion)

_LMB_STATE = RepresentationState(Mode.LMB, Trigger.NONE)
_PINNED_STATE = RepresentationState(Mode.DGLMB, Trigger.PINNED)


@dataclass(eq=False)
class BirthEntry:
    """One static birth site: existence probability and birth mixture."""

    existence: float
    spatial: GaussianMixture


@dataclass(eq=False)
class BirthModel:
    entries: list = field(default_factory=list)


@dataclass(eq=False)
class PipelineConfig:
    """Knobs of the shared pipeline.

    ``gate_sq`` is the squared-Mahalanobis gate, ``cap`` the hypothesis
    cap of delta-GLMB densities, ``merge_cap`` the hypothesis budget when
    an LMB group is expanded during merging, ``lmb_prune`` the existence
    threshold, ``dglmb_prune`` the hypothesis weight threshold,
    ``extraction`` the existence threshold for reporting tracks, and the
    ``gm_*`` values the per-track mixture reduction parameters.
    """

    gate_sq: float = 9.2103
    cap: int = 50
    merge_cap: int = 50
    lmb_prune: float = 0.01
    dglmb_prune: float = 1e-5
    extraction: float = 0.5
    thresholds: CriteriaThresholds = field(default_factory=CriteriaThresholds)
    gm_prune: float = 1e-5
    gm_merge: float = 4.0
    gm_cap: int = 20
    assignment_method: str = "auto"


@dataclass(eq=False)
class DensityGroup:
    """Independent density group plus its representation state.

    ``criterion_value`` holds the group's outstanding value of the
    criterion that keeps it in delta-GLMB form (zero in LMB form); a
    merged group inherits the state of the member with the largest
    outstanding value.  ``gated`` holds indices into the current scan's
    measurement list.
    """

    density: object
    state: RepresentationState = _LMB_STATE
    criterion_value: float = 0.0
    gated: tuple = ()

    def labels(self):
        if isinstance(self.density, LmbDensity):
            return self.density.labels()
        return list(self.density.label_space)

    def lmb_view(self):
        if isinstance(self.density, LmbDensity):
            return self.density
        return dglmb_to_lmb(self.density)


def inject_birth(groups, birth_model, step_index, policy, sensor, config):
    """Append one single-track group per birth entry, labeled by scan.

    An entry is skipped while any surviving track covers its site: the
    live track already carries the appearance hypothesis there (one
    detection re-inflates even a near-dead existence), and re-seeding
    under it spawns a same-site duplicate label whose spatial density
    ends up identical to the original's, so no later measurement can
    separate the two and the group carries the frozen label ambiguity
    forever.  Coverage is the squared Mahalanobis distance between the
    predicted measurements under the mean of the innovation covariances,
    tested against ``gate_sq``.
    """
    covering = []
    for group in groups:
        view = group.lmb_view()
        for label in view.labels():
            covering.append(predicted_measurement(view.tracks[label].spatial,
                                                  sensor))
    out = list(groups)
    for i, entry in enumerate(birth_model.entries):
        z_b, S_b = predicted_measurement(entry.spatial, sensor)
        covered = False
        for z_t, S_t in covering:
            d = z_t - z_b
            if float(d @ np.linalg.solve(0.5 * (S_t + S_b), d)) < config.gate_sq:
                covered = True
                break
        if covered:
            continue
        label = Label(step_index, i)
        lmb = LmbDensity({label: Track(label, entry.existence, entry.spatial)})
        if policy == "dglmb":
            out.append(DensityGroup(lmb_to_dglmb(lmb), _PINNED_STATE))
        else:
            out.append(DensityGroup(lmb, _LMB_STATE))
    return out


def predict_group(group, motion, config):
    if isinstance(group.density, LmbDensity):
        density = lmb_predict(group.density, motion)
    else:
        density = dglmb_predict(group.density, motion, None, cap=config.cap)
    return replace_density(group, density)


def replace_density(group, density, state=None, criterion_value=None,
                    gated=None):
    return DensityGroup(
        density,
        group.state if state is None else state,
        group.criterion_value if criterion_value is None else criterion_value,
        group.gated if gated is None else gated,
    )


def gate_measurements(groups, measurements, sensor, gate_sq):
    """Assign each group the measurement indices inside any track's gate.

    Returns the groups with ``gated`` filled.  Measurements gated by no
    group are ignored downstream (treated as clutter).
    """
    out = []
    for group in groups:
        view = group.lmb_view()
        hits = np.zeros(len(measurements), dtype=bool)
        for label in view.labels():
            gm = view.tracks[label].spatial
            hits |= gate_mask(measurements, gm, sensor, gate_sq)
        out.append(replace_density(group, group.density,
                                   gated=tuple(int(j) for j in
                                               np.flatnonzero(hits))))
    return out


def _union_lmb(members):
    tracks = {}
    for g in members:
        for label, track in g.density.tracks.items():
            if label in tracks:
                raise UsageError("label %r appears in two groups" % (label,))
            tracks[label] = track
    return LmbDensity(tracks)


def _cross_product(a, b, config):
    if set(a.label_space) & set(b.label_space):
        raise UsageError("label spaces of merged groups overlap")
    hyps = []
    for ha in a.hypotheses:
        for hb in b.hypotheses:
            spatial = dict(ha.spatial)
            spatial.update(hb.spatial)
            hyps.append(Hypothesis(ha.labels + hb.labels,
                                   ha.weight * hb.weight, spatial))
    merged = DglmbDensity(tuple(sorted(a.label_space + b.label_space)), hyps)
    return dglmb_prune(merged, config.dglmb_prune, config.cap)


def merge_groups(groups, config):
    """Merge groups that gate a common measurement (transitive closure).

    LMB groups union their track sets; if any member is in delta-GLMB
    form the merged group is delta-GLMB, expanding LMB members with at
    most ``merge_cap`` hypotheses and forming the hypothesis
    cross-product (pruned and capped per config).
    """
    parent = list(range(len(groups)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for i, group in enumerate(groups):
        for j in group.gated:
            if j in owner:
                a, b = find(owner[j]), find(i)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                owner[j] = i
    clusters = {}
    for i in range(len(groups)):
        clusters.setdefault(find(i), []).append(groups[i])
    out = []
    for root in sorted(clusters):
        members = clusters[root]
        if len(members) == 1:
            out.append(members[0])
            continue
        gated = tuple(sorted(set().union(*(m.gated for m in members))))
        dglmb_members = [m for m in members
                         if isinstance(m.density, DglmbDensity)]
        if not dglmb_members:
            out.append(DensityGroup(_union_lmb(members), _LMB_STATE,
                                    0.0, gated))
            continue
        lead = max(dglmb_members, key=lambda m: m.criterion_value)
        merged = None
        for m in members:
            density = m.density
            if isinstance(density, LmbDensity):
                density = lmb_to_dglmb(density, config.merge_cap)
            merged = density if merged is None else \
                _cross_product(merged, density, config)
        out.append(DensityGroup(merged, lead.state, lead.criterion_value,
                                gated))
    return out


def _reduce_lmb(lmb, config):
    tracks = {}
    for label in lmb.labels():
        track = lmb.tracks[label]
        tracks[label] = Track(label, track.existence,
                              gm_reduce(track.spatial, config.gm_prune,
                                        config.gm_merge, config.gm_cap))
    return LmbDensity(tracks)


def update_group(group, measurements, sensor, config, policy="almb"):
    """Measurement-update one group and run the switching automaton.

    Returns ``(group, kl, entropy)``.  The criteria are evaluated on the
    exact (un-pruned) update output in every policy; only the ``almb``
    policy acts on them.
    """
    if isinstance(group.density, LmbDensity):
        result = lmb_update(group.density, measurements, sensor,
                            cap=config.cap, gate_sq=config.gate_sq,
                            method=config.assignment_method)
        full = result.full
        approx = result.approx
    else:
        full = dglmb_update(group.density, measurements, sensor,
                            cap=config.cap, gate_sq=config.gate_sq,
                            method=config.assignment_method)
        approx = None
    kl = kl_criterion(full.posterior)
    entropy = association_entropy(full.assoc_marginals)

    if policy == "lmb":
        if approx is None:
            approx = dglmb_to_lmb(full.posterior)
        new = replace_density(group, _reduce_lmb(approx, config))
        return new, kl, entropy
    if policy == "dglmb":
        return replace_density(group, full.posterior), kl, entropy
    if policy != "almb":
        raise UsageError("unknown policy %r" % (policy,))

    state = decide_switch(group.state, kl, entropy, config.thresholds)
    if state.mode is Mode.DGLMB:
        value = kl if state.trigger is Trigger.KL else entropy
        return replace_density(group, full.posterior, state=state,
                               criterion_value=float(value)), kl, entropy
    if approx is None:
        approx = dglmb_to_lmb(full.posterior)
    return replace_density(group, _reduce_lmb(approx, config), state=state,
                           criterion_value=0.0), kl, entropy


def _drop_labels(density, doomed):
    hyps = []
    for h in density.hypotheses:
        labels = tuple(lab for lab in h.labels if lab not in doomed)
        spatial = {lab: h.spatial[lab] for lab in labels}
        hyps.append((labels, np.log(max(h.weight, 1e-300)), spatial, None))
    space = tuple(lab for lab in density.label_space if lab not in doomed)
    merged = _dedup(hyps)
    total = sum(np.exp(lw) for _, lw, _, _ in merged)
    return DglmbDensity(space, [
        Hypothesis(labels, float(np.exp(lw) / total), spatial)
        for labels, lw, spatial, _ in merged])


def prune_group(group, config):
    """Prune one group; returns None when nothing survives.

    LMB groups drop tracks with existence at or below ``lmb_prune``.
    delta-GLMB groups drop light hypotheses, cap, and additionally drop
    labels whose marginal existence falls to ``lmb_prune`` or below.
    """
    if isinstance(group.density, LmbDensity):
        tracks = {label: t for label, t in group.density.tracks.items()
                  if t.existence > config.lmb_prune}
        if not tracks:
            return None
        return replace_density(group, LmbDensity(tracks))
    density = dglmb_prune(group.density, config.dglmb_prune, config.cap)
    view = dglmb_to_lmb(density)
    doomed = {label for label in density.label_space
              if label not in view.tracks
              or view.tracks[label].existence <= config.lmb_prune}
    if doomed:
        density = _drop_labels(density, doomed)
    if not density.label_space:
        return None
    return replace_density(group, density)


def split_group(group, sensor, config):
    """Split a group into independent groups of interacting tracks.

    Tracks interact when their predicted measurements are within
    ``2 sqrt(gate_sq)`` of each other under the mean of their innovation
    covariances; connected components of that relation become the new
    groups.  delta-GLMB groups are marginalized per component: the child
    hypothesis weights sum the parent weights over hypotheses whose
    restriction matches, which preserves every label's existence.
    """
    view = group.lmb_view()
    labels = view.labels()
    if len(labels) <= 1:
        return [group]
    zs, Ss = {}, {}
    for label in labels:
        zs[label], Ss[label] = predicted_measurement(view.tracks[label].spatial,
                                                     sensor)
    parent = {label: label for label in labels}

    def find(lab):
        while parent[lab] != lab:
            parent[lab] = parent[parent[lab]]
            lab = parent[lab]
        return lab

    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            d = zs[a] - zs[b]
            pooled = 0.5 * (Ss[a] + Ss[b])
            if float(d @ np.linalg.solve(pooled, d)) < 4.0 * config.gate_sq:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    components = {}
    for label in labels:
        components.setdefault(find(label), []).append(label)
    if len(components) == 1:
        return [group]
    out = []
    for root in sorted(components):
        member_labels = set(components[root])
        if isinstance(group.density, LmbDensity):
            tracks = {lab: group.density.tracks[lab] for lab in
                      sorted(member_labels)}
            out.append(DensityGroup(LmbDensity(tracks), group.state,
                                    group.criterion_value))
        else:
            out.append(DensityGroup(
                _marginalize(group.density, member_labels, config),
                group.state, group.criterion_value))
    return out


def _marginalize(density, member_labels, config):
    """Restrict a delta-GLMB density to a label subset.

    Child hypothesis weights sum parent weights by restricted label set;
    a label's spatial density becomes the weight-average of its parent
    spatials when contributors disagree.
    """
    buckets = {}
    order = []
    for h in density.hypotheses:
        key = tuple(lab for lab in h.labels if lab in member_labels)
        if key not in buckets:
            buckets[key] = [0.0, {lab: [] for lab in key}]
            order.append(key)
        buckets[key][0] += h.weight
        for lab in key:
            buckets[key][1][lab].append((h.weight, h.spatial[lab]))
    hyps = []
    for key in order:
        weight, parts = buckets[key]
        spatial = {}
        for lab in key:
            uids = {gm.uid for _, gm in parts[lab]}
            if len(uids) == 1:
                spatial[lab] = parts[lab][0][1]
            else:
                comps = []
                for w, gm in parts[lab]:
                    comps.extend(
                        gm.scaled(w / (weight * gm.total_weight())).components)
                spatial[lab] = gm_reduce(GaussianMixture(comps),
                                         config.gm_prune, config.gm_merge,
                                         config.gm_cap)
        hyps.append(Hypothesis(key, weight, spatial))
    total = sum(h.weight for h in hyps)
    return DglmbDensity(tuple(sorted(member_labels)), [
        Hypothesis(h.labels, h.weight / total, h.spatial) for h in hyps])


def extract_tracks(groups, threshold):
    """Report (label, MAP state) for tracks with existence above the
    threshold (strict), sorted by label."""
    out = []
    for group in groups:
        view = group.lmb_view()
        for label in view.labels():
            track = view.tracks[label]
            if track.existence > threshold:
                out.append((label, map_point(track.spatial)))
    out.sort(key=lambda t: t[0])
    return out


def pipeline_step(groups, measurements, step_index, motion, sensor,
                  birth_model, config, policy="almb"):
    """Run one full scan; returns ``(groups, extracted, diagnostics)``."""
    groups = inject_birth(groups, birth_model, step_index, policy, sensor,
                          config)
    groups = [predict_group(g, motion, config) for g in groups]
    groups = gate_measurements(groups, measurements, sensor, config.gate_sq)
    groups = merge_groups(groups, config)
    updated = []
    kls, entropies = [], []
    for group in groups:
        Z_g = [measurements[j] for j in group.gated]
        new, kl, entropy = update_group(group, Z_g, sensor, config, policy)
        updated.append(new)
        kls.append(kl)
        entropies.append(entropy)
    groups = [g for g in (prune_group(g, config) for g in updated)
              if g is not None]
    split = []
    for group in groups:
        split.extend(split_group(group, sensor, config))
    extracted = extract_tracks(split, config.extraction)
    n_dglmb = sum(1 for g in split if isinstance(g.density, DglmbDensity))
    diagnostics = {
        "kl": kls,
        "entropy": entropies,
        "max_kl": max([k for k in kls if np.isfinite(k)], default=0.0),
        "max_entropy": max(entropies, default=0.0),
        "n_groups": len(split),
        "n_lmb_groups": len(split) - n_dglmb,
        "n_dglmb_groups": n_dglmb,
        "n_measurements": len(measurements),
    }
    return split, extracted, diagnostics


class MultiObjectTracker:
    """Stateful wrapper running the pipeline scan by scan."""

    def __init__(self, motion, sensor, birth_model, config=None,
                 policy="almb"):
        if policy not in ("almb", "lmb", "dglmb"):
            raise UsageError("unknown policy %r" % (policy,))
        self.motion = motion
        self.sensor = sensor
        self.birth_model = birth_model
        self.config = config or PipelineConfig()
        self.policy = policy
        self.groups = []
        self.step_index = 0

    def step(self, measurements):
        self.step_index += 1
        self.groups, extracted, diagnostics = pipeline_step(
            self.groups, measurements, self.step_index, self.motion,
            self.sensor, self.birth_model, self.config, self.policy)
        return extracted, diagnostics
