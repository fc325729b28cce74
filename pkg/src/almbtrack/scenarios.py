"""Scenario configuration, ground truth and measurement generation.

Scenarios are plain JSON documents with a fixed schema (unknown keys are
rejected).  The state convention is ``[px, vx, py, vy]`` with
nearly-constant-velocity motion: per axis the process noise enters
through the discrete noise gain ``[T**2/2, T]`` scaled so that
``velocity_noise_std`` is the per-step velocity noise standard
deviation.
"""

import json
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigurationError, UsageError
from .gaussian import (GaussianComponent, GaussianMixture, MotionModel,
                       SensorModel)
from .metrics import OspaParams
from .pipeline import BirthEntry, BirthModel, PipelineConfig
from .switching import CriteriaThresholds

BUILTIN_SCENARIOS = ("two-target", "sixteen-target")


@dataclass
class MotionConfig:
    velocity_noise_std: float = 2.23606797749979
    survival_prob: float = 0.99


@dataclass
class SensorConfig:
    position_noise_std: float = 10.0
    detection_prob: float = 0.98
    clutter_rate: float = 50.0


@dataclass
class BirthSite:
    existence: float
    mean: list
    std: list


@dataclass
class TruthScript:
    birth_step: int
    death_step: int
    state: list


@dataclass
class TrackerConfig:
    gate_sq: float = 9.2103
    cap: int = 50
    merge_cap: int = 50
    lmb_prune: float = 0.01
    dglmb_prune: float = 1e-5
    extraction: float = 0.5
    kl_threshold: float = 1e-4
    entropy_threshold: float = 0.5
    gm_prune: float = 1e-5
    gm_merge: float = 4.0
    gm_cap: int = 20


@dataclass
class OspaConfig:
    p: float = 1.0
    c: float = 300.0
    alpha: float = 100.0


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    seed: int = 0
    steps: int = 100
    cycle_time: float = 1.0
    region: list = field(default_factory=lambda: [[-1000.0, 1000.0],
                                                  [-1000.0, 1000.0]])
    motion: MotionConfig = field(default_factory=MotionConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    birth: list = field(default_factory=list)
    truth: list = field(default_factory=list)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    ospa: OspaConfig = field(default_factory=OspaConfig)

    def to_dict(self):
        return asdict(self)


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigurationError("%s must be an object" % where)
    fields = {f for f in cls.__dataclass_fields__}
    unknown = set(data) - fields
    if unknown:
        raise ConfigurationError(
            "unknown key(s) %s in %s" % (sorted(unknown), where))
    return cls(**data)


def scenario_from_dict(data):
    """Validate a scenario dict; unknown keys anywhere are an error."""
    if not isinstance(data, dict):
        raise ConfigurationError("scenario must be an object")
    known = set(ScenarioConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError("unknown key(s) %s in scenario"
                                 % sorted(unknown))
    out = {}
    for key, value in data.items():
        if key == "motion":
            out[key] = _build(MotionConfig, value, "motion")
        elif key == "sensor":
            out[key] = _build(SensorConfig, value, "sensor")
        elif key == "tracker":
            out[key] = _build(TrackerConfig, value, "tracker")
        elif key == "ospa":
            out[key] = _build(OspaConfig, value, "ospa")
        elif key == "birth":
            out[key] = [_build(BirthSite, b, "birth[%d]" % i)
                        for i, b in enumerate(value)]
        elif key == "truth":
            out[key] = [_build(TruthScript, t, "truth[%d]" % i)
                        for i, t in enumerate(value)]
        else:
            out[key] = value
    config = ScenarioConfig(**out)
    _validate(config)
    return config


def _validate(config):
    if config.steps < 1:
        raise ConfigurationError("steps must be positive")
    region = np.asarray(config.region, dtype=float)
    if region.shape != (2, 2) or np.any(region[:, 0] >= region[:, 1]):
        raise ConfigurationError("region must be two nonempty intervals")
    for script in config.truth:
        if len(script.state) != 4:
            raise ConfigurationError("truth state must have four entries")
        if not 1 <= script.birth_step <= script.death_step <= config.steps:
            raise ConfigurationError("truth lifetime outside scenario")
    for site in config.birth:
        if len(site.mean) != 4 or len(site.std) != 4:
            raise ConfigurationError("birth mean/std must have four entries")
        if not 0.0 < site.existence < 1.0:
            raise ConfigurationError("birth existence must be in (0, 1)")


def load_scenario(path):
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as err:
            raise ConfigurationError("invalid scenario JSON: %s" % err) from None
    return scenario_from_dict(data)


def builtin_scenario(name):
    """Load one of the shipped scenarios by name."""
    if name not in BUILTIN_SCENARIOS:
        raise UsageError("unknown builtin scenario %r (known: %s)"
                         % (name, ", ".join(BUILTIN_SCENARIOS)))
    ref = resources.files("almbtrack.data") / (name.replace("-", "_") + ".json")
    return scenario_from_dict(json.loads(ref.read_text()))


def transition_matrix(cycle_time):
    T = float(cycle_time)
    F1 = np.array([[1.0, T], [0.0, 1.0]])
    return np.kron(np.eye(2), F1)


def make_motion(config):
    T = float(config.cycle_time)
    sv = float(config.motion.velocity_noise_std)
    # White-noise-acceleration gain [T**2/2, T], scaled so the per-step
    # velocity noise standard deviation equals sv.
    Q1 = sv ** 2 * np.array([[T * T / 4.0, T / 2.0], [T / 2.0, 1.0]])
    Q = np.kron(np.eye(2), Q1)
    return MotionModel(transition_matrix(T), Q, config.motion.survival_prob)


def region_area(config):
    region = np.asarray(config.region, dtype=float)
    return float(np.prod(region[:, 1] - region[:, 0]))


def make_sensor(config):
    H = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
    R = config.sensor.position_noise_std ** 2 * np.eye(2)
    clutter_density = config.sensor.clutter_rate / region_area(config)
    return SensorModel(H, R, config.sensor.detection_prob, clutter_density)


def make_birth_model(config):
    entries = []
    for site in config.birth:
        cov = np.diag(np.asarray(site.std, dtype=float) ** 2)
        gm = GaussianMixture([GaussianComponent(1.0, site.mean, cov)])
        entries.append(BirthEntry(site.existence, gm))
    return BirthModel(entries)


def make_pipeline_config(config):
    t = config.tracker
    return PipelineConfig(
        gate_sq=t.gate_sq, cap=t.cap, merge_cap=t.merge_cap,
        lmb_prune=t.lmb_prune, dglmb_prune=t.dglmb_prune,
        extraction=t.extraction,
        thresholds=CriteriaThresholds(t.kl_threshold, t.entropy_threshold),
        gm_prune=t.gm_prune, gm_merge=t.gm_merge, gm_cap=t.gm_cap)


def make_ospa_params(config):
    return OspaParams(config.ospa.p, config.ospa.c, config.ospa.alpha)


@dataclass(eq=False)
class TruthTrack:
    """Noise-free track: states for scans ``birth_step..death_step``."""

    track_id: int
    birth_step: int
    death_step: int
    states: np.ndarray

    def alive(self, k):
        return self.birth_step <= k <= self.death_step

    def state(self, k):
        return self.states[k - self.birth_step]


def generate_truth(config):
    """Propagate every truth script through the noise-free motion model."""
    F = transition_matrix(config.cycle_time)
    tracks = []
    for tid, script in enumerate(config.truth):
        x = np.asarray(script.state, dtype=float)
        states = [x]
        for _ in range(script.birth_step, script.death_step):
            states.append(F @ states[-1])
        tracks.append(TruthTrack(tid, script.birth_step, script.death_step,
                                 np.asarray(states)))
    return tracks


def truth_positions(tracks, k):
    """Labeled truth positions at scan ``k``."""
    return [(t.track_id, t.state(k)[[0, 2]]) for t in tracks if t.alive(k)]


def truth_cardinality(tracks, steps):
    return np.array([sum(1 for t in tracks if t.alive(k))
                     for k in range(1, steps + 1)])


def generate_measurements(tracks, config, rng):
    """Draw one scan-by-scan measurement sequence.

    Detections are Bernoulli per alive track with Gaussian position
    noise; clutter is Poisson over the region.  Each scan's measurements
    are randomly permuted so detection order carries no information.
    """
    sensor = make_sensor(config)
    region = np.asarray(config.region, dtype=float)
    noise = config.sensor.position_noise_std
    out = []
    for k in range(1, config.steps + 1):
        scan = []
        for track in tracks:
            if track.alive(k) and rng.random() < config.sensor.detection_prob:
                z = sensor.H @ track.state(k) + noise * rng.standard_normal(2)
                scan.append(z)
        n_clutter = rng.poisson(config.sensor.clutter_rate)
        for _ in range(n_clutter):
            scan.append(region[:, 0] + (region[:, 1] - region[:, 0]) *
                        rng.random(2))
        if scan:
            order = rng.permutation(len(scan))
            scan = [scan[i] for i in order]
        out.append(scan)
    return out
