"""Rate-matrix generation for one sidelink cluster.

A 10 MHz carrier is split into 1.26 MHz subchannels (7 RBs each, 5 of them
carrying data), giving K = 7 resources per 1 ms subframe.  A 10 Hz message
rate leaves 100 subframes per allocation period.  The weight of vehicle i on
resource j is ``B * log2(1 + SINR_ij)`` with B the data bandwidth.

Random streams
--------------
Every draw comes from numpy's PCG64 bit generator seeded through
``SeedSequence(entropy=seed, spawn_key=(trial_index, stream))``.  SeedSequence
hashes (seed, trial, stream) into the generator state, so each trial owns an
independent stream that does not depend on how many trials run or in which
process.  ``stream`` separates the channel draws from the baseline draws.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .instance import ProblemInstance

CARRIER_HZ = 10e6
SUBCHANNEL_HZ = 1.26e6
RB_HZ = 180e3
DATA_RBS_PER_SUBCHANNEL = 5

DEFAULT_SLOTS = math.floor(CARRIER_HZ / SUBCHANNEL_HZ)  # 7
DEFAULT_DATA_BANDWIDTH_HZ = DATA_RBS_PER_SUBCHANNEL * RB_HZ  # 900 kHz

SINR_MODELS = ("iid-lognormal", "distance-interference")

STREAM_CHANNEL = 0
STREAM_RANDOM = 1
STREAM_GREEDY_ORDER = 2


@dataclass(frozen=True)
class ScenarioConfig:
    num_vehicles: int = 100
    num_subframes: int = 100
    slots_per_subframe: int = DEFAULT_SLOTS
    data_bandwidth_hz: float = DEFAULT_DATA_BANDWIDTH_HZ
    sinr_model: str = "iid-lognormal"
    sinr_mean_db: float = 17.0
    sinr_std_db: float = 6.0
    sinr_clip_db: tuple[float, float] = (0.0, 30.0)
    seed: int = 0
    # distance-interference model only
    highway_length_m: float = 2000.0
    pathloss_exponent: float = 2.75
    tx_power_dbm: float = 23.0
    noise_dbm: float = -105.5  # -174 dBm/Hz + 10log10(900 kHz) + 9 dB noise figure
    reference_loss_db: float = 47.86  # free space at 1 m, 5.9 GHz
    shadowing_std_db: float = 3.0
    reuse_distance_m: float = 1000.0
    comm_range_m: float = 150.0
    interferers_per_resource: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sinr_clip_db", tuple(float(x) for x in self.sinr_clip_db))
        self.validate()

    def validate(self) -> None:
        if min(self.num_vehicles, self.num_subframes, self.slots_per_subframe) < 1:
            raise ValueError("vehicle, subframe and slot counts must be >= 1")
        if self.num_vehicles > self.num_subframes:
            raise ValueError(
                f"num_vehicles ({self.num_vehicles}) exceeds num_subframes ({self.num_subframes})"
            )
        if not self.data_bandwidth_hz > 0:
            raise ValueError("data_bandwidth_hz must be positive")
        if self.sinr_model not in SINR_MODELS:
            raise ValueError(f"sinr_model must be one of {SINR_MODELS}, got {self.sinr_model!r}")
        lo, hi = self.sinr_clip_db
        if not lo <= hi:
            raise ValueError("sinr_clip_db must be a non-empty range (low <= high)")
        if self.sinr_std_db < 0 or self.shadowing_std_db < 0:
            raise ValueError("standard deviations must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.highway_length_m <= 0 or self.comm_range_m <= 0 or self.reuse_distance_m < 0:
            raise ValueError("distances must be positive")
        if self.interferers_per_resource < 0:
            raise ValueError("interferers_per_resource must be >= 0")

    def replace(self, **changes) -> "ScenarioConfig":
        return ScenarioConfig(**{**asdict(self), **changes})

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in fields(cls)}


def stream(seed: int, trial_index: int, stream_id: int = STREAM_CHANNEL) -> np.random.Generator:
    """Independent generator for one (seed, trial, stream) triple."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial_index), int(stream_id)))
    return np.random.Generator(np.random.PCG64(ss))


def rate_from_sinr(sinr_linear, bandwidth_hz: float):
    sinr = np.asarray(sinr_linear, dtype=np.float64)
    if not np.all(np.isfinite(sinr)) or np.any(sinr < 0):
        raise ValueError("sinr must be finite and non-negative")
    if not (np.isfinite(bandwidth_hz) and bandwidth_hz > 0):
        raise ValueError("bandwidth must be positive and finite")
    rate = bandwidth_hz * np.log2(1.0 + sinr)
    return float(rate) if rate.ndim == 0 else rate


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=np.float64) / 10.0)


def sample_sinr_iid(config: ScenarioConfig, rng: np.random.Generator, size=None):
    """Lognormal SINR: Normal(mean, std) in dB, clipped, returned in linear scale."""
    lo, hi = config.sinr_clip_db
    db = rng.normal(config.sinr_mean_db, config.sinr_std_db, size=size)
    linear = db_to_linear(np.clip(db, lo, hi))
    return float(linear) if size is None else linear


def _received_dbm(config: ScenarioConfig, distance_m, shadow_db):
    distance_m = np.maximum(np.asarray(distance_m, dtype=np.float64), 1.0)
    loss = config.reference_loss_db + 10.0 * config.pathloss_exponent * np.log10(distance_m)
    return config.tx_power_dbm - loss + shadow_db


def _sinr_db(config: ScenarioConfig, signal_distance, interferer_distances, rng):
    """SINR in dB for a signal path and co-channel paths (last axis = interferers)."""
    signal_distance = np.asarray(signal_distance, dtype=np.float64)
    interferer_distances = np.asarray(interferer_distances, dtype=np.float64)
    sigma = config.shadowing_std_db
    shadow = rng.normal(0.0, sigma, size=signal_distance.shape) if sigma > 0 else 0.0
    signal_mw = db_to_linear(_received_dbm(config, signal_distance, shadow))
    if interferer_distances.shape[-1]:
        ishadow = rng.normal(0.0, sigma, size=interferer_distances.shape) if sigma > 0 else 0.0
        interference_mw = db_to_linear(_received_dbm(config, interferer_distances, ishadow)).sum(axis=-1)
    else:
        interference_mw = 0.0
    noise_mw = db_to_linear(config.noise_dbm)
    return 10.0 * np.log10(signal_mw / (noise_mw + interference_mw))


def sample_sinr_distance(
    config: ScenarioConfig,
    tx_position_m: float,
    rx_positions,
    interferer_positions,
    rng: np.random.Generator,
) -> float:
    """Linear SINR of a broadcast at its farthest intended receiver.

    Co-channel interferers sit in another cluster ``reuse_distance_m`` away,
    so an interferer at highway coordinate x reaches a receiver at r over
    ``|r - x| + reuse_distance_m`` metres.
    """
    rx = np.atleast_1d(np.asarray(rx_positions, dtype=np.float64))
    if rx.size == 0:
        raise ValueError("at least one receiver is required")
    interferers = np.atleast_1d(np.asarray(interferer_positions, dtype=np.float64))
    for pos in (np.atleast_1d(tx_position_m), rx, interferers):
        if np.any(pos < 0) or np.any(pos > config.highway_length_m):
            raise ValueError("positions must lie within [0, highway_length_m]")
    worst_rx = rx[np.argmax(np.abs(rx - tx_position_m))]
    interferer_distances = np.abs(worst_rx - interferers) + config.reuse_distance_m
    db = _sinr_db(config, abs(worst_rx - tx_position_m), interferer_distances, rng)
    lo, hi = config.sinr_clip_db
    return float(db_to_linear(np.clip(db, lo, hi)))


def _distance_sinr_matrix(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    n = config.num_vehicles
    m = config.num_subframes * config.slots_per_subframe
    length = config.highway_length_m
    pos = rng.uniform(0.0, length, size=n)

    # farthest neighbour within range; a lone vehicle addresses a virtual
    # receiver at the edge of its range
    gap = np.abs(pos[:, None] - pos[None, :])
    np.fill_diagonal(gap, -np.inf)
    in_range = np.where(gap <= config.comm_range_m, gap, -np.inf)
    farthest = in_range.argmax(axis=1)
    has_rx = np.isfinite(in_range.max(axis=1))
    virtual = np.where(pos + config.comm_range_m <= length, pos + config.comm_range_m, pos - config.comm_range_m)
    worst_rx = np.where(has_rx, pos[farthest], np.clip(virtual, 0.0, length))

    interferers = rng.uniform(0.0, length, size=(m, config.interferers_per_resource))
    signal_distance = np.broadcast_to(np.abs(worst_rx - pos)[:, None], (n, m))
    interferer_distances = np.abs(worst_rx[:, None, None] - interferers[None, :, :]) + config.reuse_distance_m
    db = _sinr_db(config, signal_distance, interferer_distances, rng)
    lo, hi = config.sinr_clip_db
    return db_to_linear(np.clip(db, lo, hi))


def generate_instance(config: ScenarioConfig, trial_index: int) -> ProblemInstance:
    """Rate matrix for one trial, a pure function of ``(config, trial_index)``."""
    config.validate()
    rng = stream(config.seed, trial_index, STREAM_CHANNEL)
    shape = (config.num_vehicles, config.num_subframes * config.slots_per_subframe)
    if config.sinr_model == "iid-lognormal":
        sinr = sample_sinr_iid(config, rng, size=shape)
    else:
        sinr = _distance_sinr_matrix(config, rng)
    weights = rate_from_sinr(sinr, config.data_bandwidth_hz)
    return ProblemInstance(weights, config.num_subframes, config.slots_per_subframe)
