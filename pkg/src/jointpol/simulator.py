"""Forward model: joint outcome probabilities and Poisson coincidence counts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import EXACT_TOL, tensor, validate_density
from .design import JointMeasurementDesign, povm_elements
from .errors import DomainError

# Largest published coincidence count (10 s per setting).
TABLE3_MAX_COUNT = 17558
DEFAULT_DURATION = 10.0


@dataclass(frozen=True)
class AcquisitionConfig:
    pair_rate: float
    duration_per_setting: float = DEFAULT_DURATION
    seed: int = 0

    def __post_init__(self):
        if not (self.pair_rate > 0 and np.isfinite(self.pair_rate)):
            raise DomainError(f"pair_rate must be positive, got {self.pair_rate}")
        if not (self.duration_per_setting > 0 and np.isfinite(self.duration_per_setting)):
            raise DomainError(f"duration_per_setting must be positive, got {self.duration_per_setting}")
        if not (0 <= int(self.seed) < 2**64) or int(self.seed) != self.seed:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class CountTable:
    """4x4 coincidence counts, rows = outcome of photon 1, columns = photon 2."""

    counts: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != (4, 4):
            raise DomainError(f"count table must be 4x4, got shape {c.shape}")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.isfinite(c)) or np.any(c != np.round(c)):
                raise DomainError("counts must be integers")
            c = c.astype(np.int64)
        if np.any(c < 0):
            raise DomainError("counts must be non-negative")
        self.counts = c.astype(np.int64)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def joint_probabilities(state: np.ndarray, design1: JointMeasurementDesign,
                        design2: JointMeasurementDesign | None = None) -> np.ndarray:
    """p(m1, m2) = Tr[rho (E_m1 x E_m2)] as a 4x4 array.

    Identical to Tr[rho (P_m1 x P_m2)] / 4 for the per-setting filters.
    """
    rho = validate_density(state, 4)
    e1 = povm_elements(design1)
    e2 = e1 if design2 is None else povm_elements(design2)
    p = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            p[i, j] = np.trace(rho @ tensor(e1[i], e2[j])).real
    # clip round-off below zero
    p[(p < 0) & (p > -EXACT_TOL)] = 0.0
    return p


def expected_counts(probs: np.ndarray, config: AcquisitionConfig) -> np.ndarray:
    """Mean count per setting; the factor 4 undoes the POVM's 1/2 per photon."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (4, 4) or np.any(probs < 0):
        raise DomainError("joint probability table must be 4x4 and non-negative")
    return config.pair_rate * config.duration_per_setting * 4.0 * probs


def calibrated_pair_rate(probs: np.ndarray, target_max: float = TABLE3_MAX_COUNT,
                         duration: float = DEFAULT_DURATION) -> float:
    """Pair rate putting the largest cell mean at ``target_max``."""
    return float(target_max / (duration * 4.0 * np.max(probs)))


def _cell_stream(seed: int, cell: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(cell,))))


def sample_counts(probs: np.ndarray, config: AcquisitionConfig, workers: int = 1) -> CountTable:
    """Independent Poisson draw per setting.

    Each cell owns a Philox substream keyed by (seed, cell index), so the
    table does not depend on evaluation order or on ``workers``.
    """
    means = expected_counts(probs, config).ravel()

    def draw(k):
        return int(_cell_stream(config.seed, k).poisson(means[k]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(draw, range(16)))
    else:
        flat = [draw(k) for k in range(16)]
    meta = {
        "duration_per_setting": config.duration_per_setting,
        "pair_rate": config.pair_rate,
        "seed": int(config.seed),
    }
    return CountTable(np.array(flat, dtype=np.int64).reshape(4, 4), meta)
