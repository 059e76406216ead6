"""Entangled input states, the noise model fitted to them, and the witness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import expectation, pauli, tensor, validate_density
from .errors import DomainError, WitnessError


@dataclass(frozen=True)
class InputCorrelations:
    """Measured two-photon correlations <X1X2>, <Y1Y2> and optionally <Z1Z2>."""

    c_xx: float
    c_yy: float
    c_zz: float | None = None
    se_xx: float = 0.0
    se_yy: float = 0.0
    se_zz: float | None = None

    def __post_init__(self):
        for name in ("c_xx", "c_yy", "c_zz"):
            v = getattr(self, name)
            if v is not None and not (np.isfinite(v) and abs(v) <= 1.0):
                raise DomainError(f"{name}={v} is not a correlation in [-1, 1]")
        for name in ("se_xx", "se_yy", "se_zz"):
            v = getattr(self, name)
            if v is not None and not (np.isfinite(v) and v >= 0):
                raise DomainError(f"{name}={v} must be a non-negative standard error")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("c_xx", "c_yy", "c_zz", "se_xx", "se_yy", "se_zz")}


@dataclass(frozen=True)
class NoiseModel:
    """White noise of weight 1 - eta plus HV-basis dephasing d on the singlet."""

    eta: float
    d: float

    def __post_init__(self):
        for name in ("eta", "d"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 <= v <= 1.0):
                raise DomainError(f"noise parameter {name}={v} outside [0, 1]")

    def predicted(self) -> dict[str, float]:
        return {"c_xx": -self.eta, "c_yy": -self.eta * self.d, "c_zz": -self.eta * self.d}


@dataclass(frozen=True)
class NoiseFit:
    model: NoiseModel
    predicted_c_zz: float
    residual_c_zz: float | None = None


@dataclass(frozen=True)
class ProductCorrelationBounds:
    lower: float
    upper: float = 1.0


@dataclass(frozen=True)
class Witness:
    value: float
    entangled: bool
    se: float = field(default=0.0)


XX = tensor(pauli("X"), pauli("X"))
YY = tensor(pauli("Y"), pauli("Y"))
ZZ = tensor(pauli("Z"), pauli("Z"))
XXYY = XX @ YY


def singlet() -> np.ndarray:
    """(|HV> - |VH>)/sqrt(2) as a 4x4 density matrix."""
    psi = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
    return np.outer(psi, psi.conj())


def noisy_singlet(model: NoiseModel) -> np.ndarray:
    """eta * D_d(singlet) + (1 - eta) * I/4.

    D_d scales the |HV><VH| and |VH><HV| coherences by d, so
    <XX> = -eta and <YY> = <ZZ> = -eta * d.
    """
    rho = singlet()
    rho[1, 2] *= model.d
    rho[2, 1] *= model.d
    rho = model.eta * rho + (1.0 - model.eta) * np.eye(4) / 4.0
    return validate_density(rho, 4)


def state_correlations(rho: np.ndarray) -> InputCorrelations:
    """Exact <XX>, <YY>, <ZZ> of a two-photon state."""
    rho = validate_density(rho, 4)
    return InputCorrelations(
        float(np.clip(expectation(rho, XX), -1, 1)),
        float(np.clip(expectation(rho, YY), -1, 1)),
        float(np.clip(expectation(rho, ZZ), -1, 1)),
    )


def fit_noise(corrs: InputCorrelations) -> NoiseFit:
    """Invert the noise model: eta = -c_xx, d = c_yy / c_xx."""
    if corrs.c_xx >= 0:
        raise DomainError(f"c_xx={corrs.c_xx} is not negative; the noise model needs a singlet-like state")
    if abs(corrs.c_yy) > abs(corrs.c_xx):
        raise DomainError("|c_yy| > |c_xx| is outside the dephased-singlet model class")
    if corrs.c_yy > 0:
        raise DomainError(f"c_yy={corrs.c_yy} is positive; dephasing cannot flip its sign")
    model = NoiseModel(-corrs.c_xx, corrs.c_yy / corrs.c_xx)
    pred = model.predicted()["c_zz"]
    resid = None if corrs.c_zz is None else corrs.c_zz - pred
    return NoiseFit(model, pred, resid)


def witness(corrs: InputCorrelations) -> Witness:
    """-<XX> - <YY>; a value above 1 certifies entanglement."""
    value = -corrs.c_xx - corrs.c_yy
    return Witness(value, bool(value > 1.0), float(np.hypot(corrs.se_xx, corrs.se_yy)))


def product_bounds(corrs: InputCorrelations) -> ProductCorrelationBounds:
    """Range of <(x1 y1)(x2 y2)> compatible with the measured correlations."""
    w = witness(corrs)
    if not w.entangled:
        raise WitnessError(
            f"witness value {w.value:.4f} <= 1: <x1x2> + <y1y2> < -1 is not satisfied, "
            "so the product correlation is not bounded away from zero")
    return ProductCorrelationBounds(w.value - 1.0, 1.0)
