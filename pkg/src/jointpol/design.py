"""Four-outcome joint measurements of X (H/V) and Y (P/M) polarization.

Each outcome m = (x, y) is realized as a separate polarization filter
(QWP, then HWP, then a PBS transmitting H) that passes one pure state with
Bloch vector n_m.  Running all four filters for equal times and normalizing
counts over the complete set is equivalent to the POVM

    E_m = (I + n_m . sigma) / 4 = P_m / 2

because the four projectors P_m sum to 2 I whenever sum_m n_m = 0.

Wave-plate convention: the default branch ``"rot+ret-"`` (rotation R(t),
retarder diag(1, exp(-i d))) maps the published plate angles
(16.32, 17.63), (-16.32, -17.63), (28.68, 72.36), (61.32, 107.63) onto the
Bloch directions (45, 45), (45, -135), (135, -45), (135, 135) within 0.03
degrees.  The other branches mirror phi_B and/or swap outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_CONVENTION,
    CONVENTIONS,
    EXACT_TOL,
    HERMITIAN_TOL,
    BlochDirection,
    bloch_projector,
    ket_from_bloch,
    pure_state_bloch,
    waveplate,
    _wrap_phi,
)
from .errors import DesignError


# Plate angles are quoted to 0.01 deg; directions derived from them are
# checked to within 0.2 deg per vector.
WAVEPLATE_TOL = 2 * np.deg2rad(0.2)


@dataclass(frozen=True)
class OutcomeLabel:
    label: str
    x: int
    y: int

    @property
    def header(self) -> str:
        return f"({self.x:+d},{self.y:+d})"


OUTCOMES = (
    OutcomeLabel("a", +1, +1),
    OutcomeLabel("b", +1, -1),
    OutcomeLabel("c", -1, +1),
    OutcomeLabel("d", -1, -1),
)
LABELS = tuple(o.label for o in OUTCOMES)
X_SIGNS = np.array([o.x for o in OUTCOMES])
Y_SIGNS = np.array([o.y for o in OUTCOMES])


@dataclass(frozen=True)
class WaveplateSetting:
    theta_H: float
    theta_Q: float

    def __post_init__(self):
        object.__setattr__(self, "theta_H", _wrap_phi(float(self.theta_H)))
        object.__setattr__(self, "theta_Q", _wrap_phi(float(self.theta_Q)))


@dataclass(frozen=True)
class TheoreticalVisibilities:
    v_x: float
    v_y: float
    c_magnitude: float


# Published plate angles for outcomes a, b, c, d.
PAPER_WAVEPLATES = (
    WaveplateSetting(16.32, 17.63),
    WaveplateSetting(-16.32, -17.63),
    WaveplateSetting(28.68, 72.36),
    WaveplateSetting(61.32, 107.63),
)


@dataclass(frozen=True)
class JointMeasurementDesign:
    """Bloch directions for outcomes a, b, c, d (in that order)."""

    directions: tuple[BlochDirection, BlochDirection, BlochDirection, BlochDirection]

    def __post_init__(self):
        if len(self.directions) != 4:
            raise DesignError(f"a joint design needs 4 outcomes, got {len(self.directions)}")
        object.__setattr__(self, "directions", tuple(self.directions))

    @property
    def vectors(self) -> np.ndarray:
        """4x3 array of unit Bloch vectors, rows in outcome order."""
        return np.array([d.vector for d in self.directions])

    def __getitem__(self, label: str) -> BlochDirection:
        return self.directions[LABELS.index(label)]

    def check(self, tol: float = HERMITIAN_TOL) -> dict:
        """Evaluate every validity condition; return name -> (ok, vector)."""
        n = self.vectors
        sums = {
            "a+b along +X": (n[0] + n[1], 0),
            "c+d along -X": (-(n[2] + n[3]), 0),
            "a+c along +Y": (n[0] + n[2], 1),
            "b+d along -Y": (-(n[1] + n[3]), 1),
        }
        out = {}
        for name, (v, axis) in sums.items():
            off = np.delete(v, axis)
            ok = v[axis] > tol and np.all(np.abs(off) < tol)
            out[name] = (bool(ok), v)
        total = n.sum(axis=0)
        out["sum of Bloch vectors = 0"] = (bool(np.all(np.abs(total) < tol)), total)
        return out

    def validate(self, tol: float = HERMITIAN_TOL) -> "JointMeasurementDesign":
        failed = [name for name, (ok, _) in self.check(tol).items() if not ok]
        if failed:
            raise DesignError("invalid joint measurement: " + "; ".join(
                f"{name} violated" for name in failed))
        return self


def design_from_angles(pairs) -> JointMeasurementDesign:
    """Build a design from four (theta_B, phi_B) pairs in outcome order."""
    return JointMeasurementDesign(tuple(BlochDirection(t, p) for t, p in pairs))


def paper_design() -> JointMeasurementDesign:
    return design_from_angles([(45.0, 45.0), (45.0, -135.0), (135.0, -45.0), (135.0, 135.0)])


def symmetric_design(theta_B: float, phi_B: float) -> JointMeasurementDesign:
    """The one-parameter-pair family containing the experimental design.

    Valid for 0 < theta_B < 90 and -90 < phi_B < 90.
    """
    return design_from_angles([
        (theta_B, phi_B),
        (theta_B, phi_B - 180.0),
        (180.0 - theta_B, -phi_B),
        (180.0 - theta_B, 180.0 - phi_B),
    ])


def build_povm(design: JointMeasurementDesign, tol: float = HERMITIAN_TOL) -> list[tuple[OutcomeLabel, np.ndarray]]:
    design.validate(tol)
    return [(label, 0.5 * bloch_projector(n)) for label, n in zip(OUTCOMES, design.vectors)]


def povm_elements(design: JointMeasurementDesign, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """POVM elements as a (4, 2, 2) array in outcome order."""
    return np.array([e for _, e in build_povm(design, tol)])


def marginal_operators(design: JointMeasurementDesign) -> dict[str, np.ndarray]:
    """sum_m s_m E_m for s = x, y and x*y."""
    e = povm_elements(design)
    return {
        "x": np.tensordot(X_SIGNS, e, axes=1),
        "y": np.tensordot(Y_SIGNS, e, axes=1),
        "xy": np.tensordot(X_SIGNS * Y_SIGNS, e, axes=1),
    }


def theoretical_visibilities(design: JointMeasurementDesign, tol: float = HERMITIAN_TOL) -> TheoreticalVisibilities:
    design.validate(tol)
    n = np.abs(design.vectors)
    spread = n.max(axis=0) - n.min(axis=0)
    if np.any(spread > tol):
        axes = [a for a, s in zip("XYZ", spread) if s > tol]
        raise DesignError(
            f"asymmetric design: |n_{'|, |n_'.join(axes)}| differ across outcomes")
    v = n.mean(axis=0)
    return TheoreticalVisibilities(float(v[0]), float(v[1]), float(v[2]))


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; choose from {sorted(CONVENTIONS)}")


def filter_projection(setting: WaveplateSetting, convention: str = DEFAULT_CONVENTION) -> BlochDirection:
    """Bloch direction of the state transmitted by QWP -> HWP -> PBS(H)."""
    h = waveplate("HWP", setting.theta_H, convention)
    q = waveplate("QWP", setting.theta_Q, convention)
    psi = q.conj().T @ h.conj().T @ np.array([1.0, 0.0], dtype=complex)
    return BlochDirection.from_vector(pure_state_bloch(psi))


def solve_waveplate_angles(direction: BlochDirection, convention: str = DEFAULT_CONVENTION) -> WaveplateSetting:
    """Plate angles whose filter transmits ``direction``.

    The QWP fast axis is put on the polarization ellipse's major axis, which
    linearizes the state; the HWP then rotates that linear state onto H.
    Canonical branch: theta_Q in (-90, 90], theta_H in (-45, 45].
    """
    _check_convention(convention)
    rot_sign, _ = CONVENTIONS[convention]
    n = direction.vector
    if np.hypot(n[0], n[1]) < EXACT_TOL:
        orient = 0.0
    else:
        orient = 0.5 * np.rad2deg(np.arctan2(n[1], n[0]))
    theta_q = _half_open(rot_sign * orient, 180.0)

    psi = ket_from_bloch(n)
    v = waveplate("QWP", theta_q, convention) @ psi
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    alpha = np.rad2deg(np.arctan2(v[1].real, v[0].real))
    theta_h = _half_open(rot_sign * alpha / 2.0, 90.0)

    setting = WaveplateSetting(theta_h, theta_q)
    got = filter_projection(setting, convention).vector
    if float(got @ n) < 1.0 - 1e-9:
        raise AssertionError(f"wave-plate solver failed for {direction}")
    return setting


def _half_open(angle: float, period: float) -> float:
    """Reduce ``angle`` into (-period/2, period/2]."""
    a = (angle + period / 2.0) % period - period / 2.0
    if np.isclose(a, -period / 2.0, atol=1e-12):
        a = period / 2.0
    return float(a)


def design_from_waveplates(settings, convention: str = DEFAULT_CONVENTION) -> JointMeasurementDesign:
    return JointMeasurementDesign(tuple(filter_projection(s, convention) for s in settings))
