"""Small-matrix linear algebra for single photons and photon pairs.

Basis convention: index 0 is |H>, index 1 is |V>.

    X = S_HV = diag(1, -1)
    Y = S_PM, with |P> = (|H> + |V>)/sqrt(2) the +1 eigenvector
    Z = S_RL, fixed by X @ Y = 1j * Z

Bloch directions are measured from the +X axis: ``theta_B`` is the polar
angle to +X and ``phi_B`` the azimuth around X, starting at +Y and turning
towards +Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EXACT_TOL = 1e-12
HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
_PAULI = {
    "X": np.array([[1, 0], [0, -1]], dtype=complex),
    "Y": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[0, -1j], [1j, 0]], dtype=complex),
}

# Wave-plate sign branches: (rotation sign, retardance sign).  "rot+ret-"
# reproduces the published QWP/HWP angle table; see design.py.
CONVENTIONS = {
    "rot+ret+": (1, 1),
    "rot+ret-": (1, -1),
    "rot-ret+": (-1, 1),
    "rot-ret-": (-1, -1),
}
DEFAULT_CONVENTION = "rot+ret-"


def pauli(axis: str) -> np.ndarray:
    """Return the Pauli operator for ``axis`` in {"X", "Y", "Z"}."""
    try:
        return _PAULI[axis.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected X, Y or Z") from None


def sigma_vector() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return _PAULI["X"], _PAULI["Y"], _PAULI["Z"]


def _wrap_phi(phi: float) -> float:
    """Map an angle in degrees onto (-180, 180]."""
    phi = (phi + 180.0) % 360.0 - 180.0
    if phi == -180.0:
        phi = 180.0
    return phi


@dataclass(frozen=True)
class BlochDirection:
    """Unit Bloch vector in spherical coordinates about the X axis (degrees)."""

    theta_B: float
    phi_B: float

    def __post_init__(self):
        if not np.isfinite(self.theta_B) or not np.isfinite(self.phi_B):
            raise DomainError("Bloch angles must be finite")
        if not -EXACT_TOL <= self.theta_B <= 180.0 + EXACT_TOL:
            raise DomainError(f"theta_B={self.theta_B} outside [0, 180] degrees")

    @property
    def vector(self) -> np.ndarray:
        t = np.deg2rad(self.theta_B)
        p = np.deg2rad(self.phi_B)
        return np.array([np.cos(t), np.sin(t) * np.cos(p), np.sin(t) * np.sin(p)])

    @classmethod
    def from_vector(cls, n) -> "BlochDirection":
        n = np.asarray(n, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise DomainError("cannot take the direction of a zero Bloch vector")
        n = n / norm
        transverse = np.hypot(n[1], n[2])
        theta = float(np.rad2deg(np.arctan2(transverse, n[0])))
        # azimuth is arbitrary at the poles; pin it to 0
        if transverse < EXACT_TOL:
            phi = 0.0
        else:
            phi = _wrap_phi(float(np.rad2deg(np.arctan2(n[2], n[1]))))
        return cls(theta, phi)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Return (<X>, <Y>, <Z>) for a 2x2 state."""
    return np.array([expectation(rho, s) for s in sigma_vector()])


def bloch_projector(direction) -> np.ndarray:
    """Rank-1 projector (I + n.sigma)/2 for a BlochDirection or a unit 3-vector."""
    n = direction.vector if isinstance(direction, BlochDirection) else np.asarray(direction, float)
    x, y, z = sigma_vector()
    return 0.5 * (I2 + n[0] * x + n[1] * y + n[2] * z)


def _rotation(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, -s], [s, c]], dtype=complex)


def retarder(angle: float, retardance: float, convention: str = DEFAULT_CONVENTION) -> np.ndarray:
    """Jones matrix R(t) diag(1, exp(i d)) R(-t) of an ideal linear retarder.

    ``angle`` is the fast-axis angle in degrees; ``retardance`` in radians.
    The convention branch flips the sign of the rotation and/or of the
    retardance.
    """
    try:
        rot_sign, ret_sign = CONVENTIONS[convention]
    except KeyError:
        raise ValueError(
            f"unknown convention {convention!r}; choose from {sorted(CONVENTIONS)}"
        ) from None
    t = rot_sign * np.deg2rad(angle)
    core = np.diag([1.0, np.exp(1j * ret_sign * retardance)])
    return _rotation(t) @ core @ _rotation(-t)


def waveplate(kind: str, angle: float, convention: str = DEFAULT_CONVENTION) -> np.ndarray:
    kind = kind.upper()
    if kind == "HWP":
        return retarder(angle, np.pi, convention)
    if kind == "QWP":
        return retarder(angle, np.pi / 2, convention)
    raise ValueError(f"unknown wave plate {kind!r}; expected HWP or QWP")


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; entry [(i,k),(j,l)] is a[i,j] * b[k,l]."""
    return np.kron(a, b)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    """Real expectation value trace(rho @ op) of a Hermitian observable."""
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.shape != op.shape:
        raise ValueError(f"shape mismatch: state {rho.shape}, operator {op.shape}")
    if not is_hermitian(op):
        raise DomainError("expectation requires a Hermitian operator")
    value = np.trace(rho @ op)
    if abs(value.imag) > HERMITIAN_TOL:
        raise DomainError(f"expectation has imaginary part {value.imag:.3g}; state not Hermitian?")
    return float(value.real)


def validate_density(rho, dim: int | None = None) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise DomainError(f"density matrix must be 2x2 or 4x4, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise DomainError(f"expected a {dim}x{dim} density matrix, got {rho.shape}")
    if not is_hermitian(rho):
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > HERMITIAN_TOL:
        raise DomainError(f"density matrix trace is {tr}, expected 1")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if lam.min() < -HERMITIAN_TOL:
        raise DomainError(f"density matrix has negative eigenvalue {lam.min():.3g}")
    return rho


def pure_state_bloch(psi) -> np.ndarray:
    """Bloch vector of a (not necessarily normalized) single-photon ket."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return bloch_vector(np.outer(psi, psi.conj()))


def ket_from_bloch(n) -> np.ndarray:
    """A normalized ket with Bloch vector ``n`` (global phase: first nonzero entry real)."""
    p = bloch_projector(np.asarray(n, float) / np.linalg.norm(n))
    w, v = np.linalg.eigh(p)
    psi = v[:, np.argmax(w)]
    k = 0 if abs(psi[0]) > 1e-8 else 1
    return psi * np.exp(-1j * np.angle(psi[k]))
