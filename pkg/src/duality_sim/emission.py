"""Emission geometry, internal photon modes, and closed-form detection rates."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .source_state import RENORM_TOL, TOL, SourceState


def wrap_phase(x):
    """Reduce an angle (or array of angles) to (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)
    return float(out) if out.ndim == 0 else out


def _unit(v, name: str, dim: int, dtype) -> np.ndarray:
    arr = np.array(v, dtype=dtype).reshape(-1)
    if arr.size != dim:
        raise ValidationError(f"{name} must have {dim} components (got {arr.size})")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    norm2 = float(np.vdot(arr, arr).real)
    err = abs(norm2 - 1.0)
    if err > RENORM_TOL:
        raise ValidationError(f"{name} must have unit norm (got norm {math.sqrt(norm2)!r})")
    if err > TOL:
        warnings.warn(f"{name} norm off by {err:.3g}; renormalizing", stacklevel=3)
        arr = arr / math.sqrt(norm2)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class EmissionGeometry:
    """Atom positions, detector direction, wavenumber and initial atomic phases."""

    k: float
    R_A: np.ndarray
    R_B: np.ndarray
    r_hat: np.ndarray
    phi_A: float = 0.0
    phi_B: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValidationError(f"wavenumber k must be positive (got {self.k!r})")
        for name in ("R_A", "R_B"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            if arr.size != 3 or not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} must be a finite 3-vector")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "r_hat", _unit(self.r_hat, "r_hat", 3, float))
        if not (math.isfinite(self.phi_A) and math.isfinite(self.phi_B)):
            raise ValidationError("initial phases must be finite")

    @classmethod
    def from_wavelength(cls, wavelength: float, R_A, R_B, r_hat, phi_A=0.0, phi_B=0.0):
        if not wavelength > 0:
            raise ValidationError(f"wavelength must be positive (got {wavelength!r})")
        return cls(2.0 * math.pi / wavelength, R_A, R_B, r_hat, phi_A, phi_B)


@dataclass(frozen=True)
class ModeConfig:
    """Internal (polarization or generalized) emission modes of atoms A and B.

    Both are unit vectors in an effective two-dimensional space.
    """

    eps_a: np.ndarray
    eps_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eps_a", _unit(self.eps_a, "eps_a", 2, complex))
        object.__setattr__(self, "eps_b", _unit(self.eps_b, "eps_b", 2, complex))

    @classmethod
    def canonical(cls, eta: complex, chi: float = 0.0) -> ModeConfig:
        """eps_a = (1, 0), eps_b = (eta, sqrt(1 - |eta|^2) e^{i chi})."""
        eta = complex(eta)
        if abs(eta) > 1.0 + TOL:
            raise ValidationError(f"|eta| must not exceed 1 (got {abs(eta)!r})")
        if abs(eta) > 1.0:
            eta /= abs(eta)
        rest = math.sqrt(max(0.0, 1.0 - abs(eta) ** 2))
        return cls(np.array([1.0, 0.0]), np.array([eta, cmath.rect(rest, chi)]))

    @property
    def eta(self) -> complex:
        """Overlap <eps_a|eps_b>."""
        return complex(np.vdot(self.eps_a, self.eps_b))

    @property
    def eta_mag(self) -> float:
        return min(abs(self.eta), 1.0)

    @property
    def delta(self) -> float:
        return cmath.phase(self.eta)


def relative_phase(geom: EmissionGeometry) -> float:
    """k r_hat.(R_B - R_A) + phi_B - phi_A, wrapped to (-pi, pi]."""
    path = geom.k * float(np.dot(geom.r_hat, geom.R_B - geom.R_A))
    return float(wrap_phase(path + geom.phi_B - geom.phi_A))


def detection_rate(state: SourceState, theta):
    """Relative single-photon detection rate p_a + p_b + 2|gamma| cos(theta + phi).

    ``theta`` may be a scalar or an array. Values lie in [0, 2]; the rate is
    not normalized over angles.
    """
    return _rate(state, 1.0, theta)


def detection_rate_polarized(state: SourceState, modes: ModeConfig, theta):
    """Detection rate when the atoms emit into modes with overlap eta = |eta| e^{i Delta}."""
    return _rate(state, modes.eta, theta)


def _rate(state: SourceState, eta: complex, theta):
    coh = state.gamma * eta
    out = state.p_a + state.p_b + 2.0 * abs(coh) * np.cos(np.asarray(theta, dtype=float) + cmath.phase(coh))
    return float(out) if np.ndim(out) == 0 else out
