"""Two-mode coherence: coherency matrix, Stokes parameters, polarization visibilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .emission import ModeConfig
from .errors import NumericalError, ValidationError
from .fringes import uniform_angles
from .source_state import TOL, SourceState

DEFAULT_GRID = 4096
MIN_GRID = 256


@dataclass(frozen=True)
class CoherencyMatrix:
    J: np.ndarray

    def __post_init__(self):
        J = np.array(self.J, dtype=complex)
        if J.shape != (2, 2):
            raise ValidationError(f"coherency matrix must be 2x2 (got shape {J.shape})")
        if np.max(np.abs(J - J.conj().T)) > TOL:
            raise ValidationError("coherency matrix must be Hermitian")
        if np.linalg.eigvalsh(J).min() < -TOL:
            raise ValidationError("coherency matrix must be positive semidefinite")
        J.flags.writeable = False
        object.__setattr__(self, "J", J)


@dataclass(frozen=True)
class StokesVisibilities:
    v0: float
    v1: float
    v2: float
    v3: float

    @property
    def v_total(self) -> float:
        return math.sqrt(0.5 * (self.v0**2 + self.v1**2 + self.v2**2 + self.v3**2))

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return self.v0, self.v1, self.v2, self.v3, self.v_total


def coherency_array(state: SourceState, modes: ModeConfig, theta) -> np.ndarray:
    """Coherency matrices J(theta), shape ``theta.shape + (2, 2)``.

    J = p_a a a^+ + p_b b b^+ + gamma e^{i theta} b a^+ + h.c., so that
    Tr J(theta) is the polarized detection rate.
    """
    a, b = modes.eps_a, modes.eps_b
    aa = np.outer(a, a.conj())
    bb = np.outer(b, b.conj())
    ba = np.outer(b, a.conj())
    theta = np.asarray(theta, dtype=float)
    cross = (state.gamma * np.exp(1j * theta))[..., None, None] * ba
    return state.p_a * aa + state.p_b * bb + cross + np.swapaxes(cross, -1, -2).conj()


def coherency(state: SourceState, modes: ModeConfig, theta: float) -> CoherencyMatrix:
    return CoherencyMatrix(coherency_array(state, modes, float(theta)))


def stokes_params(J) -> tuple:
    """(S0, S1, S2, S3) with S2 = 2 Re J12 and S3 = -2 Im J12.

    Accepts a :class:`CoherencyMatrix` or an array of matrices in the last two axes.
    """
    if isinstance(J, CoherencyMatrix):
        J = J.J
    J = np.asarray(J)
    j11, j22, j12 = J[..., 0, 0].real, J[..., 1, 1].real, J[..., 0, 1]
    s = (j11 + j22, j11 - j22, 2.0 * j12.real, -2.0 * j12.imag)
    if np.ndim(s[0]) == 0:
        return tuple(float(x) for x in s)
    return s


def to_canonical(modes: ModeConfig, chi: float = 0.0) -> ModeConfig:
    """Rotate a mode pair so that eps_a = (1, 0) and eps_b = (eta, sqrt(1-|eta|^2) e^{i chi}).

    The overlap eta is preserved.
    """
    a, b = modes.eps_a, modes.eps_b
    eta = complex(np.vdot(a, b))
    perp = b - eta * a
    rest = float(np.linalg.norm(perp))
    if rest > 1e-12:
        perp = perp / rest * np.exp(-1j * chi)
    else:
        perp = np.array([-a[1].conjugate(), a[0].conjugate()])
    U = np.vstack([a.conj(), perp.conj()])
    return ModeConfig(U @ a, U @ b)


def stokes_sweep(state: SourceState, modes: ModeConfig, grid_points: int = DEFAULT_GRID):
    """Angles and (S0, S1, S2, S3) arrays over a uniform grid on [0, 2 pi)."""
    theta = uniform_angles(grid_points)
    return theta, stokes_params(coherency_array(state, modes, theta))


def _peak(y: np.ndarray) -> float:
    """Maximum of a periodic uniformly sampled curve, refined by a 3-point parabola.

    For sinusoids the refinement lowers the grid error from O(h^2) to O(h^4).
    """
    i = int(np.argmax(y))
    left, mid, right = y[i - 1], y[i], y[(i + 1) % y.size]
    curv = left - 2.0 * mid + right
    slope = right - left
    if curv < 0 and abs(slope) <= -2.0 * curv:
        return float(mid - slope * slope / (8.0 * curv))
    return float(mid)


def polarization_visibilities(
    state: SourceState, modes: ModeConfig, grid_points: int = DEFAULT_GRID
) -> StokesVisibilities:
    """Visibilities V_j = (S_j max - S_j min) / (S_0 max + S_0 min) from a dense theta sweep."""
    if grid_points < MIN_GRID:
        raise ValidationError(f"grid too coarse: need at least {MIN_GRID} points (got {grid_points})")
    _, s = stokes_sweep(state, modes, grid_points)
    extremes = [(_peak(sj), -_peak(-sj)) for sj in s]
    denom = extremes[0][0] + extremes[0][1]
    if denom <= 0:
        raise NumericalError("total intensity vanishes over the sweep")
    return StokesVisibilities(*(max(hi - lo, 0.0) / denom for hi, lo in extremes))
