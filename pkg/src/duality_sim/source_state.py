"""Two-atom source: purifications, reduced density matrix and purity.

The atomic subspace is spanned by |e_A g_B> (index 0) and |g_A e_B> (index 1).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

TOL = 1e-12
# Inputs off by less than this are renormalized (with a warning) instead of rejected.
RENORM_TOL = 1e-9


def _check_unit(value: float, what: str) -> float:
    """Return the factor that rescales ``value`` to 1, or raise.

    ``value`` is a squared norm or a probability sum.
    """
    err = abs(value - 1.0)
    if err <= TOL:
        return 1.0
    if err <= RENORM_TOL:
        warnings.warn(f"{what} = {value!r} differs from 1 by {err:.3g}; renormalizing", stacklevel=3)
        return 1.0 / value
    raise ValidationError(f"{what} must equal 1 (got {value!r})")


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=complex).reshape(-1) if np.ndim(v) else np.array([v], dtype=complex)
    if arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class Purification:
    """Pure state c_a|eg>|m> + c_b|ge>|n> on atoms plus environment."""

    c_a: complex
    c_b: complex
    m: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        c_a, c_b = complex(self.c_a), complex(self.c_b)
        m, n = _as_vector(self.m, "m"), _as_vector(self.n, "n")
        if m.shape != n.shape:
            raise ValidationError(
                f"environment states m and n must have equal dimension ({m.size} != {n.size})"
            )
        scale = _check_unit(abs(c_a) ** 2 + abs(c_b) ** 2, "|c_a|^2 + |c_b|^2")
        c_a, c_b = c_a * math.sqrt(scale), c_b * math.sqrt(scale)
        m = m * math.sqrt(_check_unit(float(np.vdot(m, m).real), "||m||^2"))
        n = n * math.sqrt(_check_unit(float(np.vdot(n, n).real), "||n||^2"))
        m.flags.writeable = False
        n.flags.writeable = False
        object.__setattr__(self, "c_a", c_a)
        object.__setattr__(self, "c_b", c_b)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    @property
    def env_dim(self) -> int:
        return self.m.size


@dataclass(frozen=True)
class SourceState:
    """Reduced atomic density matrix [[p_a, gamma], [conj(gamma), p_b]]."""

    p_a: float
    p_b: float
    gamma: complex = 0j

    def __post_init__(self):
        p_a, p_b, gamma = float(self.p_a), float(self.p_b), complex(self.gamma)
        if not (math.isfinite(p_a) and math.isfinite(p_b) and cmath.isfinite(gamma)):
            raise ValidationError("p_a, p_b and gamma must be finite")
        if p_a < -TOL or p_b < -TOL:
            raise ValidationError(f"probabilities must be non-negative (p_a={p_a!r}, p_b={p_b!r})")
        p_a, p_b = max(p_a, 0.0), max(p_b, 0.0)
        scale = _check_unit(p_a + p_b, "p_a + p_b")
        p_a, p_b = p_a * scale, p_b * scale

        bound = math.sqrt(p_a * p_b)
        excess = abs(gamma) - bound
        if excess > TOL:
            if excess > RENORM_TOL:
                raise ValidationError(
                    f"Cauchy-Schwarz bound violated: |gamma| = {abs(gamma)!r} > "
                    f"sqrt(p_a*p_b) = {bound!r}"
                )
            warnings.warn(f"|gamma| exceeds sqrt(p_a*p_b) by {excess:.3g}; clipping", stacklevel=2)
        if excess > 0:
            # rounding can leave |gamma| an ulp above the bound; shrink until it holds exactly
            gamma *= bound / abs(gamma)
            while abs(gamma) > bound:
                gamma *= 1.0 - 2.0**-52
        object.__setattr__(self, "p_a", p_a)
        object.__setattr__(self, "p_b", p_b)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def from_matrix(cls, rho) -> SourceState:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValidationError(f"density matrix must be 2x2, got shape {rho.shape}")
        if abs(rho[0, 1] - np.conj(rho[1, 0])) > TOL:
            raise ValidationError("density matrix must be Hermitian")
        if abs(rho[0, 0].imag) > TOL or abs(rho[1, 1].imag) > TOL:
            raise ValidationError("density matrix diagonal must be real")
        return cls(rho[0, 0].real, rho[1, 1].real, rho[0, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.p_a, self.gamma], [self.gamma.conjugate(), self.p_b]])

    @property
    def phase(self) -> float:
        """arg(gamma); 0 when gamma vanishes."""
        return cmath.phase(self.gamma)


def trace_out(purification: Purification) -> SourceState:
    """Discard the environment and return the reduced atomic state.

    The off-diagonal element is c_a * conj(c_b) * <n|m>, which keeps
    |gamma| <= |c_a c_b| by Cauchy-Schwarz.
    """
    p = purification
    overlap = complex(np.vdot(p.n, p.m))
    return SourceState(abs(p.c_a) ** 2, abs(p.c_b) ** 2, p.c_a * p.c_b.conjugate() * overlap)


def purity(state: SourceState) -> float:
    """Normalized purity sqrt(2 Tr(rho^2) - 1), in [0, 1]."""
    tr_rho2 = state.p_a**2 + state.p_b**2 + 2.0 * abs(state.gamma) ** 2
    return math.sqrt(min(max(2.0 * tr_rho2 - 1.0, 0.0), 1.0))


def duality_sum_identity(state: SourceState) -> tuple[float, float, float]:
    """The duality sum written three ways.

    Returns ``((p_a - p_b)^2 + 4|gamma|^2, 1 - 4 det(rho), 2 Tr(rho^2) - 1)``.
    """
    g2 = abs(state.gamma) ** 2
    lhs = (state.p_a - state.p_b) ** 2 + 4.0 * g2
    det = state.p_a * state.p_b - g2
    tr_rho2 = state.p_a**2 + state.p_b**2 + 2.0 * g2
    return lhs, 1.0 - 4.0 * det, 2.0 * tr_rho2 - 1.0


def mixed_family(p_a: float, mixing: float, phase: float = 0.0) -> SourceState:
    """State with populations (p_a, 1 - p_a) and coherence mixing * sqrt(p_a p_b) e^{i phase}.

    ``mixing = 1`` is pure, ``mixing = 0`` fully dephased.
    """
    if not 0.0 <= p_a <= 1.0:
        raise ValidationError(f"p_a must lie in [0, 1] (got {p_a!r})")
    if not 0.0 <= mixing <= 1.0:
        raise ValidationError(f"mixing must lie in [0, 1] (got {mixing!r})")
    if not math.isfinite(phase):
        raise ValidationError("phase must be finite")
    p_b = 1.0 - p_a
    return SourceState(p_a, p_b, cmath.rect(mixing * math.sqrt(p_a * p_b), phase))


def maximally_mixed() -> SourceState:
    return SourceState(0.5, 0.5, 0j)
