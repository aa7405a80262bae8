"""Visibility and distinguishability: analytic values, angle sweeps, simulated counts, estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .emission import ModeConfig, detection_rate, detection_rate_polarized
from .errors import NumericalError, ValidationError
from .source_state import SourceState

TWO_PI = 2.0 * math.pi


def uniform_angles(n: int, offset: float = 0.0) -> np.ndarray:
    """``n`` equally spaced angles covering [offset, offset + 2 pi)."""
    if n < 1:
        raise ValidationError(f"angle count must be positive (got {n})")
    return offset + TWO_PI * np.arange(n) / n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FringeScan:
    angles: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float).reshape(-1)
        rates = np.array(self.rates, dtype=float).reshape(-1)
        if angles.size != rates.size:
            raise ValidationError("angles and rates must have equal length")
        if angles.size < 4:
            raise ValidationError("a fringe scan needs at least 4 points")
        if np.any(np.diff(angles) <= 0):
            raise ValidationError("scan angles must be strictly increasing")
        if angles[-1] - angles[0] >= TWO_PI:
            raise ValidationError("scan angles must lie within one period")
        object.__setattr__(self, "angles", _frozen(angles))
        object.__setattr__(self, "rates", _frozen(rates))


@dataclass(frozen=True)
class CountData:
    """A simulated (or measured) fringe record plus optional which-path tallies."""

    angles: np.ndarray
    counts: np.ndarray
    which_path_counts: Optional[Tuple[int, int]] = None
    seed: Optional[int] = None

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float).reshape(-1)
        counts = np.array(self.counts).reshape(-1)
        if counts.size != angles.size:
            raise ValidationError("counts and angles must have equal length")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValidationError("counts must be finite and non-negative")
        object.__setattr__(self, "angles", _frozen(angles))
        object.__setattr__(self, "counts", _frozen(counts))
        if self.which_path_counts is not None:
            n_a, n_b = (int(x) for x in self.which_path_counts)
            if n_a < 0 or n_b < 0:
                raise ValidationError("which-path counts must be non-negative")
            object.__setattr__(self, "which_path_counts", (n_a, n_b))


def fringe_scan(state: SourceState, angles, modes: Optional[ModeConfig] = None) -> FringeScan:
    angles = np.asarray(angles, dtype=float)
    if modes is None:
        rates = detection_rate(state, angles)
    else:
        rates = detection_rate_polarized(state, modes, angles)
    return FringeScan(angles, rates)


def analytic_visibility(state: SourceState, eta_mag: float = 1.0) -> float:
    """Closed-form fringe visibility 2 |gamma| |eta|."""
    if not 0.0 <= eta_mag <= 1.0:
        raise ValidationError(f"eta_mag must lie in [0, 1] (got {eta_mag!r})")
    return min(2.0 * abs(state.gamma) * eta_mag, 1.0)


def numeric_visibility(scan: FringeScan) -> float:
    """(max - min) / (max + min) of the sampled rates."""
    if scan.angles.size < 64:
        raise ValidationError(f"numeric visibility needs at least 64 points (got {scan.angles.size})")
    hi, lo = float(scan.rates.max()), float(scan.rates.min())
    if hi + lo <= 0.0:
        raise NumericalError("degenerate scan: all rates are zero")
    return (hi - lo) / (hi + lo)


def distinguishability(state: SourceState) -> float:
    return abs(state.p_a - state.p_b)


def simulate_counts(
    state: SourceState,
    modes: Optional[ModeConfig],
    angles,
    mean_total: float,
    seed: int,
) -> CountData:
    """Draw a Poisson fringe record and binomial which-path tallies.

    Each angle gets a Poisson count with mean ``mean_total * p_D(theta_i) / sum_j p_D(theta_j)``.
    The which-path pair is Binomial(total counts, p_a). Output depends only on the
    arguments; a fresh generator is built from ``seed``.
    """
    angles = np.asarray(angles, dtype=float).reshape(-1)
    if angles.size == 0:
        raise ValidationError("angle list is empty")
    if angles.size < 8:
        raise ValidationError(f"need at least 8 angles (got {angles.size})")
    if not (math.isfinite(mean_total) and mean_total > 0):
        raise ValidationError(f"mean_total must be positive (got {mean_total!r})")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"seed must be an integer (got {seed!r})")

    rates = detection_rate(state, angles) if modes is None else detection_rate_polarized(state, modes, angles)
    rates = np.clip(rates, 0.0, None)
    norm = rates.sum()
    if norm <= 0:
        raise NumericalError("detection rate vanishes on every angle")

    rng = np.random.default_rng(int(seed))
    counts = rng.poisson(mean_total * rates / norm)
    total = int(counts.sum())
    n_a = int(rng.binomial(total, min(max(state.p_a, 0.0), 1.0))) if total else 0
    return CountData(angles, counts, (n_a, total - n_a), int(seed))


def _fit_cosine(angles: np.ndarray, counts: np.ndarray):
    """Least-squares a + b cos + c sin. Returns (coefficients, inverse normal matrix, design)."""
    design = np.column_stack([np.ones_like(angles), np.cos(angles), np.sin(angles)])
    normal = design.T @ design
    if np.linalg.matrix_rank(design) < 3:
        raise NumericalError("singular fit: fewer than 3 independent angles")
    normal_inv = np.linalg.inv(normal)
    coef = normal_inv @ (design.T @ counts)
    return coef, normal_inv, design


def estimate_visibility(data: CountData) -> Tuple[float, float]:
    """Visibility sqrt(b^2 + c^2) / a from a linear cosine fit, with propagated error.

    Count variances are taken as Poisson, using the fitted mean at each angle.
    """
    if data.angles.size < 8:
        raise ValidationError(f"need at least 8 angles (got {data.angles.size})")
    counts = data.counts.astype(float)
    if counts.sum() <= 0:
        raise ValidationError("no counts recorded")
    (a, b, c), normal_inv, design = _fit_cosine(data.angles, counts)
    if a <= 0:
        raise NumericalError(f"unphysical fit: mean level a = {a!r} is not positive")

    amp = math.hypot(b, c)
    v_hat = amp / a

    # sandwich covariance with Poisson variances
    var = np.clip(design @ np.array([a, b, c]), 0.0, None)
    cov = normal_inv @ (design.T * var) @ design @ normal_inv
    if amp > 0:
        grad = np.array([-amp / a**2, b / (amp * a), c / (amp * a)])
        stderr = math.sqrt(max(float(grad @ cov @ grad), 0.0))
    else:
        stderr = math.sqrt(max(cov[1, 1] + cov[2, 2], 0.0)) / a
    return v_hat, stderr


def estimate_distinguishability(data: CountData) -> Tuple[float, float]:
    """|n_a - n_b| / (n_a + n_b) with its binomial standard error."""
    if data.which_path_counts is None:
        raise ValidationError("which-path counts are missing")
    n_a, n_b = data.which_path_counts
    total = n_a + n_b
    if total <= 0:
        raise ValidationError("which-path counts are all zero")
    frac = n_a / total
    return abs(n_a - n_b) / total, 2.0 * math.sqrt(frac * (1.0 - frac) / total)
