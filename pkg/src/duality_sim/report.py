"""Duality reports (V, D, mu_S), purity sweeps and the right-triangle construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .emission import ModeConfig
from .errors import NumericalError, ValidationError
from .fringes import analytic_visibility, distinguishability
from .source_state import SourceState, mixed_family, purity
from .stokes import DEFAULT_GRID, polarization_visibilities

SCALAR = "scalar"
POLARIZED = "polarized"


@dataclass(frozen=True)
class DualityReport:
    visibility: float
    distinguishability: float
    purity: float
    mode: str = SCALAR

    def __post_init__(self):
        for name in ("visibility", "distinguishability", "purity"):
            value = getattr(self, name)
            if not -1e-12 <= value <= 1.0 + 1e-12:
                raise ValidationError(f"{name} must lie in [0, 1] (got {value!r})")
        if self.mode not in (SCALAR, POLARIZED):
            raise ValidationError(f"unknown report mode {self.mode!r}")

    @property
    def residual(self) -> float:
        """Signed V^2 + D^2 - mu_S^2."""
        return self.visibility**2 + self.distinguishability**2 - self.purity**2


@dataclass(frozen=True)
class TriangleGeometry:
    """Right triangle with hypotenuse on the x-axis from (0, 0) to (mu_S, 0).

    The D leg joins the origin to the apex, the V leg joins the apex to (mu_S, 0).
    Mirroring the apex across the x-axis gives the second triangle on the same diameter.
    """

    hypotenuse: float
    leg_v: float
    leg_d: float
    apex: Tuple[float, float]

    @property
    def mirrored_apex(self) -> Tuple[float, float]:
        return self.apex[0], -self.apex[1]

    @property
    def vertices(self) -> Tuple[Tuple[float, float], ...]:
        return (0.0, 0.0), self.apex, (self.hypotenuse, 0.0)


def duality_report(
    state: SourceState,
    modes: Optional[ModeConfig] = None,
    grid_points: int = DEFAULT_GRID,
) -> DualityReport:
    """Scalar report with V = 2|gamma|, or polarized report with V_P from a Stokes sweep."""
    if modes is None:
        vis, mode = analytic_visibility(state), SCALAR
    else:
        vis, mode = polarization_visibilities(state, modes, grid_points).v_total, POLARIZED
    return DualityReport(vis, distinguishability(state), purity(state), mode)


def purity_sweep(
    p_a: float,
    mixing_values: Sequence[float],
    modes: Optional[ModeConfig] = None,
    phase: float = 0.0,
    grid_points: int = DEFAULT_GRID,
) -> list[DualityReport]:
    return [duality_report(mixed_family(p_a, m, phase), modes, grid_points) for m in mixing_values]


def triangle(report: DualityReport, tol: float = 1e-9) -> TriangleGeometry:
    """Thales construction for a report whose residual is within ``tol``.

    Polarized reports carry the O(h^2) error of the grid sweep, so callers
    building triangles from them pass a looser ``tol``.
    """
    if abs(report.residual) > tol:
        raise NumericalError(
            f"V^2 + D^2 - mu_S^2 = {report.residual:.3g} exceeds {tol:g}; triangle undefined"
        )
    mu, v, d = report.purity, report.visibility, report.distinguishability
    if mu == 0.0:
        return TriangleGeometry(0.0, 0.0, 0.0, (0.0, 0.0))
    return TriangleGeometry(mu, v, d, (d * d / mu, v * d / mu))
