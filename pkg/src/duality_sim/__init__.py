"""Wave-particle duality of a photon emitted by a two-atom source.

The photon's fringe visibility V, which-path distinguishability D and the
source's normalized purity mu_S obey V^2 + D^2 = mu_S^2; the same holds for
the polarization-modulated total visibility V_P.
"""

from .emission import (
    EmissionGeometry,
    ModeConfig,
    detection_rate,
    detection_rate_polarized,
    relative_phase,
)
from .errors import NumericalError, ValidationError
from .fringes import (
    CountData,
    FringeScan,
    analytic_visibility,
    distinguishability,
    estimate_distinguishability,
    estimate_visibility,
    fringe_scan,
    numeric_visibility,
    simulate_counts,
    uniform_angles,
)
from .report import DualityReport, TriangleGeometry, duality_report, purity_sweep, triangle
from .source_state import (
    Purification,
    SourceState,
    duality_sum_identity,
    maximally_mixed,
    mixed_family,
    purity,
    trace_out,
)
from .stokes import (
    CoherencyMatrix,
    StokesVisibilities,
    coherency,
    polarization_visibilities,
    stokes_params,
    to_canonical,
)

__version__ = "0.1.0"
