"""Sparse linear array design and coarray-MUSIC DOA benchmarking.

The package covers the full pipeline from integer sensor geometries to
Monte Carlo RMSE curves:

* ``geometry``   -- closed-form EMISC arrays plus ULA / nested / coprime
  baselines, all on the half-wavelength integer grid.
* ``coarray``    -- difference coarrays, weight functions, holes, uniform
  degrees of freedom, and the EMISC/IMISC closed-form predictors.
* ``coupling``   -- banded mutual-coupling matrices and coupling leakage.
* ``signals``    -- snapshot simulation, sample covariance, and the
  lag-averaged coarray pseudo snapshot.
* ``estimation`` -- spatial-smoothing MUSIC on the virtual array, with a
  scikit-learn style :class:`CoarrayMusic` estimator.
* ``harness``    -- config-driven experiment runner emitting CSV.
"""

from .geometry import (
    ArrayGeometry,
    ConstructionError,
    coprime_positions,
    custom_positions,
    emisc_positions,
    format_geometry_line,
    geometry_from_record,
    geometry_to_record,
    max_ies,
    nested_positions,
    parse_geometry_line,
    parse_geometry_spec,
    ula_positions,
)
from .coarray import (
    CoarrayTable,
    RangeCheckReport,
    closed_form_udof_emisc,
    closed_form_udof_imisc,
    closed_form_weights_emisc,
    closed_form_weights_imisc,
    difference_coarray,
    emisc_hole_position,
    udof,
    verify_consecutive_ranges,
)
from .coupling import CouplingModel, coupling_coefficients, coupling_leakage, coupling_matrix
from .signals import (
    SnapshotMatrix,
    SourceScenario,
    analytic_covariance,
    coarray_pseudo_snapshot,
    sample_covariance,
    simulate_snapshots,
    steering_matrix,
)
from .estimation import (
    CoarrayMusic,
    EstimationResult,
    MusicConfig,
    estimate_doas,
    music_spectrum,
    rmse,
    smoothed_matrix,
)
from .harness import (
    ExperimentConfig,
    parse_config,
    run_curves,
    run_design_report,
    run_rmse_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "CoarrayMusic",
    "CoarrayTable",
    "ConstructionError",
    "CouplingModel",
    "EstimationResult",
    "ExperimentConfig",
    "MusicConfig",
    "RangeCheckReport",
    "SnapshotMatrix",
    "SourceScenario",
    "analytic_covariance",
    "closed_form_udof_emisc",
    "closed_form_udof_imisc",
    "closed_form_weights_emisc",
    "closed_form_weights_imisc",
    "coarray_pseudo_snapshot",
    "coprime_positions",
    "coupling_coefficients",
    "coupling_leakage",
    "coupling_matrix",
    "custom_positions",
    "difference_coarray",
    "emisc_hole_position",
    "emisc_positions",
    "estimate_doas",
    "format_geometry_line",
    "geometry_from_record",
    "geometry_to_record",
    "max_ies",
    "music_spectrum",
    "nested_positions",
    "parse_config",
    "parse_geometry_line",
    "parse_geometry_spec",
    "rmse",
    "run_curves",
    "run_design_report",
    "run_rmse_sweep",
    "sample_covariance",
    "simulate_snapshots",
    "smoothed_matrix",
    "steering_matrix",
    "udof",
    "ula_positions",
    "verify_consecutive_ranges",
]
