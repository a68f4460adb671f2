"""Rotationally symmetric free boundary minimal hypersurfaces in
conformally flat exteriors (Schwarzschild and friends).

The package solves the generating-curve ODE, certifies height bounds and
slope envelopes, evaluates intrinsic/ambient curvature quantities, and
counts unstable directions of the boundary slice via a Sturm-Liouville
reduction. A compiled kernel is used for the hot loops when available,
with a bit-identical pure Python twin as fallback.
"""

from . import _kernels
from .metrics import (
    ConformalMetric,
    HypothesisReport,
    schwarzschild_metric,
    cylinder_metric,
    beta_metric,
    flat_metric,
    custom_metric,
    horizon_radius,
    validate_hypotheses,
)
from .profile import (
    InitialData,
    ProfileCurve,
    Termination,
    initial_conditions,
    solve_profile,
    psi_diagnostic,
    convergence_to_sigma0,
)

__version__ = "0.1.0"


def backend():
    """Name of the active numeric kernel ("compiled" or "python")."""
    return _kernels.backend_name()
