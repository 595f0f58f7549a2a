"""Group-invariant radial solutions of iu_t = u_rr + (n-1)/r u_r + k|u|^p u.

Subpackages are plain modules:

core      parameters, points, grids, finite differences, error types
specfun   Bessel, 1F1, Whittaker M, adaptive Simpson
symmetry  point-symmetry generators, brackets, group actions, invariants
catalog   closed-form solution families with witness fixtures
reduce    reduced ODEs, polar forms, first integrals, charts, integrator
conserve  conserved currents, global integrals, modulation balance
verify    PDE residuals, orbit checks, quadrature checks, fixture suite
cli       command line front end
"""

from .core import (
    Parameters,
    SpacetimePoint,
    Grid,
    Solution,
    validate_params,
    partial_derivative,
    RadialNLSError,
)

__all__ = [
    "Parameters",
    "SpacetimePoint",
    "Grid",
    "Solution",
    "validate_params",
    "partial_derivative",
    "RadialNLSError",
]

__version__ = "0.1.0"
