"""Treatment effect estimation and inference along a two-dimensional assignment boundary.

The heavy lifting lives in the compiled extension ``rd2d._core``; this package
re-exports its entry points:

- ``estimate`` / ``bandwidths``: bivariate location-based analysis,
- ``estimate_dist`` / ``bandwidths_dist`` / ``build_distances``: distance-based analysis,
- ``generate_dgp`` / ``true_tau`` / ``boundary_grid`` / ``run_mc``: the calibrated
  synthetic designs and the Monte Carlo harness.
"""

from rd2d._core import (
    NumericalError,
    ValidationError,
    bandwidths,
    bandwidths_dist,
    boundary_grid,
    build_distances,
    estimate,
    estimate_dist,
    generate_dgp,
    run_mc,
    true_tau,
    __version__,
)

__all__ = [
    "NumericalError",
    "ValidationError",
    "bandwidths",
    "bandwidths_dist",
    "boundary_grid",
    "build_distances",
    "estimate",
    "estimate_dist",
    "generate_dgp",
    "run_mc",
    "true_tau",
    "__version__",
]
