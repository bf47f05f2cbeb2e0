"""Riemannian first-passage percolation laboratory.

Random Riemannian metrics on a window, continuum distances and balls via
stencil shortest paths, geodesic integration, and limit-shape estimation.
"""

from ._core import (  # noqa: F401
    CovarianceModel,
    DistanceField,
    DistanceResult,
    GeodesicCurve,
    GridSpec,
    MetricField,
    OutOfWindowError,
    ResourceLimitError,
    ScalarField,
    SolverOptions,
    WindowTooSmallError,
    __version__,
    ball,
    christoffel,
    curve_to_sites,
    distance,
    distance_field,
    enumerate_connected_sets,
    integrate_geodesic,
    is_star_connected,
    richardson_refine,
    run_experiment_file,
    sample_field,
    shoot,
    star_adjacent,
    stencil_factor,
)
