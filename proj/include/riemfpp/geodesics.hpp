#pragma once

#include <vector>

#include "riemfpp/metric.hpp"

namespace riemfpp {

/// Gamma[i][j][k], symmetric in (j, k).
using ChristoffelArray = std::array<std::array<std::array<double, 3>, 3>, 3>;

/// Central finite-difference Christoffel symbols
/// Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{jl} - d_l g_{jk}).
/// Requires a C^2-capable metric and x at distance > fd_step from the
/// window boundary.
ChristoffelArray christoffel(const MetricField& metric, const Point& x, double fd_step);

struct GeodesicSample {
    double t = 0;  // Riemannian arc length parameter
    Point x{};
    Point v{};
    double speed = 1;  // Riemannian speed (should stay 1)
};

struct GeodesicCurve {
    std::vector<GeodesicSample> samples;
    double step = 0;
    bool truncated = false;      // stopped at the window margin
    double max_speed_drift = 0;  // max |speed - 1| along the curve

    double length() const { return samples.empty() ? 0.0 : samples.back().t; }
    Polyline points() const;
};

/// Classical RK4 on the geodesic system x' = v, v'^i = -Gamma^i_{jk} v^j v^k,
/// with v0 normalized to unit Riemannian speed. Integration stops (and the
/// result is flagged truncated) if the curve reaches the window margin.
GeodesicCurve integrate_geodesic(const MetricField& metric, const Point& x0, const Point& v0,
                                 double length, double step, double fd_step);

struct ShootResult {
    bool converged = false;
    GeodesicCurve curve;          // up to closest approach
    double riemannian_length = 0; // R(gamma) at closest approach
    double miss = 0;              // Euclidean distance to the target
    int iterations = 0;
};

/// Initial-direction shooting (2d): coarse angular sweep, then bracketed
/// refinement of the signed lateral miss. Failure to converge is reported,
/// not thrown; shooting only finds locally minimizing geodesics.
ShootResult shoot(const MetricField& metric, const Point& x, const Point& y, double tolerance,
                  double step = 1e-3, double fd_step = 1e-2, int max_iterations = 60);

struct EscapeProbeRow {
    int metric_index = 0;
    double angle = 0;
    double max_ratio = 0;  // sup_t |gamma(t)| / t
    double bound = 0;      // 1 / sqrt(lambda_min(window)) - never exceeded
    bool within_bound = false;
};

/// Escape-ratio table for unit-speed geodesics from the origin: any ratio
/// above 1/sqrt(lambda_min) would indicate a solver bug.
std::vector<EscapeProbeRow> completeness_probe(const std::vector<const MetricField*>& ensemble,
                                               int directions, double T, double step = 1e-3,
                                               double fd_step = 1e-2);

}  // namespace riemfpp
