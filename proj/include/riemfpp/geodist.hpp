#pragma once

#include <optional>
#include <vector>

#include "riemfpp/metric.hpp"
#include "riemfpp/stencil.hpp"

namespace riemfpp {

struct SolverOptions {
    double h = 0.05;               // solver grid spacing
    int stencil_k = 3;             // stencil radius
    int quad_intervals = 8;        // Simpson intervals per edge
    double padding_fraction = 0.5; // window margin as a fraction of |x-y|
    bool chord_edges = true;       // add straight terminal-terminal edges
    double quad_tolerance = 1e-6;  // folded into the eta-adjusted bracket
};

/// Upper-bound distance estimate with a certified bracket.
/// value = min(stencil-graph distance, straight-chord Riemannian length);
/// both are genuine curve lengths, so value >= d(x, y) always, and
/// value / eta_adjusted <= d(x, y).
struct DistanceResult {
    double value = 0;
    double graph_value = 0;
    double chord_value = std::numeric_limits<double>::infinity();
    Point x{}, y{};  // endpoints snapped to solver nodes
    double h = 0;
    int stencil_k = 0;
    double eta = 1;
    int quad_intervals = 8;
    double lower = 0, upper = 0;  // error bracket
    double lambda_window = 0;     // essential min eigenvalue over the window
    bool exit_certified = false;  // no optimal grid path could leave the box
};

DistanceResult distance(const MetricField& metric, const Point& x, const Point& y,
                        const SolverOptions& opts = {});

/// Single-source truncated distance field on a solver grid anchored so the
/// source is a node. Values are +inf beyond t_max.
struct DistanceField {
    GridSpec grid;
    std::vector<double> values;
    Point source{};
    double t_max = 0;
    double eta = 1;
    double lambda_window = 0;
    SolverOptions opts;

    double at_node(const std::array<int64_t, 3>& idx) const {
        return values[size_t(grid.flat_index(idx))];
    }
    /// value at the node nearest to p
    double at_point(const Point& p) const;
};

DistanceField distance_field(const MetricField& metric, const Point& source, double t_max,
                             const SolverOptions& opts = {});

/// Boundary of B_t = {x : d(source, x) <= t} extracted by marching squares
/// (2d only). Loops are closed (front() == back()).
struct BallBoundary {
    double t = 0;
    std::vector<Polyline> loops;
    double delta_h = 0;  // resolution tolerance of boundary values
};

BallBoundary ball(const MetricField& metric, double t, const SolverOptions& opts = {},
                  const Point& source = {});
BallBoundary ball_from_field(const DistanceField& field, double t);

struct RichardsonResult {
    double value = 0;
    double observed_order = 0;  // NaN unless three levels were supplied
};

/// Two-level Richardson extrapolation at an assumed order.
RichardsonResult richardson_refine(double value_h, double value_h2, double order = 1.0);
/// Three-level variant; also reports the observed convergence order.
RichardsonResult richardson_refine3(double value_h, double value_h2, double value_h4);

struct UniformKRow {
    double t = 0;
    double empirical_K = 0;   // max d(tx, ty) / (t rho) over sampled pairs
    double segment_bound = 0; // max over pairs of R(straight segment)/(t rho)
};

/// Empirical version of the uniform linear-growth constant: sample pairs
/// with |x - y| <= rho, scale by t, and take the worst ratio.
std::vector<UniformKRow> uniform_K_estimate(const std::vector<const MetricField*>& ensemble,
                                            const std::vector<double>& t_list, double rho,
                                            int pair_count, uint64_t seed,
                                            const SolverOptions& opts = {});

}  // namespace riemfpp
