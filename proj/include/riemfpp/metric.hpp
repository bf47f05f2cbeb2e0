#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "riemfpp/geometry.hpp"
#include "riemfpp/scalar_field.hpp"

namespace riemfpp {

/// Pointwise map from scalar-field values (or coordinates) to an SPD matrix.
///
/// paper-diagonal: diagonal entries softplus(xi_i(x)) = log(1 + e^{xi_i(x)}).
/// constant / conformal / hyperbolic-halfplane are closed-form oracles used
/// to validate every numerical solver downstream.
struct MetricTransform {
    enum class Kind { PaperDiagonal, Constant, Conformal, HyperbolicHalfPlane, User };

    Kind kind = Kind::Constant;
    std::vector<double> parameters;  // Constant: {diagonal value}
    std::function<MetricValue(const Point&, int)> user;
    bool user_is_c2 = false;

    std::string kind_name() const;
    static Kind kind_from_name(const std::string& name);
};

/// log(1 + e^x), overflow-stable.
inline double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct CubeExtremes {
    LatticePoint site{};
    double lambda = 0;  // min eigenvalue over the cube sub-grid
    double Lambda = 0;  // max eigenvalue over the cube sub-grid
    int samples_per_axis = 16;
};

struct CurveLength {
    double riemannian = 0;
    double euclidean = 0;
};

/// Riemannian metric g on a rectangular window. Immutable and shareable
/// across threads; all queries are pure reads.
class MetricField {
  public:
    MetricField(MetricTransform transform, std::vector<std::shared_ptr<ScalarField>> fields,
                GridSpec window, InterpOrder interp = InterpOrder::Linear);

    static MetricField constant(int dimension, double diag_value, GridSpec window);
    static MetricField hyperbolic_halfplane(GridSpec window);
    static MetricField paper_diagonal(std::shared_ptr<ScalarField> field,
                                      InterpOrder interp = InterpOrder::Linear);
    static MetricField paper_diagonal(std::vector<std::shared_ptr<ScalarField>> fields,
                                      InterpOrder interp = InterpOrder::Linear);
    static MetricField conformal(std::shared_ptr<ScalarField> field,
                                 InterpOrder interp = InterpOrder::Linear);

    int dimension() const { return window_.dimension; }
    const GridSpec& window() const { return window_; }
    const MetricTransform& transform() const { return transform_; }
    const std::vector<std::shared_ptr<const ScalarField>>& fields() const { return fields_; }
    InterpOrder interpolation() const { return interp_; }

    /// True when the metric is C^2 (analytic transform, or cubic-spline
    /// interpolated fields pushed through a smooth transform).
    bool is_c2() const;

    /// g(x); throws OutOfWindowError outside the window.
    MetricValue value_at(const Point& x) const;

    /// Fast path for metrics of the form s(x) * I.
    bool is_scalar_shape() const;
    double scalar_at(const Point& x) const;

    /// sqrt(v^T g(x) v)
    double speed(const Point& x, const Point& v) const;

    /// Composite-Simpson Riemannian and Euclidean length of a polyline.
    /// Each segment uses at least min_intervals Simpson intervals, growing
    /// with segment length so long chords stay resolved.
    CurveLength curve_length(const Polyline& curve, int min_intervals = 8,
                             double max_interval_length = 0.05) const;

    /// Eigenvalue extremes of g over the closed unit cube centered at z,
    /// scanned on a nested dyadic sub-grid (samples_per_axis subdivisions).
    CubeExtremes cube_extremes(const LatticePoint& z, int samples_per_axis = 16) const;

    /// Essential minimum of the smallest eigenvalue over the window.
    /// Exact for monotone diagonal transforms of linearly interpolated
    /// fields and for the analytic transforms; otherwise a dense-grid scan.
    double lambda_min_window() const;
    double lambda_max_window() const;

  private:
    MetricTransform transform_;
    std::vector<std::shared_ptr<const ScalarField>> fields_;
    GridSpec window_;
    InterpOrder interp_;

    void check_window(const Point& x) const;
};

struct MgfEstimate {
    double value = 0;
    double ci_lo = 0;
    double ci_hi = 0;
};

/// Sample mean of e^{r * Lambda} with a bootstrap percentile CI.
MgfEstimate mgf_estimate(const std::vector<double>& lambda_samples, double r,
                         int bootstrap = 1000, uint64_t seed = 1234);

struct TailCheckResult {
    double empirical = 0;
    double bound = 0;           // 2 e^{-u^2/2}
    double standard_error = 0;  // binomial SE of the empirical tail
    bool pass = false;          // empirical <= bound + 3 SE
};

/// Empirical P(Lambda > u) against the Gaussian tail bound 2 e^{-u^2/2}
/// (valid for the paper-diagonal transform with unit-variance fields).
TailCheckResult tail_check(const std::vector<double>& lambda_samples, double u);

}  // namespace riemfpp
