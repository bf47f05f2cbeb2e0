#pragma once

#include <cstdint>
#include <vector>

#include "riemfpp/covariance.hpp"
#include "riemfpp/grid.hpp"

namespace riemfpp {

enum class InterpOrder { Linear, Cubic };

/// Diagnostics recorded when a field is produced by circulant embedding.
struct SampleDiagnostics {
    std::array<int64_t, 3> embedding{0, 0, 0};
    double clipped_fraction = 0.0;     // fraction of eigenvalues clipped to 0
    double min_eigenvalue_ratio = 0.0; // min eig / max eig before clipping
};

/// Stationary Gaussian field sampled on a regular grid. Immutable after
/// construction; interpolation is multilinear by default, or an
/// interpolating cubic B-spline (C^2) when prepare_cubic() has been called.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;  // node values, x fastest
    uint64_t seed = 0;
    CovarianceModel covariance;
    SampleDiagnostics diagnostics;

    ScalarField() = default;
    ScalarField(GridSpec g, std::vector<double> v);

    double node_value(const std::array<int64_t, 3>& idx) const {
        return values[grid.flat_index(idx)];
    }

    /// Interpolated value at x; throws OutOfWindowError outside the window.
    double value(const Point& x, InterpOrder order = InterpOrder::Linear) const;

    double min_node_value() const;
    double max_node_value() const;

    /// Compute cubic B-spline coefficients (idempotent). Call before any
    /// cubic evaluation; fields are treated as immutable afterwards.
    void prepare_cubic();
    bool cubic_ready() const { return !cubic_coeffs_.empty(); }

  private:
    std::vector<double> cubic_coeffs_;
    double value_linear(const Point& x) const;
    double value_cubic(const Point& x) const;
};

}  // namespace riemfpp
