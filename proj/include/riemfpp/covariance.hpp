#pragma once

#include <string>
#include <vector>

#include "riemfpp/errors.hpp"

namespace riemfpp {

/// Isotropic covariance model with compact support: c(r) = 0 for r >= range.
///
/// Built-ins: the spherical model (positive definite for d <= 3) and a
/// Wendland model (psi_{3,2}, C^4 at the origin, positive definite for
/// d <= 3). Tabulated models interpolate user knots linearly; positive
/// definiteness is the caller's responsibility and is caught at embedding
/// time if violated.
struct CovarianceModel {
    enum class Kind { Spherical, Wendland, Tabulated };

    Kind kind = Kind::Spherical;
    double variance = 1.0;
    double range = 1.0;
    std::vector<double> knots_r;  // tabulated only, ascending, knots_r[0] == 0
    std::vector<double> knots_c;

    static CovarianceModel spherical(double variance, double range);
    static CovarianceModel wendland(double variance, double range);
    static CovarianceModel tabulated(std::vector<double> r, std::vector<double> c);

    /// c(r). Exactly zero for r >= range; throws std::domain_error for r < 0.
    double operator()(double r) const;

    void validate(int dimension) const;

    std::string kind_name() const;
    static Kind kind_from_name(const std::string& name);
};

}  // namespace riemfpp
