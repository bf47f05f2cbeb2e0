#include "riemfpp/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riemfpp {

CovarianceModel CovarianceModel::spherical(double variance, double range) {
    CovarianceModel m;
    m.kind = Kind::Spherical;
    m.variance = variance;
    m.range = range;
    return m;
}

CovarianceModel CovarianceModel::wendland(double variance, double range) {
    CovarianceModel m;
    m.kind = Kind::Wendland;
    m.variance = variance;
    m.range = range;
    return m;
}

CovarianceModel CovarianceModel::tabulated(std::vector<double> r, std::vector<double> c) {
    CovarianceModel m;
    m.kind = Kind::Tabulated;
    m.knots_r = std::move(r);
    m.knots_c = std::move(c);
    if (m.knots_r.size() != m.knots_c.size() || m.knots_r.size() < 2)
        throw std::invalid_argument("tabulated covariance needs matching knot arrays, >= 2 knots");
    if (m.knots_r.front() != 0.0)
        throw std::invalid_argument("tabulated covariance must start at r = 0");
    for (size_t i = 1; i < m.knots_r.size(); ++i)
        if (m.knots_r[i] <= m.knots_r[i - 1])
            throw std::invalid_argument("tabulated covariance knots must be strictly increasing");
    m.variance = m.knots_c.front();
    m.range = m.knots_r.back();
    return m;
}

double CovarianceModel::operator()(double r) const {
    if (r < 0.0) throw std::domain_error("covariance_eval: negative distance");
    if (r >= range) return 0.0;
    switch (kind) {
        case Kind::Spherical: {
            double u = r / range;
            return variance * (1.0 - 1.5 * u + 0.5 * u * u * u);
        }
        case Kind::Wendland: {
            // psi_{3,2}(u) = (1-u)^6 (35u^2 + 18u + 3) / 3
            double u = r / range;
            double w = 1.0 - u;
            double w2 = w * w;
            double w6 = w2 * w2 * w2;
            return variance * w6 * (35.0 * u * u + 18.0 * u + 3.0) / 3.0;
        }
        case Kind::Tabulated: {
            auto it = std::upper_bound(knots_r.begin(), knots_r.end(), r);
            size_t hi = size_t(it - knots_r.begin());
            if (hi == 0) return knots_c.front();
            if (hi >= knots_r.size()) return 0.0;
            size_t lo = hi - 1;
            double t = (r - knots_r[lo]) / (knots_r[hi] - knots_r[lo]);
            return knots_c[lo] + t * (knots_c[hi] - knots_c[lo]);
        }
    }
    return 0.0;
}

void CovarianceModel::validate(int dimension) const {
    if (variance <= 0.0) throw std::invalid_argument("covariance variance must be positive");
    if (range <= 0.0) throw std::invalid_argument("covariance range must be positive");
    if (dimension > 3 && (kind == Kind::Spherical || kind == Kind::Wendland))
        throw std::invalid_argument("built-in covariance models are valid for d <= 3 only");
    // nonincreasing on [0, range]
    const int n = 256;
    double prev = (*this)(0.0);
    for (int i = 1; i <= n; ++i) {
        double v = (*this)(range * double(i) / n * (1.0 - 1e-12));
        if (v > prev + 1e-12 * variance)
            throw std::invalid_argument("covariance must be nonincreasing on [0, range]");
        prev = v;
    }
}

std::string CovarianceModel::kind_name() const {
    switch (kind) {
        case Kind::Spherical: return "spherical";
        case Kind::Wendland: return "wendland";
        case Kind::Tabulated: return "tabulated";
    }
    return "?";
}

CovarianceModel::Kind CovarianceModel::kind_from_name(const std::string& name) {
    if (name == "spherical") return Kind::Spherical;
    if (name == "wendland") return Kind::Wendland;
    if (name == "tabulated") return Kind::Tabulated;
    throw std::invalid_argument("unknown covariance kind: " + name);
}

}  // namespace riemfpp
