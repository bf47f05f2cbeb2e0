#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "riemfpp/errors.hpp"

namespace riemfpp {

// Points and vectors live in at most three dimensions; the active dimension
// is carried by the owning object (grid, metric, ...). Unused slots are 0.
using Point = std::array<double, 3>;
using LatticePoint = std::array<int64_t, 3>;
using Polyline = std::vector<Point>;

inline Point pt(double x, double y, double z = 0.0) { return {x, y, z}; }
inline LatticePoint lp(int64_t x, int64_t y, int64_t z = 0) { return {x, y, z}; }

inline Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Point add(const Point& a, const Point& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Point scale(const Point& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline double dot(const Point& a, const Point& b, int d) {
    double s = 0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}
inline double norm(const Point& a, int d) { return std::sqrt(dot(a, a, d)); }

inline double euclid(const LatticePoint& a, const LatticePoint& b, int d) {
    double s = 0;
    for (int i = 0; i < d; ++i) {
        double t = double(a[i] - b[i]);
        s += t * t;
    }
    return std::sqrt(s);
}

inline int64_t chebyshev(const LatticePoint& a, const LatticePoint& b, int d) {
    int64_t m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Symmetric positive-definite metric value at a point, kept in a compact
/// tagged form so the common scalar/diagonal cases stay allocation-free.
struct MetricValue {
    enum class Kind { Scalar, Diagonal, Full };

    int dim = 2;
    Kind kind = Kind::Scalar;
    // Scalar: a[0] * I.  Diagonal: a[0..d).
    // Full 2d: (xx, yy, xy).  Full 3d: (xx, yy, zz, xy, xz, yz).
    std::array<double, 6> a{};

    static MetricValue scalar(int d, double v) {
        MetricValue m;
        m.dim = d;
        m.kind = Kind::Scalar;
        m.a[0] = v;
        return m;
    }
    static MetricValue diagonal(int d, const std::array<double, 3>& diag) {
        MetricValue m;
        m.dim = d;
        m.kind = Kind::Diagonal;
        for (int i = 0; i < d; ++i) m.a[i] = diag[i];
        return m;
    }

    double entry(int i, int j) const {
        switch (kind) {
            case Kind::Scalar:
                return i == j ? a[0] : 0.0;
            case Kind::Diagonal:
                return i == j ? a[i] : 0.0;
            case Kind::Full:
                if (i == j) return a[i];
                {
                    int lo = std::min(i, j), hi = std::max(i, j);
                    if (dim == 2) return a[2];
                    // (0,1)->3 (0,2)->4 (1,2)->5
                    return a[2 + lo + hi];
                }
        }
        return 0.0;
    }

    /// v^T g v
    double quad(const Point& v) const {
        switch (kind) {
            case Kind::Scalar:
                return a[0] * (v[0] * v[0] + v[1] * v[1] + (dim == 3 ? v[2] * v[2] : 0.0));
            case Kind::Diagonal: {
                double s = a[0] * v[0] * v[0] + a[1] * v[1] * v[1];
                if (dim == 3) s += a[2] * v[2] * v[2];
                return s;
            }
            case Kind::Full: {
                double s = 0;
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) s += v[i] * entry(i, j) * v[j];
                return s;
            }
        }
        return 0.0;
    }

    double eigen_min() const;
    double eigen_max() const;

    /// Solve g x = b (small dense symmetric solve via closed-form inverse).
    Point solve(const Point& b) const;
};

inline double metric_eigen_min_full2(double xx, double yy, double xy) {
    double tr = xx + yy;
    double det = xx * yy - xy * xy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 - disc;
}
inline double metric_eigen_max_full2(double xx, double yy, double xy) {
    double tr = xx + yy;
    double det = xx * yy - xy * xy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 + disc;
}

// Eigenvalues of a symmetric 3x3 via the trigonometric method.
void sym3_eigenvalues(const double m[3][3], double out[3]);

inline double MetricValue::eigen_min() const {
    switch (kind) {
        case Kind::Scalar:
            return a[0];
        case Kind::Diagonal: {
            double v = std::min(a[0], a[1]);
            if (dim == 3) v = std::min(v, a[2]);
            return v;
        }
        case Kind::Full:
            if (dim == 2) return metric_eigen_min_full2(a[0], a[1], a[2]);
            {
                double m[3][3] = {{a[0], a[3], a[4]}, {a[3], a[1], a[5]}, {a[4], a[5], a[2]}};
                double ev[3];
                sym3_eigenvalues(m, ev);
                return std::min({ev[0], ev[1], ev[2]});
            }
    }
    return 0.0;
}

inline double MetricValue::eigen_max() const {
    switch (kind) {
        case Kind::Scalar:
            return a[0];
        case Kind::Diagonal: {
            double v = std::max(a[0], a[1]);
            if (dim == 3) v = std::max(v, a[2]);
            return v;
        }
        case Kind::Full:
            if (dim == 2) return metric_eigen_max_full2(a[0], a[1], a[2]);
            {
                double m[3][3] = {{a[0], a[3], a[4]}, {a[3], a[1], a[5]}, {a[4], a[5], a[2]}};
                double ev[3];
                sym3_eigenvalues(m, ev);
                return std::max({ev[0], ev[1], ev[2]});
            }
    }
    return 0.0;
}

inline Point MetricValue::solve(const Point& b) const {
    switch (kind) {
        case Kind::Scalar:
            return {b[0] / a[0], b[1] / a[0], dim == 3 ? b[2] / a[0] : 0.0};
        case Kind::Diagonal:
            return {b[0] / a[0], b[1] / a[1], dim == 3 ? b[2] / a[2] : 0.0};
        case Kind::Full: {
            if (dim == 2) {
                double det = a[0] * a[1] - a[2] * a[2];
                return {(a[1] * b[0] - a[2] * b[1]) / det, (a[0] * b[1] - a[2] * b[0]) / det, 0.0};
            }
            double m00 = a[0], m11 = a[1], m22 = a[2], m01 = a[3], m02 = a[4], m12 = a[5];
            double c00 = m11 * m22 - m12 * m12;
            double c01 = m02 * m12 - m01 * m22;
            double c02 = m01 * m12 - m02 * m11;
            double det = m00 * c00 + m01 * c01 + m02 * c02;
            double c11 = m00 * m22 - m02 * m02;
            double c12 = m01 * m02 - m00 * m12;
            double c22 = m00 * m11 - m01 * m01;
            return {(c00 * b[0] + c01 * b[1] + c02 * b[2]) / det,
                    (c01 * b[0] + c11 * b[1] + c12 * b[2]) / det,
                    (c02 * b[0] + c12 * b[1] + c22 * b[2]) / det};
        }
    }
    return {};
}

inline double polyline_length(const Polyline& curve, int d) {
    double s = 0;
    for (size_t i = 1; i < curve.size(); ++i) s += norm(sub(curve[i], curve[i - 1]), d);
    return s;
}

}  // namespace riemfpp
