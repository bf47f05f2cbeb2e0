#include "riemfpp/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riemfpp {

ScalarField::ScalarField(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (int64_t(values.size()) != grid.node_count())
        throw std::invalid_argument("field value count does not match grid node count");
    for (double x : values)
        if (!std::isfinite(x)) throw std::invalid_argument("field values must be finite");
}

double ScalarField::min_node_value() const {
    return *std::min_element(values.begin(), values.end());
}
double ScalarField::max_node_value() const {
    return *std::max_element(values.begin(), values.end());
}

double ScalarField::value(const Point& x, InterpOrder order) const {
    if (!grid.contains(x))
        throw OutOfWindowError("field_value: point outside the field window");
    if (order == InterpOrder::Cubic) {
        if (!cubic_ready())
            throw Error("cubic interpolation requested but prepare_cubic() was not called");
        return value_cubic(x);
    }
    return value_linear(x);
}

namespace {

struct CellLoc {
    int64_t base[3];
    double frac[3];
};

CellLoc locate(const GridSpec& g, const Point& x) {
    CellLoc loc{};
    for (int i = 0; i < g.dimension; ++i) {
        double u = (x[i] - g.origin[i]) / g.spacing;
        int64_t b = int64_t(std::floor(u));
        b = std::clamp(b, int64_t(0), g.nodes_along(i) - 2);
        loc.base[i] = b;
        loc.frac[i] = std::clamp(u - double(b), 0.0, 1.0);
    }
    return loc;
}

// mirror index into [0, n)
inline int64_t mirror(int64_t i, int64_t n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
    return std::clamp(i, int64_t(0), n - 1);
}

inline void bspline_weights(double u, double w[4]) {
    double u2 = u * u, u3 = u2 * u;
    w[0] = (1.0 - 3.0 * u + 3.0 * u2 - u3) / 6.0;
    w[1] = (4.0 - 6.0 * u2 + 3.0 * u3) / 6.0;
    w[2] = (1.0 + 3.0 * u + 3.0 * u2 - 3.0 * u3) / 6.0;
    w[3] = u3 / 6.0;
}

// In-place cubic B-spline prefilter along one stride (Unser's recursive
// filter, mirror boundaries).
void prefilter_line(double* c, int64_t n, int64_t stride) {
    if (n < 2) return;
    const double pole = std::sqrt(3.0) - 2.0;
    const double lambda = 6.0;
    // causal initialization (truncated mirror sum; pole^40 ~ 1e-23)
    int64_t horizon = std::min<int64_t>(n, 40);
    double sum = c[0];
    double zn = pole;
    for (int64_t i = 1; i < horizon; ++i) {
        sum += zn * c[i * stride];
        zn *= pole;
    }
    c[0] = lambda * sum;
    for (int64_t i = 1; i < n; ++i) c[i * stride] = lambda * c[i * stride] + pole * c[(i - 1) * stride];
    c[(n - 1) * stride] =
        (pole / (pole * pole - 1.0)) * (pole * c[(n - 2) * stride] + c[(n - 1) * stride]);
    for (int64_t i = n - 2; i >= 0; --i)
        c[i * stride] = pole * (c[(i + 1) * stride] - c[i * stride]);
}

}  // namespace

double ScalarField::value_linear(const Point& x) const {
    CellLoc loc = locate(grid, x);
    const int d = grid.dimension;
    if (d == 2) {
        int64_t nx = grid.nodes_along(0);
        int64_t i = loc.base[0], j = loc.base[1];
        double fx = loc.frac[0], fy = loc.frac[1];
        const double* v = values.data();
        double v00 = v[j * nx + i], v10 = v[j * nx + i + 1];
        double v01 = v[(j + 1) * nx + i], v11 = v[(j + 1) * nx + i + 1];
        return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
    }
    int64_t nx = grid.nodes_along(0), ny = grid.nodes_along(1);
    double acc = 0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                double w = (dx ? loc.frac[0] : 1 - loc.frac[0]) *
                           (dy ? loc.frac[1] : 1 - loc.frac[1]) *
                           (dz ? loc.frac[2] : 1 - loc.frac[2]);
                acc += w * values[((loc.base[2] + dz) * ny + loc.base[1] + dy) * nx + loc.base[0] + dx];
            }
    return acc;
}

double ScalarField::value_cubic(const Point& x) const {
    CellLoc loc = locate(grid, x);
    const int d = grid.dimension;
    double wx[4], wy[4], wz[4];
    bspline_weights(loc.frac[0], wx);
    bspline_weights(loc.frac[1], wy);
    if (d == 3) bspline_weights(loc.frac[2], wz);
    int64_t nx = grid.nodes_along(0), ny = grid.nodes_along(1);
    const double* c = cubic_coeffs_.data();
    if (d == 2) {
        double acc = 0;
        for (int b = 0; b < 4; ++b) {
            int64_t j = mirror(loc.base[1] - 1 + b, ny);
            double row = 0;
            for (int a = 0; a < 4; ++a) {
                int64_t i = mirror(loc.base[0] - 1 + a, nx);
                row += wx[a] * c[j * nx + i];
            }
            acc += wy[b] * row;
        }
        return acc;
    }
    int64_t nz = grid.nodes_along(2);
    double acc = 0;
    for (int cz = 0; cz < 4; ++cz) {
        int64_t k = mirror(loc.base[2] - 1 + cz, nz);
        double plane = 0;
        for (int b = 0; b < 4; ++b) {
            int64_t j = mirror(loc.base[1] - 1 + b, ny);
            double row = 0;
            for (int a = 0; a < 4; ++a) {
                int64_t i = mirror(loc.base[0] - 1 + a, nx);
                row += wx[a] * c[(k * ny + j) * nx + i];
            }
            plane += wy[b] * row;
        }
        acc += wz[cz] * plane;
    }
    return acc;
}

void ScalarField::prepare_cubic() {
    if (cubic_ready()) return;
    cubic_coeffs_ = values;
    const int d = grid.dimension;
    int64_t nx = grid.nodes_along(0), ny = grid.nodes_along(1);
    int64_t nz = d == 3 ? grid.nodes_along(2) : 1;
    double* c = cubic_coeffs_.data();
    for (int64_t k = 0; k < nz; ++k)
        for (int64_t j = 0; j < ny; ++j) prefilter_line(c + (k * ny + j) * nx, nx, 1);
    for (int64_t k = 0; k < nz; ++k)
        for (int64_t i = 0; i < nx; ++i) prefilter_line(c + k * ny * nx + i, ny, nx);
    if (d == 3)
        for (int64_t j = 0; j < ny; ++j)
            for (int64_t i = 0; i < nx; ++i) prefilter_line(c + j * nx + i, nz, ny * nx);
}

}  // namespace riemfpp
