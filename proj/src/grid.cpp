#include "riemfpp/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace riemfpp {

GridSpec::GridSpec(int d, Point org, Point ext, double h)
    : dimension(d), origin(org), extent(ext), spacing(h) {
    validate();
    for (int i = 0; i < dimension; ++i)
        counts_[i] = int64_t(std::llround(extent[i] / spacing)) + 1;
}

void GridSpec::validate() const {
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("grid dimension must be 2 or 3");
    if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    for (int i = 0; i < dimension; ++i) {
        if (!(extent[i] > 0.0)) throw std::invalid_argument("grid extent must be positive");
        double cells = extent[i] / spacing;
        if (std::abs(cells - std::llround(cells)) > 1e-9 * std::max(1.0, cells))
            throw std::invalid_argument("grid extent must be an integer multiple of spacing");
    }
}

int64_t GridSpec::node_count() const {
    int64_t n = 1;
    for (int i = 0; i < dimension; ++i) n *= counts_[i];
    return n;
}

Point GridSpec::node_position(const std::array<int64_t, 3>& idx) const {
    Point p{};
    for (int i = 0; i < dimension; ++i) p[i] = origin[i] + double(idx[i]) * spacing;
    return p;
}

int64_t GridSpec::flat_index(const std::array<int64_t, 3>& idx) const {
    // x fastest
    int64_t f = idx[dimension - 1];
    for (int i = dimension - 2; i >= 0; --i) f = f * counts_[i] + idx[i];
    return f;
}

std::array<int64_t, 3> GridSpec::unflatten(int64_t flat) const {
    std::array<int64_t, 3> idx{0, 0, 0};
    for (int i = 0; i < dimension; ++i) {
        idx[i] = flat % counts_[i];
        flat /= counts_[i];
    }
    return idx;
}

bool GridSpec::contains(const Point& x, double tol) const {
    for (int i = 0; i < dimension; ++i) {
        if (x[i] < origin[i] - tol || x[i] > origin[i] + extent[i] + tol) return false;
    }
    return true;
}

}  // namespace riemfpp
