#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "riemfpp/geometry.hpp"

namespace riemfpp {

/// Regular node grid covering the half-open-ish window
/// [origin, origin + extent] with spacing h; extent/h must be integral,
/// nodes sit at origin + i*h inclusive of both ends.
struct GridSpec {
    int dimension = 2;
    Point origin{};
    Point extent{};
    double spacing = 1.0;

    GridSpec() = default;
    GridSpec(int d, Point org, Point ext, double h);

    int64_t nodes_along(int axis) const { return counts_[axis]; }
    int64_t node_count() const;
    Point node_position(const std::array<int64_t, 3>& idx) const;
    int64_t flat_index(const std::array<int64_t, 3>& idx) const;
    std::array<int64_t, 3> unflatten(int64_t flat) const;

    bool contains(const Point& x, double tol = 1e-12) const;
    Point window_min() const { return origin; }
    Point window_max() const { return add(origin, extent); }

    void validate() const;

  private:
    std::array<int64_t, 3> counts_{1, 1, 1};
};

}  // namespace riemfpp
