#pragma once

#include <vector>

#include "riemfpp/geometry.hpp"

namespace riemfpp {

/// Move set for the grid shortest-path solver: all integer offsets with
/// Chebyshev norm <= radius and coprime components, plus the worst-case
/// metric-free overestimation factor eta of the resulting graph metric.
struct StencilSpec {
    int radius = 3;
    int dimension = 2;
    std::vector<LatticePoint> offsets;
    double eta = 1.0;

    static StencilSpec make(int radius, int dimension);
};

/// eta alone: sup over unit directions of (best stencil path length /
/// Euclidean length) under the identity metric. Exact in 2d (direction
/// sweep cross-checked against the adjacent-gap secant bound); in 3d the
/// sweep restricts combinations to nearby offsets, which can only
/// overestimate, keeping error brackets valid.
double stencil_factor(int radius, int dimension);

}  // namespace riemfpp
