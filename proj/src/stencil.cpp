#include "riemfpp/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace riemfpp {

namespace {

int64_t gcd3(int64_t a, int64_t b, int64_t c) {
    return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
}

std::vector<LatticePoint> make_offsets(int k, int d) {
    std::vector<LatticePoint> offs;
    for (int64_t dz = (d == 3 ? -k : 0); dz <= (d == 3 ? k : 0); ++dz)
        for (int64_t dy = -k; dy <= k; ++dy)
            for (int64_t dx = -k; dx <= k; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                if (gcd3(dx, dy, dz) != 1) continue;
                offs.push_back(lp(dx, dy, dz));
            }
    return offs;
}

double eta_2d(const std::vector<LatticePoint>& offs, int sweep) {
    // analytic part: worst direction is the middle of the largest angular
    // gap between offset directions; ratio there is sec(gap/2)
    std::vector<double> angles;
    for (auto& o : offs) {
        double a = std::atan2(double(o[1]), double(o[0]));
        if (a < 0) a += 2 * M_PI;
        angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    double max_gap = angles.front() + 2 * M_PI - angles.back();
    for (size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    double eta = 1.0 / std::cos(max_gap / 2.0);

    // direction sweep with exhaustive nonnegative pair combinations
    std::vector<double> len(offs.size());
    for (size_t i = 0; i < offs.size(); ++i)
        len[i] = std::hypot(double(offs[i][0]), double(offs[i][1]));
    for (int s = 0; s < sweep; ++s) {
        double th = (M_PI / 4.0) * double(s) / double(sweep - 1);
        double ux = std::cos(th), uy = std::sin(th);
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < offs.size(); ++i)
            for (size_t j = i + 1; j < offs.size(); ++j) {
                double ax = double(offs[i][0]), ay = double(offs[i][1]);
                double bx = double(offs[j][0]), by = double(offs[j][1]);
                double det = ax * by - ay * bx;
                if (std::abs(det) < 1e-14) continue;
                double a = (ux * by - uy * bx) / det;
                double b = (ax * uy - ay * ux) / det;
                if (a < -1e-14 || b < -1e-14) continue;
                best = std::min(best, std::max(a, 0.0) * len[i] + std::max(b, 0.0) * len[j]);
            }
        eta = std::max(eta, best);
    }
    return eta;
}

double eta_3d(const std::vector<LatticePoint>& offs, int sweep) {
    std::vector<std::array<double, 3>> dir(offs.size());
    std::vector<double> len(offs.size());
    for (size_t i = 0; i < offs.size(); ++i) {
        len[i] = std::sqrt(double(offs[i][0] * offs[i][0] + offs[i][1] * offs[i][1] +
                                  offs[i][2] * offs[i][2]));
        dir[i] = {double(offs[i][0]) / len[i], double(offs[i][1]) / len[i],
                  double(offs[i][2]) / len[i]};
    }
    double eta = 1.0;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int s = 0; s < sweep; ++s) {
        // Fibonacci sphere sweep
        double z = 1.0 - 2.0 * (double(s) + 0.5) / double(sweep);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = golden * double(s);
        double u[3] = {r * std::cos(th), r * std::sin(th), z};

        // only the closest offsets by angle participate; restricting the
        // combination search can only increase the ratio, never decrease it
        std::vector<size_t> near(offs.size());
        std::iota(near.begin(), near.end(), size_t(0));
        std::partial_sort(near.begin(), near.begin() + std::min<size_t>(10, near.size()),
                          near.end(), [&](size_t a, size_t b) {
                              double da = dir[a][0] * u[0] + dir[a][1] * u[1] + dir[a][2] * u[2];
                              double db = dir[b][0] * u[0] + dir[b][1] * u[1] + dir[b][2] * u[2];
                              return da > db;
                          });
        size_t m = std::min<size_t>(10, near.size());
        double best = std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < m; ++a)
            for (size_t b = a + 1; b < m; ++b)
                for (size_t c = b + 1; c < m; ++c) {
                    size_t ia = near[a], ib = near[b], ic = near[c];
                    double M[3][3] = {
                        {double(offs[ia][0]), double(offs[ib][0]), double(offs[ic][0])},
                        {double(offs[ia][1]), double(offs[ib][1]), double(offs[ic][1])},
                        {double(offs[ia][2]), double(offs[ib][2]), double(offs[ic][2])}};
                    double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                                 M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                                 M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
                    if (std::abs(det) < 1e-12) continue;
                    double co[3];
                    for (int row = 0; row < 3; ++row) {
                        double A[3][3];
                        for (int r2 = 0; r2 < 3; ++r2)
                            for (int c2 = 0; c2 < 3; ++c2) A[r2][c2] = M[r2][c2];
                        A[0][row] = u[0];
                        A[1][row] = u[1];
                        A[2][row] = u[2];
                        // Cramer
                        co[row] = (A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                                   A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                                   A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])) /
                                  det;
                    }
                    if (co[0] < -1e-12 || co[1] < -1e-12 || co[2] < -1e-12) continue;
                    best = std::min(best, std::max(co[0], 0.0) * len[ia] +
                                              std::max(co[1], 0.0) * len[ib] +
                                              std::max(co[2], 0.0) * len[ic]);
                }
        if (std::isfinite(best)) eta = std::max(eta, best);
    }
    return eta * (1.0 + 1e-4);
}

}  // namespace

StencilSpec StencilSpec::make(int radius, int dimension) {
    if (radius < 1) throw std::invalid_argument("stencil radius must be >= 1");
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("stencil dimension must be 2 or 3");
    static std::mutex cache_mutex;
    static std::map<std::pair<int, int>, StencilSpec> cache;
    auto key = std::make_pair(radius, dimension);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    StencilSpec spec;
    spec.radius = radius;
    spec.dimension = dimension;
    spec.offsets = make_offsets(radius, dimension);
    spec.eta = dimension == 2 ? eta_2d(spec.offsets, 16384) : eta_3d(spec.offsets, 10000);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        cache[key] = spec;
    }
    return spec;
}

double stencil_factor(int radius, int dimension) {
    return StencilSpec::make(radius, dimension).eta;
}

}  // namespace riemfpp
