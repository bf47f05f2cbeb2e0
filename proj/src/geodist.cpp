#include "riemfpp/geodist.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "riemfpp/rng.hpp"

namespace riemfpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 4-ary min-heap with position tracking; one entry per node, decrease-key
// in place. Keeps memory bounded on multi-million-node grids.
class IndexedHeap {
  public:
    IndexedHeap(const std::vector<double>& key, size_t n) : key_(key), pos_(n, -1) {}

    bool empty() const { return heap_.empty(); }

    void push_or_decrease(int64_t v) {
        if (pos_[size_t(v)] < 0) {
            pos_[size_t(v)] = int64_t(heap_.size());
            heap_.push_back(v);
        }
        sift_up(pos_[size_t(v)]);
    }

    int64_t pop() {
        int64_t top = heap_.front();
        pos_[size_t(top)] = -1;
        int64_t last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_[0] = last;
            pos_[size_t(last)] = 0;
            sift_down(0);
        }
        return top;
    }

  private:
    void sift_up(int64_t i) {
        int64_t v = heap_[size_t(i)];
        double kv = key_[size_t(v)];
        while (i > 0) {
            int64_t parent = (i - 1) >> 2;
            int64_t pv = heap_[size_t(parent)];
            if (key_[size_t(pv)] <= kv) break;
            heap_[size_t(i)] = pv;
            pos_[size_t(pv)] = i;
            i = parent;
        }
        heap_[size_t(i)] = v;
        pos_[size_t(v)] = i;
    }

    void sift_down(int64_t i) {
        int64_t n = int64_t(heap_.size());
        int64_t v = heap_[size_t(i)];
        double kv = key_[size_t(v)];
        for (;;) {
            int64_t child = 4 * i + 1;
            if (child >= n) break;
            int64_t best = child;
            double bk = key_[size_t(heap_[size_t(child)])];
            int64_t hi = std::min(child + 4, n);
            for (int64_t c = child + 1; c < hi; ++c) {
                double ck = key_[size_t(heap_[size_t(c)])];
                if (ck < bk) {
                    bk = ck;
                    best = c;
                }
            }
            if (bk >= kv) break;
            heap_[size_t(i)] = heap_[size_t(best)];
            pos_[size_t(heap_[size_t(i)])] = i;
            i = best;
        }
        heap_[size_t(i)] = v;
        pos_[size_t(v)] = i;
    }

    const std::vector<double>& key_;
    std::vector<int64_t> heap_;
    std::vector<int64_t> pos_;
};

struct OffsetInfo {
    int64_t step[3];
    Point delta;   // step * h
    double elen;   // Euclidean length of delta
};

struct EdgeQuadrature {
    std::vector<double> s;  // Simpson abscissae in [0,1]
    std::vector<double> c;  // Simpson weights
    double scale;           // 1 / (3 q)

    explicit EdgeQuadrature(int q) {
        if (q < 2) q = 2;
        if (q % 2) ++q;
        scale = 1.0 / (3.0 * q);
        for (int i = 0; i <= q; ++i) {
            s.push_back(double(i) / q);
            c.push_back(i == 0 || i == q ? 1.0 : (i % 2 ? 4.0 : 2.0));
        }
    }
};

// Composite-Simpson Riemannian length of the straight edge base -> base+delta.
inline double edge_weight(const MetricField& metric, bool scalar_shape, const Point& base,
                          const OffsetInfo& off, const EdgeQuadrature& quad) {
    double acc = 0;
    if (scalar_shape) {
        for (size_t i = 0; i < quad.s.size(); ++i) {
            Point p{base[0] + quad.s[i] * off.delta[0], base[1] + quad.s[i] * off.delta[1],
                    base[2] + quad.s[i] * off.delta[2]};
            acc += quad.c[i] * std::sqrt(metric.scalar_at(p));
        }
        return acc * quad.scale * off.elen;
    }
    for (size_t i = 0; i < quad.s.size(); ++i) {
        Point p{base[0] + quad.s[i] * off.delta[0], base[1] + quad.s[i] * off.delta[1],
                base[2] + quad.s[i] * off.delta[2]};
        acc += quad.c[i] * std::sqrt(metric.value_at(p).quad(off.delta));
    }
    return acc * quad.scale;
}

GridSpec make_solver_grid(const GridSpec& window, const Point& lo, const Point& hi, double h,
                          const Point& anchor, int d) {
    Point org{}, ext{};
    for (int i = 0; i < d; ++i) {
        double lo_c = std::max(lo[i], window.origin[i]);
        double hi_c = std::min(hi[i], window.origin[i] + window.extent[i]);
        int64_t nlo = int64_t(std::ceil((lo_c - anchor[i]) / h - 1e-9));
        int64_t nhi = int64_t(std::floor((hi_c - anchor[i]) / h + 1e-9));
        if (nhi - nlo < 1)
            throw WindowTooSmallError("solver window degenerate along an axis");
        org[i] = anchor[i] + double(nlo) * h;
        ext[i] = double(nhi - nlo) * h;
    }
    return GridSpec(d, org, ext, h);
}

std::array<int64_t, 3> nearest_node(const GridSpec& g, const Point& p) {
    std::array<int64_t, 3> idx{0, 0, 0};
    for (int i = 0; i < g.dimension; ++i) {
        int64_t k = int64_t(std::llround((p[i] - g.origin[i]) / g.spacing));
        idx[i] = std::clamp(k, int64_t(0), g.nodes_along(i) - 1);
    }
    return idx;
}

// Dijkstra over the stencil graph; stops once all targets are settled or
// every remaining label exceeds t_max.
std::vector<double> run_search(const MetricField& metric, const GridSpec& grid, int64_t source,
                               std::vector<int64_t> targets, double t_max,
                               const SolverOptions& opts, const StencilSpec& stencil) {
    const int d = grid.dimension;
    const int64_t n = grid.node_count();
    const bool scalar_shape = metric.is_scalar_shape();
    EdgeQuadrature quad(opts.quad_intervals);

    std::vector<OffsetInfo> offs;
    offs.reserve(stencil.offsets.size());
    for (auto& o : stencil.offsets) {
        OffsetInfo info{};
        for (int i = 0; i < 3; ++i) info.step[i] = o[i];
        info.delta = {double(o[0]) * opts.h, double(o[1]) * opts.h, double(o[2]) * opts.h};
        info.elen = norm(info.delta, d);
        offs.push_back(info);
    }

    std::vector<double> dist(size_t(n), kInf);
    std::vector<uint8_t> settled(size_t(n), 0);
    dist[size_t(source)] = 0.0;
    IndexedHeap heap(dist, size_t(n));
    heap.push_or_decrease(source);

    std::sort(targets.begin(), targets.end());
    size_t targets_left = targets.size();

    const int64_t nx = grid.nodes_along(0);
    const int64_t ny = grid.nodes_along(1);
    const int64_t nz = d == 3 ? grid.nodes_along(2) : 1;
    (void)nz;

    while (!heap.empty()) {
        int64_t u = heap.pop();
        if (settled[size_t(u)]) continue;
        settled[size_t(u)] = 1;
        double du = dist[size_t(u)];
        if (du > t_max) break;
        if (targets_left > 0 && std::binary_search(targets.begin(), targets.end(), u)) {
            if (--targets_left == 0) break;
        }

        int64_t rem = u;
        int64_t ci = rem % nx;
        rem /= nx;
        int64_t cj = rem % ny;
        int64_t ck = d == 3 ? rem / ny : 0;
        Point base = grid.node_position({ci, cj, ck});

        for (const auto& off : offs) {
            int64_t vi = ci + off.step[0];
            int64_t vj = cj + off.step[1];
            if (vi < 0 || vi >= nx || vj < 0 || vj >= ny) continue;
            int64_t vk = 0;
            if (d == 3) {
                vk = ck + off.step[2];
                if (vk < 0 || vk >= grid.nodes_along(2)) continue;
            }
            int64_t v = (d == 3 ? (vk * ny + vj) : vj) * nx + vi;
            if (settled[size_t(v)]) continue;
            double w = edge_weight(metric, scalar_shape, base, off, quad);
            double alt = du + w;
            if (alt < dist[size_t(v)]) {
                dist[size_t(v)] = alt;
                heap.push_or_decrease(v);
            }
        }
    }
    return dist;
}

double min_boundary_detour(const GridSpec& grid, const Point& x, const Point& y) {
    // min over boundary nodes b of |b-x| + |b-y|
    const int d = grid.dimension;
    double best = kInf;
    auto consider = [&](const std::array<int64_t, 3>& idx) {
        Point b = grid.node_position(idx);
        best = std::min(best, norm(sub(b, x), d) + norm(sub(b, y), d));
    };
    if (d == 2) {
        int64_t nx = grid.nodes_along(0), ny = grid.nodes_along(1);
        for (int64_t i = 0; i < nx; ++i) {
            consider({i, 0, 0});
            consider({i, ny - 1, 0});
        }
        for (int64_t j = 0; j < ny; ++j) {
            consider({0, j, 0});
            consider({nx - 1, j, 0});
        }
    } else {
        int64_t nx = grid.nodes_along(0), ny = grid.nodes_along(1), nzc = grid.nodes_along(2);
        for (int64_t k = 0; k < nzc; ++k)
            for (int64_t j = 0; j < ny; ++j)
                for (int64_t i = 0; i < nx; ++i)
                    if (i == 0 || i == nx - 1 || j == 0 || j == ny - 1 || k == 0 || k == nzc - 1)
                        consider({i, j, k});
    }
    return best;
}

}  // namespace

DistanceResult distance(const MetricField& metric, const Point& x, const Point& y,
                        const SolverOptions& opts) {
    const int d = metric.dimension();
    const GridSpec& w = metric.window();
    if (!w.contains(x) || !w.contains(y))
        throw OutOfWindowError("distance: query endpoint outside the metric window");

    double sep = norm(sub(y, x), d);
    Point lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[i] = std::min(x[i], y[i]) - opts.padding_fraction * sep;
        hi[i] = std::max(x[i], y[i]) + opts.padding_fraction * sep;
        if (lo[i] < w.origin[i] - 1e-9 || hi[i] > w.origin[i] + w.extent[i] + 1e-9)
            throw WindowTooSmallError(
                "distance: window lacks the configured padding margin around the query pair");
    }

    StencilSpec stencil = StencilSpec::make(opts.stencil_k, d);
    GridSpec grid = make_solver_grid(w, lo, hi, opts.h, x, d);
    auto xi = nearest_node(grid, x);
    auto yi = nearest_node(grid, y);
    Point xs = grid.node_position(xi);
    Point ys = grid.node_position(yi);
    int64_t source = grid.flat_index(xi);
    int64_t target = grid.flat_index(yi);

    DistanceResult res;
    res.x = xs;
    res.y = ys;
    res.h = opts.h;
    res.stencil_k = opts.stencil_k;
    res.eta = stencil.eta;
    res.quad_intervals = opts.quad_intervals;
    res.lambda_window = metric.lambda_min_window();

    if (source == target) {
        res.value = res.graph_value = res.chord_value = 0;
        res.lower = res.upper = 0;
        res.exit_certified = true;
        return res;
    }

    auto dist_values = run_search(metric, grid, source, {target}, kInf, opts, stencil);
    res.graph_value = dist_values[size_t(target)];
    if (!std::isfinite(res.graph_value)) throw Error("distance: target unreachable (internal)");

    if (opts.chord_edges) {
        res.chord_value =
            metric.curve_length({xs, ys}, opts.quad_intervals, opts.h).riemannian;
    }
    res.value = std::min(res.graph_value, res.chord_value);

    double snapped_sep = norm(sub(ys, xs), d);
    double eta_adj = res.eta * (1.0 + opts.quad_tolerance);
    res.upper = res.value;
    res.lower = std::max(res.value / eta_adj, std::sqrt(res.lambda_window) * snapped_sep);
    res.exit_certified =
        res.value <= std::sqrt(res.lambda_window) * min_boundary_detour(grid, xs, ys) + 1e-12;
    return res;
}

double DistanceField::at_point(const Point& p) const {
    return values[size_t(grid.flat_index(nearest_node(grid, p)))];
}

DistanceField distance_field(const MetricField& metric, const Point& source, double t_max,
                             const SolverOptions& opts) {
    const GridSpec& w = metric.window();
    if (!w.contains(source))
        throw OutOfWindowError("distance_field: source outside the metric window");
    const int d = metric.dimension();
    StencilSpec stencil = StencilSpec::make(opts.stencil_k, d);
    GridSpec grid = make_solver_grid(w, w.window_min(), w.window_max(), opts.h, source, d);

    DistanceField field;
    field.grid = grid;
    field.source = grid.node_position(nearest_node(grid, source));
    field.t_max = t_max;
    field.eta = stencil.eta;
    field.lambda_window = metric.lambda_min_window();
    field.opts = opts;
    int64_t src = grid.flat_index(nearest_node(grid, source));
    field.values = run_search(metric, grid, src, {}, t_max, opts, stencil);
    // labels above the truncation level are not settled; mark unreached
    for (double& v : field.values)
        if (v > t_max) v = kInf;
    return field;
}

BallBoundary ball_from_field(const DistanceField& field, double t) {
    const GridSpec& g = field.grid;
    if (g.dimension != 2)
        throw Error("ball boundary extraction is implemented for 2d fields only");
    const int64_t nx = g.nodes_along(0), ny = g.nodes_along(1);
    const std::vector<double>& f = field.values;

    // crossing on the grid edge a->b, as a parameter in [0,1]
    auto cross = [&](double va, double vb) {
        if (!std::isfinite(vb)) return 0.999999;
        if (!std::isfinite(va)) return 1e-6;
        double s = (t - va) / (vb - va);
        return std::clamp(s, 0.0, 1.0);
    };
    // edge ids: horizontal edge (i,j)-(i+1,j) -> 2*(j*nx+i), vertical
    // edge (i,j)-(i,j+1) -> 2*(j*nx+i)+1
    auto hpoint = [&](int64_t i, int64_t j) {
        double s = cross(f[size_t(j * nx + i)], f[size_t(j * nx + i + 1)]);
        Point p = g.node_position({i, j, 0});
        p[0] += s * g.spacing;
        return p;
    };
    auto vpoint = [&](int64_t i, int64_t j) {
        double s = cross(f[size_t(j * nx + i)], f[size_t((j + 1) * nx + i)]);
        Point p = g.node_position({i, j, 0});
        p[1] += s * g.spacing;
        return p;
    };

    std::unordered_map<int64_t, Point> points;
    std::unordered_map<int64_t, std::vector<int64_t>> links;
    double delta_h = 0;
    auto add_seg = [&](int64_t ea, Point pa, int64_t eb, Point pb) {
        points[ea] = pa;
        points[eb] = pb;
        links[ea].push_back(eb);
        links[eb].push_back(ea);
    };

    for (int64_t j = 0; j + 1 < ny; ++j) {
        for (int64_t i = 0; i + 1 < nx; ++i) {
            double v00 = f[size_t(j * nx + i)], v10 = f[size_t(j * nx + i + 1)];
            double v01 = f[size_t((j + 1) * nx + i)], v11 = f[size_t((j + 1) * nx + i + 1)];
            int code = (v00 <= t ? 1 : 0) | (v10 <= t ? 2 : 0) | (v11 <= t ? 4 : 0) |
                       (v01 <= t ? 8 : 0);
            if (code == 0 || code == 15) continue;
            int64_t bottom = 2 * (j * nx + i);
            int64_t top = 2 * ((j + 1) * nx + i);
            int64_t left = 2 * (j * nx + i) + 1;
            int64_t right = 2 * (j * nx + i + 1) + 1;
            for (double v : {v00, v10, v01, v11})
                if (std::isfinite(v)) delta_h = std::max(delta_h, std::abs(v - t));
            auto B = [&] { return std::make_pair(bottom, hpoint(i, j)); };
            auto T = [&] { return std::make_pair(top, hpoint(i, j + 1)); };
            auto L = [&] { return std::make_pair(left, vpoint(i, j)); };
            auto R = [&] { return std::make_pair(right, vpoint(i + 1, j)); };
            auto seg = [&](std::pair<int64_t, Point> a, std::pair<int64_t, Point> b) {
                add_seg(a.first, a.second, b.first, b.second);
            };
            switch (code) {
                case 1: seg(L(), B()); break;
                case 2: seg(B(), R()); break;
                case 3: seg(L(), R()); break;
                case 4: seg(R(), T()); break;
                case 5: {  // ambiguous: split by the cell-center value
                    double center = (v00 + v10 + v01 + v11) / 4.0;
                    if (center <= t) {
                        seg(L(), T());
                        seg(B(), R());
                    } else {
                        seg(L(), B());
                        seg(R(), T());
                    }
                    break;
                }
                case 6: seg(B(), T()); break;
                case 7: seg(L(), T()); break;
                case 8: seg(T(), L()); break;
                case 9: seg(T(), B()); break;
                case 10: {
                    double center = (v00 + v10 + v01 + v11) / 4.0;
                    if (center <= t) {
                        seg(T(), R());
                        seg(B(), L());
                    } else {
                        seg(T(), L());
                        seg(B(), R());
                    }
                    break;
                }
                case 11: seg(T(), R()); break;
                case 12: seg(R(), L()); break;
                case 13: seg(B(), R()); break;
                case 14: seg(L(), B()); break;
            }
        }
    }

    BallBoundary out;
    out.t = t;
    out.delta_h = delta_h;
    std::unordered_map<int64_t, bool> used;
    for (auto& [eid, nbrs] : links) {
        if (used[eid] || nbrs.empty()) continue;
        Polyline loop;
        int64_t cur = eid, prev = -1;
        while (true) {
            used[cur] = true;
            loop.push_back(points[cur]);
            const auto& ns = links[cur];
            int64_t next = -1;
            for (int64_t cand : ns)
                if (cand != prev && !used[cand]) {
                    next = cand;
                    break;
                }
            if (next < 0) break;
            prev = cur;
            cur = next;
        }
        if (loop.size() >= 3) {
            loop.push_back(loop.front());  // close
            out.loops.push_back(std::move(loop));
        }
    }
    return out;
}

BallBoundary ball(const MetricField& metric, double t, const SolverOptions& opts,
                  const Point& source) {
    const GridSpec& w = metric.window();
    const int d = metric.dimension();
    if (d != 2) throw Error("ball: implemented for d = 2 (see distance_field for 3d values)");
    double lambda = metric.lambda_min_window();
    double dmin = kInf;
    for (int i = 0; i < d; ++i) {
        dmin = std::min(dmin, source[i] - w.origin[i]);
        dmin = std::min(dmin, w.origin[i] + w.extent[i] - source[i]);
    }
    // fast certificate; when it cannot vouch for the window (heavy-tailed
    // random metrics make it very conservative) fall through and check the
    // computed sublevel set against the boundary exactly
    bool certified = std::sqrt(lambda) * dmin > t;

    double margin = 2.0 * opts.h * opts.stencil_k * std::sqrt(metric.lambda_max_window());
    DistanceField field = distance_field(metric, source, t * 1.01 + margin, opts);
    if (!certified) {
        const GridSpec& g = field.grid;
        int64_t nx = g.nodes_along(0), ny = g.nodes_along(1);
        auto touches = [&](int64_t i, int64_t j) {
            return field.values[size_t(j * nx + i)] <= t;
        };
        for (int64_t i = 0; i < nx; ++i)
            if (touches(i, 0) || touches(i, ny - 1))
                throw WindowTooSmallError("ball: the t-sublevel set touches the window boundary");
        for (int64_t j = 0; j < ny; ++j)
            if (touches(0, j) || touches(nx - 1, j))
                throw WindowTooSmallError("ball: the t-sublevel set touches the window boundary");
    }
    return ball_from_field(field, t);
}

RichardsonResult richardson_refine(double value_h, double value_h2, double order) {
    RichardsonResult out;
    if (value_h == value_h2) {
        out.value = value_h2;
        out.observed_order = std::numeric_limits<double>::infinity();  // saturated
        return out;
    }
    double factor = std::pow(2.0, order) - 1.0;
    out.value = value_h2 + (value_h2 - value_h) / factor;
    out.observed_order = std::numeric_limits<double>::quiet_NaN();
    return out;
}

RichardsonResult richardson_refine3(double value_h, double value_h2, double value_h4) {
    RichardsonResult out;
    double d1 = value_h - value_h2;
    double d2 = value_h2 - value_h4;
    if (d2 == 0.0 || d1 * d2 <= 0.0) {
        out.value = value_h4;
        out.observed_order = d1 == 0.0 && d2 == 0.0
                                 ? std::numeric_limits<double>::infinity()
                                 : std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double r = d1 / d2;
    out.observed_order = std::log2(r);
    // v_k = v_inf + C rho^k  =>  v_inf = v3 - d2 / (r - 1)
    out.value = r > 1.0 ? value_h4 - d2 / (r - 1.0) : value_h4;
    return out;
}

std::vector<UniformKRow> uniform_K_estimate(const std::vector<const MetricField*>& ensemble,
                                            const std::vector<double>& t_list, double rho,
                                            int pair_count, uint64_t seed,
                                            const SolverOptions& opts) {
    if (ensemble.empty()) throw std::invalid_argument("uniform_K_estimate: empty ensemble");
    std::vector<UniformKRow> rows;
    double t_max = *std::max_element(t_list.begin(), t_list.end());
    for (double t : t_list) {
        UniformKRow row;
        row.t = t;
        Xoshiro256 rng(derive_seed(seed, 77, uint64_t(std::llround(t * 1024))));
        for (const MetricField* metric : ensemble) {
            const GridSpec& w = metric->window();
            const int d = metric->dimension();
            for (int p = 0; p < pair_count; ++p) {
                // base point chosen so that t_max * x plus the pair stays
                // well inside the window
                Point x{}, y{};
                for (int i = 0; i < d; ++i) {
                    double lo = w.origin[i] / t_max + rho * 1.6;
                    double hi = (w.origin[i] + w.extent[i]) / t_max - rho * 1.6;
                    x[i] = rng.uniform(lo, hi);
                }
                double r = rho * rng.uniform(0.5, 1.0);
                if (d == 2) {
                    double th = rng.uniform(0, 2 * M_PI);
                    y = {x[0] + r * std::cos(th), x[1] + r * std::sin(th), 0};
                } else {
                    double z = rng.uniform(-1, 1);
                    double th = rng.uniform(0, 2 * M_PI);
                    double s = std::sqrt(1 - z * z);
                    y = {x[0] + r * s * std::cos(th), x[1] + r * s * std::sin(th), x[2] + r * z};
                }
                DistanceResult res = distance(*metric, scale(x, t), scale(y, t), opts);
                row.empirical_K = std::max(row.empirical_K, res.value / (t * rho));
                double seg =
                    metric->curve_length({scale(x, t), scale(y, t)}, opts.quad_intervals, opts.h)
                        .riemannian;
                row.segment_bound = std::max(row.segment_bound, seg / (t * rho));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace riemfpp
