#include "riemfpp/starlattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <unordered_set>

namespace riemfpp {

namespace {

constexpr int64_t kPackOffset = 1 << 20;

int64_t pack(const LatticePoint& z) {
    return ((z[0] + kPackOffset) << 42) | ((z[1] + kPackOffset) << 21) | (z[2] + kPackOffset);
}

std::vector<LatticePoint> star_offsets(int d) {
    std::vector<LatticePoint> offs;
    int lo = -1, hi = 1;
    for (int dz = (d == 3 ? lo : 0); dz <= (d == 3 ? hi : 0); ++dz)
        for (int dy = lo; dy <= hi; ++dy)
            for (int dx = lo; dx <= hi; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                offs.push_back(lp(dx, dy, dz));
            }
    return offs;
}

LatticePoint shifted(const LatticePoint& z, const LatticePoint& o) {
    return lp(z[0] + o[0], z[1] + o[1], z[2] + o[2]);
}

}  // namespace

bool star_adjacent(const LatticePoint& a, const LatticePoint& b, int dimension) {
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("star_adjacent: dimension must be 2 or 3");
    if (a == b) return false;
    return chebyshev(a, b, dimension) <= 1;
}

bool is_star_connected(const std::vector<LatticePoint>& sites, int dimension) {
    if (sites.size() <= 1) return true;
    std::unordered_set<int64_t> all;
    for (auto& z : sites) all.insert(pack(z));
    auto offs = star_offsets(dimension);
    std::vector<LatticePoint> stack{sites[0]};
    std::unordered_set<int64_t> seen{pack(sites[0])};
    while (!stack.empty()) {
        LatticePoint z = stack.back();
        stack.pop_back();
        for (auto& o : offs) {
            LatticePoint w = shifted(z, o);
            int64_t key = pack(w);
            if (all.count(key) && !seen.count(key)) {
                seen.insert(key);
                stack.push_back(w);
            }
        }
    }
    return seen.size() == all.size();
}

StarSet::StarSet(int d, std::vector<LatticePoint> s) : dimension(d), sites(std::move(s)) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
}

bool StarSet::contains(const LatticePoint& z) const {
    return std::binary_search(sites.begin(), sites.end(), z);
}

std::vector<std::pair<int, int>> EnumerationReport::fekete_violations() const {
    std::vector<std::pair<int, int>> bad;
    int N = int(counts.size());
    for (int n = 1; n <= N; ++n)
        for (int m = n; n + m <= N; ++m)
            if (std::log(double(S(n + m))) > std::log(double(S(n))) + std::log(double(S(m))) + 1e-12)
                bad.emplace_back(n, m);
    return bad;
}

namespace {

/// Duplicate-free enumeration of *-connected supersets of {root}.
/// Candidates popped at a level stay globally excluded for the rest of the
/// subtree, so every set is generated exactly once (Redelmeier's scheme).
struct StarEnumerator {
    int d;
    size_t max_size;
    const SiteField* weights = nullptr;  // restricts candidates when present
    int64_t node_guard = 100000000;
    // return value: extend this set further?
    std::function<bool(const std::vector<LatticePoint>&, double)> visit;

    std::vector<LatticePoint> offs;
    std::unordered_set<int64_t> reached;
    std::vector<LatticePoint> current;
    int64_t nodes = 0;

    void run(const LatticePoint& root) {
        offs = star_offsets(d);
        if (weights && !weights->contains(root))
            throw Error("search anchor is not a site of the field");
        reached.insert(pack(root));
        current.push_back(root);
        double sum = weights ? weights->at(root) : 0.0;
        ++nodes;
        bool descend = visit(current, sum);
        if (descend && max_size > 1) {
            std::vector<LatticePoint> untried;
            for (auto& o : offs) {
                LatticePoint w = shifted(root, o);
                if (weights && !weights->contains(w)) continue;
                if (reached.insert(pack(w)).second) untried.push_back(w);
            }
            rec(untried, sum);
        }
    }

  private:
    void rec(std::vector<LatticePoint> untried, double sum) {
        while (!untried.empty()) {
            LatticePoint v = untried.back();
            untried.pop_back();
            current.push_back(v);
            double vsum = sum + (weights ? weights->at(v) : 0.0);
            if (++nodes > node_guard)
                throw ResourceLimitError("exact lattice search exceeded its node guard");
            bool descend = visit(current, vsum);
            if (descend && current.size() < max_size) {
                std::vector<LatticePoint> next = untried;
                std::vector<int64_t> added;
                for (auto& o : offs) {
                    LatticePoint w = shifted(v, o);
                    if (weights && !weights->contains(w)) continue;
                    int64_t key = pack(w);
                    if (reached.insert(key).second) {
                        next.push_back(w);
                        added.push_back(key);
                    }
                }
                rec(std::move(next), vsum);
                for (int64_t key : added) reached.erase(key);
            }
            current.pop_back();
            // v stays in `reached`: sets containing it were all generated
            // in the branch above
        }
    }
};

}  // namespace

EnumerationReport enumerate_connected_sets(int n, int dimension, int64_t node_guard) {
    if (n < 1) throw std::invalid_argument("enumerate_connected_sets: n >= 1 required");
    EnumerationReport report;
    report.dimension = dimension;
    report.counts.assign(size_t(n), 0);

    StarEnumerator en;
    en.d = dimension;
    en.max_size = size_t(n);
    en.node_guard = node_guard;
    en.visit = [&](const std::vector<LatticePoint>& cur, double) {
        report.counts[cur.size() - 1] += 1;
        return true;
    };
    en.run(lp(0, 0, 0));

    report.sigma_hat = 0;
    for (int k = 1; k <= n; ++k)
        report.sigma_hat =
            std::max(report.sigma_hat, std::pow(double(report.S(k)), 1.0 / double(k)));
    return report;
}

std::vector<int64_t> enumerate_connected_sets_naive(int n, int dimension) {
    auto offs = star_offsets(dimension);
    std::vector<int64_t> counts(size_t(n), 0);
    counts[0] = 1;
    // canonical key: sorted packed coordinates
    using Key = std::vector<int64_t>;
    struct KeyHash {
        size_t operator()(const Key& k) const {
            uint64_t h = 1469598103934665603ULL;
            for (int64_t v : k) {
                h ^= uint64_t(v);
                h *= 1099511628211ULL;
            }
            return size_t(h);
        }
    };
    std::unordered_set<Key, KeyHash> level;
    level.insert({pack(lp(0, 0, 0))});
    std::unordered_set<Key, KeyHash> next;
    for (int k = 2; k <= n; ++k) {
        next.clear();
        for (const Key& key : level) {
            std::unordered_set<int64_t> members(key.begin(), key.end());
            for (int64_t packed : key) {
                LatticePoint z = lp((packed >> 42) - kPackOffset,
                                    ((packed >> 21) & ((1 << 21) - 1)) - kPackOffset,
                                    (packed & ((1 << 21) - 1)) - kPackOffset);
                for (auto& o : offs) {
                    int64_t wkey = pack(shifted(z, o));
                    if (members.count(wkey)) continue;
                    Key grown = key;
                    grown.push_back(wkey);
                    std::sort(grown.begin(), grown.end());
                    next.insert(std::move(grown));
                }
            }
        }
        counts[size_t(k - 1)] = int64_t(next.size());
        level.swap(next);
    }
    return counts;
}

SiteField SiteField::constant(int d, LatticePoint origin, std::array<int64_t, 3> shape,
                              double value) {
    SiteField f;
    f.dimension = d;
    f.origin = origin;
    f.shape = shape;
    if (d == 2) f.shape[2] = 1;
    int64_t n = f.shape[0] * f.shape[1] * f.shape[2];
    f.values.assign(size_t(n), value);
    return f;
}

bool SiteField::contains(const LatticePoint& z) const {
    for (int i = 0; i < dimension; ++i)
        if (z[i] < origin[i] || z[i] >= origin[i] + shape[i]) return false;
    return true;
}

double SiteField::at(const LatticePoint& z) const {
    if (!contains(z)) throw Error("site field: missing site");
    int64_t i = z[0] - origin[0], j = z[1] - origin[1];
    int64_t k = dimension == 3 ? z[2] - origin[2] : 0;
    return values[size_t((k * shape[1] + j) * shape[0] + i)];
}

double& SiteField::slot(const LatticePoint& z) {
    if (!contains(z)) throw Error("site field: missing site");
    int64_t i = z[0] - origin[0], j = z[1] - origin[1];
    int64_t k = dimension == 3 ? z[2] - origin[2] : 0;
    return values[size_t((k * shape[1] + j) * shape[0] + i)];
}

double SiteField::min_value() const { return *std::min_element(values.begin(), values.end()); }
double SiteField::max_value() const { return *std::max_element(values.begin(), values.end()); }

std::vector<LatticePoint> SiteField::all_sites() const {
    std::vector<LatticePoint> out;
    out.reserve(size_t(site_count()));
    int64_t nz = dimension == 3 ? shape[2] : 1;
    for (int64_t k = 0; k < nz; ++k)
        for (int64_t j = 0; j < shape[1]; ++j)
            for (int64_t i = 0; i < shape[0]; ++i)
                out.push_back(lp(origin[0] + i, origin[1] + j, origin[2] + k));
    return out;
}

double passage_time(const StarSet& set, const SiteField& X) {
    double s = 0;
    for (auto& z : set.sites) s += X.at(z);
    return s;
}

std::vector<LatticePoint> spiral_order(const LatticePoint& anchor, int64_t max_radius,
                                       int dimension) {
    std::vector<LatticePoint> order{anchor};
    for (int64_t r = 1; r <= max_radius; ++r) {
        std::vector<LatticePoint> shell;
        if (dimension == 2) {
            for (int64_t dx = -r; dx <= r; ++dx)
                for (int64_t dy = -r; dy <= r; ++dy)
                    if (std::max(std::abs(dx), std::abs(dy)) == r)
                        shell.push_back(lp(anchor[0] + dx, anchor[1] + dy));
            std::sort(shell.begin(), shell.end(), [&](const LatticePoint& a, const LatticePoint& b) {
                double aa = std::atan2(double(a[1] - anchor[1]), double(a[0] - anchor[0]));
                double ab = std::atan2(double(b[1] - anchor[1]), double(b[0] - anchor[0]));
                if (aa < 0) aa += 2 * M_PI;
                if (ab < 0) ab += 2 * M_PI;
                if (aa != ab) return aa < ab;
                return a < b;
            });
        } else {
            for (int64_t dx = -r; dx <= r; ++dx)
                for (int64_t dy = -r; dy <= r; ++dy)
                    for (int64_t dz = -r; dz <= r; ++dz)
                        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) == r)
                            shell.push_back(lp(anchor[0] + dx, anchor[1] + dy, anchor[2] + dz));
            std::sort(shell.begin(), shell.end());
        }
        order.insert(order.end(), shell.begin(), shell.end());
    }
    return order;
}

std::vector<LatticePoint> rsep_subset_ordered(const StarSet& set, int R,
                                              const std::vector<LatticePoint>& order) {
    if (R < 0) throw std::invalid_argument("rsep_subset: R must be >= 0");
    std::unordered_set<int64_t> members;
    for (auto& z : set.sites) members.insert(pack(z));
    std::vector<LatticePoint> chosen;
    size_t found = 0;
    for (const auto& z : order) {
        if (!members.count(pack(z))) continue;
        ++found;
        bool ok = true;
        for (auto& g : chosen) {
            if (euclid(z, g, set.dimension) <= double(R)) {
                ok = false;
                break;
            }
        }
        if (ok) chosen.push_back(z);
        if (found == set.sites.size()) break;
    }
    if (found != set.sites.size())
        throw std::invalid_argument("rsep_subset: enumeration order does not cover the set");
    return chosen;
}

std::vector<LatticePoint> rsep_subset(const StarSet& set, int R, const LatticePoint& anchor) {
    int64_t max_r = 0;
    for (auto& z : set.sites) max_r = std::max(max_r, chebyshev(z, anchor, set.dimension));
    return rsep_subset_ordered(set, R, spiral_order(anchor, max_r, set.dimension));
}

std::vector<std::vector<LatticePoint>> residue_partition(const StarSet& set, int R) {
    if (R < 1) throw std::invalid_argument("residue_partition: R must be >= 1");
    const int d = set.dimension;
    int64_t k = 1;
    for (int i = 0; i < d; ++i) k *= R;
    std::vector<std::vector<LatticePoint>> parts(static_cast<size_t>(k));
    auto mod = [R](int64_t v) { return ((v % R) + R) % R; };
    for (auto& z : set.sites) {
        int64_t j = mod(z[0]);
        for (int i = 1; i < d; ++i) j = j * R + mod(z[i]);
        parts[size_t(j)].push_back(z);
    }
    return parts;
}

StarSet curve_to_sites(const Polyline& curve, int dimension, double threshold) {
    std::map<int64_t, double> length_in_cube;
    const int d = dimension;
    for (size_t s = 1; s < curve.size(); ++s) {
        Point a = curve[s - 1], b = curve[s];
        double seg_len = norm(sub(b, a), d);
        if (seg_len == 0) continue;
        std::vector<double> ts{0.0, 1.0};
        for (int i = 0; i < d; ++i) {
            double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
            for (double v = std::floor(lo - 0.5) + 0.5; v <= hi; v += 1.0) {
                if (v > lo && v < hi) ts.push_back((v - a[i]) / (b[i] - a[i]));
            }
        }
        std::sort(ts.begin(), ts.end());
        for (size_t p = 1; p < ts.size(); ++p) {
            double t0 = ts[p - 1], t1 = ts[p];
            if (t1 - t0 <= 1e-15) continue;
            double tm = (t0 + t1) / 2;
            LatticePoint z{};
            for (int i = 0; i < d; ++i)
                z[i] = int64_t(std::floor(a[i] + tm * (b[i] - a[i]) + 0.5));
            length_in_cube[pack(z)] += seg_len * (t1 - t0);
        }
    }
    std::vector<LatticePoint> sites;
    for (auto& [key, len] : length_in_cube) {
        if (len >= threshold - 1e-12) {
            sites.push_back(lp((key >> 42) - kPackOffset,
                               ((key >> 21) & ((1 << 21) - 1)) - kPackOffset,
                               d == 3 ? (key & ((1 << 21) - 1)) - kPackOffset : 0));
        }
    }
    return StarSet(d, std::move(sites));
}

PassageSearchResult min_passage_connected(int m, const LatticePoint& anchor, const SiteField& X,
                                          bool exact, int exact_size_guard, int64_t node_guard) {
    if (m < 1) throw std::invalid_argument("min_passage_connected: m >= 1");
    PassageSearchResult out;
    if (!exact) {
        // cheapest-frontier growth; upper bound on the exact minimum
        auto offs = star_offsets(X.dimension);
        std::vector<LatticePoint> cur{anchor};
        std::unordered_set<int64_t> members{pack(anchor)};
        double sum = X.at(anchor);
        while (int(cur.size()) < m) {
            bool found = false;
            LatticePoint best{};
            double best_v = std::numeric_limits<double>::infinity();
            for (auto& z : cur)
                for (auto& o : offs) {
                    LatticePoint w = shifted(z, o);
                    if (!X.contains(w) || members.count(pack(w))) continue;
                    double v = X.at(w);
                    if (v < best_v || (v == best_v && (!found || w < best))) {
                        best_v = v;
                        best = w;
                        found = true;
                    }
                }
            if (!found) throw Error("greedy growth ran out of candidate sites");
            cur.push_back(best);
            members.insert(pack(best));
            sum += best_v;
        }
        out.value = sum;
        out.witness = StarSet(X.dimension, cur);
        out.exact = false;
        return out;
    }
    if (m > exact_size_guard)
        throw ResourceLimitError("min_passage_connected: m exceeds the exact-mode guard");
    double min_site = X.min_value();
    double best = std::numeric_limits<double>::infinity();
    std::vector<LatticePoint> best_sites;
    StarEnumerator en;
    en.d = X.dimension;
    en.max_size = size_t(m);
    en.weights = &X;
    en.node_guard = node_guard;
    en.visit = [&](const std::vector<LatticePoint>& cur, double sum) {
        if (int(cur.size()) == m) {
            if (sum < best) {
                best = sum;
                best_sites = cur;
            }
            return false;
        }
        // optimistic completion with the cheapest possible sites
        return sum + double(m - int(cur.size())) * min_site < best;
    };
    en.run(anchor);
    out.nodes_explored = en.nodes;
    if (!std::isfinite(best)) throw Error("no connected set of the requested size exists in the field");
    out.value = best;
    out.witness = StarSet(X.dimension, best_sites);
    out.exact = true;
    return out;
}

SizeSearchResult max_size_under_budget(double budget, const LatticePoint& anchor,
                                       const SiteField& X, bool exact, int64_t node_guard) {
    SizeSearchResult out;
    if (X.at(anchor) > budget) {
        out.exact = true;  // no valid set at all
        return out;
    }
    if (!exact) {
        auto offs = star_offsets(X.dimension);
        std::vector<LatticePoint> cur{anchor};
        std::unordered_set<int64_t> members{pack(anchor)};
        double sum = X.at(anchor);
        for (;;) {
            bool found = false;
            LatticePoint best{};
            double best_v = std::numeric_limits<double>::infinity();
            for (auto& z : cur)
                for (auto& o : offs) {
                    LatticePoint w = shifted(z, o);
                    if (!X.contains(w) || members.count(pack(w))) continue;
                    double v = X.at(w);
                    if (v < best_v || (v == best_v && (!found || w < best))) {
                        best_v = v;
                        best = w;
                        found = true;
                    }
                }
            if (!found || sum + best_v > budget) break;
            cur.push_back(best);
            members.insert(pack(best));
            sum += best_v;
        }
        out.size = int64_t(cur.size());
        out.witness = StarSet(X.dimension, cur);
        out.exact = false;
        return out;
    }
    double min_site = X.min_value();
    int64_t best = 0;
    std::vector<LatticePoint> best_sites;
    StarEnumerator en;
    en.d = X.dimension;
    en.max_size = size_t(X.site_count());
    en.weights = &X;
    en.node_guard = node_guard;
    en.visit = [&](const std::vector<LatticePoint>& cur, double sum) {
        if (sum > budget) return false;  // supersets only grow
        if (int64_t(cur.size()) > best) {
            best = int64_t(cur.size());
            best_sites = cur;
        }
        if (min_site > 0) {
            int64_t reachable = int64_t(cur.size()) + int64_t((budget - sum) / min_site);
            if (reachable <= best) return false;
        }
        return true;
    };
    en.run(anchor);
    out.nodes_explored = en.nodes;
    out.size = best;
    out.witness = StarSet(X.dimension, best_sites);
    out.exact = true;
    return out;
}

PassageSearchResult max_passage_under_size(int m, const LatticePoint& anchor, const SiteField& X,
                                           bool exact, int exact_size_guard, int64_t node_guard) {
    if (m < 1) throw std::invalid_argument("max_passage_under_size: m >= 1");
    PassageSearchResult out;
    if (!exact) {
        auto offs = star_offsets(X.dimension);
        std::vector<LatticePoint> cur{anchor};
        std::unordered_set<int64_t> members{pack(anchor)};
        double sum = X.at(anchor);
        while (int(cur.size()) < m) {
            bool found = false;
            LatticePoint best{};
            double best_v = -1;
            for (auto& z : cur)
                for (auto& o : offs) {
                    LatticePoint w = shifted(z, o);
                    if (!X.contains(w) || members.count(pack(w))) continue;
                    double v = X.at(w);
                    if (v > best_v || (v == best_v && (!found || w < best))) {
                        best_v = v;
                        best = w;
                        found = true;
                    }
                }
            if (!found) break;
            cur.push_back(best);
            members.insert(pack(best));
            sum += best_v;
        }
        out.value = sum;
        out.witness = StarSet(X.dimension, cur);
        out.exact = false;
        return out;
    }
    if (m > exact_size_guard)
        throw ResourceLimitError("max_passage_under_size: m exceeds the exact-mode guard");
    double max_site = X.max_value();
    double best = -1;
    std::vector<LatticePoint> best_sites;
    StarEnumerator en;
    en.d = X.dimension;
    en.max_size = size_t(m);
    en.weights = &X;
    en.node_guard = node_guard;
    en.visit = [&](const std::vector<LatticePoint>& cur, double sum) {
        if (sum > best) {
            best = sum;
            best_sites = cur;
        }
        if (int(cur.size()) == m) return false;
        return sum + double(m - int(cur.size())) * max_site > best;
    };
    en.run(anchor);
    out.nodes_explored = en.nodes;
    out.value = best;
    out.witness = StarSet(X.dimension, best_sites);
    out.exact = true;
    return out;
}

SiteField lattice_from_metric(const MetricField& metric, CubeField which, int samples_per_axis) {
    const int d = metric.dimension();
    const GridSpec& w = metric.window();
    LatticePoint lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[i] = int64_t(std::ceil(w.origin[i] + 0.5 - 1e-9));
        hi[i] = int64_t(std::floor(w.origin[i] + w.extent[i] - 0.5 + 1e-9));
        if (hi[i] < lo[i])
            throw WindowTooSmallError("lattice_from_metric: window contains no full unit cube");
    }
    SiteField f;
    f.dimension = d;
    f.origin = lo;
    for (int i = 0; i < d; ++i) f.shape[i] = hi[i] - lo[i] + 1;
    if (d == 2) f.shape[2] = 1;
    f.values.assign(size_t(f.shape[0] * f.shape[1] * f.shape[2]), 0.0);
    int range = 0;
    for (auto& fld : metric.fields())
        range = std::max(range, int(std::ceil(fld->covariance.range)));
    f.dependence_range = metric.fields().empty() ? 1 : range + 1;
    for (auto& z : f.all_sites()) {
        CubeExtremes ext = metric.cube_extremes(z, samples_per_axis);
        f.slot(z) = which == CubeField::LambdaMin ? ext.lambda : ext.Lambda;
    }
    return f;
}

std::pair<double, double> passstep_b_interval(double r, double p, double A) {
    if (!(r > 0) || !(A > 0) || !(p > 0) || !(p < 1))
        throw std::invalid_argument("passstep_b_interval: need r > 0, A > 0, 0 < p < 1");
    double lo = r * A / std::log(1.0 / p);
    double hi = r * A / std::log((1.0 + p) / (2.0 * p));
    return {lo, hi};
}

ZeroAtomEstimate zero_atom_estimate(const SiteField& X, double sigma) {
    ZeroAtomEstimate out;
    int64_t zeros = 0;
    for (double v : X.values)
        if (v == 0.0) ++zeros;
    out.p_zero = double(zeros) / double(X.site_count());
    double K = std::pow(2.0 * X.dependence_range + 1.0, X.dimension);
    out.threshold = std::pow(sigma, -K);
    out.below = out.p_zero < out.threshold;
    return out;
}

StarSet random_star_set(Xoshiro256& rng, int size, int dimension) {
    auto offs = star_offsets(dimension);
    std::vector<LatticePoint> cur{lp(0, 0, 0)};
    std::unordered_set<int64_t> members{pack(cur[0])};
    while (int(cur.size()) < size) {
        const LatticePoint& z = cur[size_t(rng.below(cur.size()))];
        const LatticePoint& o = offs[size_t(rng.below(offs.size()))];
        LatticePoint w = shifted(z, o);
        if (members.insert(pack(w)).second) cur.push_back(w);
    }
    return StarSet(dimension, cur);
}

}  // namespace riemfpp
