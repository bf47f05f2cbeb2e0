#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "riemfpp/geometry.hpp"
#include "riemfpp/metric.hpp"
#include "riemfpp/rng.hpp"

namespace riemfpp {

/// *-adjacency: distinct sites within Chebyshev distance 1 (axis moves plus
/// all diagonals).
bool star_adjacent(const LatticePoint& a, const LatticePoint& b, int dimension);

bool is_star_connected(const std::vector<LatticePoint>& sites, int dimension);

/// Finite set of lattice sites; the operations below assume (and the
/// verification batteries check) *-connectivity where the contract needs it.
struct StarSet {
    int dimension = 2;
    std::vector<LatticePoint> sites;  // sorted lexicographically, unique

    StarSet() = default;
    StarSet(int d, std::vector<LatticePoint> s);

    size_t size() const { return sites.size(); }
    bool contains(const LatticePoint& z) const;
    bool is_connected() const { return is_star_connected(sites, dimension); }
};

/// Exact counts S_k of *-connected k-site sets containing the origin.
struct EnumerationReport {
    int dimension = 2;
    std::vector<int64_t> counts;  // counts[k-1] == S_k
    double sigma_hat = 0;         // max_k S_k^{1/k}

    int64_t S(int k) const { return counts.at(size_t(k - 1)); }
    /// Pairs (n, m), n <= m, with S_{n+m} > S_n * S_m. Nonempty in general:
    /// origin-anchored animal counts are log-superadditive, not subadditive
    /// (S_2 = 8 > S_1^2 already), so this records how far off the
    /// subadditive reading is.
    std::vector<std::pair<int, int>> fekete_violations() const;
};

/// Duplicate-free recursive enumeration (Redelmeier-style candidate
/// blocking). Throws ResourceLimitError past node_guard search nodes.
EnumerationReport enumerate_connected_sets(int n, int dimension,
                                           int64_t node_guard = 100000000);

/// Independent brute-force oracle: breadth-first set growth with hash
/// deduplication. Exponentially slower; for cross-checking only.
std::vector<int64_t> enumerate_connected_sets_naive(int n, int dimension);

/// Nonnegative site values X_z on a rectangular block of the lattice,
/// with the recorded dependence range R of the generating field.
struct SiteField {
    int dimension = 2;
    LatticePoint origin{};             // lowest-corner site
    std::array<int64_t, 3> shape{1, 1, 1};
    std::vector<double> values;        // x fastest
    int dependence_range = 1;

    static SiteField constant(int d, LatticePoint origin, std::array<int64_t, 3> shape,
                              double value);

    bool contains(const LatticePoint& z) const;
    double at(const LatticePoint& z) const;  // throws on missing site
    double& slot(const LatticePoint& z);
    double min_value() const;
    double max_value() const;
    int64_t site_count() const { return int64_t(values.size()); }
    std::vector<LatticePoint> all_sites() const;
};

/// X(Gamma) = sum of site values; throws if a site is missing from X.
double passage_time(const StarSet& set, const SiteField& X);

/// Deterministic outward enumeration from an anchor: Chebyshev shells,
/// counterclockwise from east within a 2d shell, lexicographic in 3d.
std::vector<LatticePoint> spiral_order(const LatticePoint& anchor, int64_t max_radius,
                                       int dimension);

/// Greedy R-separated subset along the given enumeration: keep a site iff
/// its Euclidean distance to every kept site exceeds R. The result covers
/// the set by R-balls, so |set| <= |result| * (2R+1)^d.
std::vector<LatticePoint> rsep_subset(const StarSet& set, int R, const LatticePoint& anchor);
std::vector<LatticePoint> rsep_subset_ordered(const StarSet& set, int R,
                                              const std::vector<LatticePoint>& order);

/// Partition by componentwise residues mod R: R^d parts (some possibly
/// empty), disjoint, exhaustive; within a part all distances >= R.
std::vector<std::vector<LatticePoint>> residue_partition(const StarSet& set, int R);

/// Sites whose unit cube contains at least `threshold` of the curve's
/// Euclidean length. For continuous curves and threshold 1/4 the result
/// is *-connected; the verification batteries check this.
StarSet curve_to_sites(const Polyline& curve, int dimension, double threshold = 0.25);

struct PassageSearchResult {
    double value = 0;
    StarSet witness;
    bool exact = false;
    int64_t nodes_explored = 0;
};

struct SizeSearchResult {
    int64_t size = 0;
    StarSet witness;
    bool exact = false;
    int64_t nodes_explored = 0;
};

/// Minimum passage time over *-connected sets of exactly m sites containing
/// the anchor. Exact mode is branch-and-bound over the duplicate-free
/// enumeration tree; greedy grows by the cheapest frontier site (an upper
/// bound on the exact value).
PassageSearchResult min_passage_connected(int m, const LatticePoint& anchor, const SiteField& X,
                                          bool exact, int exact_size_guard = 10,
                                          int64_t node_guard = 100000000);

/// Largest *-connected set containing the anchor with X(set) <= budget.
SizeSearchResult max_size_under_budget(double budget, const LatticePoint& anchor,
                                       const SiteField& X, bool exact,
                                       int64_t node_guard = 100000000);

/// Maximum passage time over *-connected sets of at most m sites containing
/// the anchor (exact or greedy lower bound).
PassageSearchResult max_passage_under_size(int m, const LatticePoint& anchor, const SiteField& X,
                                           bool exact, int exact_size_guard = 10,
                                           int64_t node_guard = 100000000);

enum class CubeField { LambdaMin, LambdaMax };

/// X_z = lambda_z or Lambda_z over every unit cube inside the metric
/// window; dependence range R = ceil(covariance range) + 1.
SiteField lattice_from_metric(const MetricField& metric, CubeField which,
                              int samples_per_axis = 16);

/// Admissible interval (rA/log(1/p), rA/log((1+p)/2p)) for the lattice
/// growth constant; illustrative only, requires 0 < p < 1.
std::pair<double, double> passstep_b_interval(double r, double p, double A);

struct ZeroAtomEstimate {
    double p_zero = 0;
    double threshold = 0;  // sigma^{-(2R+1)^d}
    bool below = false;
};

ZeroAtomEstimate zero_atom_estimate(const SiteField& X, double sigma);

/// Random *-connected set of the given size grown from the origin.
StarSet random_star_set(Xoshiro256& rng, int size, int dimension);

}  // namespace riemfpp
