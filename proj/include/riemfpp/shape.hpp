#pragma once

#include <memory>
#include <optional>

#include "riemfpp/geodist.hpp"
#include "riemfpp/sampler.hpp"
#include "riemfpp/stats.hpp"

namespace riemfpp {

/// Recipe for one family of random (or oracle) metrics on a centered
/// square window [-radius, radius]^d; metric(seed) is deterministic.
struct EnsembleSpec {
    int dimension = 2;
    double window_radius = 60.0;
    CovarianceModel covariance = CovarianceModel::spherical(1.0, 1.0);
    double field_spacing = 0.25;
    MetricTransform::Kind transform_kind = MetricTransform::Kind::PaperDiagonal;
    std::vector<double> transform_params;
    int field_count = 1;
    InterpOrder interp = InterpOrder::Linear;
};

class MetricEnsemble {
  public:
    explicit MetricEnsemble(EnsembleSpec spec);
    MetricField metric(uint64_t seed) const;
    const EnsembleSpec& spec() const { return spec_; }
    GridSpec window() const;

  private:
    EnsembleSpec spec_;
    std::unique_ptr<CirculantSampler> sampler_;
};

enum class MuMode { ReplicateEnsemble, SingleEnvironment };

struct MuParams {
    int directions = 16;
    std::vector<double> t_list = {10.0, 20.0, 40.0};
    int replicates = 20;
    uint64_t base_seed = 1;
    SolverOptions solver;
    MuMode mode = MuMode::ReplicateEnsemble;
    int threads = 0;  // 0 -> hardware
    double ci_level = 0.95;
};

/// Directional time-constant estimates with raw traces.
struct MuTable {
    int dimension = 2;
    std::vector<double> angles;      // direction angles (2d)
    std::vector<Point> directions;   // unit vectors
    std::vector<double> t_list;
    // samples[ti][di][r] = d(0, t v) / t for replicate r
    std::vector<std::vector<std::vector<double>>> samples;
    std::vector<double> mu_hat, ci_lo, ci_hi;  // at the largest t
    double t_used = 0;
    int replicates = 0;
    uint64_t base_seed = 0;
    std::vector<uint64_t> seeds;
    double min_lambda_window = 0;  // min over replicates
    double ci_level = 0.95;

    size_t size() const { return directions.size(); }
    std::optional<size_t> index_of_angle(double angle, double tol = 1e-9) const;
};

MuTable estimate_mu_table(const MetricEnsemble& ensemble, const MuParams& params);

/// Single-direction form of the estimator.
struct MuEstimate {
    double mu_hat = 0;
    double ci_lo = 0, ci_hi = 0;
    std::vector<std::pair<double, MeanCI>> trace;  // (t, stats of d/t)
};
MuEstimate estimate_mu(const MetricEnsemble& ensemble, const Point& direction,
                       const MuParams& params);

/// mu(x) = |x| * (angular interpolation of mu_hat at x/|x|); 0 at the origin.
double mu_norm(const Point& x, const MuTable& table);

struct LimitShape {
    std::vector<Point> vertices;  // (1/mu_hat_i) * v_i, closed polygon implied
    double min_radius = 0, max_radius = 0;
};
LimitShape limit_shape(const MuTable& table);

struct PositivityCheck {
    bool pass = false;
    double min_ci_lo = 0;
    double lambda_floor = 0;       // sqrt(min lambda over windows)
    bool floor_consistent = false; // every mu_hat >= floor
};
PositivityCheck positivity_check(const MuTable& table);

struct ContinuityCheck {
    bool pass = false;
    double worst_ratio = 0;  // |mu_v - mu_v'| / (mu_u |v - v'|), adjacent pairs
};
ContinuityCheck continuity_check(const MuTable& table, double slack = 0.1);

struct CoordinateBoundCheck {
    bool pass = false;
    double worst_margin = 0;  // max over v of mu_v - (sum |v_i| mu_ei + slack)
};
/// mu_v <= sum_i |v^i| mu_{e_i} + slack, for every tabulated direction.
CoordinateBoundCheck coordinate_bound_check(const MuTable& table, double slack);

struct UniformConvergenceResult {
    bool found = false;
    double earliest_t = 0;
    std::vector<std::pair<double, double>> deviation_by_t;  // (t, sup_v |mean - mu_hat|)
};
UniformConvergenceResult uniform_convergence_check(const MuTable& table, double epsilon);

struct ContainmentReplicate {
    uint64_t seed = 0;
    double min_norm = 0, max_norm = 0;  // range of mu_norm over boundary/t
    bool pass = false;
    size_t boundary_points = 0;
    BallBoundary boundary;
};
struct ContainmentReport {
    int passes = 0;
    int total = 0;
    double epsilon = 0;
    std::vector<ContainmentReplicate> replicates;
};

/// Boundary form of the double containment: every point p of (1/t) B_t's
/// boundary must satisfy 1 - eps <= mu_norm(p) <= 1 + eps.
ContainmentReport shape_containment_check(const MetricEnsemble& ensemble, double t, double epsilon,
                                          const MuTable& table, int replicates,
                                          uint64_t base_seed, const SolverOptions& solver,
                                          int threads = 0);

}  // namespace riemfpp
