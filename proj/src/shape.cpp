#include "riemfpp/shape.hpp"

#include <algorithm>
#include <cmath>

#include "riemfpp/rng.hpp"
#include "riemfpp/threadpool.hpp"

namespace riemfpp {

MetricEnsemble::MetricEnsemble(EnsembleSpec spec) : spec_(std::move(spec)) {
    if (spec_.transform_kind == MetricTransform::Kind::HyperbolicHalfPlane ||
        spec_.transform_kind == MetricTransform::Kind::User)
        throw std::invalid_argument("MetricEnsemble supports constant and random-field transforms");
    if (spec_.transform_kind != MetricTransform::Kind::Constant)
        sampler_ = std::make_unique<CirculantSampler>(window(), spec_.covariance);
}

GridSpec MetricEnsemble::window() const {
    const int d = spec_.dimension;
    Point org{}, ext{};
    for (int i = 0; i < d; ++i) {
        org[i] = -spec_.window_radius;
        ext[i] = 2.0 * spec_.window_radius;
    }
    return GridSpec(d, org, ext, spec_.field_spacing);
}

MetricField MetricEnsemble::metric(uint64_t seed) const {
    if (spec_.transform_kind == MetricTransform::Kind::Constant) {
        double c = spec_.transform_params.empty() ? 1.0 : spec_.transform_params[0];
        return MetricField::constant(spec_.dimension, c, window());
    }
    std::vector<std::shared_ptr<ScalarField>> fields;
    for (int f = 0; f < std::max(1, spec_.field_count); ++f)
        fields.push_back(
            std::make_shared<ScalarField>(sampler_->sample(derive_seed(seed, 100 + uint64_t(f), 0))));
    if (spec_.transform_kind == MetricTransform::Kind::Conformal)
        return MetricField::conformal(fields[0], spec_.interp);
    return MetricField::paper_diagonal(std::move(fields), spec_.interp);
}

namespace {

std::vector<Point> direction_grid(int n) {
    std::vector<Point> dirs;
    for (int i = 0; i < n; ++i) {
        double th = 2.0 * M_PI * double(i) / double(n);
        dirs.push_back({std::cos(th), std::sin(th), 0});
    }
    return dirs;
}

}  // namespace

std::optional<size_t> MuTable::index_of_angle(double angle, double tol) const {
    for (size_t i = 0; i < angles.size(); ++i) {
        double d = std::remainder(angles[i] - angle, 2.0 * M_PI);
        if (std::abs(d) <= tol) return i;
    }
    return std::nullopt;
}

MuTable estimate_mu_table(const MetricEnsemble& ensemble, const MuParams& params) {
    if (ensemble.spec().dimension != 2)
        throw Error("estimate_mu_table: direction tables are built for d = 2");
    if (params.t_list.empty()) throw std::invalid_argument("estimate_mu_table: empty t_list");

    MuTable table;
    table.dimension = 2;
    table.directions = direction_grid(params.directions);
    for (int i = 0; i < params.directions; ++i)
        table.angles.push_back(2.0 * M_PI * double(i) / double(params.directions));
    table.t_list = params.t_list;
    table.t_used = *std::max_element(params.t_list.begin(), params.t_list.end());
    table.base_seed = params.base_seed;
    table.ci_level = params.ci_level;

    double radius_needed = table.t_used * (1.0 + params.solver.padding_fraction);
    if (ensemble.spec().window_radius + 1e-9 < radius_needed)
        throw WindowTooSmallError(
            "estimate_mu_table: window radius below t_max * (1 + padding_fraction)");

    const int reps = params.mode == MuMode::ReplicateEnsemble ? params.replicates : 1;
    table.replicates = reps;
    table.samples.assign(params.t_list.size(),
                         std::vector<std::vector<double>>(
                             table.directions.size(), std::vector<double>(size_t(reps), 0.0)));
    table.seeds.resize(size_t(reps));
    std::vector<double> lambda_by_rep(size_t(reps), 0.0);

    parallel_for(reps, params.threads, [&](int64_t r) {
        uint64_t seed = derive_seed(params.base_seed, 11, uint64_t(r));
        table.seeds[size_t(r)] = seed;
        MetricField metric = ensemble.metric(seed);
        lambda_by_rep[size_t(r)] = metric.lambda_min_window();

        // truncation level: every target is reachable below its chord length
        double cap = 0;
        for (double t : params.t_list)
            for (auto& v : table.directions)
                cap = std::max(
                    cap, metric.curve_length({Point{}, scale(v, t)}, 8, 4.0 * params.solver.h)
                             .riemannian);
        cap += 2.0 * params.solver.h * std::sqrt(metric.lambda_max_window()) + 1e-9;

        DistanceField df = distance_field(metric, Point{}, cap, params.solver);
        for (size_t ti = 0; ti < params.t_list.size(); ++ti) {
            double t = params.t_list[ti];
            for (size_t di = 0; di < table.directions.size(); ++di) {
                double d = df.at_point(scale(table.directions[di], t));
                if (!std::isfinite(d)) throw Error("estimate_mu_table: target beyond truncation");
                table.samples[ti][di][size_t(r)] = d / t;
            }
        }
    });

    table.min_lambda_window = *std::min_element(lambda_by_rep.begin(), lambda_by_rep.end());

    size_t last_t = 0;
    for (size_t ti = 1; ti < params.t_list.size(); ++ti)
        if (params.t_list[ti] > params.t_list[last_t]) last_t = ti;
    for (size_t di = 0; di < table.directions.size(); ++di) {
        const auto& xs = table.samples[last_t][di];
        if (params.mode == MuMode::ReplicateEnsemble) {
            MeanCI ci = mean_ci(xs, params.ci_level);
            table.mu_hat.push_back(ci.mean);
            table.ci_lo.push_back(ci.ci_lo);
            table.ci_hi.push_back(ci.ci_hi);
        } else {
            // single environment: the estimate is the last ratio; the
            // interval comes from batch means of the t-increments
            table.mu_hat.push_back(xs[0]);
            std::vector<double> increments;
            for (size_t ti = 1; ti < params.t_list.size(); ++ti) {
                double t1 = params.t_list[ti], t0 = params.t_list[ti - 1];
                double d1 = table.samples[ti][di][0] * t1;
                double d0 = table.samples[ti - 1][di][0] * t0;
                increments.push_back((d1 - d0) / (t1 - t0));
            }
            if (increments.size() >= 2) {
                MeanCI ci = batch_means_ci(increments, std::min<int>(3, int(increments.size())),
                                           params.ci_level);
                double half = (ci.ci_hi - ci.ci_lo) / 2.0;
                table.ci_lo.push_back(table.mu_hat.back() - half);
                table.ci_hi.push_back(table.mu_hat.back() + half);
            } else {
                table.ci_lo.push_back(table.mu_hat.back());
                table.ci_hi.push_back(table.mu_hat.back());
            }
        }
    }
    return table;
}

MuEstimate estimate_mu(const MetricEnsemble& ensemble, const Point& direction,
                       const MuParams& params) {
    double len = std::hypot(direction[0], direction[1]);
    if (!(len > 0)) throw std::invalid_argument("estimate_mu: zero direction");
    const MetricEnsemble& ens = ensemble;
    Point v = scale(direction, 1.0 / len);
    const int reps = params.mode == MuMode::ReplicateEnsemble ? params.replicates : 1;
    std::vector<std::vector<double>> samples(params.t_list.size(),
                                             std::vector<double>(size_t(reps), 0.0));
    parallel_for(reps, params.threads, [&](int64_t r) {
        uint64_t seed = derive_seed(params.base_seed, 11, uint64_t(r));
        MetricField metric = ens.metric(seed);
        double cap = 0;
        for (double t : params.t_list)
            cap = std::max(cap,
                           metric.curve_length({Point{}, scale(v, t)}, 8, 4.0 * params.solver.h)
                               .riemannian);
        cap += 2.0 * params.solver.h * std::sqrt(metric.lambda_max_window()) + 1e-9;
        DistanceField df = distance_field(metric, Point{}, cap, params.solver);
        for (size_t ti = 0; ti < params.t_list.size(); ++ti)
            samples[ti][size_t(r)] = df.at_point(scale(v, params.t_list[ti])) / params.t_list[ti];
    });
    MuEstimate out;
    size_t last_t = 0;
    for (size_t ti = 1; ti < params.t_list.size(); ++ti)
        if (params.t_list[ti] > params.t_list[last_t]) last_t = ti;
    for (size_t ti = 0; ti < params.t_list.size(); ++ti)
        out.trace.emplace_back(params.t_list[ti], mean_ci(samples[ti], params.ci_level));
    MeanCI ci = mean_ci(samples[last_t], params.ci_level);
    out.mu_hat = ci.mean;
    out.ci_lo = ci.ci_lo;
    out.ci_hi = ci.ci_hi;
    return out;
}

double mu_norm(const Point& x, const MuTable& table) {
    double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return 0.0;
    double th = std::atan2(x[1], x[0]);
    if (th < 0) th += 2.0 * M_PI;
    const size_t n = table.angles.size();
    if (n == 0) throw std::invalid_argument("mu_norm: empty table");
    // table angles are an ascending uniform grid on [0, 2pi)
    size_t i = 0;
    while (i + 1 < n && table.angles[i + 1] <= th) ++i;
    size_t j = (i + 1) % n;
    double a0 = table.angles[i];
    double a1 = i + 1 < n ? table.angles[j] : table.angles[0] + 2.0 * M_PI;
    double s = a1 > a0 ? (th - a0) / (a1 - a0) : 0.0;
    double mu = table.mu_hat[i] + s * (table.mu_hat[j] - table.mu_hat[i]);
    return r * mu;
}

LimitShape limit_shape(const MuTable& table) {
    LimitShape shape;
    shape.min_radius = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < table.size(); ++i) {
        if (!(table.mu_hat[i] > 0)) throw Error("limit_shape: nonpositive mu estimate");
        double r = 1.0 / table.mu_hat[i];
        shape.vertices.push_back(scale(table.directions[i], r));
        shape.min_radius = std::min(shape.min_radius, r);
        shape.max_radius = std::max(shape.max_radius, r);
    }
    return shape;
}

PositivityCheck positivity_check(const MuTable& table) {
    PositivityCheck out;
    out.min_ci_lo = *std::min_element(table.ci_lo.begin(), table.ci_lo.end());
    out.lambda_floor = std::sqrt(table.min_lambda_window);
    out.floor_consistent = true;
    for (double mu : table.mu_hat)
        if (mu < out.lambda_floor * (1.0 - 1e-9)) out.floor_consistent = false;
    out.pass = out.min_ci_lo > 0 && out.floor_consistent;
    return out;
}

ContinuityCheck continuity_check(const MuTable& table, double slack) {
    if (table.size() < 8) throw std::invalid_argument("continuity_check: need >= 8 directions");
    ContinuityCheck out;
    const size_t n = table.size();
    for (size_t i = 0; i < n; ++i) {
        size_t j = (i + 1) % n;
        Point dv = sub(table.directions[i], table.directions[j]);
        double sep = std::hypot(dv[0], dv[1]);
        Point u = scale(dv, 1.0 / sep);
        double mu_u = mu_norm(u, table);
        double ratio = std::abs(table.mu_hat[i] - table.mu_hat[j]) / (mu_u * sep);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
    out.pass = out.worst_ratio <= 1.0 + slack;
    return out;
}

CoordinateBoundCheck coordinate_bound_check(const MuTable& table, double slack) {
    auto i_e1 = table.index_of_angle(0.0);
    auto i_e2 = table.index_of_angle(M_PI / 2.0);
    if (!i_e1 || !i_e2)
        throw std::invalid_argument("coordinate_bound_check: table must contain both axes");
    double mu_e1 = table.mu_hat[*i_e1];
    double mu_e2 = table.mu_hat[*i_e2];
    CoordinateBoundCheck out;
    out.worst_margin = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < table.size(); ++i) {
        const Point& v = table.directions[i];
        double bound = std::abs(v[0]) * mu_e1 + std::abs(v[1]) * mu_e2;
        out.worst_margin = std::max(out.worst_margin, table.mu_hat[i] - bound);
    }
    out.pass = out.worst_margin <= slack;
    return out;
}

UniformConvergenceResult uniform_convergence_check(const MuTable& table, double epsilon) {
    UniformConvergenceResult out;
    std::vector<size_t> order(table.t_list.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return table.t_list[a] < table.t_list[b]; });
    for (size_t oi : order) {
        double dev = 0;
        for (size_t di = 0; di < table.size(); ++di) {
            double mean = 0;
            for (double s : table.samples[oi][di]) mean += s;
            mean /= double(table.samples[oi][di].size());
            dev = std::max(dev, std::abs(mean - table.mu_hat[di]));
        }
        out.deviation_by_t.emplace_back(table.t_list[oi], dev);
        if (!out.found && dev <= epsilon) {
            out.found = true;
            out.earliest_t = table.t_list[oi];
        }
    }
    return out;
}

ContainmentReport shape_containment_check(const MetricEnsemble& ensemble, double t,
                                          double epsilon, const MuTable& table, int replicates,
                                          uint64_t base_seed, const SolverOptions& solver,
                                          int threads) {
    ContainmentReport report;
    report.total = replicates;
    report.epsilon = epsilon;
    report.replicates.resize(size_t(replicates));
    parallel_for(replicates, threads, [&](int64_t r) {
        ContainmentReplicate& rep = report.replicates[size_t(r)];
        rep.seed = derive_seed(base_seed, 21, uint64_t(r));
        MetricField metric = ensemble.metric(rep.seed);
        rep.boundary = ball(metric, t, solver);
        const BallBoundary& boundary = rep.boundary;
        rep.min_norm = std::numeric_limits<double>::infinity();
        rep.max_norm = 0;
        for (const auto& loop : boundary.loops) {
            for (size_t i = 0; i + 1 < loop.size(); ++i) {  // last point repeats the first
                double nrm = mu_norm(scale(loop[i], 1.0 / t), table);
                rep.min_norm = std::min(rep.min_norm, nrm);
                rep.max_norm = std::max(rep.max_norm, nrm);
                ++rep.boundary_points;
            }
        }
        rep.pass = rep.boundary_points > 0 && rep.min_norm >= 1.0 - epsilon &&
                   rep.max_norm <= 1.0 + epsilon;
    });
    for (auto& rep : report.replicates)
        if (rep.pass) ++report.passes;
    return report;
}

}  // namespace riemfpp
