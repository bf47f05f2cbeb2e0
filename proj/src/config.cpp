#include "riemfpp/config.hpp"

#include "riemfpp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace riemfpp {

namespace {

std::vector<double> numbers_field(const toml::Table& t, const std::string& key,
                                  std::vector<double> fallback) {
    return t.numbers_or(key, std::move(fallback));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_toml(const toml::Table& t) {
    ExperimentConfig c;
    c.kind = t.string_or("experiment.kind", c.kind);
    c.base_seed = uint64_t(t.integer_or("experiment.base_seed", int64_t(c.base_seed)));

    c.dimension = int(t.integer_or("grid.dimension", c.dimension));
    c.extent = numbers_field(t, "grid.extent", c.extent);
    if (t.has("grid.origin")) c.origin = numbers_field(t, "grid.origin", {});
    c.spacing = t.number_or("grid.spacing", c.spacing);

    c.cov_kind = t.string_or("covariance.kind", c.cov_kind);
    c.variance = t.number_or("covariance.variance", c.variance);
    c.range = t.number_or("covariance.range", c.range);
    c.knots_r = numbers_field(t, "covariance.knots_r", {});
    c.knots_c = numbers_field(t, "covariance.knots_c", {});

    c.transform_kind = t.string_or("transform.kind", c.transform_kind);
    c.transform_params = numbers_field(t, "transform.parameters", {});
    c.field_count = int(t.integer_or("transform.fields", c.field_count));
    c.interpolation = t.string_or("transform.interpolation", c.interpolation);

    c.h = t.number_or("solver.h", c.h);
    c.stencil_k = int(t.integer_or("solver.stencil_k", c.stencil_k));
    c.quad_intervals = int(t.integer_or("solver.quadrature_intervals", c.quad_intervals));
    c.padding_fraction = t.number_or("solver.padding_fraction", c.padding_fraction);
    c.chord_edges = t.boolean_or("solver.chord_edges", c.chord_edges);

    c.t_list = numbers_field(t, "stats.t_list", c.t_list);
    c.replicates = int(t.integer_or("stats.replicates", c.replicates));
    c.directions = int(t.integer_or("stats.directions", c.directions));
    c.ci_level = t.number_or("stats.ci_level", c.ci_level);
    c.epsilon = t.number_or("stats.epsilon", c.epsilon);
    c.threads = int(t.integer_or("stats.threads", c.threads));
    c.mu_mode = t.string_or("stats.mu_mode", c.mu_mode);
    c.min_pass_fraction = t.number_or("stats.min_pass_fraction", c.min_pass_fraction);

    c.out_dir = t.string_or("output.dir", c.out_dir);

    c.x = numbers_field(t, "distance.x", c.x);
    c.y = numbers_field(t, "distance.y", c.y);
    c.refine = t.boolean_or("distance.refine", c.refine);

    c.geo_x0 = numbers_field(t, "geodesic.x0", c.geo_x0);
    c.geo_v0 = numbers_field(t, "geodesic.v0", c.geo_v0);
    c.geo_length = t.number_or("geodesic.length", c.geo_length);
    c.geo_step = t.number_or("geodesic.step", c.geo_step);
    c.fd_step = t.number_or("geodesic.fd_step", c.fd_step);
    c.shoot_target = numbers_field(t, "geodesic.shoot_target", {});
    c.shoot_tolerance = t.number_or("geodesic.shoot_tolerance", c.shoot_tolerance);
    c.probe_directions = int(t.integer_or("geodesic.probe_directions", c.probe_directions));
    c.probe_T = t.number_or("geodesic.probe_T", c.probe_T);

    c.n_max = int(t.integer_or("lattice.n_max", c.n_max));
    c.exact_limit = int(t.integer_or("lattice.exact_limit", c.exact_limit));
    c.budget_A = t.number_or("lattice.budget_A", c.budget_A);
    c.size_B = t.number_or("lattice.size_B", c.size_B);
    c.which_field = t.string_or("lattice.which", c.which_field);
    c.n_sets = int(t.integer_or("lattice.sets", c.n_sets));
    c.separation_R = int(t.integer_or("lattice.R", c.separation_R));
    c.cube_samples = int(t.integer_or("lattice.cube_samples", c.cube_samples));
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_toml(toml::parse_file(path));
}

InterpOrder ExperimentConfig::interp_order() const {
    return interpolation == "cubic" ? InterpOrder::Cubic : InterpOrder::Linear;
}

GridSpec ExperimentConfig::grid() const {
    Point org{}, ext{};
    for (int i = 0; i < dimension; ++i) {
        ext[i] = extent[size_t(std::min<size_t>(i, extent.size() - 1))];
        org[i] = origin.empty() ? -ext[i] / 2.0 : origin[size_t(i)];
    }
    return GridSpec(dimension, org, ext, spacing);
}

CovarianceModel ExperimentConfig::covariance() const {
    auto kind = CovarianceModel::kind_from_name(cov_kind);
    if (kind == CovarianceModel::Kind::Tabulated)
        return CovarianceModel::tabulated(knots_r, knots_c);
    CovarianceModel m;
    m.kind = kind;
    m.variance = variance;
    m.range = range;
    return m;
}

SolverOptions ExperimentConfig::solver() const {
    SolverOptions s;
    s.h = h;
    s.stencil_k = stencil_k;
    s.quad_intervals = quad_intervals;
    s.padding_fraction = padding_fraction;
    s.chord_edges = chord_edges;
    return s;
}

EnsembleSpec ExperimentConfig::ensemble_spec() const {
    EnsembleSpec e;
    e.dimension = dimension;
    GridSpec g = grid();
    double radius = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dimension; ++i) {
        radius = std::min(radius, -g.origin[i]);
        radius = std::min(radius, g.origin[i] + g.extent[i]);
    }
    e.window_radius = radius;
    e.covariance = covariance();
    e.field_spacing = spacing;
    e.transform_kind = MetricTransform::kind_from_name(transform_kind);
    e.transform_params = transform_params;
    e.field_count = field_count;
    e.interp = interp_order();
    return e;
}

MuParams ExperimentConfig::mu_params() const {
    MuParams p;
    p.directions = directions;
    p.t_list = t_list;
    p.replicates = replicates;
    p.base_seed = base_seed;
    p.solver = solver();
    p.mode = mu_mode == "single-environment" ? MuMode::SingleEnvironment
                                             : MuMode::ReplicateEnsemble;
    p.threads = threads;
    p.ci_level = ci_level;
    return p;
}

MetricField ExperimentConfig::build_metric(uint64_t seed) const {
    auto kind = MetricTransform::kind_from_name(transform_kind);
    GridSpec g = grid();
    switch (kind) {
        case MetricTransform::Kind::Constant:
            return MetricField::constant(dimension,
                                         transform_params.empty() ? 1.0 : transform_params[0], g);
        case MetricTransform::Kind::HyperbolicHalfPlane:
            return MetricField::hyperbolic_halfplane(g);
        default: {
            CirculantSampler sampler(g, covariance());
            std::vector<std::shared_ptr<ScalarField>> fields;
            for (int f = 0; f < std::max(1, field_count); ++f)
                fields.push_back(std::make_shared<ScalarField>(
                    sampler.sample(derive_seed(seed, 100 + uint64_t(f), 0))));
            if (kind == MetricTransform::Kind::Conformal)
                return MetricField::conformal(fields[0], interp_order());
            return MetricField::paper_diagonal(std::move(fields), interp_order());
        }
    }
}

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> errors;
    auto err = [&](const std::string& m) { errors.push_back(m); };

    static const std::set<std::string> kinds = {"field",   "distance", "mu",       "shape",
                                                "lattice-verify", "geodesic", "enumerate"};
    if (!kinds.count(kind)) err("experiment.kind: unknown kind '" + kind + "'");
    if (dimension != 2 && dimension != 3) err("grid.dimension: must be 2 or 3");
    if (!(spacing > 0)) err("grid.spacing: must be positive");
    if (extent.empty()) err("grid.extent: required");
    for (size_t i = 0; i < extent.size(); ++i) {
        if (!(extent[i] > 0)) {
            err("grid.extent: entries must be positive");
            break;
        }
        double cells = extent[i] / spacing;
        if (spacing > 0 && std::abs(cells - std::llround(cells)) > 1e-9 * std::max(1.0, cells)) {
            err("grid.extent: must be an integer multiple of grid.spacing");
            break;
        }
    }
    if (!origin.empty() && int(origin.size()) < dimension)
        err("grid.origin: needs one entry per dimension");

    if (!(variance > 0)) err("covariance.variance: must be positive");
    if (!(range > 0)) err("covariance.range: must be positive");
    try {
        (void)CovarianceModel::kind_from_name(cov_kind);
    } catch (const std::exception& e) {
        err(std::string("covariance.kind: ") + e.what());
    }

    try {
        auto k = MetricTransform::kind_from_name(transform_kind);
        if (k == MetricTransform::Kind::Constant &&
            (transform_params.empty() || !(transform_params[0] > 0)))
            err("transform.parameters: constant transform needs one positive parameter");
        if (k == MetricTransform::Kind::User)
            err("transform.kind: 'user' transforms are API-only, not configurable");
    } catch (const std::exception& e) {
        err(std::string("transform.kind: ") + e.what());
    }
    if (interpolation != "linear" && interpolation != "cubic")
        err("transform.interpolation: must be 'linear' or 'cubic'");
    if (field_count != 1 && field_count != dimension)
        err("transform.fields: must be 1 or equal to grid.dimension");

    if (!(h > 0)) err("solver.h: must be positive");
    if (stencil_k < 1) err("solver.stencil_k: must be >= 1");
    if (quad_intervals < 2) err("solver.quadrature_intervals: must be >= 2");
    if (!(padding_fraction >= 0)) err("solver.padding_fraction: must be >= 0");

    if (t_list.empty()) err("stats.t_list: required");
    for (double t : t_list)
        if (!(t > 0)) {
            err("stats.t_list: entries must be positive");
            break;
        }
    if (replicates < 1) err("stats.replicates: must be >= 1");
    if (directions < 4) err("stats.directions: must be >= 4");
    if (!(ci_level > 0.5 && ci_level < 1)) err("stats.ci_level: must lie in (0.5, 1)");
    if (!(epsilon > 0)) err("stats.epsilon: must be positive");

    // cross-field guards
    if ((kind == "mu" || kind == "shape") && !t_list.empty() && !extent.empty()) {
        double t_max = *std::max_element(t_list.begin(), t_list.end());
        GridSpec g;
        bool grid_ok = true;
        try {
            g = grid();
        } catch (...) {
            grid_ok = false;
        }
        if (grid_ok) {
            double radius = std::numeric_limits<double>::infinity();
            for (int i = 0; i < dimension; ++i) {
                radius = std::min(radius, -g.origin[i]);
                radius = std::min(radius, g.origin[i] + g.extent[i]);
            }
            if (radius + 1e-9 < t_max * (1.0 + padding_fraction)) {
                std::ostringstream os;
                os << "stats.t_list: t_max = " << t_max
                   << " exceeds window capacity; the distance solver requires window radius >= "
                   << "t_max * (1 + solver.padding_fraction) = " << t_max * (1.0 + padding_fraction);
                err(os.str());
            }
        }
        if (kind == "mu" || kind == "shape") {
            if (dimension != 2) err("grid.dimension: mu/shape experiments are 2d");
        }
    }
    if (kind == "mu" || kind == "shape") {
        double window_extent = extent.empty() ? 0.0 : extent[0];
        if (!(window_extent > 2.0 * range))
            err("grid.extent: must exceed twice covariance.range for field sampling");
    }
    if (kind == "distance") {
        if (int(x.size()) < dimension || int(y.size()) < dimension)
            err("distance.x / distance.y: need one entry per dimension");
    }
    if (kind == "geodesic") {
        if (!(geo_step > 0)) err("geodesic.step: must be positive");
        if (!(fd_step > 0)) err("geodesic.fd_step: must be positive");
        if (interpolation == "linear" && transform_kind != "constant" &&
            transform_kind != "hyperbolic-halfplane" && transform_kind != "hyperbolic")
            err("transform.interpolation: geodesic experiments on sampled fields need 'cubic'");
    }
    if (kind == "enumerate" || kind == "lattice-verify") {
        if (n_max < 1) err("lattice.n_max: must be >= 1");
        if (exact_limit < 1) err("lattice.exact_limit: must be >= 1");
        if (separation_R < 0) err("lattice.R: must be >= 0");
        if (n_sets < 1) err("lattice.sets: must be >= 1");
        if (which_field != "lambda" && which_field != "Lambda")
            err("lattice.which: must be 'lambda' or 'Lambda'");
    }
    return errors;
}

std::string ExperimentConfig::canonical_string() const {
    std::ostringstream os;
    os.precision(17);
    auto vec = [&](const std::vector<double>& v) {
        os << "[";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "]";
    };
    os << "kind=" << kind << ";seed=" << base_seed << ";d=" << dimension << ";extent=";
    vec(extent);
    os << ";origin=";
    vec(origin);
    os << ";spacing=" << spacing << ";cov=" << cov_kind << "," << variance << "," << range;
    os << ";knots_r=";
    vec(knots_r);
    os << ";knots_c=";
    vec(knots_c);
    os << ";transform=" << transform_kind << ",fields=" << field_count << ",interp="
       << interpolation << ",params=";
    vec(transform_params);
    os << ";solver=" << h << "," << stencil_k << "," << quad_intervals << "," << padding_fraction
       << "," << (chord_edges ? 1 : 0);
    os << ";t_list=";
    vec(t_list);
    os << ";replicates=" << replicates << ";directions=" << directions << ";ci=" << ci_level
       << ";eps=" << epsilon << ";mode=" << mu_mode << ";minpass=" << min_pass_fraction;
    os << ";x=";
    vec(x);
    os << ";y=";
    vec(y);
    os << ";refine=" << (refine ? 1 : 0);
    os << ";geo_x0=";
    vec(geo_x0);
    os << ";geo_v0=";
    vec(geo_v0);
    os << ";geo=" << geo_length << "," << geo_step << "," << fd_step << "," << shoot_tolerance
       << "," << probe_directions << "," << probe_T << ";target=";
    vec(shoot_target);
    os << ";lattice=" << n_max << "," << exact_limit << "," << budget_A << "," << size_B << ","
       << which_field << "," << n_sets << "," << separation_R << "," << cube_samples;
    return os.str();
}

std::vector<std::string> validate_config_file(const std::string& path) {
    try {
        ExperimentConfig cfg = ExperimentConfig::from_file(path);
        return cfg.validate();
    } catch (const std::exception& e) {
        return {std::string("config error: ") + e.what()};
    }
}

uint64_t fnv1a_hash(const std::string& text) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace riemfpp
