#include "riemfpp/experiments.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "riemfpp/field_io.hpp"
#include "riemfpp/geodesics.hpp"
#include "riemfpp/starlattice.hpp"

namespace riemfpp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Writer {
    fs::path dir;
    RunManifest* manifest;

    std::FILE* open(const std::string& name) {
        fs::path p = dir / name;
        std::FILE* f = std::fopen(p.string().c_str(), "w");
        if (!f) throw Error("cannot write " + p.string());
        manifest->files.push_back(name);
        return f;
    }
};

void w(std::FILE* f, const char* text) { std::fputs(text, f); }
template <class... A>
    requires(sizeof...(A) > 0)
void w(std::FILE* f, const char* fmt, A... args) {
    std::fprintf(f, fmt, args...);
}

std::string hex64(uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

Point to_point(const std::vector<double>& v, int d) {
    Point p{};
    for (int i = 0; i < d && i < int(v.size()); ++i) p[i] = v[i];
    return p;
}

Polyline random_polyline(Xoshiro256& rng, int segments) {
    Polyline poly;
    Point p = {rng.uniform(-5, 5), rng.uniform(-5, 5), 0};
    poly.push_back(p);
    for (int s = 0; s < segments; ++s) {
        double th = rng.uniform(0, 2 * M_PI);
        double len = rng.uniform(0.3, 2.5);
        p = {p[0] + len * std::cos(th), p[1] + len * std::sin(th), 0};
        poly.push_back(p);
    }
    return poly;
}

void run_field(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    ScalarField field = sample_field(cfg.grid(), cfg.covariance(), cfg.base_seed);
    save_field(field, (out.dir / "field").string());
    out.manifest->files.push_back("field.bin");
    out.manifest->files.push_back("field.json");
    export_field_csv(field, (out.dir / "field.csv").string());
    out.manifest->files.push_back("field.csv");
    result.manifest.replicate_seeds = {cfg.base_seed};
    result.checks.push_back({"embedding_clip_fraction", field.diagnostics.clipped_fraction <= 0.01,
                             field.diagnostics.clipped_fraction, 0.01,
                             "fraction of covariance eigenvalues clipped to zero"});
}

void run_distance(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    MetricField metric = cfg.build_metric(cfg.base_seed);
    SolverOptions opts = cfg.solver();
    Point x = to_point(cfg.x, cfg.dimension), y = to_point(cfg.y, cfg.dimension);
    DistanceResult res = distance(metric, x, y, opts);

    std::FILE* f = out.open("distance.csv");
    w(f, "h,stencil_k,value,graph_value,chord_value,lower,upper,eta,lambda_window,exit_certified\n");
    auto row = [&](const DistanceResult& r) {
        w(f, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.h, r.stencil_k, r.value,
          r.graph_value, r.chord_value, r.lower, r.upper, r.eta, r.lambda_window,
          r.exit_certified ? 1 : 0);
    };
    row(res);

    if (cfg.refine) {
        SolverOptions fine = opts;
        fine.h = opts.h / 2;
        DistanceResult res2 = distance(metric, x, y, fine);
        row(res2);
        RichardsonResult rr = richardson_refine(res.graph_value, res2.graph_value);
        std::FILE* g = out.open("richardson.csv");
        w(g, "value_h,value_h2,extrapolated\n%.17g,%.17g,%.17g\n", res.graph_value,
          res2.graph_value, rr.value);
        std::fclose(g);
    }
    std::fclose(f);

    result.manifest.replicate_seeds = {cfg.base_seed};
    double sep = norm(sub(res.y, res.x), cfg.dimension);
    result.checks.push_back({"bracket_ordered", res.lower <= res.value && res.value <= res.upper,
                             res.lower, res.upper, ""});
    result.checks.push_back({"sqrt_lambda_lower_bound",
                             res.value + 1e-12 >= std::sqrt(res.lambda_window) * sep, res.value,
                             std::sqrt(res.lambda_window) * sep, ""});
    if (opts.chord_edges)
        result.checks.push_back({"chord_upper_bound", res.value <= res.chord_value + 1e-12,
                                 res.value, res.chord_value, ""});
}

void write_mu_csvs(const MuTable& table, Writer& out) {
    std::FILE* f = out.open("mu.csv");
    w(f, "angle,mu_hat,ci_lo,ci_hi,t,replicates\n");
    for (size_t i = 0; i < table.size(); ++i)
        w(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", table.angles[i], table.mu_hat[i],
          table.ci_lo[i], table.ci_hi[i], table.t_used, table.replicates);
    std::fclose(f);

    std::FILE* g = out.open("mu_trace.csv");
    w(g, "t,angle,mean,sd,n\n");
    for (size_t ti = 0; ti < table.t_list.size(); ++ti)
        for (size_t di = 0; di < table.size(); ++di) {
            MeanCI ci = mean_ci(table.samples[ti][di], table.ci_level);
            w(g, "%.17g,%.17g,%.17g,%.17g,%d\n", table.t_list[ti], table.angles[di], ci.mean,
              ci.sd, ci.n);
        }
    std::fclose(g);

    LimitShape shape = limit_shape(table);
    std::FILE* s = out.open("limit_shape.csv");
    w(s, "x,y\n");
    for (auto& v : shape.vertices) w(s, "%.17g,%.17g\n", v[0], v[1]);
    if (!shape.vertices.empty()) w(s, "%.17g,%.17g\n", shape.vertices[0][0], shape.vertices[0][1]);
    std::fclose(s);
}

void mu_checks(const ExperimentConfig& cfg, const MuTable& table, RunResult& result) {
    PositivityCheck pos = positivity_check(table);
    result.checks.push_back({"positivity", pos.pass, pos.min_ci_lo, 0.0,
                             "every lower CI bound > 0 and mu_hat >= sqrt(min lambda)"});
    double max_ci_half = 0;
    for (size_t i = 0; i < table.size(); ++i)
        max_ci_half = std::max(max_ci_half, (table.ci_hi[i] - table.ci_lo[i]) / 2.0);
    CoordinateBoundCheck cb = coordinate_bound_check(table, 2.0 * max_ci_half);
    result.checks.push_back({"coordinate_bound", cb.pass, cb.worst_margin, 2.0 * max_ci_half,
                             "mu_v <= sum |v_i| mu_{e_i} + CI slack"});
    double mean_mu = 0;
    for (double m : table.mu_hat) mean_mu += m;
    mean_mu /= double(table.size());
    UniformConvergenceResult uc = uniform_convergence_check(table, cfg.epsilon * mean_mu);
    result.checks.push_back({"uniform_convergence", uc.found, uc.earliest_t,
                             cfg.epsilon * mean_mu,
                             "earliest t with sup-deviation below epsilon * mean(mu)"});
    ContinuityCheck cc = continuity_check(table, 0.5);
    result.checks.push_back(
        {"direction_continuity", cc.pass, cc.worst_ratio, 1.5, "adjacent-direction ratio bound"});
}

void run_mu(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    MetricEnsemble ensemble(cfg.ensemble_spec());
    MuTable table = estimate_mu_table(ensemble, cfg.mu_params());
    write_mu_csvs(table, out);
    result.manifest.replicate_seeds = table.seeds;
    mu_checks(cfg, table, result);
}

void run_shape(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    MetricEnsemble ensemble(cfg.ensemble_spec());
    MuTable table = estimate_mu_table(ensemble, cfg.mu_params());
    write_mu_csvs(table, out);
    result.manifest.replicate_seeds = table.seeds;
    mu_checks(cfg, table, result);

    double t = *std::max_element(cfg.t_list.begin(), cfg.t_list.end());
    ContainmentReport report = shape_containment_check(
        ensemble, t, cfg.epsilon, table, cfg.replicates, cfg.base_seed, cfg.solver(), cfg.threads);

    std::FILE* f = out.open("containment.csv");
    w(f, "replicate,seed,min_norm,max_norm,boundary_points,pass\n");
    for (size_t r = 0; r < report.replicates.size(); ++r) {
        const auto& rep = report.replicates[r];
        w(f, "%zu,%" PRIu64 ",%.17g,%.17g,%zu,%d\n", r, rep.seed, rep.min_norm, rep.max_norm,
          rep.boundary_points, rep.pass ? 1 : 0);
        result.manifest.replicate_seeds.push_back(rep.seed);
    }
    std::fclose(f);

    // ball polylines for each replicate (blank line between loops)
    for (size_t r = 0; r < report.replicates.size(); ++r) {
        const BallBoundary& boundary = report.replicates[r].boundary;
        char name[64];
        std::snprintf(name, sizeof name, "ball_%03zu.csv", r);
        std::FILE* b = out.open(name);
        w(b, "x,y\n");
        for (size_t li = 0; li < boundary.loops.size(); ++li) {
            if (li) w(b, "\n");
            for (auto& p : boundary.loops[li]) w(b, "%.17g,%.17g\n", p[0], p[1]);
        }
        std::fclose(b);
    }

    double rate = report.total > 0 ? double(report.passes) / double(report.total) : 0.0;
    result.checks.push_back({"containment_pass_rate", rate >= cfg.min_pass_fraction, rate,
                             cfg.min_pass_fraction,
                             "fraction of replicates with boundary inside [1-eps, 1+eps]"});
}

void run_lattice_verify(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    MetricField metric = cfg.build_metric(cfg.base_seed);
    result.manifest.replicate_seeds = {cfg.base_seed};
    SiteField lam = lattice_from_metric(metric, CubeField::LambdaMin, cfg.cube_samples);
    SiteField Lam = lattice_from_metric(metric, CubeField::LambdaMax, cfg.cube_samples);

    std::FILE* f = out.open("cube_extremes.csv");
    w(f, cfg.dimension == 2 ? "zx,zy,lambda,Lambda\n" : "zx,zy,zz,lambda,Lambda\n");
    for (auto& z : lam.all_sites()) {
        if (cfg.dimension == 2)
            w(f, "%lld,%lld,%.17g,%.17g\n", (long long)z[0], (long long)z[1], lam.at(z), Lam.at(z));
        else
            w(f, "%lld,%lld,%lld,%.17g,%.17g\n", (long long)z[0], (long long)z[1], (long long)z[2],
              lam.at(z), Lam.at(z));
    }
    std::fclose(f);

    // proof-construction batteries on random sets and curves
    Xoshiro256 rng(derive_seed(cfg.base_seed, 31, 0));
    int64_t rsep_bad = 0, residue_bad = 0, curve_bad = 0;
    const int R = cfg.separation_R;
    double K = std::pow(2.0 * R + 1.0, cfg.dimension);
    for (int i = 0; i < cfg.n_sets; ++i) {
        StarSet set = random_star_set(rng, 1 + int(rng.below(40)), cfg.dimension);
        auto chosen = rsep_subset(set, R, set.sites[size_t(rng.below(set.sites.size()))]);
        for (size_t a = 0; a < chosen.size(); ++a)
            for (size_t b = a + 1; b < chosen.size(); ++b)
                if (euclid(chosen[a], chosen[b], cfg.dimension) <= double(R)) ++rsep_bad;
        if (double(set.size()) > double(chosen.size()) * K) ++rsep_bad;

        if (R >= 1) {
            auto parts = residue_partition(set, R);
            size_t total = 0;
            for (auto& part : parts) {
                total += part.size();
                for (size_t a = 0; a < part.size(); ++a)
                    for (size_t b = a + 1; b < part.size(); ++b)
                        if (euclid(part[a], part[b], cfg.dimension) < double(R)) ++residue_bad;
            }
            if (total != set.size()) ++residue_bad;
        }
    }
    if (cfg.dimension == 2) {
        for (int i = 0; i < cfg.n_sets; ++i) {
            StarSet sites = curve_to_sites(random_polyline(rng, 8), 2);
            if (!sites.is_connected()) ++curve_bad;
        }
    }

    // empirical growth constants: budget searches on the lambda field,
    // size-capped maxima on the Lambda field
    LatticePoint anchor = lp(0, 0, 0);
    const SiteField& X = cfg.which_field == "lambda" ? lam : Lam;
    std::FILE* p = out.open("passstep.csv");
    w(p, "n,budget,max_size,mode\n");
    std::vector<double> ns, sizes;
    for (int n = 1; n <= cfg.n_max; ++n) {
        double budget = cfg.budget_A * n;
        SizeSearchResult r;
        const char* mode = "exact";
        try {
            r = max_size_under_budget(budget, anchor, lam, true, 3000000);
        } catch (const ResourceLimitError&) {
            r = max_size_under_budget(budget, anchor, lam, false);
            mode = "greedy";
        }
        w(p, "%d,%.17g,%lld,%s\n", n, budget, (long long)r.size, mode);
        ns.push_back(double(n));
        sizes.push_back(double(r.size));
    }
    std::fclose(p);

    std::FILE* u = out.open("upbound.csv");
    w(u, "n,size_cap,max_passage,mode\n");
    std::vector<double> xs, vals;
    for (int n = 1; n <= cfg.n_max; ++n) {
        int cap = int(std::ceil(cfg.size_B * n));
        PassageSearchResult r;
        const char* mode = "exact";
        if (cap <= cfg.exact_limit) {
            try {
                r = max_passage_under_size(cap, anchor, X, true, cfg.exact_limit, 3000000);
            } catch (const ResourceLimitError&) {
                r = max_passage_under_size(cap, anchor, X, false);
                mode = "greedy";
            }
        } else {
            r = max_passage_under_size(cap, anchor, X, false);
            mode = "greedy";
        }
        w(u, "%d,%d,%.17g,%s\n", n, cap, r.value, mode);
        xs.push_back(double(n));
        vals.push_back(r.value);
    }
    std::fclose(u);

    LinearFit fitB = linear_fit(ns, sizes);
    LinearFit fitC = linear_fit(xs, vals);
    std::FILE* s = out.open("slopes.csv");
    w(s, "name,slope,intercept,r2\n");
    w(s, "empirical_B,%.17g,%.17g,%.17g\n", fitB.slope, fitB.intercept, fitB.r2);
    w(s, "empirical_C,%.17g,%.17g,%.17g\n", fitC.slope, fitC.intercept, fitC.r2);
    std::fclose(s);

    EnumerationReport en = enumerate_connected_sets(6, cfg.dimension == 2 ? 2 : 3);
    ZeroAtomEstimate za = zero_atom_estimate(lam, en.sigma_hat);

    result.checks.push_back({"rsep_violations", rsep_bad == 0, double(rsep_bad), 0, ""});
    result.checks.push_back({"residue_violations", residue_bad == 0, double(residue_bad), 0, ""});
    if (cfg.dimension == 2)
        result.checks.push_back(
            {"curve_connectivity_violations", curve_bad == 0, double(curve_bad), 0, ""});
    result.checks.push_back({"zero_atom_below_threshold", za.below, za.p_zero, za.threshold,
                             "P(X = 0) against sigma^-(2R+1)^d"});
}

void run_geodesic(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    MetricField metric = cfg.build_metric(cfg.base_seed);
    result.manifest.replicate_seeds = {cfg.base_seed};
    const int d = cfg.dimension;
    GeodesicCurve curve =
        integrate_geodesic(metric, to_point(cfg.geo_x0, d), to_point(cfg.geo_v0, d),
                           cfg.geo_length, cfg.geo_step, cfg.fd_step);

    std::FILE* f = out.open("curve.csv");
    w(f, d == 2 ? "t,x,y,speed\n" : "t,x,y,z,speed\n");
    for (auto& s : curve.samples) {
        if (d == 2)
            w(f, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.x[0], s.x[1], s.speed);
        else
            w(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.x[0], s.x[1], s.x[2], s.speed);
    }
    std::fclose(f);

    result.checks.push_back(
        {"unit_speed_drift", curve.max_speed_drift < 1e-6, curve.max_speed_drift, 1e-6, ""});

    if (int(cfg.shoot_target.size()) >= d) {
        ShootResult sr = shoot(metric, to_point(cfg.geo_x0, d), to_point(cfg.shoot_target, d),
                               cfg.shoot_tolerance, cfg.geo_step, cfg.fd_step);
        std::FILE* g = out.open("shoot.csv");
        w(g, "converged,riemannian_length,miss,iterations\n%d,%.17g,%.17g,%d\n",
          sr.converged ? 1 : 0, sr.riemannian_length, sr.miss, sr.iterations);
        std::fclose(g);
        result.checks.push_back({"shoot_converged", sr.converged, sr.miss, cfg.shoot_tolerance,
                                 "closest-approach distance vs tolerance"});
    }

    if (cfg.probe_directions > 0) {
        const MetricField* m = &metric;
        auto rows = completeness_probe({m}, cfg.probe_directions, cfg.probe_T, cfg.geo_step,
                                       cfg.fd_step);
        std::FILE* g = out.open("probe.csv");
        w(g, "metric,angle,max_ratio,bound,within_bound\n");
        bool all_ok = true;
        for (auto& row : rows) {
            w(g, "%d,%.17g,%.17g,%.17g,%d\n", row.metric_index, row.angle, row.max_ratio,
              row.bound, row.within_bound ? 1 : 0);
            all_ok = all_ok && row.within_bound;
        }
        std::fclose(g);
        result.checks.push_back({"escape_ratio_bound", all_ok, 0, 0,
                                 "sup |gamma(t)|/t <= 1/sqrt(lambda_min) on every curve"});
    }
}

void run_enumerate(const ExperimentConfig& cfg, Writer& out, RunResult& result) {
    result.manifest.replicate_seeds = {cfg.base_seed};
    EnumerationReport report = enumerate_connected_sets(cfg.n_max, cfg.dimension);
    std::FILE* f = out.open("enumeration.csv");
    w(f, "n,S_n,sigma_hat\n");
    for (int n = 1; n <= cfg.n_max; ++n)
        w(f, "%d,%lld,%.17g\n", n, (long long)report.S(n), report.sigma_hat);
    std::fclose(f);

    int naive_n = std::min(cfg.n_max, 7);
    auto naive = enumerate_connected_sets_naive(naive_n, cfg.dimension);
    bool match = true;
    for (int n = 1; n <= naive_n; ++n)
        if (naive[size_t(n - 1)] != report.S(n)) match = false;
    result.checks.push_back(
        {"counts_match_naive_oracle", match, double(naive_n), 0, "prefix cross-check"});

    bool sigma_ok = true;
    for (int n = 1; n <= cfg.n_max; ++n)
        if (double(report.S(n)) > std::pow(report.sigma_hat, double(n)) * (1 + 1e-12))
            sigma_ok = false;
    result.checks.push_back({"sigma_growth_bound", sigma_ok, report.sigma_hat, 0,
                             "S_n <= sigma_hat^n with sigma_hat = max_k S_k^{1/k}"});

    auto violations = report.fekete_violations();
    result.checks.push_back(
        {"fekete_subadditivity_info", true, double(violations.size()), 0,
         "informational: origin-anchored counts are log-superadditive, so violations are "
         "expected (S_2 = 8 > S_1^2); growth control comes from the sigma bound"});
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    auto errors = cfg.validate();
    if (!errors.empty()) {
        std::string all = "invalid config:";
        for (auto& e : errors) all += "\n  - " + e;
        throw std::invalid_argument(all);
    }

    RunResult result;
    result.out_dir = cfg.out_dir;
    result.manifest.kind = cfg.kind;
    result.manifest.base_seed = cfg.base_seed;
    result.manifest.config_hash = hex64(fnv1a_hash(cfg.canonical_string()));

    fs::create_directories(cfg.out_dir);
    Writer out{fs::path(cfg.out_dir), &result.manifest};

    auto t0 = Clock::now();
    if (cfg.kind == "field") run_field(cfg, out, result);
    else if (cfg.kind == "distance") run_distance(cfg, out, result);
    else if (cfg.kind == "mu") run_mu(cfg, out, result);
    else if (cfg.kind == "shape") run_shape(cfg, out, result);
    else if (cfg.kind == "lattice-verify") run_lattice_verify(cfg, out, result);
    else if (cfg.kind == "geodesic") run_geodesic(cfg, out, result);
    else if (cfg.kind == "enumerate") run_enumerate(cfg, out, result);
    else throw std::invalid_argument("unknown experiment kind: " + cfg.kind);
    result.manifest.timings_seconds["experiment"] =
        std::chrono::duration<double>(Clock::now() - t0).count();

    result.all_pass = true;
    for (auto& c : result.checks) result.all_pass = result.all_pass && c.pass;

    json summary;
    summary["kind"] = cfg.kind;
    summary["all_pass"] = result.all_pass;
    summary["checks"] = json::array();
    for (auto& c : result.checks)
        summary["checks"].push_back(
            {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound},
             {"note", c.note}});
    {
        std::ofstream s(fs::path(cfg.out_dir) / "summary.json");
        s << summary.dump(2) << "\n";
        result.manifest.files.push_back("summary.json");
    }

    std::sort(result.manifest.files.begin(), result.manifest.files.end());
    json manifest;
    manifest["config_hash"] = result.manifest.config_hash;
    manifest["tool_version"] = result.manifest.tool_version;
    manifest["kind"] = result.manifest.kind;
    manifest["base_seed"] = result.manifest.base_seed;
    manifest["replicate_seeds"] = result.manifest.replicate_seeds;
    manifest["files"] = result.manifest.files;
    manifest["timings_seconds"] = result.manifest.timings_seconds;
    {
        std::ofstream m(fs::path(cfg.out_dir) / "manifest.json");
        m << manifest.dump(2) << "\n";
    }
    return result;
}

}  // namespace riemfpp
