#pragma once

#include <string>
#include <vector>

#include "riemfpp/shape.hpp"
#include "riemfpp/tomlmini.hpp"

namespace riemfpp {

/// One experiment = one config file = one output directory.
struct ExperimentConfig {
    std::string kind = "distance";
    uint64_t base_seed = 1;

    // [grid] — field sampling grid / metric window
    int dimension = 2;
    std::vector<double> origin;   // defaults to centered window
    std::vector<double> extent = {8.0, 8.0};
    double spacing = 0.25;

    // [covariance]
    std::string cov_kind = "spherical";
    double variance = 1.0;
    double range = 1.0;
    std::vector<double> knots_r, knots_c;

    // [transform]
    std::string transform_kind = "paper-diagonal";
    std::vector<double> transform_params;
    int field_count = 1;
    std::string interpolation = "linear";

    // [solver]
    double h = 0.05;
    int stencil_k = 3;
    int quad_intervals = 8;
    double padding_fraction = 0.5;
    bool chord_edges = true;

    // [stats]
    std::vector<double> t_list = {10.0, 20.0, 40.0};
    int replicates = 20;
    int directions = 16;
    double ci_level = 0.95;
    double epsilon = 0.1;
    int threads = 0;
    std::string mu_mode = "replicate-ensemble";
    double min_pass_fraction = 0.9;

    // [output]
    std::string out_dir = "out";

    // [distance]
    std::vector<double> x = {0.0, 0.0};
    std::vector<double> y = {3.0, 4.0};
    bool refine = false;

    // [geodesic]
    std::vector<double> geo_x0 = {0.0, 1.0};
    std::vector<double> geo_v0 = {1.0, 0.0};
    double geo_length = 2.0;
    double geo_step = 1e-3;
    double fd_step = 1e-2;
    std::vector<double> shoot_target;  // empty -> no shooting
    double shoot_tolerance = 1e-3;
    int probe_directions = 0;  // 0 -> no completeness probe
    double probe_T = 2.0;

    // [lattice]
    int n_max = 6;
    int exact_limit = 10;
    double budget_A = 1.5;
    double size_B = 3.0;
    std::string which_field = "Lambda";
    int n_sets = 1000;
    int separation_R = 2;
    int cube_samples = 16;

    static ExperimentConfig from_toml(const toml::Table& table);
    static ExperimentConfig from_file(const std::string& path);

    /// Full static validation including cross-field guards; returns every
    /// violation (empty means valid). Never throws.
    std::vector<std::string> validate() const;

    GridSpec grid() const;
    CovarianceModel covariance() const;
    SolverOptions solver() const;
    EnsembleSpec ensemble_spec() const;
    MuParams mu_params() const;
    MetricField build_metric(uint64_t seed) const;
    InterpOrder interp_order() const;

    /// Canonical key=value dump used for hashing and reproducibility.
    std::string canonical_string() const;
};

/// Parse + validate, catching parse failures as error strings.
std::vector<std::string> validate_config_file(const std::string& path);

uint64_t fnv1a_hash(const std::string& text);

}  // namespace riemfpp
