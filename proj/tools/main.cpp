#include <CLI11.hpp>

#include <cstdio>

#include "riemfpp/experiments.hpp"

namespace {

struct SubArgs {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    bool validate_only = false;
};

int run_kind(const std::string& kind, const SubArgs& args) {
    auto errors = riemfpp::validate_config_file(args.config_path);
    if (args.validate_only) {
        if (errors.empty()) {
            std::printf("ok\n");
            return 0;
        }
        for (auto& e : errors) std::printf("error: %s\n", e.c_str());
        return 1;
    }
    riemfpp::ExperimentConfig cfg;
    try {
        cfg = riemfpp::ExperimentConfig::from_file(args.config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    cfg.kind = kind;
    if (args.seed_set) cfg.base_seed = args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;

    try {
        riemfpp::RunResult result = riemfpp::run_experiment(cfg);
        for (auto& c : result.checks)
            std::printf("[%s] %s: value=%.6g bound=%.6g%s%s\n", c.pass ? "PASS" : "FAIL",
                        c.name.c_str(), c.value, c.bound, c.note.empty() ? "" : " — ",
                        c.note.c_str());
        std::printf("%s: outputs in %s (%zu files)\n", result.all_pass ? "ok" : "CHECKS FAILED",
                    result.out_dir.c_str(), result.manifest.files.size());
        return result.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riemfpp — Riemannian first-passage percolation laboratory"};
    app.require_subcommand(1);

    const char* kinds[] = {"sample-field", "distance", "mu", "shape",
                           "lattice-verify", "geodesic", "enumerate"};
    const char* mapped[] = {"field", "distance", "mu", "shape",
                            "lattice-verify", "geodesic", "enumerate"};
    const char* help[] = {
        "sample a Gaussian field and write it to disk",
        "distance between two points with error bracket",
        "directional time-constant estimation",
        "limit-shape estimation and ball containment",
        "lattice passage-time laws and proof-construction batteries",
        "geodesic integration, shooting and escape probes",
        "exact counts of *-connected sets at the origin"};

    std::array<SubArgs, 7> args;
    for (int i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(kinds[i], help[i]);
        sub->add_option("--config", args[size_t(i)].config_path, "TOML experiment config")
            ->required();
        sub->add_option("--seed", args[size_t(i)].seed, "override the base seed")
            ->each([&args, i](const std::string&) { args[size_t(i)].seed_set = true; });
        sub->add_option("--out", args[size_t(i)].out_dir, "override the output directory");
        sub->add_flag("--validate-only", args[size_t(i)].validate_only,
                      "validate the config and exit");
    }

    CLI11_PARSE(app, argc, argv);
    for (int i = 0; i < 7; ++i)
        if (app.get_subcommand(kinds[i])->parsed()) return run_kind(mapped[i], args[size_t(i)]);
    return 1;
}
