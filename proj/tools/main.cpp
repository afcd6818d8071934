// Command-line driver: runs experiment suites from JSON configs, validates
// configs, and ships a small built-in demo suite. Reports land as one CSV and
// one JSON file per experiment.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orlicz/harness.hpp"

namespace {

constexpr std::uint64_t kDefaultMasterSeed = 0x5EEDBA5EULL;
constexpr const char* kSeedEnvVar = "ORLICZ_EMBED_SEED";

const char* kDemoConfig = R"json({
  "experiments": [
    {"kind": "theorem1", "name": "demo_theorem1", "n": [2, 3, 4],
     "weights": "sqrt_prefix", "trials": 25, "mode": "exact"},
    {"kind": "theorem2", "name": "demo_theorem2", "n": [2, 4, 8],
     "orlicz": {"power_normalized": 1.3333333333333333},
     "trials": 10, "mode": "mc", "samples": 20000},
    {"kind": "lemma4", "name": "demo_lemma4", "n": [2, 3, 4],
     "trials": 50, "mode": "exact"},
    {"kind": "lemma5", "name": "demo_lemma5", "n": [2, 3],
     "trials": 10, "mode": "exact"},
    {"kind": "lemma6", "name": "demo_lemma6", "n": [2, 3], "s": 6,
     "weights": "sqrt_prefix", "trials": 20},
    {"kind": "lemma7", "name": "demo_lemma7",
     "profile": {"profile": "power", "alpha": 0.5}}
  ]
})json";

std::uint64_t resolve_master_seed(bool flag_given, std::uint64_t flag_value) {
    if (flag_given) return flag_value; // CLI flag wins over environment
    if (const char* env = std::getenv(kSeedEnvVar)) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw orlicz::ConfigError(std::string(kSeedEnvVar) +
                                      " must be an unsigned integer");
        }
    }
    return kDefaultMasterSeed;
}

void apply_overrides(orlicz::harness::Config& cfg, const std::string& mode,
                     std::uint64_t samples, double tol) {
    for (auto& exp : cfg.experiments) {
        if (mode == "exact") exp.exact = true;
        if (mode == "mc") exp.exact = false;
        if (samples > 0) exp.samples = samples;
        if (tol > 0.0) exp.tol = tol;
    }
}

int run_and_summarize(const orlicz::harness::Config& cfg,
                      const std::string& out_dir, std::uint64_t master_seed) {
    const auto result = orlicz::harness::run_suite(cfg, out_dir, master_seed);
    for (const auto& rep : result.reports) {
        std::cout << (rep.pass ? "[PASS] " : "[FAIL] ") << rep.name << " ("
                  << rep.kind << ", " << rep.rows.size() << " rows";
        if (!rep.rows.empty())
            std::cout << ", ratio range [" << rep.min_ratio << ", "
                      << rep.max_ratio << "]";
        std::cout << ")";
        if (!rep.error.empty()) std::cout << " error: " << rep.error;
        std::cout << '\n';
    }
    std::cout << (result.exit_code == 0 ? "all experiments passed"
                                        : "some experiments FAILED")
              << "; reports in " << out_dir << '\n';
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orlicz sequence norms, permutation averages and their "
                 "two-sided equivalence checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "reports";
    std::uint64_t seed_flag = 0;
    std::string mode;
    std::uint64_t samples = 0;
    double tol = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "Directory for report files")
            ->capture_default_str();
        sub->add_option("--seed", seed_flag,
                        "Master seed (overrides " + std::string(kSeedEnvVar) + ")");
        sub->add_option("--mode", mode, "Force exact or mc mode for all experiments")
            ->check(CLI::IsMember({"exact", "mc"}));
        sub->add_option("--samples", samples, "Monte Carlo samples per estimate");
        sub->add_option("--tol", tol, "Bracket tolerance for all experiments");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "Run experiments from a config file");
    cmd_run->add_option("config", config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    add_common(cmd_run);

    CLI::App* cmd_check = app.add_subcommand("check", "Validate a config file");
    cmd_check->add_option("config", config_path, "JSON experiment config")->required();

    CLI::App* cmd_demo = app.add_subcommand("demo", "Run the built-in demo suite");
    add_common(cmd_demo);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_check->parsed()) {
            const auto cfg = orlicz::harness::load_config_file(config_path);
            std::cout << "config OK (" << cfg.experiments.size() << " experiments)\n";
            return 0;
        }
        orlicz::harness::Config cfg;
        std::uint64_t master_seed = kDefaultMasterSeed;
        if (cmd_run->parsed()) {
            cfg = orlicz::harness::load_config_file(config_path);
            master_seed = resolve_master_seed(cmd_run->count("--seed") > 0, seed_flag);
        } else {
            cfg = orlicz::harness::parse_config(nlohmann::json::parse(kDemoConfig));
            master_seed = resolve_master_seed(cmd_demo->count("--seed") > 0, seed_flag);
        }
        apply_overrides(cfg, mode, samples, tol);
        return run_and_summarize(cfg, out_dir, master_seed);
    } catch (const orlicz::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
