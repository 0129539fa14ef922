#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "jmlab/scenario.hpp"

namespace {

int read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "validation: cannot open config file '" << path << "'\n";
        return jmlab::kExitValidation;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return jmlab::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric mechanics lab: cone geometry, refraction sweeps, "
                 "action minimization and their cross-checks"};
    app.require_subcommand(1);

    std::string config_path;
    jmlab::RunOverrides overrides;
    std::uint64_t seed_flag = 0;
    std::string outdir_flag;
    double tol_flag = 0.0;

    CLI::App* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config_path, "JSON config file")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_flag, "override the config seed");
    CLI::Option* outdir_opt =
        run->add_option("--output-dir", outdir_flag, "override the output directory");
    CLI::Option* tol_opt =
        run->add_option("--tolerance", tol_flag, "override the scenario tolerance");
    run->add_option("--jobs", overrides.jobs, "worker threads for sweep scenarios")
        ->check(CLI::PositiveNumber);

    CLI::App* validate = app.add_subcommand("validate", "check a config without running");
    validate->add_option("config", config_path, "JSON config file")->required();

    app.add_subcommand("list", "describe scenario kinds and their keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // CLI11 reserves its own exit codes; fold usage errors into the
        // validation code, keep --help at 0.
        return code == 0 ? jmlab::kExitOk : jmlab::kExitValidation;
    }

    if (app.got_subcommand("list")) {
        std::cout << jmlab::list_scenarios();
        return jmlab::kExitOk;
    }

    std::string text;
    int rc = read_file(config_path, text);
    if (rc != jmlab::kExitOk) return rc;

    if (app.got_subcommand("validate")) {
        auto violations = jmlab::validate_config_text(text);
        for (const auto& v : violations) std::cout << "validation: " << v << "\n";
        if (violations.empty()) {
            std::cout << "config is valid\n";
            return jmlab::kExitOk;
        }
        return jmlab::kExitValidation;
    }

    if (seed_opt->count()) overrides.seed = seed_flag;
    if (outdir_opt->count()) overrides.output_dir = outdir_flag;
    if (tol_opt->count()) overrides.tolerance = tol_flag;
    return jmlab::run_scenario_text(text, overrides, std::cout);
}
