#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coneflow/registry.hpp"
#include "coneflow/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cone-flow: convexity checks for ODE flows on ordered spaces"};
    app.require_subcommand(1);

    // run <scenario.json> [--dump <dir>] [--seed N] [--out <path>]
    auto* run = app.add_subcommand("run", "run a JSON scenario");
    std::string scenario_path, dump_dir, out_path;
    long long seed = -1;
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--dump", dump_dir, "directory for CSV dumps");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_path, "write the JSON report here instead of stdout");

    // riccati validate|eval|flow <params.json> [--x ...] [--t ...]
    auto* ric = app.add_subcommand("riccati", "affine Riccati field operations");
    std::string action, params_path;
    std::vector<double> xarg;
    double targ = 0.0;
    ric->add_option("action", action, "validate | eval | flow")->required();
    ric->add_option("params", params_path, "affine parameter JSON file")->required();
    ric->add_option("--x", xarg, "state vector");
    ric->add_option("--t", targ, "time");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        std::optional<std::uint64_t> seed_override;
        if (seed >= 0) seed_override = std::uint64_t(seed);
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot open " << out_path << "\n";
                return 3;
            }
            return coneflow::run_scenario_file(scenario_path, out, dump_dir, seed_override);
        }
        return coneflow::run_scenario_file(scenario_path, std::cout, dump_dir, seed_override);
    }

    // riccati subcommand: wrap as a scenario
    std::ifstream in(params_path);
    if (!in) {
        std::cerr << "cannot open " << params_path << "\n";
        return 3;
    }
    nlohmann::json params;
    try {
        params = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    }
    nlohmann::json scenario;
    scenario["command"] = {{"name", "riccati"}, {"action", action}, {"params", params}};
    if (!xarg.empty()) scenario["command"]["x"] = xarg;
    if (targ > 0.0) scenario["command"]["t"] = targ;
    return coneflow::run_scenario(scenario, std::cout, dump_dir);
}
