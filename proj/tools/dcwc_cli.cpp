// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dcwc/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitScenarioInvalid = 2;
constexpr int kExitDominanceFalsified = 3;

int write_file(const std::string& dir, const std::string& name,
               const std::string& content) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return kExitUsage;
    }
    out << content;
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

std::optional<dcwc::Scenario> load(const std::string& path,
                                   std::optional<uint64_t> seed_override,
                                   std::optional<uint64_t> trials_override) {
    auto scenario = dcwc::load_scenario(path);
    if (!scenario.ok()) {
        std::cerr << "scenario invalid: " << scenario.error().message << "\n";
        return std::nullopt;
    }
    dcwc::Scenario sc = scenario.value();
    if (seed_override.has_value()) sc.sim.seed = *seed_override;
    if (trials_override.has_value()) sc.mc_trials = *trials_override;
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Watchtower incentive protocol laboratory"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<uint64_t> seed_override;
    std::optional<uint64_t> trials_override;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario JSON file")
            ->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "override the scenario seed");
        cmd->add_option("--trials", trials_override,
                        "override the Monte Carlo trial count");
    };

    CLI::App* run = app.add_subcommand(
        "run", "deterministic playback: trace and final report");
    add_common(run);
    CLI::App* analyze = app.add_subcommand(
        "analyze", "closed form vs Monte Carlo across an alpha grid (CSV)");
    add_common(analyze);
    CLI::App* deviate = app.add_subcommand(
        "deviate", "honest-vs-deviation payoff table; exit 3 when falsified");
    add_common(deviate);
    CLI::App* settle_xd =
        app.add_subcommand("settle-xd", "settle an xd-channel scenario");
    add_common(settle_xd);
    CLI::App* star_demo = app.add_subcommand(
        "star-demo", "invalidation forwarding chain playback");
    add_common(star_demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    auto scenario = load(scenario_path, seed_override, trials_override);
    if (!scenario.has_value()) return kExitScenarioInvalid;

    if (run->parsed()) {
        auto artifacts = dcwc::run_scenario(*scenario);
        if (!artifacts.ok()) {
            std::cerr << "run failed: " << artifacts.error().message << "\n";
            return kExitScenarioInvalid;
        }
        int rc = write_file(out_dir, "trace.jsonl",
                            artifacts.value().trace_jsonl);
        if (rc != kExitOk) return rc;
        rc = write_file(out_dir, "report.json", artifacts.value().report_json);
        if (rc != kExitOk) return rc;
        std::cout << artifacts.value().report_json;
        return kExitOk;
    }

    if (analyze->parsed()) {
        auto csv = dcwc::analyze_scenario(*scenario);
        if (!csv.ok()) {
            std::cerr << "analyze failed: " << csv.error().message << "\n";
            return kExitScenarioInvalid;
        }
        int rc = write_file(out_dir, "analysis.csv", csv.value());
        if (rc != kExitOk) return rc;
        std::cout << csv.value();
        return kExitOk;
    }

    if (deviate->parsed()) {
        auto artifacts = dcwc::deviate_scenario(*scenario);
        if (!artifacts.ok()) {
            std::cerr << "deviate failed: " << artifacts.error().message
                      << "\n";
            return kExitScenarioInvalid;
        }
        int rc = write_file(out_dir, "dominance.json",
                            artifacts.value().report_json);
        if (rc != kExitOk) return rc;
        std::cout << artifacts.value().table;
        if (artifacts.value().falsified) {
            std::cerr << "dominance falsified: a deviation beats honest\n";
            return kExitDominanceFalsified;
        }
        return kExitOk;
    }

    const bool is_xd = settle_xd->parsed();
    auto artifacts = is_xd ? dcwc::settle_xd_scenario(*scenario)
                           : dcwc::star_demo_scenario(*scenario);
    if (!artifacts.ok()) {
        std::cerr << (is_xd ? "settle-xd" : "star-demo")
                  << " failed: " << artifacts.error().message << "\n";
        return kExitScenarioInvalid;
    }
    int rc =
        write_file(out_dir, "trace.jsonl", artifacts.value().trace_jsonl);
    if (rc != kExitOk) return rc;
    rc = write_file(out_dir, "report.json", artifacts.value().report_json);
    if (rc != kExitOk) return rc;
    std::cout << artifacts.value().report_json;
    return kExitOk;
}
