// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcwc/incentive.hpp"
#include "dcwc/star.hpp"
#include "dcwc/xd.hpp"

namespace dcwc {

// ---------------------------------------------------------------------------
// Scenario files: versioned JSON, one channel experiment per file. The seed
// is mandatory; every run is a pure function of the file plus overrides.
// ---------------------------------------------------------------------------
struct StarSpec {
    Amount remainder = 4;
    std::vector<Amount> claims;     // per forwarding hop
    uint32_t hop_timelock = 6;      // b per hop
    std::vector<bool> online;       // sender first, then hop watchtowers
    uint64_t settle_height = 50;
    uint32_t timelock_t = 40;
};

struct XdVertexSpec {
    std::string name;
    Amount initial = 0;
    Amount commit = -1;  // < 0: no commitment
    std::string pays;    // empty: no outgoing edge
};

struct XdSpec {
    std::vector<XdVertexSpec> vertices;
};

struct Scenario {
    int schema = 1;
    std::string mode = "dcwc";  // dcwc | dcwc-star | xd
    SimConfig sim;
    uint64_t trials = 1;
    uint64_t mc_trials = 20000;
    std::vector<double> alpha_grid;
    std::vector<StrategyProfile> strategies;
    // Deviator selection: the holder of the first message at this depth.
    uint32_t deviator_depth = 1;
    StarSpec star;
    XdSpec xd;
};

Result<Scenario> parse_scenario(const std::string& json_text);
Result<Scenario> load_scenario(const std::string& path);

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------
std::string trace_to_jsonl(const Trace& trace);

struct RunArtifacts {
    std::string trace_jsonl;
    std::string report_json;
};

// Deterministic playback of the scenario (any mode). Byte-identical output
// for identical (scenario, seed).
Result<RunArtifacts> run_scenario(const Scenario& scenario);

// Closed form vs Monte Carlo across the alpha grid, as plot-ready CSV.
Result<std::string> analyze_scenario(const Scenario& scenario);

struct DeviateArtifacts {
    std::string report_json;
    std::string table;  // human-readable summary
    bool falsified = false;
};

Result<DeviateArtifacts> deviate_scenario(const Scenario& scenario);

Result<RunArtifacts> settle_xd_scenario(const Scenario& scenario);
Result<RunArtifacts> star_demo_scenario(const Scenario& scenario);

// Default deviation set: every implemented non-honest strategy.
std::vector<StrategyProfile> default_strategies();

// The watchtower holding the nth message of the given depth in the built
// tree; the canonical way scenarios pin the deviator.
Result<size_t> tower_at_depth(const BuiltScenario& built, uint32_t depth,
                              size_t nth);

}  // namespace dcwc
