// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/scenario.hpp"

#include <string>

#include "doctest.h"

using namespace dcwc;

namespace {

std::string fixture(const char* name) {
    return std::string(DCWC_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("scenario parsing validates structure") {
    CHECK_FALSE(parse_scenario("{not json").ok());
    // Seed is mandatory.
    auto no_seed = parse_scenario(R"({"schema":1,"mode":"dcwc"})");
    REQUIRE_FALSE(no_seed.ok());
    CHECK(no_seed.code() == Err::ScenarioInvalid);

    auto bad_mode = parse_scenario(R"({"schema":1,"mode":"x","seed":1})");
    CHECK_FALSE(bad_mode.ok());

    auto bad_offline = parse_scenario(
        R"({"schema":1,"mode":"dcwc","seed":1,"watchtowers":2,"offline":[5]})");
    CHECK_FALSE(bad_offline.ok());

    auto bad_fraud = parse_scenario(
        R"({"schema":1,"mode":"dcwc","seed":1,"updates":1,"fraud":{"publish_seq":3}})");
    CHECK_FALSE(bad_fraud.ok());

    auto ok = parse_scenario(R"({"schema":1,"mode":"dcwc","seed":9})");
    REQUIRE(ok.ok());
    CHECK(ok.value().sim.seed == 9);
}

TEST_CASE("fraud-basic: proof in round 1, honest party takes the stake") {
    auto scenario = load_scenario(fixture("fraud-basic.json"));
    REQUIRE(scenario.ok());
    auto artifacts = run_scenario(scenario.value());
    REQUIRE(artifacts.ok());

    const std::string& report = artifacts.value().report_json;
    CHECK(report.find("\"fraud_proven\": true") != std::string::npos);
    CHECK(report.find("\"proof_round\": 1") != std::string::npos);
    CHECK(report.find("\"outcome\": \"fraud-proven\"") != std::string::npos);
    CHECK(report.find("\"conservation_ok\": true") != std::string::npos);
    // B is awarded the whole 20-coin stake in one record.
    CHECK(report.find("\"actor\": \"B\"") != std::string::npos);
    CHECK(report.find("\"amount\": 20") != std::string::npos);
}

TEST_CASE("identical scenario and seed produce byte-identical artifacts") {
    auto scenario = load_scenario(fixture("fraud-basic.json"));
    REQUIRE(scenario.ok());
    auto first = run_scenario(scenario.value());
    auto second = run_scenario(scenario.value());
    REQUIRE(first.ok());
    REQUIRE(second.ok());
    CHECK(first.value().trace_jsonl == second.value().trace_jsonl);
    CHECK(first.value().report_json == second.value().report_json);
    CHECK_FALSE(first.value().trace_jsonl.empty());

    // A different seed changes the playback.
    Scenario reseeded = scenario.value();
    reseeded.sim.seed = 43;
    auto third = run_scenario(reseeded);
    REQUIRE(third.ok());
    CHECK(third.value().trace_jsonl != first.value().trace_jsonl);
}

TEST_CASE("example1-xd settles to the expected balances") {
    auto scenario = load_scenario(fixture("example1-xd.json"));
    REQUIRE(scenario.ok());
    auto artifacts = settle_xd_scenario(scenario.value());
    REQUIRE(artifacts.ok());
    const std::string& report = artifacts.value().report_json;
    CHECK(report.find("\"c0\": 0") != std::string::npos);
    CHECK(report.find("\"c1\": 0") != std::string::npos);
    CHECK(report.find("\"s\": 2") != std::string::npos);
    CHECK(report.find("\"t\": 8") != std::string::npos);
    CHECK(report.find("\"conservation_ok\": true") != std::string::npos);

    // run() dispatches on the mode.
    auto via_run = run_scenario(scenario.value());
    REQUIRE(via_run.ok());
    CHECK(via_run.value().report_json == artifacts.value().report_json);
}

TEST_CASE("star-chain fixture pays the first online watchtower") {
    auto scenario = load_scenario(fixture("star-chain.json"));
    REQUIRE(scenario.ok());
    auto artifacts = star_demo_scenario(scenario.value());
    REQUIRE(artifacts.ok());
    const std::string& report = artifacts.value().report_json;
    CHECK(report.find("\"invalidated\": true") != std::string::npos);
    CHECK(report.find("\"winner_hop\": 1") != std::string::npos);
    CHECK(report.find("\"total_paid\": 20") != std::string::npos);
    CHECK(report.find("\"hop1_claim_script\"") != std::string::npos);
}

TEST_CASE("deviate-basic reports honest dominance") {
    auto scenario = load_scenario(fixture("deviate-basic.json"));
    REQUIRE(scenario.ok());
    // Trim the grid to keep the unit suite quick; the acceptance suite runs
    // the full one.
    scenario.value().alpha_grid = {0.0, 0.3, 0.7};
    auto artifacts = deviate_scenario(scenario.value());
    REQUIRE(artifacts.ok());
    CHECK_FALSE(artifacts.value().falsified);
    CHECK(artifacts.value().report_json.find("\"honest_dominant\": true") !=
          std::string::npos);
    // The duplication regime is flagged above the 1/3 threshold.
    CHECK(artifacts.value().report_json.find(
              "id-reuse delivery advantage regime") != std::string::npos);
}

TEST_CASE("analyze emits one row per grid point with zeroed deep columns") {
    auto scenario = load_scenario(fixture("fraud-basic.json"));
    REQUIRE(scenario.ok());
    Scenario sc = scenario.value();
    sc.alpha_grid = {0.0, 0.5};
    sc.mc_trials = 2000;
    auto csv = analyze_scenario(sc);
    REQUIRE(csv.ok());

    std::istringstream lines(csv.value());
    std::string header;
    std::getline(lines, header);
    CHECK(header.find("p1_closed") != std::string::npos);
    CHECK(header.find("p3_closed") != std::string::npos);

    std::string row0;
    std::getline(lines, row0);
    // alpha = 0: P(d=1) = 1/N = 0.5 exactly, and the d=3 column is zero.
    CHECK(row0.substr(0, 2) == "0,");
    CHECK(row0.find(",0.5,") != std::string::npos);
    std::string row1;
    std::getline(lines, row1);
    CHECK_FALSE(row1.empty());
    std::string extra;
    CHECK_FALSE(std::getline(lines, extra) && !extra.empty());
}
