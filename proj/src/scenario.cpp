// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dcwc {

using ordered_json = nlohmann::ordered_json;

namespace {

Result<StrategyKind> parse_strategy_kind(const std::string& name) {
    if (name == "honest") return StrategyKind::Honest;
    if (name == "forge-extra-messages") return StrategyKind::ForgeExtraMessages;
    if (name == "duplicate-id") return StrategyKind::DuplicateId;
    if (name == "early-commit") return StrategyKind::EarlyCommit;
    if (name == "late-commit") return StrategyKind::LateCommit;
    if (name == "withhold-forward") return StrategyKind::WithholdForward;
    if (name == "store-stale-proof") return StrategyKind::StoreStaleProof;
    if (name == "shorten-depth") return StrategyKind::ShortenDepthAttempt;
    return {Err::ScenarioInvalid, "unknown strategy: " + name};
}

std::string role_of(const BuiltScenario& built, const PublicKey& pk) {
    if (pk == built.params.party_a) return "A";
    if (pk == built.params.party_b) return "B";
    int idx = built.tower_index(pk);
    if (idx >= 0) return "W" + std::to_string(idx);
    return "miner";
}

}  // namespace

std::vector<StrategyProfile> default_strategies() {
    return {
        {StrategyKind::ForgeExtraMessages, 1, 0},
        {StrategyKind::DuplicateId, 1, 0},
        {StrategyKind::EarlyCommit, 0, 1},
        {StrategyKind::LateCommit, 0, 1},
        {StrategyKind::WithholdForward, 0, 0},
        {StrategyKind::StoreStaleProof, 0, 0},
        {StrategyKind::ShortenDepthAttempt, 0, 0},
    };
}

Result<size_t> tower_at_depth(const BuiltScenario& built, uint32_t depth,
                              size_t nth) {
    size_t seen = 0;
    for (const auto& m : built.sent) {
        if (m.depth() != depth) continue;
        if (m.payload.seq != built.updates.back().seq) continue;
        if (!verify_envelope_chain(m, built.params).ok()) continue;
        if (seen++ == nth) {
            int idx = built.tower_index(m.holder());
            if (idx < 0) break;
            return static_cast<size_t>(idx);
        }
    }
    return {Err::ScenarioInvalid, "no message at the requested depth"};
}

Result<Scenario> parse_scenario(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        return {Err::ScenarioInvalid, e.what()};
    }
    try {
        Scenario sc;
        sc.schema = doc.value("schema", 1);
        if (sc.schema != 1) {
            return {Err::ScenarioInvalid, "unsupported schema version"};
        }
        sc.mode = doc.value("mode", "dcwc");
        if (sc.mode != "dcwc" && sc.mode != "dcwc-star" && sc.mode != "xd") {
            return {Err::ScenarioInvalid, "mode must be dcwc, dcwc-star or xd"};
        }
        if (!doc.contains("seed")) {
            return {Err::ScenarioInvalid, "seed is mandatory"};
        }
        sc.sim.seed = doc.at("seed").get<uint64_t>();

        if (doc.contains("channel")) {
            const auto& ch = doc.at("channel");
            sc.sim.fund_a = ch.value("fund_a", 10);
            sc.sim.fund_b = ch.value("fund_b", 10);
            sc.sim.rho = ch.value("rho", 60);
            sc.sim.fee = ch.value("fee", 0);
            sc.sim.fanout_n = ch.value("fanout_n", 2u);
            sc.sim.rounds_l = ch.value("rounds_l", 2u);
            sc.sim.blocks_per_round_b = ch.value("blocks_per_round_b", 1u);
            sc.sim.settlement_timelock_t =
                ch.value("settlement_timelock_t", 0u);
        }
        sc.sim.watchtower_count = doc.value("watchtowers", 6u);
        sc.sim.alpha = doc.value("alpha", 0.0);
        if (sc.sim.alpha < 0.0 || sc.sim.alpha > 1.0) {
            return {Err::ScenarioInvalid, "alpha must lie in [0,1]"};
        }
        sc.sim.update_count = doc.value("updates", 2u);
        if (doc.contains("fraud")) {
            const auto& fraud = doc.at("fraud");
            std::string cheater = fraud.value("cheater", "a");
            if (cheater != "a" && cheater != "b") {
                return {Err::ScenarioInvalid, "cheater must be a or b"};
            }
            sc.sim.cheater = cheater[0];
            sc.sim.fraud_seq = fraud.value("publish_seq", 0u);
        }
        if (sc.sim.fraud_seq > sc.sim.update_count) {
            return {Err::ScenarioInvalid, "publish_seq beyond update history"};
        }
        std::string discloser = doc.value("discloser", "b");
        if (discloser != "a" && discloser != "b") {
            return {Err::ScenarioInvalid, "discloser must be a or b"};
        }
        sc.sim.discloser = discloser[0];
        if (doc.contains("offline")) {
            for (const auto& idx : doc.at("offline")) {
                size_t i = idx.get<size_t>();
                if (i >= sc.sim.watchtower_count) {
                    return {Err::ScenarioInvalid,
                            "offline index beyond watchtower count"};
                }
                sc.sim.forced_offline.push_back(i);
            }
        }
        sc.sim.scheme = doc.value("scheme", std::string("hmac")) == "ed25519"
                            ? Scheme::Ed25519
                            : Scheme::HmacSim;
        sc.sim.miner_prefers_own = doc.value("miner_prefers_own", false);
        if (doc.contains("miner_tower")) {
            sc.sim.miner_tower = doc.at("miner_tower").get<size_t>();
        }

        sc.trials = doc.value("trials", 1u);
        sc.mc_trials = doc.value("mc_trials", 20000u);
        if (doc.contains("alpha_grid")) {
            for (const auto& a : doc.at("alpha_grid")) {
                sc.alpha_grid.push_back(a.get<double>());
            }
        } else {
            for (int i = 0; i <= 9; ++i) sc.alpha_grid.push_back(0.1 * i);
        }
        sc.deviator_depth = doc.value("deviator_depth", 1u);
        if (doc.contains("strategies")) {
            for (const auto& item : doc.at("strategies")) {
                auto kind = parse_strategy_kind(item.value("kind", ""));
                if (!kind.ok()) return kind.error();
                StrategyProfile profile;
                profile.kind = kind.value();
                profile.count = item.value("count", 1u);
                profile.rounds = item.value("rounds", 1u);
                sc.strategies.push_back(profile);
            }
        } else {
            sc.strategies = default_strategies();
        }

        if (doc.contains("star")) {
            const auto& star = doc.at("star");
            sc.star.remainder = star.value("remainder", 4);
            sc.star.hop_timelock = star.value("hop_timelock", 6u);
            sc.star.settle_height = star.value("settle_height", 50u);
            sc.star.timelock_t = star.value("timelock_t", 40u);
            if (star.contains("claims")) {
                for (const auto& c : star.at("claims")) {
                    sc.star.claims.push_back(c.get<Amount>());
                }
            }
            if (star.contains("online")) {
                for (const auto& o : star.at("online")) {
                    sc.star.online.push_back(o.get<bool>());
                }
            }
        }

        if (doc.contains("xd")) {
            for (const auto& item : doc.at("xd").at("vertices")) {
                XdVertexSpec v;
                v.name = item.at("name").get<std::string>();
                v.initial = item.value("initial", 0);
                v.commit = item.value("commit", -1);
                v.pays = item.value("pays", "");
                sc.xd.vertices.push_back(std::move(v));
            }
        }
        return sc;
    } catch (const nlohmann::json::exception& e) {
        return {Err::ScenarioInvalid, e.what()};
    }
}

Result<Scenario> load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {Err::ScenarioInvalid, "cannot open " + path};
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string trace_to_jsonl(const Trace& trace) {
    std::string out;
    for (size_t i = 0; i < trace.size(); ++i) {
        ordered_json line;
        line["i"] = i;
        line["h"] = trace[i].height;
        line["actor"] = trace[i].actor;
        line["kind"] = trace[i].kind;
        line["digest"] = trace[i].digest;
        line["note"] = trace[i].note;
        out += line.dump();
        out += '\n';
    }
    return out;
}

Result<RunArtifacts> run_scenario(const Scenario& scenario) {
    if (scenario.mode == "xd") return settle_xd_scenario(scenario);
    if (scenario.mode == "dcwc-star") return star_demo_scenario(scenario);

    auto built = build_scenario(scenario.sim);
    if (!built.ok()) return built.error();

    Trace trace = built.value().trace;
    Rng master(scenario.sim.seed);
    Rng failure_rng = master.substream("failures", 0);
    std::vector<bool> offline = draw_failures(
        scenario.sim, built.value().towers.size(), failure_rng);
    TrialResult trial =
        run_commit_phase(built.value(), scenario.sim, offline,
                         master.substream("miner", 0), &trace);

    ordered_json report;
    report["schema"] = 1;
    report["mode"] = "dcwc";
    report["seed"] = scenario.sim.seed;
    report["fraud_proven"] = trial.fraud_proven;
    report["proof_round"] = trial.proof_round;
    report["outcome"] = trial.outcome == Outcome::Kind::FraudProven
                            ? "fraud-proven"
                            : "settled-clean";
    report["degenerate_topology"] = built.value().degenerate;
    ordered_json payoffs = ordered_json::array();
    for (const auto& record : trial.payouts) {
        ordered_json row;
        row["actor"] = role_of(built.value(), record.recipient);
        row["role"] = payoff_role_name(record.role);
        row["amount"] = record.amount;
        payoffs.push_back(row);
    }
    report["payoffs"] = payoffs;
    report["total_locked"] = trial.total_locked;
    report["total_paid"] = trial.total_paid;
    report["conservation_ok"] = trial.total_locked == trial.total_paid;
    ordered_json offline_json = ordered_json::array();
    for (size_t i = 0; i < offline.size(); ++i) {
        if (offline[i]) offline_json.push_back(i);
    }
    report["offline"] = offline_json;

    RunArtifacts artifacts;
    artifacts.trace_jsonl = trace_to_jsonl(trace);
    artifacts.report_json = report.dump(2) + "\n";
    return artifacts;
}

Result<std::string> analyze_scenario(const Scenario& scenario) {
    if (scenario.mode != "dcwc") {
        return {Err::ScenarioInvalid, "analyze runs on dcwc scenarios"};
    }
    auto built = build_scenario(scenario.sim);
    if (!built.ok()) return built.error();
    const BuiltScenario& b = built.value();
    LayerSizes sizes = layer_sizes(b);
    const uint32_t l = scenario.sim.rounds_l;

    // Fixed representative message per depth for the empirical estimate.
    std::vector<Bytes> representative(l + 1);
    for (const auto& m : b.sent) {
        if (m.payload.seq != b.updates.back().seq) continue;
        uint32_t d = m.depth();
        if (d >= 1 && d <= l && representative[d].empty() &&
            verify_envelope_chain(m, b.params).ok()) {
            representative[d] = message_digest(m);
        }
    }
    size_t focal = 0;
    if (auto t = tower_at_depth(b, 1, 0); t.ok()) focal = t.value();

    std::ostringstream csv;
    csv << "alpha";
    for (uint32_t d = 1; d <= l + 1; ++d) {
        csv << ",p" << d << "_closed,p" << d << "_mc";
    }
    csv << ",payoff_w_closed,payoff_w_mc,payoff_w_se\n";

    for (double alpha : scenario.alpha_grid) {
        SimConfig cfg = scenario.sim;
        cfg.alpha = alpha;
        std::vector<uint64_t> hits(l + 2, 0);
        double payoff_sum = 0.0;
        double payoff_sq = 0.0;
        Rng master(cfg.seed);
        for (uint64_t t = 0; t < scenario.mc_trials; ++t) {
            Rng failure_rng = master.substream("failures", t);
            std::vector<bool> offline =
                draw_failures(cfg, b.towers.size(), failure_rng);
            TrialResult trial = run_commit_phase(
                b, cfg, offline, master.substream("miner", t));
            if (trial.included_digest.has_value()) {
                for (uint32_t d = 1; d <= l; ++d) {
                    if (*trial.included_digest == representative[d]) {
                        hits[d]++;
                    }
                }
            }
            double x = 0.0;
            if (auto it = trial.tower_payoff.find(focal);
                it != trial.tower_payoff.end()) {
                x = static_cast<double>(it->second);
            }
            payoff_sum += x;
            payoff_sq += x * x;
        }

        double n = static_cast<double>(scenario.mc_trials);
        csv << alpha;
        for (uint32_t d = 1; d <= l + 1; ++d) {
            double closed = prob_inclusion(d, sizes, alpha, l);
            double mc = static_cast<double>(hits[d]) / n;
            csv << ',' << closed << ',' << mc;
        }
        double mean = payoff_sum / n;
        double var = (payoff_sq - n * mean * mean) / (n - 1.0);
        if (var < 0) var = 0;
        auto counts = watchtower_view(b, focal);
        double closed_payoff =
            expected_payoff(counts, sizes, alpha,
                            static_cast<double>(scenario.sim.rho), l);
        csv << ',' << closed_payoff << ',' << mean << ','
            << std::sqrt(var / n) << '\n';
    }
    return csv.str();
}

Result<DeviateArtifacts> deviate_scenario(const Scenario& scenario) {
    if (scenario.mode != "dcwc") {
        return {Err::ScenarioInvalid, "deviate runs on dcwc scenarios"};
    }
    SimConfig cfg = scenario.sim;
    auto built = build_scenario(cfg);
    if (!built.ok()) return built.error();
    auto deviator = tower_at_depth(built.value(), scenario.deviator_depth, 0);
    if (!deviator.ok()) return deviator.error();
    cfg.deviator = deviator.value();

    auto report = deviation_search(cfg, scenario.strategies,
                                   scenario.alpha_grid, scenario.mc_trials);
    if (!report.ok()) return report.error();

    DeviateArtifacts artifacts;
    artifacts.falsified = !report.value().honest_dominant;

    ordered_json doc;
    doc["schema"] = 1;
    doc["deviator"] = "W" + std::to_string(report.value().deviator);
    doc["deviator_depth"] = scenario.deviator_depth;
    doc["honest_dominant"] = report.value().honest_dominant;
    ordered_json rows = ordered_json::array();
    std::ostringstream table;
    table << "deviator W" << report.value().deviator << " (depth "
          << scenario.deviator_depth << ")\n";
    table << "strategy              alpha   honest     deviation  dominated\n";
    for (const auto& row : report.value().rows) {
        ordered_json r;
        r["strategy"] = strategy_name(row.kind);
        r["alpha"] = row.alpha;
        r["payoff_honest"] = row.payoff_honest;
        r["payoff_deviation"] = row.payoff_deviation;
        r["exact"] = row.exact;
        r["dominated"] = row.dominated;
        if (!row.note.empty()) r["note"] = row.note;
        rows.push_back(r);

        char line[160];
        std::snprintf(line, sizeof(line), "%-21s %-7.2f %-10.4f %-10.4f %s\n",
                      strategy_name(row.kind), row.alpha, row.payoff_honest,
                      row.payoff_deviation, row.dominated ? "yes" : "NO");
        table << line;
    }
    doc["rows"] = rows;
    artifacts.report_json = doc.dump(2) + "\n";
    artifacts.table = table.str();
    return artifacts;
}

Result<RunArtifacts> settle_xd_scenario(const Scenario& scenario) {
    if (scenario.xd.vertices.empty()) {
        return {Err::ScenarioInvalid, "xd scenario has no vertices"};
    }
    // Deterministic keys per named vertex.
    std::map<std::string, KeyPair> keys;
    Rng key_rng = Rng(scenario.sim.seed).substream("xd-keys");
    for (const auto& v : scenario.xd.vertices) {
        if (keys.contains(v.name)) {
            return {Err::ScenarioInvalid, "duplicate vertex " + v.name};
        }
        keys.emplace(v.name, keygen(scenario.sim.scheme, key_rng.next_u64()));
    }

    std::vector<PublicKey> vertices;
    std::vector<std::pair<PublicKey, PublicKey>> edges;
    std::map<PublicKey, Amount> initial;
    for (const auto& v : scenario.xd.vertices) {
        const KeyPair& k = keys.at(v.name);
        vertices.push_back(k.public_key);
        initial[k.public_key] = v.initial;
        if (!v.pays.empty()) {
            auto payee = keys.find(v.pays);
            if (payee == keys.end()) {
                return {Err::ScenarioInvalid, "unknown payee " + v.pays};
            }
            edges.emplace_back(k.public_key, payee->second.public_key);
        }
    }
    auto graph = xd::make_graph(vertices, edges);
    if (!graph.ok()) return graph.error();

    std::map<PublicKey, Signature> sigs;
    for (const auto& [name, k] : keys) {
        sigs[k.public_key] = xd::sign_setup(k, graph.value(), initial, 0);
    }
    auto state = xd::open_xd(graph.value(), initial, sigs);
    if (!state.ok()) return state.error();

    xd::XdState working = state.value();
    for (const auto& v : scenario.xd.vertices) {
        if (v.commit < 0) continue;
        auto paid = xd::pay(working, keys.at(v.name).public_key, v.commit,
                            keys.at(v.name));
        if (!paid.ok()) {
            return Error{paid.code(),
                         v.name + " cannot commit: " + paid.error().message};
        }
        working = paid.value().state;
    }

    xd::Settlement settled = xd::settle(working);

    ordered_json report;
    report["schema"] = 1;
    report["mode"] = "xd";
    report["seed"] = scenario.sim.seed;
    ordered_json flows;
    ordered_json balances;
    Amount total_initial = 0, total_balance = 0;
    for (const auto& v : scenario.xd.vertices) {
        const PublicKey& pk = keys.at(v.name).public_key;
        flows[v.name] = settled.flows.at(pk);
        balances[v.name] = settled.balances.at(pk);
        total_initial += v.initial;
        total_balance += settled.balances.at(pk);
    }
    report["flows"] = flows;
    report["balances"] = balances;
    report["total_initial"] = total_initial;
    report["total_balance"] = total_balance;
    report["conservation_ok"] = total_initial == total_balance;

    Trace trace;
    for (const auto& v : scenario.xd.vertices) {
        const PublicKey& pk = keys.at(v.name).public_key;
        trace.push_back({0, v.name, "settle-flow", "",
                         "flow=" + std::to_string(settled.flows.at(pk)) +
                             " balance=" +
                             std::to_string(settled.balances.at(pk))});
    }

    RunArtifacts artifacts;
    artifacts.trace_jsonl = trace_to_jsonl(trace);
    artifacts.report_json = report.dump(2) + "\n";
    return artifacts;
}

Result<RunArtifacts> star_demo_scenario(const Scenario& scenario) {
    SimConfig cfg = scenario.sim;
    Rng key_rng = Rng(cfg.seed).substream("star-keys");
    KeyPair keys_a = keygen(cfg.scheme, key_rng.next_u64());
    KeyPair keys_b = keygen(cfg.scheme, key_rng.next_u64());

    ChannelParams params;
    params.channel_id =
        sha256(Encoder().field("star.channel").field_u64(cfg.seed).take());
    params.channel_id.resize(8);
    params.party_a = keys_a.public_key;
    params.party_b = keys_b.public_key;
    params.fund_a = cfg.fund_a;
    params.fund_b = cfg.fund_b;
    params.rho = 0;
    params.fanout_n = 1;
    params.rounds_l = 1;
    params.blocks_per_round_b = 1;
    params.settlement_timelock_t = scenario.star.timelock_t;

    UpdateTx revoked = sign_update(params.channel_id, 1, params.fund_a,
                                   params.fund_b, keys_a, keys_b);
    star::InvalidationTx inv = star::build_invalidation(
        revoked, params, keys_b.public_key, scenario.star.remainder);

    std::vector<star::StarTx> chain = {inv.tx};
    std::vector<KeyPair> towers;
    Trace trace;
    trace.push_back({0, "B", "invalidate",
                     to_hex(inv.tx.txid()),
                     "revoked_seq=" + std::to_string(inv.revoked_seq)});
    for (size_t k = 0; k < scenario.star.claims.size(); ++k) {
        towers.push_back(keygen(cfg.scheme, key_rng.next_u64()));
        auto fwd = star::forward_with_claim(chain.back(), towers.back(),
                                            scenario.star.claims[k],
                                            scenario.star.hop_timelock);
        if (!fwd.ok()) return fwd.error();
        trace.push_back({0, "W" + std::to_string(k + 1), "forward",
                         to_hex(fwd.value().txid()),
                         "claim=" + std::to_string(scenario.star.claims[k])});
        chain.push_back(fwd.value());
    }

    std::vector<bool> online = scenario.star.online;
    online.resize(chain.size(), false);
    star::StarSettleResult result = star::settle_star(
        chain, online, scenario.star.settle_height, scenario.star.timelock_t);

    ordered_json report;
    report["schema"] = 1;
    report["mode"] = "dcwc-star";
    report["seed"] = cfg.seed;
    report["invalidated"] = result.invalidated;
    report["winner_hop"] = result.winner_hop;
    ordered_json landings = ordered_json::array();
    for (uint64_t h : result.landings) landings.push_back(h);
    report["landing_heights"] = landings;
    ordered_json payouts = ordered_json::array();
    Amount total = 0;
    for (const auto& p : result.payouts) {
        ordered_json row;
        std::string who = p.recipient == keys_b.public_key ? "B" : "?";
        for (size_t k = 0; k < towers.size(); ++k) {
            if (p.recipient == towers[k].public_key) {
                who = "W" + std::to_string(k + 1);
            }
        }
        row["actor"] = who;
        row["amount"] = p.amount;
        row["note"] = p.note;
        payouts.push_back(row);
        total += p.amount;
        trace.push_back({scenario.star.settle_height, who, "payout", "",
                         p.note + "=" + std::to_string(p.amount)});
    }
    report["payouts"] = payouts;
    report["total_paid"] = total;
    if (!chain.empty() && chain.size() > 1) {
        report["hop1_claim_script"] =
            to_hex(chain[1].outputs[0].script.encode());
    }

    RunArtifacts artifacts;
    artifacts.trace_jsonl = trace_to_jsonl(trace);
    artifacts.report_json = report.dump(2) + "\n";
    return artifacts;
}

}  // namespace dcwc
