// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/incentive.hpp"

#include <cmath>
#include <sstream>

namespace dcwc {

LayerSizes honest_layer_sizes(uint32_t n, uint32_t l) {
    LayerSizes sizes;
    uint64_t size = 1;
    for (uint32_t i = 0; i < l; ++i) {
        size *= n;
        sizes.push_back(size);
    }
    return sizes;
}

double prob_inclusion(uint32_t depth, const LayerSizes& sizes, double alpha,
                      uint32_t l) {
    if (depth < 1 || depth > l) return 0.0;
    if (depth > sizes.size()) return 0.0;
    uint64_t n = sizes[depth - 1];
    if (n == 0) return 0.0;

    double prefix = 0.0;
    for (uint32_t j = 0; j + 1 < depth; ++j) {
        prefix += static_cast<double>(sizes[j]);
    }
    double blocked = prefix == 0.0 ? 1.0 : std::pow(alpha, prefix);
    if (blocked == 0.0) return 0.0;

    double win;
    if (alpha <= 0.0) {
        win = 1.0 / static_cast<double>(n);  // all survive, uniform draw
    } else if (alpha >= 1.0) {
        win = 0.0;
    } else {
        double p = 1.0 - alpha;
        double q = alpha;
        // term_k = C(n,k) p^k q^(n-k), built multiplicatively from k=1.
        double term = static_cast<double>(n) * p *
                      std::pow(q, static_cast<double>(n - 1));
        double sum = term;
        for (uint64_t k = 1; k < n; ++k) {
            term *= (static_cast<double>(n - k) / static_cast<double>(k + 1)) *
                    (p / q);
            sum += term;
        }
        win = sum / static_cast<double>(n);
    }
    return blocked * win;
}

double expected_payoff(const std::vector<uint64_t>& counts,
                       const LayerSizes& sizes, double alpha, double rho,
                       uint32_t l) {
    double total = 0.0;
    for (uint32_t depth = 1; depth <= l && depth <= counts.size(); ++depth) {
        if (counts[depth - 1] == 0) continue;
        total += static_cast<double>(counts[depth - 1]) *
                 prob_inclusion(depth, sizes, alpha, l) * rho /
                 static_cast<double>(depth);
    }
    return total;
}

bool duplication_threshold(double alpha) {
    return 2.0 * alpha * (1.0 - alpha) > (1.0 - alpha) * (1.0 - alpha);
}

Result<MonteCarloReport> monte_carlo(const SimConfig& config,
                                     uint64_t trials) {
    if (trials < 1) return {Err::InvalidParams, "trials must be >= 1"};
    auto built = build_scenario(config);
    if (!built.ok()) return built.error();

    const size_t towers = built.value().towers.size();
    MonteCarloReport report;
    report.trials = trials;
    report.sizes = layer_sizes(built.value());
    std::vector<double> sum(towers, 0.0);
    std::vector<double> sum_sq(towers, 0.0);
    uint64_t detected = 0;

    Rng master(config.seed);
    for (uint64_t t = 0; t < trials; ++t) {
        Rng failure_rng = master.substream("failures", t);
        std::vector<bool> offline = draw_failures(config, towers, failure_rng);
        TrialResult trial = run_commit_phase(built.value(), config, offline,
                                             master.substream("miner", t));
        if (trial.fraud_proven) ++detected;
        for (size_t i = 0; i < towers; ++i) {
            auto it = trial.tower_payoff.find(i);
            double x = it == trial.tower_payoff.end()
                           ? 0.0
                           : static_cast<double>(it->second);
            sum[i] += x;
            sum_sq[i] += x * x;
        }
    }

    report.detection_rate =
        static_cast<double>(detected) / static_cast<double>(trials);
    double n = static_cast<double>(trials);
    for (size_t i = 0; i < towers; ++i) {
        double mean = sum[i] / n;
        report.tower_mean.push_back(mean);
        double var = trials > 1 ? (sum_sq[i] - n * mean * mean) / (n - 1.0)
                                : 0.0;
        if (var < 0.0) var = 0.0;
        report.tower_stderr.push_back(std::sqrt(var / n));
    }
    return report;
}

Result<ExactProfile> exact_profile(const BuiltScenario& built,
                                   const SimConfig& config, size_t tower) {
    ExactProfile profile;
    for (size_t i = 0; i < built.towers.size(); ++i) {
        bool forced = false;
        for (size_t f : config.forced_offline) forced |= (f == i);
        if (!forced) profile.free_indices.push_back(i);
    }
    if (profile.free_indices.size() > kExactModeMaxTowers) {
        return {Err::InvalidParams, "instance too large for exact mode"};
    }

    const PublicKey& focal = built.towers[tower].public_key;
    const uint64_t masks = 1ULL << profile.free_indices.size();
    profile.payoff_by_mask.resize(masks, 0.0);
    profile.detect_by_mask.resize(masks, 0.0);

    for (uint64_t mask = 0; mask < masks; ++mask) {
        std::vector<bool> offline(built.towers.size(), false);
        for (size_t f : config.forced_offline) {
            if (f < offline.size()) offline[f] = true;
        }
        for (size_t bit = 0; bit < profile.free_indices.size(); ++bit) {
            if (mask & (1ULL << bit)) offline[profile.free_indices[bit]] = true;
        }
        // The miner rng is irrelevant here: the candidate set, not the
        // drawn winner, feeds the expectation below.
        TrialResult trial =
            run_commit_phase(built, config, offline, Rng(0));
        profile.detect_by_mask[mask] = trial.fraud_proven ? 1.0 : 0.0;
        if (trial.winning_candidates.empty()) continue;
        double k = static_cast<double>(trial.winning_candidates.size());
        const PublicKey& honest_party =
            config.cheater == 'a' ? built.params.party_b
                                  : built.params.party_a;
        double total = 0.0;
        for (const PofSubmission& cand : trial.winning_candidates) {
            auto records =
                distribute_payoff(cand, built.params, config.fee,
                                  PublicKey{}, honest_party);
            if (!records.ok()) continue;
            for (const auto& r : records.value()) {
                if (r.role == PayoffRole::WatchtowerShare &&
                    r.recipient == focal) {
                    total += static_cast<double>(r.amount);
                }
            }
        }
        profile.payoff_by_mask[mask] = total / k;
    }
    return profile;
}

double weigh_profile(const ExactProfile& profile, double alpha) {
    double expected = 0.0;
    const size_t bits = profile.free_indices.size();
    for (uint64_t mask = 0; mask < profile.payoff_by_mask.size(); ++mask) {
        if (profile.payoff_by_mask[mask] == 0.0) continue;
        int down = __builtin_popcountll(mask);
        double weight = std::pow(alpha, down) *
                        std::pow(1.0 - alpha, static_cast<double>(bits) -
                                                  static_cast<double>(down));
        expected += weight * profile.payoff_by_mask[mask];
    }
    return expected;
}

namespace {

std::string duplicate_regime_note(const SimConfig& config, double alpha) {
    double single = 1.0 - alpha;
    double pair = 1.0 - alpha * alpha;
    std::ostringstream note;
    note << "pair delivery " << pair << " vs single " << single
         << "; validator admits at most one";
    if (duplication_threshold(alpha)) {
        note << "; id-reuse delivery advantage regime (alpha > 1/3)";
    }
    (void)config;
    return note.str();
}

}  // namespace

Result<DominanceReport> deviation_search(
    const SimConfig& base, const std::vector<StrategyProfile>& strategies,
    const std::vector<double>& alpha_grid, uint64_t mc_trials) {
    if (!base.deviator.has_value()) {
        return {Err::InvalidParams, "no deviator configured"};
    }
    const size_t tower = *base.deviator;
    DominanceReport report;
    report.deviator = tower;

    const bool exact = base.watchtower_count <= kExactModeMaxTowers;

    SimConfig honest_config = base;
    honest_config.strategy = StrategyProfile{};  // Honest

    std::vector<double> honest_payoffs(alpha_grid.size(), 0.0);
    std::vector<double> honest_err(alpha_grid.size(), 0.0);
    if (exact) {
        auto built = build_scenario(honest_config);
        if (!built.ok()) return built.error();
        auto profile = exact_profile(built.value(), honest_config, tower);
        if (!profile.ok()) return profile.error();
        for (size_t a = 0; a < alpha_grid.size(); ++a) {
            honest_payoffs[a] = weigh_profile(profile.value(), alpha_grid[a]);
        }
    } else {
        for (size_t a = 0; a < alpha_grid.size(); ++a) {
            SimConfig cfg = honest_config;
            cfg.alpha = alpha_grid[a];
            auto mc = monte_carlo(cfg, mc_trials);
            if (!mc.ok()) return mc.error();
            honest_payoffs[a] = mc.value().tower_mean[tower];
            honest_err[a] = mc.value().tower_stderr[tower];
        }
    }

    for (const StrategyProfile& strategy : strategies) {
        if (strategy.kind == StrategyKind::Honest) continue;
        SimConfig cfg = base;
        cfg.strategy = strategy;

        std::vector<double> dev_payoffs(alpha_grid.size(), 0.0);
        std::vector<double> dev_err(alpha_grid.size(), 0.0);
        if (exact) {
            auto built = build_scenario(cfg);
            if (!built.ok()) return built.error();
            auto profile = exact_profile(built.value(), cfg, tower);
            if (!profile.ok()) return profile.error();
            for (size_t a = 0; a < alpha_grid.size(); ++a) {
                dev_payoffs[a] = weigh_profile(profile.value(), alpha_grid[a]);
            }
        } else {
            for (size_t a = 0; a < alpha_grid.size(); ++a) {
                SimConfig mc_cfg = cfg;
                mc_cfg.alpha = alpha_grid[a];
                auto mc = monte_carlo(mc_cfg, mc_trials);
                if (!mc.ok()) return mc.error();
                dev_payoffs[a] = mc.value().tower_mean[tower];
                dev_err[a] = mc.value().tower_stderr[tower];
            }
        }

        for (size_t a = 0; a < alpha_grid.size(); ++a) {
            DeviationRow row;
            row.kind = strategy.kind;
            row.alpha = alpha_grid[a];
            row.payoff_honest = honest_payoffs[a];
            row.payoff_deviation = dev_payoffs[a];
            row.exact = exact;
            row.ci_half_width =
                exact ? 0.0 : 3.0 * (honest_err[a] + dev_err[a]);
            double slack = exact ? 1e-9 : row.ci_half_width;
            row.dominated = row.payoff_honest >= row.payoff_deviation - slack;
            if (strategy.kind == StrategyKind::DuplicateId) {
                row.note = duplicate_regime_note(cfg, alpha_grid[a]);
            }
            report.honest_dominant &= row.dominated;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace dcwc
