// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <string>
#include <vector>

#include "dcwc/sim.hpp"

namespace dcwc {

struct FailureModel {
    double alpha = 0.0;  // independent per-node failure probability
};

// sizes[i] = number of valid messages at depth i+1. A faithful run has
// N^(i+1) of them.
using LayerSizes = std::vector<uint64_t>;

LayerSizes honest_layer_sizes(uint32_t n, uint32_t l);

// Probability that one particular depth-d message ends up on chain.
// A depth-d message wins only when every holder at smaller depths failed
// (each message fails independently with probability alpha) and the message
// is then drawn uniformly among the surviving depth-d messages:
//
//   P = alpha^(sum of shallower layer sizes)
//       * sum_{k=1}^{n} C(n,k) (1-alpha)^k alpha^(n-k) / n,   n = sizes[d-1]
//
// and 0 for d > l.
double prob_inclusion(uint32_t depth, const LayerSizes& sizes, double alpha,
                      uint32_t l);

// Expected reward for a watchtower holding `counts[i]` messages at depth
// i+1: sum_i counts[i] * P(depth i+1) * rho / (i+1). The depth divides the
// reward because every hop of the winning path shares it equally.
double expected_payoff(const std::vector<uint64_t>& counts,
                       const LayerSizes& sizes, double alpha, double rho,
                       uint32_t l);

// Whether sending two same-id copies beats one copy on raw delivery odds:
// 2a(1-a) > (1-a)^2, i.e. alpha > 1/3. The validator still admits at most
// one of the copies, so the advantage never reaches the payoff.
bool duplication_threshold(double alpha);

// ---------------------------------------------------------------------------
// Monte Carlo estimation
// ---------------------------------------------------------------------------
struct MonteCarloReport {
    uint64_t trials = 0;
    double detection_rate = 0.0;
    std::vector<double> tower_mean;
    std::vector<double> tower_stderr;
    LayerSizes sizes;
};

// Full Phase-1 + Phase-2 + chain playback per trial with independent
// failure draws. Deterministic given config.seed.
Result<MonteCarloReport> monte_carlo(const SimConfig& config, uint64_t trials);

// ---------------------------------------------------------------------------
// Deviation harness
// ---------------------------------------------------------------------------

// Selection-averaged payoff of one watchtower per failure configuration:
// payoff_by_mask[m] is its expected reward when exactly the towers in mask
// m (over free_indices) are offline, averaging over the miner's uniform
// choice. Exact: no sampling anywhere.
struct ExactProfile {
    std::vector<size_t> free_indices;
    std::vector<double> payoff_by_mask;
    std::vector<double> detect_by_mask;
};

Result<ExactProfile> exact_profile(const BuiltScenario& built,
                                   const SimConfig& config, size_t tower);

// Weighs a profile by the failure model: sum over masks of
// alpha^|offline| (1-alpha)^|online| * payoff.
double weigh_profile(const ExactProfile& profile, double alpha);

struct DeviationRow {
    StrategyKind kind = StrategyKind::Honest;
    double alpha = 0.0;
    double payoff_honest = 0.0;
    double payoff_deviation = 0.0;
    bool exact = true;
    double ci_half_width = 0.0;  // Monte Carlo fallback only
    bool dominated = true;       // honest >= deviation
    std::string note;
};

struct DominanceReport {
    std::vector<DeviationRow> rows;
    bool honest_dominant = true;
    size_t deviator = 0;
};

// Compares the honest payoff of `base.deviator` against every strategy on
// the alpha grid. Instances up to `kExactModeMaxTowers` watchtowers are
// enumerated exhaustively over all failure subsets; larger ones fall back
// to Monte Carlo with the given trial count.
inline constexpr uint32_t kExactModeMaxTowers = 20;

Result<DominanceReport> deviation_search(
    const SimConfig& base, const std::vector<StrategyProfile>& strategies,
    const std::vector<double>& alpha_grid, uint64_t mc_trials = 20000);

}  // namespace dcwc
