// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

// Test-only oracle for message-inclusion probabilities, independent of the
// library implementation. It enumerates every failure subset of every
// relevant layer (probability mass summation, not sampling):
//
//   - a layer of n messages has 2^n survivor subsets; the tallies below
//     count them exactly, by survivor count and by whether they contain a
//     fixed message m;
//   - layers fail independently, so the all-failed factors of shallower
//     layers multiply with the win factor of the message's own layer.
//
// Subset masses are combined from exact integer counts, so float error
// stays at a few ulps regardless of the 2^27-term enumeration.
namespace dcwc::oracle {

struct LayerTally {
    std::vector<int64_t> total_by_survivors;
    std::vector<int64_t> with_m_by_survivors;  // subsets containing bit 0
};

inline const LayerTally& tally_for(uint64_t n) {
    static std::map<uint64_t, LayerTally> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    LayerTally tally;
    tally.total_by_survivors.assign(n + 1, 0);
    tally.with_m_by_survivors.assign(n + 1, 0);
    const uint64_t subsets = 1ULL << n;
    for (uint64_t mask = 0; mask < subsets; ++mask) {
        int k = __builtin_popcountll(mask);
        tally.total_by_survivors[static_cast<size_t>(k)]++;
        if (mask & 1ULL) tally.with_m_by_survivors[static_cast<size_t>(k)]++;
    }
    return cache.emplace(n, std::move(tally)).first->second;
}

inline double pow_int(double base, uint64_t exp) {
    double out = 1.0;
    for (uint64_t i = 0; i < exp; ++i) out *= base;
    return out;
}

// P[message of depth `depth` is included], enumerated.
inline double prob_inclusion(uint32_t depth,
                             const std::vector<uint64_t>& sizes, double alpha,
                             uint32_t l) {
    if (depth < 1 || depth > l || depth > sizes.size()) return 0.0;

    double blocked = 1.0;
    for (uint32_t j = 0; j + 1 < depth; ++j) {
        const LayerTally& tally = tally_for(sizes[j]);
        // The all-failed subset: enumeration found exactly one.
        blocked *= static_cast<double>(tally.total_by_survivors[0]) *
                   pow_int(alpha, sizes[j]);
    }

    uint64_t n = sizes[depth - 1];
    const LayerTally& tally = tally_for(n);
    double win = 0.0;
    for (uint64_t k = 1; k <= n; ++k) {
        // Subsets of k survivors containing m; m wins the uniform draw
        // with probability 1/k within each.
        win += static_cast<double>(tally.with_m_by_survivors[k]) *
               pow_int(1.0 - alpha, k) * pow_int(alpha, n - k) /
               static_cast<double>(k);
    }
    return blocked * win;
}

}  // namespace dcwc::oracle
