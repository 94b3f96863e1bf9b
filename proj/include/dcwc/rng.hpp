// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcwc {

// Deterministic generator with named substreams. std:: distributions are
// implementation-defined, so uniform draws are produced here directly and
// traces stay byte-identical across platforms.
//
// All randomness in a run flows from one scenario seed; independent aspects
// (topology, failures, miner selection) draw from substreams derived by
// hashing the parent seed with the substream label and index.
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();
    // Uniform in [0, n); n must be > 0. Rejection sampling, no modulo bias.
    uint64_t uniform(uint64_t n);
    // Uniform in [0, 1) with 53-bit resolution.
    double uniform_double();
    bool bernoulli(double p);

    // Derived generator, independent of this one for practical purposes.
    Rng substream(const std::string& label, uint64_t index = 0) const;

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_[4];
    uint64_t seed_;
};

}  // namespace dcwc
