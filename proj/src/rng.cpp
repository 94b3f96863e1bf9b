// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/rng.hpp"

namespace dcwc {

namespace {

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed) {
    uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
}

// xoshiro256**
uint64_t Rng::next_u64() {
    uint64_t result = rotl(state_[1] * 5, 7) * 9;
    uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

uint64_t Rng::uniform(uint64_t n) {
    // Largest multiple of n that fits in 64 bits; reject above it.
    uint64_t limit = n * ((~0ULL) / n);
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::uniform_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform_double() < p;
}

Rng Rng::substream(const std::string& label, uint64_t index) const {
    uint64_t mix = seed_;
    uint64_t a = splitmix64(mix);
    mix ^= fnv1a(label);
    uint64_t b = splitmix64(mix);
    mix ^= index * 0x9e3779b97f4a7c15ULL;
    uint64_t c = splitmix64(mix);
    return Rng(a ^ rotl(b, 13) ^ rotl(c, 29));
}

}  // namespace dcwc
