// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <map>
#include <vector>

#include "dcwc/rng.hpp"
#include "dcwc/xd.hpp"

namespace dcwc::test {

struct XdFixture {
    std::vector<KeyPair> keys;
    dcwc::xd::XdState state;
};

// Random channel: 2..max_vertices keys, random one-out-edge graph, deposits
// in [0, max_initial], and commitments in [0, max_commit] injected with
// real signatures (solvency deliberately unchecked; settlement must cap).
inline XdFixture random_xd_state(Rng& rng, int max_vertices,
                                 Amount max_initial, Amount max_commit) {
    using namespace dcwc::xd;
    XdFixture fx;
    int n = 2 + static_cast<int>(rng.uniform(
                    static_cast<uint64_t>(max_vertices - 1)));
    for (int i = 0; i < n; ++i) {
        fx.keys.push_back(
            keygen(Scheme::HmacSim, 40000 + rng.uniform(1 << 20)));
    }

    std::vector<PublicKey> vertices;
    for (const auto& k : fx.keys) vertices.push_back(k.public_key);
    std::vector<std::pair<PublicKey, PublicKey>> edges;
    for (int i = 0; i < n; ++i) {
        if (rng.uniform(4) == 0) continue;  // some vertices pay nobody
        int j = static_cast<int>(rng.uniform(static_cast<uint64_t>(n - 1)));
        if (j >= i) ++j;
        edges.emplace_back(fx.keys[static_cast<size_t>(i)].public_key,
                           fx.keys[static_cast<size_t>(j)].public_key);
    }
    XdGraph graph = make_graph(vertices, edges).value();

    std::map<PublicKey, Amount> initial;
    for (const auto& k : fx.keys) {
        initial[k.public_key] = static_cast<Amount>(
            rng.uniform(static_cast<uint64_t>(max_initial) + 1));
    }
    std::map<PublicKey, Signature> sigs;
    for (const auto& k : fx.keys) {
        sigs[k.public_key] = sign_setup(k, graph, initial, 0);
    }
    fx.state = open_xd(graph, initial, sigs).value();

    Bytes channel_id = xd_channel_id(graph, initial);
    for (const auto& k : fx.keys) {
        if (graph.payee_of(k.public_key) == nullptr) continue;
        if (rng.uniform(4) == 0) continue;
        Amount amount = static_cast<Amount>(
            rng.uniform(static_cast<uint64_t>(max_commit) + 1));
        fx.state.commitments[k.public_key] =
            Commitment{amount, sign_commitment(k, channel_id, amount)};
    }
    return fx;
}

// Independent settlement oracle: enumerate every integer flow vector within
// the commitment caps, keep the feasible ones (no negative balances), and
// take the one maximizing the total flow. Exponential and only for desk
// sizes.
inline std::map<PublicKey, Amount> brute_force_settle(
    const dcwc::xd::XdState& state) {
    const auto& vertices = state.graph.vertices;
    const size_t n = vertices.size();
    std::vector<Amount> caps(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (state.graph.payee_of(vertices[i]) != nullptr) {
            caps[i] = std::max<Amount>(state.committed(vertices[i]), 0);
        }
    }

    std::vector<Amount> flow(n, 0);
    std::vector<Amount> best(n, 0);
    Amount best_total = -1;
    while (true) {
        bool feasible = true;
        Amount total = 0;
        for (size_t i = 0; i < n && feasible; ++i) {
            Amount inflow = 0;
            for (size_t j = 0; j < n; ++j) {
                const PublicKey* payee = state.graph.payee_of(vertices[j]);
                if (payee != nullptr && *payee == vertices[i]) {
                    inflow += flow[j];
                }
            }
            if (state.initial_of(vertices[i]) + inflow < flow[i]) {
                feasible = false;
            }
            total += flow[i];
        }
        if (feasible && total > best_total) {
            best_total = total;
            best = flow;
        }
        // Odometer step.
        size_t pos = 0;
        while (pos < n) {
            if (flow[pos] < caps[pos]) {
                ++flow[pos];
                break;
            }
            flow[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    std::map<PublicKey, Amount> out;
    for (size_t i = 0; i < n; ++i) out[vertices[i]] = best[i];
    return out;
}

}  // namespace dcwc::test
