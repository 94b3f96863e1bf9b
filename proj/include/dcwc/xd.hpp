// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <map>
#include <vector>

#include "dcwc/channel.hpp"

namespace dcwc::xd {

// Directed channel graph; each vertex may name at most one payee, which is
// what rules out in-channel double spending without per-payment multiparty
// signatures.
struct XdGraph {
    std::vector<PublicKey> vertices;       // sorted, unique
    std::map<PublicKey, PublicKey> edges;  // payer -> payee

    bool has_vertex(const PublicKey& v) const;
    const PublicKey* payee_of(const PublicKey& v) const;
    std::vector<PublicKey> payers_of(const PublicKey& v) const;
};

Result<XdGraph> make_graph(
    std::vector<PublicKey> vertices,
    const std::vector<std::pair<PublicKey, PublicKey>>& edges);

struct Commitment {
    Amount amount = 0;
    Signature signature;
};

// Channel state tuple: graph, initial funds, sequence number, setup
// signatures over (G, I, k), and per-vertex cumulative payment commitments.
struct XdState {
    XdGraph graph;
    std::map<PublicKey, Amount> initial;
    uint64_t seq = 0;
    std::map<PublicKey, Signature> setup_sigs;
    std::map<PublicKey, Commitment> commitments;

    Amount initial_of(const PublicKey& v) const;
    Amount committed(const PublicKey& v) const;
};

// Stable across sequence bumps: the digest of (G, I).
Bytes xd_channel_id(const XdGraph& graph,
                    const std::map<PublicKey, Amount>& initial);

Bytes setup_sign_bytes(const XdGraph& graph,
                       const std::map<PublicKey, Amount>& initial,
                       uint64_t seq);
Bytes commit_sign_bytes(const Bytes& channel_id, const PublicKey& vertex,
                        Amount amount);

Signature sign_setup(const KeyPair& keys, const XdGraph& graph,
                     const std::map<PublicKey, Amount>& initial, uint64_t seq);
Signature sign_commitment(const KeyPair& keys, const Bytes& channel_id,
                          Amount amount);

// Opens the channel at sequence 0 with empty commitments. Every vertex must
// fund (possibly zero) and sign the setup tuple.
Result<XdState> open_xd(const XdGraph& graph,
                        const std::map<PublicKey, Amount>& initial,
                        const std::map<PublicKey, Signature>& setup_sigs);

// ---------------------------------------------------------------------------
// Payments and solvency proofs
// ---------------------------------------------------------------------------
struct ProofEntry {
    PublicKey vertex;
    bool is_initial = false;  // initial funding vs forwarded commitment
    Amount amount = 0;
};

struct ProofChain {
    std::vector<ProofEntry> entries;
    Amount max_certifiable = 0;
};

// Funds a vertex can demonstrably pay: its initial deposit plus incoming
// commitments, each capped by what its sender can in turn certify. The
// walk visits every vertex at most once, so cycles terminate and no
// commitment funds itself.
Result<ProofChain> prove_funds(const XdState& state, const PublicKey& vertex,
                               Amount amount);

struct PayResult {
    XdState state;
    ProofChain proof;
};

// Raises the payer's cumulative commitment to `new_total` (commitments sign
// totals, never deltas, so replaying an old one is harmless).
Result<PayResult> pay(const XdState& state, const PublicKey& payer,
                      Amount new_total, const KeyPair& payer_keys);

// Of the published states, only the highest sequence number counts; for
// each vertex the maximal committed amount survives.
Result<XdState> merge_states(const std::vector<XdState>& states);

// ---------------------------------------------------------------------------
// Settlement
// ---------------------------------------------------------------------------
struct Settlement {
    std::map<PublicKey, Amount> flows;     // paid along each out-edge
    std::map<PublicKey, Amount> balances;  // initial + inflow - outflow
    uint64_t iterations = 0;
};

// Greatest fixpoint of f_v = min(commit_v, i0(v) + sum of incoming flows),
// started from f = commit. This solves the settlement optimization (verify
// against the brute-force oracle in the tests before trusting changes):
// maximize the total flow subject to per-vertex commitment caps and
// non-negative final balances.
Settlement settle(const XdState& state);

// Final state (empty graph and commitments, balances as the new initial
// assignment) requiring a fresh signature from every vertex.
Result<XdState> close_cooperative(
    const XdState& state, const std::map<PublicKey, Signature>& sigs);

}  // namespace dcwc::xd
