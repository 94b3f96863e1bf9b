// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/xd.hpp"

#include <algorithm>
#include <set>

namespace dcwc::xd {

bool XdGraph::has_vertex(const PublicKey& v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
}

const PublicKey* XdGraph::payee_of(const PublicKey& v) const {
    auto it = edges.find(v);
    return it == edges.end() ? nullptr : &it->second;
}

std::vector<PublicKey> XdGraph::payers_of(const PublicKey& v) const {
    std::vector<PublicKey> payers;
    for (const auto& [from, to] : edges) {
        if (to == v) payers.push_back(from);
    }
    return payers;
}

Result<XdGraph> make_graph(
    std::vector<PublicKey> vertices,
    const std::vector<std::pair<PublicKey, PublicKey>>& edges) {
    XdGraph graph;
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()),
                   vertices.end());
    graph.vertices = std::move(vertices);
    for (const auto& [from, to] : edges) {
        if (!graph.has_vertex(from) || !graph.has_vertex(to)) {
            return {Err::InvalidGraph, "edge endpoint is not a vertex"};
        }
        if (from == to) {
            return {Err::InvalidGraph, "self-payment edge"};
        }
        if (graph.edges.contains(from)) {
            return {Err::InvalidGraph, "vertex has two outgoing edges"};
        }
        graph.edges.emplace(from, to);
    }
    return graph;
}

Amount XdState::initial_of(const PublicKey& v) const {
    auto it = initial.find(v);
    return it == initial.end() ? 0 : it->second;
}

Amount XdState::committed(const PublicKey& v) const {
    auto it = commitments.find(v);
    return it == commitments.end() ? 0 : it->second.amount;
}

namespace {

Bytes graph_bytes(const XdGraph& graph) {
    Encoder enc;
    enc.field_u32(static_cast<uint32_t>(graph.vertices.size()));
    for (const auto& v : graph.vertices) enc.field(v.encode());
    enc.field_u32(static_cast<uint32_t>(graph.edges.size()));
    for (const auto& [from, to] : graph.edges) {
        enc.field(from.encode()).field(to.encode());
    }
    return enc.take();
}

Bytes initial_bytes(const std::map<PublicKey, Amount>& initial) {
    Encoder enc;
    enc.field_u32(static_cast<uint32_t>(initial.size()));
    for (const auto& [v, amount] : initial) {
        enc.field(v.encode()).field_u64(static_cast<uint64_t>(amount));
    }
    return enc.take();
}

}  // namespace

Bytes xd_channel_id(const XdGraph& graph,
                    const std::map<PublicKey, Amount>& initial) {
    Bytes digest = sha256(Encoder()
                              .field("xd.channel")
                              .field(graph_bytes(graph))
                              .field(initial_bytes(initial))
                              .take());
    digest.resize(8);
    return digest;
}

Bytes setup_sign_bytes(const XdGraph& graph,
                       const std::map<PublicKey, Amount>& initial,
                       uint64_t seq) {
    return Encoder()
        .field("xd.setup")
        .field(graph_bytes(graph))
        .field(initial_bytes(initial))
        .field_u64(seq)
        .take();
}

Bytes commit_sign_bytes(const Bytes& channel_id, const PublicKey& vertex,
                        Amount amount) {
    return Encoder()
        .field("xd.commit")
        .field(channel_id)
        .field(vertex.encode())
        .field_u64(static_cast<uint64_t>(amount))
        .take();
}

Signature sign_setup(const KeyPair& keys, const XdGraph& graph,
                     const std::map<PublicKey, Amount>& initial,
                     uint64_t seq) {
    return sign(keys, setup_sign_bytes(graph, initial, seq));
}

Signature sign_commitment(const KeyPair& keys, const Bytes& channel_id,
                          Amount amount) {
    return sign(keys, commit_sign_bytes(channel_id, keys.public_key, amount));
}

Result<XdState> open_xd(const XdGraph& graph,
                        const std::map<PublicKey, Amount>& initial,
                        const std::map<PublicKey, Signature>& setup_sigs) {
    for (const auto& [from, to] : graph.edges) {
        if (!graph.has_vertex(from) || !graph.has_vertex(to)) {
            return {Err::InvalidGraph, "edge endpoint is not a vertex"};
        }
    }
    for (const auto& [v, amount] : initial) {
        if (!graph.has_vertex(v)) {
            return {Err::InvalidGraph, "funded key is not a vertex"};
        }
        if (amount < 0) return {Err::InvalidParams, "negative funding"};
    }
    Bytes msg = setup_sign_bytes(graph, initial, 0);
    for (const auto& v : graph.vertices) {
        if (!initial.contains(v)) {
            return {Err::SetupIncomplete, "vertex missing from the funding"};
        }
        auto sig = setup_sigs.find(v);
        if (sig == setup_sigs.end() || !verify(v, msg, sig->second)) {
            return {Err::SetupIncomplete, "missing or invalid setup signature"};
        }
    }
    XdState state;
    state.graph = graph;
    state.initial = initial;
    state.seq = 0;
    state.setup_sigs = setup_sigs;
    return state;
}

namespace {

Amount certify(const XdState& state, const PublicKey& vertex,
               std::set<PublicKey>& visited, std::vector<ProofEntry>& entries) {
    visited.insert(vertex);
    Amount total = state.initial_of(vertex);
    if (total > 0) entries.push_back({vertex, true, total});
    for (const PublicKey& payer : state.graph.payers_of(vertex)) {
        if (visited.contains(payer)) continue;
        Amount promised = state.committed(payer);
        if (promised <= 0) continue;
        std::vector<ProofEntry> sub_entries;
        Amount backing = certify(state, payer, visited, sub_entries);
        Amount usable = std::min(promised, backing);
        if (usable <= 0) continue;
        entries.push_back({payer, false, promised});
        entries.insert(entries.end(), sub_entries.begin(), sub_entries.end());
        total += usable;
    }
    return total;
}

}  // namespace

Result<ProofChain> prove_funds(const XdState& state, const PublicKey& vertex,
                               Amount amount) {
    if (!state.graph.has_vertex(vertex)) {
        return {Err::InvalidParams, "unknown vertex"};
    }
    ProofChain chain;
    std::set<PublicKey> visited;
    chain.max_certifiable = certify(state, vertex, visited, chain.entries);
    if (chain.max_certifiable < amount) {
        return {Err::Unprovable, "incoming commitments cannot back the amount"};
    }
    return chain;
}

Result<PayResult> pay(const XdState& state, const PublicKey& payer,
                      Amount new_total, const KeyPair& payer_keys) {
    if (payer_keys.public_key != payer) {
        return {Err::InvalidParams, "keys do not match the payer"};
    }
    if (state.graph.payee_of(payer) == nullptr) {
        return {Err::InvalidParams, "payer has no outgoing edge"};
    }
    if (new_total < state.committed(payer)) {
        return {Err::DecreasingCommitment,
                "commitments sign cumulative totals and never decrease"};
    }
    auto proof = prove_funds(state, payer, new_total);
    if (!proof.ok()) {
        return Error{Err::InsolventPayment, proof.error().message};
    }
    PayResult result{state, proof.value()};
    Bytes channel_id = xd_channel_id(state.graph, state.initial);
    result.state.commitments[payer] =
        Commitment{new_total, sign_commitment(payer_keys, channel_id,
                                              new_total)};
    return result;
}

Result<XdState> merge_states(const std::vector<XdState>& states) {
    if (states.empty()) return {Err::InvalidParams, "nothing to merge"};
    uint64_t max_seq = 0;
    for (const auto& s : states) max_seq = std::max(max_seq, s.seq);

    const XdState* base = nullptr;
    for (const auto& s : states) {
        if (s.seq != max_seq) continue;  // superseded states have no effect
        if (base == nullptr) {
            base = &s;
            continue;
        }
        if (graph_bytes(s.graph) != graph_bytes(base->graph) ||
            s.initial != base->initial) {
            return {Err::MixedChannelStates,
                    "states describe different channels"};
        }
    }

    XdState merged = *base;
    for (const auto& s : states) {
        if (s.seq != max_seq) continue;
        for (const auto& [v, commitment] : s.commitments) {
            auto it = merged.commitments.find(v);
            if (it == merged.commitments.end() ||
                commitment.amount > it->second.amount) {
                merged.commitments[v] = commitment;
            }
        }
    }
    return merged;
}

Settlement settle(const XdState& state) {
    Settlement out;
    // Start each flow at the full committed amount; vertices without an
    // out-edge or commitment pay nothing.
    for (const auto& v : state.graph.vertices) {
        Amount cap = state.graph.payee_of(v) != nullptr ? state.committed(v)
                                                        : 0;
        out.flows[v] = std::max<Amount>(cap, 0);
    }

    bool changed = true;
    while (changed) {
        changed = false;
        ++out.iterations;
        for (const auto& v : state.graph.vertices) {
            Amount inflow = 0;
            for (const PublicKey& payer : state.graph.payers_of(v)) {
                inflow += out.flows[payer];
            }
            Amount cap = state.initial_of(v) + inflow;
            if (out.flows[v] > cap) {
                out.flows[v] = cap;
                changed = true;
            }
        }
    }

    for (const auto& v : state.graph.vertices) {
        Amount inflow = 0;
        for (const PublicKey& payer : state.graph.payers_of(v)) {
            inflow += out.flows[payer];
        }
        out.balances[v] = state.initial_of(v) + inflow - out.flows[v];
    }
    return out;
}

Result<XdState> close_cooperative(
    const XdState& state, const std::map<PublicKey, Signature>& sigs) {
    Settlement settled = settle(state);

    XdGraph final_graph;
    final_graph.vertices = state.graph.vertices;  // no edges remain

    std::map<PublicKey, Amount> final_initial;
    for (const auto& v : state.graph.vertices) {
        final_initial[v] = settled.balances[v];
    }

    Bytes msg = setup_sign_bytes(final_graph, final_initial, state.seq);
    for (const auto& v : state.graph.vertices) {
        auto it = sigs.find(v);
        if (it == sigs.end() || !verify(v, msg, it->second)) {
            return {Err::MissingSignature,
                    "cooperative close needs every vertex"};
        }
    }

    XdState closed;
    closed.graph = final_graph;
    closed.initial = final_initial;
    closed.seq = state.seq;
    closed.setup_sigs = sigs;
    return closed;
}

}  // namespace dcwc::xd
