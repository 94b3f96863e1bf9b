// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <map>
#include <vector>

#include "dcwc/protocol.hpp"
#include "dcwc/rng.hpp"

namespace dcwc::test {

// A channel with a pool of watchtower identities, everything keyed off
// deterministic seeds so tests are reproducible.
struct Net {
    KeyPair keys_a;
    KeyPair keys_b;
    ChannelParams params;
    std::vector<KeyPair> tower_keys;
    std::map<Bytes, KeyPair> by_pk;

    Net(uint32_t n, uint32_t l, size_t towers,
        Scheme scheme = Scheme::HmacSim) {
        keys_a = keygen(scheme, 100);
        keys_b = keygen(scheme, 101);
        params.channel_id = Bytes{'n', 'e', 't'};
        params.party_a = keys_a.public_key;
        params.party_b = keys_b.public_key;
        params.fund_a = 10;
        params.fund_b = 10;
        params.rho = 12;
        params.fanout_n = n;
        params.rounds_l = l;
        params.blocks_per_round_b = 1;
        params.settlement_timelock_t = n * l + 10;
        for (size_t i = 0; i < towers; ++i) {
            tower_keys.push_back(keygen(scheme, 1000 + i));
            by_pk[tower_keys.back().public_key.encode()] = tower_keys.back();
        }
    }

    Topology topology(uint64_t seed = 7) const {
        std::vector<PublicKey> pks;
        for (const auto& k : tower_keys) pks.push_back(k.public_key);
        return Topology(pks, Rng(seed).substream("topology"));
    }

    UpdateTx update(uint64_t seq) const {
        return sign_update(params.channel_id, seq, params.fund_a,
                           params.fund_b, keys_a, keys_b);
    }

    const KeyPair& keys_of(const PublicKey& pk) const {
        return by_pk.at(pk.encode());
    }
};

// Wraps without any protocol-side validation; lets tests build malformed
// messages that honest code refuses to produce.
inline WatchMessage wrap_raw(const KeyPair& signer, uint32_t hop_id,
                             const PublicKey& recipient,
                             const WatchMessage& inner) {
    WatchMessage out = inner;
    Envelope layer;
    layer.hop_id = hop_id;
    layer.recipient = recipient;
    layer.signer = signer.public_key;
    layer.signature = sign(
        signer, layer_sign_bytes(hop_id, recipient, serialize_message(inner)));
    out.layers.push_back(layer);
    return out;
}

inline WatchMessage bare_message(const UpdateTx& payload) {
    WatchMessage m;
    m.payload = payload;
    return m;
}

// Full honest fan-out; layers[d-1] holds the N^d messages of depth d.
inline std::vector<std::vector<WatchMessage>> honest_tree(
    const Net& net, const Topology& topo, const UpdateTx& update) {
    std::vector<std::vector<WatchMessage>> layers;
    auto fan =
        disclose(net.keys_b, update, net.params, topo, net.params.fanout_n);
    layers.push_back(fan.value().messages);
    for (uint32_t depth = 1; depth < net.params.rounds_l; ++depth) {
        std::vector<WatchMessage> next;
        for (const auto& m : layers.back()) {
            auto out = cascade(net.keys_of(m.holder()), m, net.params, topo,
                               net.params.fanout_n, net.params.rounds_l);
            for (auto& c : out.value().messages) next.push_back(c);
        }
        layers.push_back(next);
    }
    return layers;
}

inline PofSubmission submission_for(const Net& net, const WatchMessage& m,
                                    uint64_t height) {
    PofSubmission sub;
    sub.message = m;
    sub.plaintext_path = plaintext_path_of(m);
    sub.submitter = m.holder();
    sub.submit_height = height;
    return sub;
}

}  // namespace dcwc::test
