// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/protocol.hpp"

#include <algorithm>

namespace dcwc {

Topology::Topology(std::vector<PublicKey> watchtowers, const Rng& rng)
    : watchtowers_(std::move(watchtowers)), seed_rng_(rng) {
    std::sort(watchtowers_.begin(), watchtowers_.end());
}

std::vector<PublicKey> Topology::neighbors(const PublicKey& sender,
                                           uint32_t n) const {
    std::vector<PublicKey> pool;
    pool.reserve(watchtowers_.size());
    for (const auto& w : watchtowers_) {
        if (w != sender) pool.push_back(w);
    }
    // Keyed by the sender only, so a sender's fan-out is identical for every
    // message it ever forwards.
    Rng r = seed_rng_.substream(to_hex(sha256(sender.encode())));
    r.shuffle(pool);
    if (pool.size() > n) pool.resize(n);
    return pool;
}

std::vector<PathEntry> plaintext_path_of(const WatchMessage& m) {
    std::vector<PathEntry> path;
    path.reserve(m.layers.size());
    for (auto it = m.layers.rbegin(); it != m.layers.rend(); ++it) {
        path.push_back({it->hop_id, it->recipient});
    }
    return path;
}

WatchMessage wrap_message(const KeyPair& signer, uint32_t hop_id,
                          const PublicKey& recipient,
                          const WatchMessage& inner) {
    WatchMessage out = inner;
    Envelope layer;
    layer.hop_id = hop_id;
    layer.recipient = recipient;
    layer.signer = signer.public_key;
    layer.signature = sign(
        signer, layer_sign_bytes(hop_id, recipient, serialize_message(inner)));
    out.layers.push_back(std::move(layer));
    return out;
}

Result<FanOut> disclose(const KeyPair& party, const UpdateTx& update,
                        const ChannelParams& params, const Topology& topology,
                        uint32_t n) {
    if (!update_signatures_valid(params, update)) {
        return {Err::BadPayload, "update not signed by both parties"};
    }
    if (!params.is_party(party.public_key)) {
        return {Err::InvalidParams, "discloser is not a channel party"};
    }
    FanOut out;
    auto recipients = topology.neighbors(party.public_key, n);
    out.degenerate = recipients.size() < n;
    WatchMessage base;
    base.payload = update;
    for (uint32_t i = 0; i < recipients.size(); ++i) {
        out.messages.push_back(wrap_message(party, i + 1, recipients[i], base));
    }
    return out;
}

Result<FanOut> cascade(const KeyPair& receiver, const WatchMessage& incoming,
                       const ChannelParams& params, const Topology& topology,
                       uint32_t n, uint32_t l) {
    if (Status st = verify_envelope_chain(incoming, params); !st.ok()) {
        return st.error();
    }
    FanOut out;
    if (incoming.depth() + 1 > l) return out;  // depth guard
    auto recipients = topology.neighbors(receiver.public_key, n);
    out.degenerate = recipients.size() < n;
    for (uint32_t i = 0; i < recipients.size(); ++i) {
        out.messages.push_back(wrap_message(receiver, i + 1, recipients[i], incoming));
    }
    return out;
}

Status verify_envelope_chain(const WatchMessage& m,
                             const ChannelParams& params) {
    if (m.layers.empty()) return {Err::EmptyMessage, "no layers"};
    if (m.payload.channel_id != params.channel_id) {
        return {Err::BadPayload, "payload channel mismatch"};
    }
    if (m.payload.balance_a + m.payload.balance_b != params.total_funds()) {
        return {Err::BadPayload, "payload violates conservation"};
    }
    if (!update_signatures_valid(params, m.payload)) {
        return {Err::BadPayload, "payload signatures invalid"};
    }
    for (const Envelope& layer : m.layers) {
        if (layer.hop_id < 1 || layer.hop_id > params.fanout_n) {
            return {Err::IdOutOfRange, "hop id outside 1..N"};
        }
    }
    for (size_t k = 1; k < m.layers.size(); ++k) {
        // Whoever received layer k-1 must be the one who signed layer k.
        if (m.layers[k].signer != m.layers[k - 1].recipient) {
            return {Err::ChainLinkBroken, "layer signer is not prior recipient"};
        }
    }
    if (!params.is_party(m.layers.front().signer)) {
        return {Err::InnermostNotParty, "innermost signer is not a party"};
    }
    for (size_t k = 0; k < m.layers.size(); ++k) {
        const Envelope& layer = m.layers[k];
        Bytes signed_bytes = layer_sign_bytes(layer.hop_id, layer.recipient,
                                              serialize_message_prefix(m, k));
        if (!verify(layer.signer, signed_bytes, layer.signature)) {
            return {Err::BadLayerSignature, "layer signature invalid"};
        }
    }
    return ok_status();
}

std::optional<ScheduledCommit> on_settlement(const WatchtowerState& state,
                                             const SettlementTx& settlement,
                                             const ChannelParams& params) {
    const WatchMessage* held = state.slot(settlement.update.channel_id);
    if (held == nullptr) return std::nullopt;
    if (held->payload.seq <= settlement.update.seq) return std::nullopt;
    ScheduledCommit commit;
    commit.channel_id = settlement.update.channel_id;
    commit.submit_height =
        settlement.published_height +
        static_cast<uint64_t>(held->depth()) * params.blocks_per_round_b;
    return commit;
}

PofSubmission build_submission(const WatchtowerState& state,
                               const Bytes& channel_id, uint64_t height) {
    PofSubmission sub;
    const WatchMessage* held = state.slot(channel_id);
    if (held != nullptr) {
        sub.message = *held;
        sub.plaintext_path = plaintext_path_of(*held);
    }
    sub.submitter = state.identity.public_key;
    sub.submit_height = height;
    return sub;
}

}  // namespace dcwc
