// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/channel.hpp"

#include "dcwc/protocol.hpp"

namespace dcwc {

Bytes update_sign_bytes(const Bytes& channel_id, uint64_t seq, Amount balance_a,
                        Amount balance_b) {
    return Encoder()
        .field(channel_id)
        .field_u64(seq)
        .field_u64(static_cast<uint64_t>(balance_a))
        .field_u64(static_cast<uint64_t>(balance_b))
        .take();
}

Bytes serialize_update(const UpdateTx& update) {
    return Encoder()
        .field(update.channel_id)
        .field_u64(update.seq)
        .field_u64(static_cast<uint64_t>(update.balance_a))
        .field_u64(static_cast<uint64_t>(update.balance_b))
        .field(update.sig_a.bytes)
        .field(update.sig_b.bytes)
        .take();
}

Bytes serialize_envelope(const Envelope& layer) {
    return Encoder()
        .field_u32(layer.hop_id)
        .field(layer.recipient.encode())
        .field(layer.signer.encode())
        .field(layer.signature.bytes)
        .take();
}

Bytes serialize_message_prefix(const WatchMessage& m, size_t layer_count) {
    Encoder enc;
    enc.field(serialize_update(m.payload));
    for (size_t i = 0; i < layer_count && i < m.layers.size(); ++i) {
        enc.field(serialize_envelope(m.layers[i]));
    }
    return enc.take();
}

Bytes serialize_message(const WatchMessage& m) {
    return serialize_message_prefix(m, m.layers.size());
}

Bytes layer_sign_bytes(uint32_t hop_id, const PublicKey& recipient,
                       const Bytes& inner) {
    return Encoder()
        .field_u32(hop_id)
        .field(recipient.encode())
        .field(inner)
        .take();
}

Bytes message_digest(const WatchMessage& m) {
    return sha256(serialize_message(m));
}

UpdateTx sign_update(const Bytes& channel_id, uint64_t seq, Amount balance_a,
                     Amount balance_b, const KeyPair& keys_a,
                     const KeyPair& keys_b) {
    UpdateTx update;
    update.channel_id = channel_id;
    update.seq = seq;
    update.balance_a = balance_a;
    update.balance_b = balance_b;
    Bytes msg = update_sign_bytes(channel_id, seq, balance_a, balance_b);
    update.sig_a = sign(keys_a, msg);
    update.sig_b = sign(keys_b, msg);
    return update;
}

bool update_signatures_valid(const ChannelParams& params,
                             const UpdateTx& update) {
    Bytes msg = update_sign_bytes(update.channel_id, update.seq,
                                  update.balance_a, update.balance_b);
    return verify(params.party_a, msg, update.sig_a) &&
           verify(params.party_b, msg, update.sig_b);
}

Result<Channel> new_channel(const ChannelParams& params, const KeyPair& keys_a,
                            const KeyPair& keys_b) {
    if (params.fund_a < 0 || params.fund_b < 0 || params.rho < 0) {
        return {Err::InvalidParams, "negative funding"};
    }
    if (params.fund_a + params.fund_b <= 0) {
        return {Err::InvalidParams, "channel must hold funds"};
    }
    if (params.fanout_n < 1 || params.rounds_l < 1 ||
        params.blocks_per_round_b < 1) {
        return {Err::InvalidParams, "N, l, b must be positive"};
    }
    // The commit window must finish before the settlement timelock expires.
    if (static_cast<uint64_t>(params.rounds_l) * params.blocks_per_round_b >=
        params.settlement_timelock_t) {
        return {Err::InvalidParams, "l*b must be < settlement timelock t"};
    }
    if (keys_a.public_key != params.party_a ||
        keys_b.public_key != params.party_b) {
        return {Err::InvalidParams, "party keys do not match params"};
    }
    Channel ch;
    ch.params = params;
    ch.genesis = sign_update(params.channel_id, 0, params.fund_a,
                             params.fund_b, keys_a, keys_b);
    return ch;
}

Result<UpdateTx> make_update(const ChannelParams& params, const UpdateTx& prev,
                             Amount delta, const KeyPair& keys_a,
                             const KeyPair& keys_b) {
    Amount new_a = prev.balance_a - delta;
    Amount new_b = prev.balance_b + delta;
    if (new_a < 0 || new_b < 0) {
        return {Err::InsufficientFunds, "update would overdraw a balance"};
    }
    return sign_update(params.channel_id, prev.seq + 1, new_a, new_b, keys_a,
                       keys_b);
}

const WatchMessage* WatchtowerState::slot(const Bytes& channel_id) const {
    auto it = slots.find(channel_id);
    return it == slots.end() ? nullptr : &it->second;
}

bool store_best(WatchtowerState& state, const WatchMessage& m,
                const ChannelParams& params) {
    if (!verify_envelope_chain(m, params).ok()) return false;
    auto it = state.slots.find(m.payload.channel_id);
    if (it == state.slots.end()) {
        state.slots.emplace(m.payload.channel_id, m);
        return true;
    }
    const WatchMessage& held = it->second;
    // Highest sequence wins; at equal sequence keep the shallower message,
    // which has the better inclusion probability.
    if (m.payload.seq > held.payload.seq ||
        (m.payload.seq == held.payload.seq && m.depth() < held.depth())) {
        it->second = m;
        return true;
    }
    return false;
}

}  // namespace dcwc
