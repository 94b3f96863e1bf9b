// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dcwc/common.hpp"
#include "dcwc/crypto.hpp"

namespace dcwc {

// Coin amounts are integers in the smallest unit. No floating point ever
// touches ledger state, so conservation checks are exact.
using Amount = int64_t;

struct ChannelParams {
    Bytes channel_id;
    PublicKey party_a;
    PublicKey party_b;
    Amount fund_a = 0;
    Amount fund_b = 0;
    // Reward pool escrowed per party at funding. Only the cheater's pool is
    // distributed; the honest party's is refunded.
    Amount rho = 0;
    uint32_t fanout_n = 1;       // N, messages per fan-out
    uint32_t rounds_l = 1;       // l, commit rounds
    uint32_t blocks_per_round_b = 1;  // b
    uint32_t settlement_timelock_t = 2;  // t, must satisfy l*b < t

    Amount total_funds() const { return fund_a + fund_b; }
    bool is_party(const PublicKey& pk) const {
        return pk == party_a || pk == party_b;
    }
};

struct UpdateTx {
    Bytes channel_id;
    uint64_t seq = 0;
    Amount balance_a = 0;
    Amount balance_b = 0;
    Signature sig_a;
    Signature sig_b;
};

struct SettlementTx {
    UpdateTx update;
    PublicKey publisher;
    uint64_t published_height = 0;
};

// One nesting layer of a watch message: the sender signed
// (hop_id, recipient, inner bytes) and handed the result to `recipient`.
struct Envelope {
    uint32_t hop_id = 0;
    PublicKey recipient;
    PublicKey signer;
    Signature signature;
};

// Fraud-proof carrier. `layers` is ordered innermost first; layer 0 was
// produced by a channel party, each further layer by the watchtower that
// forwarded the message. Depth = layers.size().
struct WatchMessage {
    std::vector<Envelope> layers;
    UpdateTx payload;

    uint32_t depth() const { return static_cast<uint32_t>(layers.size()); }
    const Envelope& outermost() const { return layers.back(); }
    // The actor currently holding the message.
    const PublicKey& holder() const { return layers.back().recipient; }
};

// ---------------------------------------------------------------------------
// Canonical serialization (shared signing/digest layout)
// ---------------------------------------------------------------------------
Bytes update_sign_bytes(const Bytes& channel_id, uint64_t seq, Amount balance_a,
                        Amount balance_b);
Bytes serialize_update(const UpdateTx& update);
Bytes serialize_envelope(const Envelope& layer);
// Payload plus the first `layer_count` layers.
Bytes serialize_message_prefix(const WatchMessage& m, size_t layer_count);
Bytes serialize_message(const WatchMessage& m);
// Content covered by a layer signature: (hop_id, recipient, inner bytes).
Bytes layer_sign_bytes(uint32_t hop_id, const PublicKey& recipient,
                       const Bytes& inner);
Bytes message_digest(const WatchMessage& m);

// ---------------------------------------------------------------------------
// Lifecycle operations
// ---------------------------------------------------------------------------
struct Channel {
    ChannelParams params;
    UpdateTx genesis;  // seq 0, signed by both parties
};

Result<Channel> new_channel(const ChannelParams& params, const KeyPair& keys_a,
                            const KeyPair& keys_b);

// delta > 0 moves funds from A to B; delta < 0 the other way.
Result<UpdateTx> make_update(const ChannelParams& params, const UpdateTx& prev,
                             Amount delta, const KeyPair& keys_a,
                             const KeyPair& keys_b);

UpdateTx sign_update(const Bytes& channel_id, uint64_t seq, Amount balance_a,
                     Amount balance_b, const KeyPair& keys_a,
                     const KeyPair& keys_b);

bool update_signatures_valid(const ChannelParams& params,
                             const UpdateTx& update);

// ---------------------------------------------------------------------------
// Watchtower storage
//
// One slot per watched channel: the message with the highest payload
// sequence seen so far, ties broken by smaller depth. Anything else can be
// discarded, because the highest-sequence message proves fraud for every
// settlement an older one could have exposed.
// ---------------------------------------------------------------------------
struct WatchtowerState {
    KeyPair identity;
    std::map<Bytes, WatchMessage> slots;  // channel_id -> best message

    const WatchMessage* slot(const Bytes& channel_id) const;
};

// Returns true when the slot changed. Messages that fail envelope
// verification are ignored.
bool store_best(WatchtowerState& state, const WatchMessage& m,
                const ChannelParams& params);

}  // namespace dcwc
