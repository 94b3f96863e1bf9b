// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <optional>
#include <vector>

#include "dcwc/channel.hpp"
#include "dcwc/rng.hpp"

namespace dcwc {

// ---------------------------------------------------------------------------
// Topology
//
// Neighbor discovery is unspecified by the protocol, so the simulation pins
// it down: each sender's fan-out is a seeded shuffle of the actor set
// excluding the sender, stable for the lifetime of the topology. Within one
// fan-out all recipients are distinct; the same actor may appear in several
// senders' fan-outs (identity reuse across tree positions is allowed).
// ---------------------------------------------------------------------------
class Topology {
public:
    Topology(std::vector<PublicKey> watchtowers, const Rng& rng);

    // Up to `n` distinct neighbors for this sender, slot order fixed.
    std::vector<PublicKey> neighbors(const PublicKey& sender, uint32_t n) const;

    const std::vector<PublicKey>& watchtowers() const { return watchtowers_; }

private:
    std::vector<PublicKey> watchtowers_;
    Rng seed_rng_;
};

struct PathEntry {
    uint32_t hop_id = 0;
    PublicKey recipient;
    bool operator==(const PathEntry&) const = default;
};

// A fraud-proof submission: the nested message plus its path in plaintext,
// outermost hop first. The plaintext lets the network discard garbage
// without unwrapping; a mismatch with the envelope is discarded outright.
struct PofSubmission {
    WatchMessage message;
    std::vector<PathEntry> plaintext_path;
    PublicKey submitter;
    uint64_t submit_height = 0;
};

std::vector<PathEntry> plaintext_path_of(const WatchMessage& m);

// One nesting layer: signs (hop_id, recipient, inner bytes) with the
// sender's key and attaches the envelope. No validation; disclose and
// cascade are the honest users, the deviation harness misuses it on purpose.
WatchMessage wrap_message(const KeyPair& signer, uint32_t hop_id,
                          const PublicKey& recipient,
                          const WatchMessage& inner);

// ---------------------------------------------------------------------------
// Phase 1: message-tree construction
// ---------------------------------------------------------------------------
struct FanOut {
    std::vector<WatchMessage> messages;
    // Set when fewer distinct neighbors existed than requested; the fan-out
    // then carries as many messages as could be addressed.
    bool degenerate = false;
};

// Party-side fan-out of a freshly signed update: N depth-1 messages with
// hop ids 1..N to pairwise-distinct recipients.
Result<FanOut> disclose(const KeyPair& party, const UpdateTx& update,
                        const ChannelParams& params, const Topology& topology,
                        uint32_t n);

// Watchtower-side re-fan of a received message. Stops silently once the new
// depth would exceed l: deeper messages can never be included, so forwarding
// them is pointless.
Result<FanOut> cascade(const KeyPair& receiver, const WatchMessage& incoming,
                       const ChannelParams& params, const Topology& topology,
                       uint32_t n, uint32_t l);

// Full structural verification of a watch message. Returns the first
// violated check as a reason code:
//   EmptyMessage, BadPayload, InnermostNotParty, IdOutOfRange,
//   ChainLinkBroken, BadLayerSignature.
Status verify_envelope_chain(const WatchMessage& m,
                             const ChannelParams& params);

// ---------------------------------------------------------------------------
// Phase 2: round-scheduled submission
// ---------------------------------------------------------------------------
struct ScheduledCommit {
    Bytes channel_id;
    uint64_t submit_height = 0;
};

// A depth-d holder owes its submission d rounds after the settlement hits
// the chain; returns nothing when the stored message is not a proof of
// fraud for this settlement (stored seq must exceed the settled seq).
std::optional<ScheduledCommit> on_settlement(const WatchtowerState& state,
                                             const SettlementTx& settlement,
                                             const ChannelParams& params);

PofSubmission build_submission(const WatchtowerState& state,
                               const Bytes& channel_id, uint64_t height);

}  // namespace dcwc
