// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dcwc/protocol.hpp"
#include "dcwc/rng.hpp"

namespace dcwc {

enum class PayoffRole {
    WatchtowerShare,
    MinerFee,
    PartyRefund,
};

const char* payoff_role_name(PayoffRole role);

struct PayoffRecord {
    PublicKey recipient;
    Amount amount = 0;
    Bytes channel_id;
    PayoffRole role = PayoffRole::WatchtowerShare;
};

struct FundingRecord {
    ChannelParams params;
};

using BlockEntry = std::variant<FundingRecord, SettlementTx, PofSubmission>;

struct Block {
    uint64_t height = 0;
    std::optional<BlockEntry> entry;
};

struct ChannelStatus {
    ChannelParams params;
    std::optional<SettlementTx> settlement;
    std::optional<PofSubmission> included_proof;
    uint64_t proof_height = 0;
    bool finalized = false;
};

struct RejectionRecord {
    Bytes message_digest;
    PublicKey submitter;
    Error error;
};

// ---------------------------------------------------------------------------
// Linear chain oracle: block production, mempool, miner-side validation,
// uniform selection among valid proofs. No forks, no difficulty.
// ---------------------------------------------------------------------------
class SimChain {
public:
    explicit SimChain(Rng miner_rng);

    uint64_t height() const { return blocks_.back().height; }
    const std::vector<Block>& blocks() const { return blocks_; }

    void register_channel(const ChannelParams& params);
    Status publish_settlement(const SettlementTx& settlement);
    void submit(const PofSubmission& sub);

    // Network observation during Phase 1. Every forwarded message leaves a
    // (path prefix, hop id) fingerprint; the duplicate filter is enforced
    // against everything the network has ever seen, level by level.
    void observe_message(const WatchMessage& m);

    // Mines the next block: pending funding/settlement entries first, then
    // at most one valid proof of fraud, chosen uniformly at random among the
    // valid submissions of one channel. Rejections are recorded per block.
    Block mine_block();

    const std::vector<RejectionRecord>& last_rejections() const {
        return rejections_;
    }

    const ChannelStatus* channel(const Bytes& channel_id) const;
    ChannelStatus* channel_mut(const Bytes& channel_id);
    void mark_finalized(const Bytes& channel_id);

    // Miner-as-watchtower policy: when set, a miner holding a valid
    // submission of its own includes that one instead of drawing at random.
    void set_miner(const PublicKey& key, bool prefer_own) {
        miner_key_ = key;
        prefer_own_ = prefer_own;
    }
    const PublicKey& miner_key() const { return miner_key_; }

    bool duplicate_conflict(const WatchMessage& m) const;

    // One line per block: height, kind, channel, entry digest.
    std::string dump() const;

    size_t mempool_size() const { return mempool_.size(); }

private:
    friend Status validate_pof(const PofSubmission& sub, const SimChain& chain,
                               const ChannelParams& params, uint64_t at_height);

    void note_layers(const WatchMessage& m);

    std::vector<Block> blocks_;
    std::deque<BlockEntry> pending_;
    std::vector<PofSubmission> mempool_;
    std::map<Bytes, ChannelStatus> channels_;
    // (path-prefix digest, signer digest, hop id) -> sub-message digest.
    std::map<std::tuple<Bytes, Bytes, uint32_t>, Bytes> seen_layers_;
    std::vector<RejectionRecord> rejections_;
    Rng rng_;
    PublicKey miner_key_;
    bool prefer_own_ = false;
};

// The seven miner-side checks, applied in order; the reason names the first
// failed check:
//   1 PriorProof      no proof for this channel is on the chain yet
//   2 BadUpdate       payload is a protocol-valid, dually signed update
//   3 NotNewer        payload seq exceeds the settled seq
//   4 IdOutOfRange    every hop id lies in 1..N
//   5 DuplicateId     no same-path same-id sibling seen at any level
//   6 RoundMismatch   signature count equals rounds elapsed since settlement
//   7 ChainLinkBroken layer-to-layer key linkage and signatures hold
// A plaintext path that does not mirror the envelope is discarded before any
// of these run (PlaintextMismatch).
Status validate_pof(const PofSubmission& sub, const SimChain& chain,
                    const ChannelParams& params, uint64_t at_height);

// Splits the cheater's reward pool: each of the d path watchtowers gets
// floor((rho - fee)/d), the miner gets the fee, and the integer residue goes
// back to the honest party.
Result<std::vector<PayoffRecord>> distribute_payoff(
    const PofSubmission& pof, const ChannelParams& params, Amount fee,
    const PublicKey& miner, const PublicKey& honest_party);

struct Outcome {
    enum class Kind { FraudProven, SettledClean } kind = Kind::SettledClean;
    std::vector<PayoffRecord> payouts;
    std::optional<PofSubmission> proof;
};

// Closes the channel once either a proof is on chain or the l-round window
// has elapsed. Fraud: the honest party is awarded the entire channel stake
// plus their own reserve back, and the cheater's reserve is distributed.
// Clean: settled balances are paid out and both reserves refunded.
Result<Outcome> finalize_channel(SimChain& chain, const ChannelParams& params,
                                 Amount fee);

}  // namespace dcwc
