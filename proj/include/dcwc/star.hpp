// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcwc/channel.hpp"

namespace dcwc::star {

// ---------------------------------------------------------------------------
// Script: the six opcodes the claim template needs, nothing more.
//
// Byte encoding (pinned, golden vectors in test data):
//   PUSH  0x01 + 1-byte length + data      IF     0x63
//   ELSE  0x67                             ENDIF  0x68
//   CHECKSEQUENCEVERIFY 0xb2               CHECKSIG 0xac
// ---------------------------------------------------------------------------
enum class Opcode : uint8_t {
    Push = 0x01,
    If = 0x63,
    Else = 0x67,
    EndIf = 0x68,
    CheckSequenceVerify = 0xb2,
    CheckSig = 0xac,
};

struct ScriptOp {
    Opcode op = Opcode::Push;
    Bytes data;  // Push only
    bool operator==(const ScriptOp&) const = default;
};

struct Script {
    std::vector<ScriptOp> ops;
    Bytes encode() const;
    bool empty() const { return ops.empty(); }
    bool operator==(const Script&) const = default;
};

// PUSH(pk) CHECKSIG
Script key_lock_script(const PublicKey& pk);

// The two-branch claim template:
//   IF    <b> CSV <watchtower pk> CHECKSIG
//   ELSE  <sender pk> CHECKSIG
//   ENDIF
// The watchtower can sweep once the output is b blocks old; the sender can
// reclaim at any age.
Result<Script> compile_script(const PublicKey& watchtower,
                              const PublicKey& sender, uint32_t timelock);

struct Witness {
    Signature signature;
    bool if_branch = false;
};

struct ScriptCtx {
    Bytes tx_digest;        // what the signature covers
    uint32_t input_age = 0;  // confirmations of the output being spent
};

bool eval_script(const Script& script, const Witness& witness,
                 const ScriptCtx& ctx);

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------
struct TxInput {
    Bytes parent_txid;
    uint32_t vout = 0;
    uint32_t relative_timelock = 0;  // parent confirmations required
};

struct TxOutput {
    Amount amount = 0;
    Script script;  // empty script = open, claimable by the next hop
};

struct StarTx {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    PublicKey owner;  // creator; ELSE key for claims carved from this tx

    Bytes txid() const;
    std::optional<size_t> open_vout() const;
    Amount output_total() const;
};

struct InvalidationTx {
    StarTx tx;
    uint64_t revoked_seq = 0;
};

// Spends the revoked state, pays the beneficiary everything except an open
// remainder left as the forwarding incentive.
InvalidationTx build_invalidation(const UpdateTx& revoked,
                                  const ChannelParams& params,
                                  const PublicKey& beneficiary,
                                  Amount remainder);

// Child transaction a watchtower derives before forwarding: spends the open
// output with a relative timelock of `timelock`, locks `claim` behind the
// two-branch template and leaves the rest open for the next hop.
Result<StarTx> forward_with_claim(const StarTx& parent,
                                  const KeyPair& watchtower, Amount claim,
                                  uint32_t timelock, Amount min_remainder = 1);

// ---------------------------------------------------------------------------
// Height bookkeeping for relative timelocks
// ---------------------------------------------------------------------------
class HeightSim {
public:
    explicit HeightSim(uint64_t height = 0) : height_(height) {}

    uint64_t height() const { return height_; }
    void advance_to(uint64_t h);
    // Registers a parent that exists outside the star DAG (the settlement).
    void seed(const Bytes& txid, uint64_t h);

    // Includes the transaction at the current height; fails when any input's
    // parent is missing or not old enough.
    Status confirm(const StarTx& tx);

    std::optional<uint64_t> height_of(const Bytes& txid) const;

private:
    uint64_t height_ = 0;
    std::map<Bytes, uint64_t> confirmed_;
};

// Earliest heights at which each element of a forwarding chain can land,
// given the first element confirms at `base`. Strictly increasing when
// every hop carries a positive relative timelock.
std::vector<uint64_t> landing_heights(const std::vector<StarTx>& chain,
                                      uint64_t base);

// ---------------------------------------------------------------------------
// Watchtower storage: one held chain per revoked update (O(n) overall).
// ---------------------------------------------------------------------------
struct HeldChain {
    std::vector<StarTx> chain;  // invalidation first, then forwards
    uint64_t revoked_seq = 0;
};

struct StarWatchState {
    std::map<Bytes, std::vector<HeldChain>> per_channel;

    void hold(const Bytes& channel_id, HeldChain chain);
    const HeldChain* chain_for(const Bytes& channel_id,
                               uint64_t revoked_seq) const;
    size_t count(const Bytes& channel_id) const;
};

// ---------------------------------------------------------------------------
// Settlement playback
// ---------------------------------------------------------------------------
struct StarPayout {
    PublicKey recipient;
    Amount amount = 0;
    std::string note;
};

struct StarSettleResult {
    bool invalidated = false;
    // 0 = the message sender acted directly; k = watchtower at hop k won.
    size_t winner_hop = 0;
    std::vector<StarPayout> payouts;
    std::vector<uint64_t> landings;
};

// Plays the forwarding chain against the height rules after a revoked
// settlement at `settle_height`. online[0] is the sender, online[k] the
// hop-k watchtower. The earliest eligible online holder wins; payouts
// follow the transaction outputs on chain at the end of the window.
StarSettleResult settle_star(const std::vector<StarTx>& forwarding_chain,
                             const std::vector<bool>& online,
                             uint64_t settle_height, uint32_t timelock_t);

}  // namespace dcwc::star
