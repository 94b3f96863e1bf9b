// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcwc/chain.hpp"

namespace dcwc {

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------
enum class StrategyKind {
    Honest,
    ForgeExtraMessages,   // extra children with hop ids above N
    DuplicateId,          // extra children reusing an already-used hop id
    EarlyCommit,          // submit rounds earlier than the message depth
    LateCommit,           // submit rounds later than the message depth
    WithholdForward,      // never cascade
    StoreStaleProof,      // keep a superseded update instead of the newest
    ShortenDepthAttempt,  // submit a self-signed depth-1 forgery
};

const char* strategy_name(StrategyKind kind);

struct StrategyProfile {
    StrategyKind kind = StrategyKind::Honest;
    uint32_t count = 1;   // extra messages for Forge/Duplicate
    uint32_t rounds = 1;  // shift for Early/Late
};

// ---------------------------------------------------------------------------
// Scenario skeleton: one channel, a watchtower pool, a scripted fraud.
// ---------------------------------------------------------------------------
struct SimConfig {
    Scheme scheme = Scheme::HmacSim;
    uint64_t seed = 1;
    uint32_t fanout_n = 2;
    uint32_t rounds_l = 2;
    uint32_t blocks_per_round_b = 1;
    uint32_t settlement_timelock_t = 0;  // 0: derived as l*b + 2
    uint32_t watchtower_count = 6;
    Amount fund_a = 10;
    Amount fund_b = 10;
    Amount rho = 60;
    Amount fee = 0;
    uint64_t update_count = 2;  // off-chain updates signed after genesis
    uint64_t fraud_seq = 0;     // sequence the cheater settles on
    char cheater = 'a';
    char discloser = 'b';  // the payee by default
    double alpha = 0.0;
    std::vector<size_t> forced_offline;
    std::optional<size_t> deviator;  // watchtower index running `strategy`
    StrategyProfile strategy;
    bool miner_prefers_own = false;
    std::optional<size_t> miner_tower;  // miner identity, when a watchtower
};

struct TraceEvent {
    uint64_t height = 0;
    std::string actor;
    std::string kind;
    std::string digest;
    std::string note;
};

using Trace = std::vector<TraceEvent>;

// Deterministic Phase-1 product: the full message tree (with any deviation
// applied), watchtower storage after gossip, and the send order the network
// observed.
struct BuiltScenario {
    ChannelParams params;
    KeyPair keys_a;
    KeyPair keys_b;
    std::vector<KeyPair> towers;
    std::vector<UpdateTx> updates;  // seq 0..update_count
    std::vector<WatchMessage> sent;
    std::vector<WatchtowerState> states;
    bool degenerate = false;
    Trace trace;

    int tower_index(const PublicKey& pk) const;
    const KeyPair& tower_keys(const PublicKey& pk) const;
};

Result<BuiltScenario> build_scenario(const SimConfig& config);

// Count of valid messages per depth (index 0 = depth 1). Honest runs yield
// N^i per depth.
std::vector<uint64_t> layer_sizes(const BuiltScenario& built);

// Per-depth count of messages whose inclusion pays this watchtower, i.e.
// messages carrying it anywhere on the recipient path.
std::vector<uint64_t> watchtower_view(const BuiltScenario& built,
                                      size_t tower);

// ---------------------------------------------------------------------------
// Phase 2 playback
// ---------------------------------------------------------------------------
struct TrialResult {
    bool fraud_proven = false;
    uint64_t proof_round = 0;
    std::optional<Bytes> included_digest;  // digest of the included message
    // Valid submissions of the round that produced the proof; the included
    // one was drawn uniformly among these.
    std::vector<PofSubmission> winning_candidates;
    std::map<size_t, Amount> tower_payoff;  // watchtower shares only
    std::vector<PayoffRecord> payouts;      // complete outflow
    Amount total_locked = 0;
    Amount total_paid = 0;
    Outcome::Kind outcome = Outcome::Kind::SettledClean;
};

// Plays settlement plus the l-round commit window on a fresh chain.
// `offline[i]` silences watchtower i for the whole window (its keys still
// collect forwarding shares). Deterministic given (built, config, offline,
// miner_rng).
TrialResult run_commit_phase(const BuiltScenario& built,
                             const SimConfig& config,
                             const std::vector<bool>& offline, Rng miner_rng,
                             Trace* trace = nullptr);

// Offline vector drawn from the failure model plus forced-offline indices.
std::vector<bool> draw_failures(const SimConfig& config, size_t towers,
                                Rng& rng);

}  // namespace dcwc
