// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/chain.hpp"

#include <sstream>

namespace dcwc {

const char* payoff_role_name(PayoffRole role) {
    switch (role) {
        case PayoffRole::WatchtowerShare: return "watchtower-share";
        case PayoffRole::MinerFee: return "miner-fee";
        case PayoffRole::PartyRefund: return "party-refund";
    }
    return "unknown";
}

SimChain::SimChain(Rng miner_rng) : rng_(miner_rng) {
    blocks_.push_back(Block{0, std::nullopt});
    miner_key_ = keygen(Scheme::HmacSim, 0x6d696e6572ULL).public_key;
}

void SimChain::register_channel(const ChannelParams& params) {
    pending_.push_back(FundingRecord{params});
}

Status SimChain::publish_settlement(const SettlementTx& settlement) {
    auto it = channels_.find(settlement.update.channel_id);
    if (it != channels_.end() && it->second.finalized) {
        return {Err::InvalidParams, "channel already finalized"};
    }
    pending_.push_back(settlement);
    return ok_status();
}

void SimChain::submit(const PofSubmission& sub) {
    const ChannelStatus* st = channel(sub.message.payload.channel_id);
    if (st != nullptr && st->finalized) return;
    mempool_.push_back(sub);
}

namespace {

// Keys identifying one hop of one message: the path walked so far, who
// signed this hop, and the hop id. Messages agreeing on all three must be
// the same message; otherwise one of them reused an id.
std::tuple<Bytes, Bytes, uint32_t> layer_key(const WatchMessage& m, size_t k) {
    return {sha256(serialize_message_prefix(m, k)),
            sha256(m.layers[k].signer.encode()), m.layers[k].hop_id};
}

}  // namespace

void SimChain::note_layers(const WatchMessage& m) {
    for (size_t k = 0; k < m.layers.size(); ++k) {
        Bytes sub_digest = sha256(serialize_message_prefix(m, k + 1));
        seen_layers_.emplace(layer_key(m, k), std::move(sub_digest));
    }
}

void SimChain::observe_message(const WatchMessage& m) { note_layers(m); }

bool SimChain::duplicate_conflict(const WatchMessage& m) const {
    for (size_t k = 0; k < m.layers.size(); ++k) {
        auto it = seen_layers_.find(layer_key(m, k));
        if (it == seen_layers_.end()) continue;
        if (it->second != sha256(serialize_message_prefix(m, k + 1))) {
            return true;
        }
    }
    return false;
}

const ChannelStatus* SimChain::channel(const Bytes& channel_id) const {
    auto it = channels_.find(channel_id);
    return it == channels_.end() ? nullptr : &it->second;
}

ChannelStatus* SimChain::channel_mut(const Bytes& channel_id) {
    auto it = channels_.find(channel_id);
    return it == channels_.end() ? nullptr : &it->second;
}

void SimChain::mark_finalized(const Bytes& channel_id) {
    if (ChannelStatus* st = channel_mut(channel_id)) st->finalized = true;
}

Status validate_pof(const PofSubmission& sub, const SimChain& chain,
                    const ChannelParams& params, uint64_t at_height) {
    const WatchMessage& m = sub.message;

    // Network-level filter: plaintext must mirror the envelope exactly.
    if (sub.plaintext_path != plaintext_path_of(m)) {
        return {Err::PlaintextMismatch, "plaintext path does not match"};
    }

    const ChannelStatus* status = chain.channel(m.payload.channel_id);
    if (status == nullptr) {
        return {Err::BadUpdate, "unknown channel"};
    }

    // 1: at most one proof of fraud per channel, ever.
    if (status->included_proof.has_value()) {
        return {Err::PriorProof, "proof already on chain"};
    }

    // 2: the payload must be a valid update of the underlying channel.
    if (m.payload.channel_id != params.channel_id ||
        m.payload.balance_a + m.payload.balance_b != params.total_funds() ||
        !update_signatures_valid(params, m.payload)) {
        return {Err::BadUpdate, "payload is not a valid channel update"};
    }

    // 3: only a strictly newer update proves fraud.
    if (!status->settlement.has_value()) {
        return {Err::NotNewer, "no settlement to prove fraud against"};
    }
    if (m.payload.seq <= status->settlement->update.seq) {
        return {Err::NotNewer, "payload seq does not exceed settled seq"};
    }

    // 4: hop ids stay within the fan-out bound.
    for (const Envelope& layer : m.layers) {
        if (layer.hop_id < 1 || layer.hop_id > params.fanout_n) {
            return {Err::IdOutOfRange, "hop id outside 1..N"};
        }
    }

    // 5: id reuse along an already-seen path, at any level.
    if (chain.duplicate_conflict(m)) {
        return {Err::DuplicateId, "same path and id already seen"};
    }

    // 6: the holder's level must equal the rounds elapsed since settlement.
    uint64_t settle_height = status->settlement->published_height;
    if (at_height <= settle_height) {
        return {Err::RoundMismatch, "submitted before settlement"};
    }
    uint64_t elapsed = at_height - settle_height;
    uint64_t rounds =
        (elapsed + params.blocks_per_round_b - 1) / params.blocks_per_round_b;
    if (rounds != m.depth()) {
        return {Err::RoundMismatch, "level does not equal rounds passed"};
    }
    if (m.layers.empty() || sub.submitter != m.holder()) {
        return {Err::RoundMismatch, "submitter is not the message holder"};
    }

    // 7: full envelope verification (signatures and pk/sk linkage).
    if (Status st = verify_envelope_chain(m, params); !st.ok()) {
        return st.error();
    }
    return ok_status();
}

Block SimChain::mine_block() {
    Block block;
    block.height = blocks_.back().height + 1;
    rejections_.clear();

    if (!pending_.empty()) {
        block.entry = pending_.front();
        pending_.pop_front();
        if (const auto* fund = std::get_if<FundingRecord>(&*block.entry)) {
            ChannelStatus st;
            st.params = fund->params;
            channels_[fund->params.channel_id] = st;
        } else if (const auto* settle =
                       std::get_if<SettlementTx>(&*block.entry)) {
            SettlementTx fixed = *settle;
            fixed.published_height = block.height;
            block.entry = fixed;
            if (ChannelStatus* st = channel_mut(fixed.update.channel_id)) {
                st->settlement = fixed;
            }
        }
        blocks_.push_back(block);
        return block;
    }

    // Validate the mempool in arrival order, collecting valid submissions
    // per channel. Accepted fingerprints are recorded immediately so a
    // later duplicate in the same batch fails check 5.
    std::map<Bytes, std::vector<size_t>> valid;
    for (size_t i = 0; i < mempool_.size(); ++i) {
        const PofSubmission& sub = mempool_[i];
        const Bytes& cid = sub.message.payload.channel_id;
        const ChannelStatus* st = channel(cid);
        if (st == nullptr) {
            rejections_.push_back({message_digest(sub.message), sub.submitter,
                                   {Err::BadUpdate, "unknown channel"}});
            continue;
        }
        Status s = validate_pof(sub, *this, st->params, block.height);
        if (s.ok()) {
            note_layers(sub.message);
            valid[cid].push_back(i);
        } else {
            rejections_.push_back(
                {message_digest(sub.message), sub.submitter, s.error()});
        }
    }

    Bytes included_channel;
    if (!valid.empty()) {
        const auto& [cid, candidates] = *valid.begin();
        size_t chosen_index = candidates.size() == 1
                                  ? candidates[0]
                                  : candidates[rng_.uniform(candidates.size())];
        if (prefer_own_) {
            for (size_t idx : candidates) {
                if (mempool_[idx].submitter == miner_key_) {
                    chosen_index = idx;
                    break;
                }
            }
        }
        PofSubmission chosen = mempool_[chosen_index];
        block.entry = chosen;
        ChannelStatus* st = channel_mut(cid);
        st->included_proof = chosen;
        st->proof_height = block.height;
        included_channel = cid;
    }

    // Invalid submissions are discarded by the network, and once a channel
    // has its proof the race for it is over.
    std::vector<PofSubmission> rest;
    for (size_t i = 0; i < mempool_.size(); ++i) {
        const Bytes& cid = mempool_[i].message.payload.channel_id;
        if (cid == included_channel) continue;
        auto it = valid.find(cid);
        if (it == valid.end()) continue;
        bool was_valid = false;
        for (size_t idx : it->second) was_valid |= (idx == i);
        if (was_valid) rest.push_back(std::move(mempool_[i]));
    }
    mempool_ = std::move(rest);

    blocks_.push_back(block);
    return block;
}

Result<std::vector<PayoffRecord>> distribute_payoff(
    const PofSubmission& pof, const ChannelParams& params, Amount fee,
    const PublicKey& miner, const PublicKey& honest_party) {
    if (fee >= params.rho) {
        return {Err::FeeExceedsPool, "fee leaves nothing to share"};
    }
    std::vector<PayoffRecord> records;
    Amount d = static_cast<Amount>(pof.message.depth());
    Amount share = (params.rho - fee) / d;
    Amount residue = (params.rho - fee) - share * d;
    // The path watchtowers are the recipients of each layer, innermost
    // first; the outermost recipient is the submitter.
    for (const Envelope& layer : pof.message.layers) {
        records.push_back({layer.recipient, share, params.channel_id,
                           PayoffRole::WatchtowerShare});
    }
    if (fee > 0) {
        records.push_back({miner, fee, params.channel_id, PayoffRole::MinerFee});
    }
    if (residue > 0) {
        records.push_back({honest_party, residue, params.channel_id,
                           PayoffRole::PartyRefund});
    }
    return records;
}

Result<Outcome> finalize_channel(SimChain& chain, const ChannelParams& params,
                                 Amount fee) {
    ChannelStatus* status = chain.channel_mut(params.channel_id);
    if (status == nullptr) return {Err::InvalidParams, "unknown channel"};
    if (!status->settlement.has_value()) {
        return {Err::InvalidParams, "no settlement on chain"};
    }
    const SettlementTx& settlement = *status->settlement;
    bool is_a_publisher = settlement.publisher == params.party_a;

    Outcome outcome;
    if (status->included_proof.has_value()) {
        const PublicKey& honest =
            is_a_publisher ? params.party_b : params.party_a;
        outcome.kind = Outcome::Kind::FraudProven;
        outcome.proof = status->included_proof;
        // Entire channel stake to the honest party, plus their reserve back.
        outcome.payouts.push_back({honest, params.total_funds(),
                                   params.channel_id, PayoffRole::PartyRefund});
        outcome.payouts.push_back(
            {honest, params.rho, params.channel_id, PayoffRole::PartyRefund});
        auto shares = distribute_payoff(*status->included_proof, params, fee,
                                        chain.miner_key(), honest);
        if (shares.ok()) {
            for (auto& r : shares.value()) outcome.payouts.push_back(r);
        } else {
            // Misconfigured reward pool: the whole reserve covers the fee.
            outcome.payouts.push_back({chain.miner_key(), params.rho,
                                       params.channel_id, PayoffRole::MinerFee});
        }
    } else {
        uint64_t window_end =
            settlement.published_height +
            static_cast<uint64_t>(params.rounds_l) * params.blocks_per_round_b;
        if (chain.height() < window_end) {
            return {Err::RoundMismatch, "dispute window still open"};
        }
        outcome.kind = Outcome::Kind::SettledClean;
        outcome.payouts.push_back({params.party_a, settlement.update.balance_a,
                                   params.channel_id, PayoffRole::PartyRefund});
        outcome.payouts.push_back({params.party_b, settlement.update.balance_b,
                                   params.channel_id, PayoffRole::PartyRefund});
        outcome.payouts.push_back(
            {params.party_a, params.rho, params.channel_id,
             PayoffRole::PartyRefund});
        outcome.payouts.push_back(
            {params.party_b, params.rho, params.channel_id,
             PayoffRole::PartyRefund});
    }
    status->finalized = true;
    return outcome;
}

std::string SimChain::dump() const {
    std::ostringstream out;
    for (const Block& block : blocks_) {
        out << block.height << '\t';
        if (!block.entry.has_value()) {
            out << "empty\t-\t-";
        } else if (const auto* fund = std::get_if<FundingRecord>(&*block.entry)) {
            out << "funding\t" << to_hex(fund->params.channel_id) << "\t-";
        } else if (const auto* settle =
                       std::get_if<SettlementTx>(&*block.entry)) {
            out << "settlement\t" << to_hex(settle->update.channel_id) << "\t"
                << "seq=" << settle->update.seq;
        } else if (const auto* pof = std::get_if<PofSubmission>(&*block.entry)) {
            out << "pof\t" << to_hex(pof->message.payload.channel_id) << "\t"
                << to_hex(message_digest(pof->message));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace dcwc
