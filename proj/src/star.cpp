// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/star.hpp"

namespace dcwc::star {

Bytes Script::encode() const {
    Bytes out;
    for (const ScriptOp& op : ops) {
        out.push_back(static_cast<uint8_t>(op.op));
        if (op.op == Opcode::Push) {
            out.push_back(static_cast<uint8_t>(op.data.size()));
            out.insert(out.end(), op.data.begin(), op.data.end());
        }
    }
    return out;
}

Script key_lock_script(const PublicKey& pk) {
    Script s;
    s.ops.push_back({Opcode::Push, pk.encode()});
    s.ops.push_back({Opcode::CheckSig, {}});
    return s;
}

Result<Script> compile_script(const PublicKey& watchtower,
                              const PublicKey& sender, uint32_t timelock) {
    if (timelock == 0) {
        return {Err::InvalidTimelock, "relative timelock must be positive"};
    }
    Script s;
    s.ops.push_back({Opcode::If, {}});
    s.ops.push_back({Opcode::Push, be32(timelock)});
    s.ops.push_back({Opcode::CheckSequenceVerify, {}});
    s.ops.push_back({Opcode::Push, watchtower.encode()});
    s.ops.push_back({Opcode::CheckSig, {}});
    s.ops.push_back({Opcode::Else, {}});
    s.ops.push_back({Opcode::Push, sender.encode()});
    s.ops.push_back({Opcode::CheckSig, {}});
    s.ops.push_back({Opcode::EndIf, {}});
    return s;
}

namespace {

bool truthy(const Bytes& v) {
    for (uint8_t b : v) {
        if (b != 0) return true;
    }
    return false;
}

std::optional<PublicKey> decode_pk(const Bytes& encoded) {
    if (encoded.size() < 2) return std::nullopt;
    PublicKey pk;
    switch (encoded[0]) {
        case static_cast<uint8_t>(Scheme::HmacSim):
            pk.scheme = Scheme::HmacSim;
            break;
        case static_cast<uint8_t>(Scheme::Ed25519):
            pk.scheme = Scheme::Ed25519;
            break;
        default:
            return std::nullopt;
    }
    pk.bytes.assign(encoded.begin() + 1, encoded.end());
    return pk;
}

}  // namespace

bool eval_script(const Script& script, const Witness& witness,
                 const ScriptCtx& ctx) {
    std::vector<Bytes> stack;
    stack.push_back(witness.signature.bytes);
    stack.push_back(Bytes{static_cast<uint8_t>(witness.if_branch ? 1 : 0)});

    std::vector<bool> conditions;  // nesting of IF frames
    auto executing = [&]() {
        for (bool c : conditions) {
            if (!c) return false;
        }
        return true;
    };

    for (const ScriptOp& op : script.ops) {
        switch (op.op) {
            case Opcode::If: {
                if (!executing()) {
                    conditions.push_back(false);
                    break;
                }
                if (stack.empty()) return false;
                Bytes selector = stack.back();
                stack.pop_back();
                conditions.push_back(truthy(selector));
                break;
            }
            case Opcode::Else: {
                if (conditions.empty()) return false;
                conditions.back() = !conditions.back();
                break;
            }
            case Opcode::EndIf: {
                if (conditions.empty()) return false;
                conditions.pop_back();
                break;
            }
            case Opcode::Push: {
                if (executing()) stack.push_back(op.data);
                break;
            }
            case Opcode::CheckSequenceVerify: {
                if (!executing()) break;
                if (stack.empty()) return false;
                Bytes lock = stack.back();
                stack.pop_back();
                if (lock.size() != 4) return false;
                if (ctx.input_age < read_be32(lock.data())) return false;
                break;
            }
            case Opcode::CheckSig: {
                if (!executing()) break;
                if (stack.size() < 2) return false;
                Bytes pk_bytes = stack.back();
                stack.pop_back();
                Bytes sig = stack.back();
                stack.pop_back();
                auto pk = decode_pk(pk_bytes);
                bool ok = pk.has_value() &&
                          verify(*pk, ctx.tx_digest, Signature{sig});
                stack.push_back(ok ? Bytes{1} : Bytes{});
                break;
            }
        }
    }
    if (!conditions.empty()) return false;  // unbalanced template
    return !stack.empty() && truthy(stack.back());
}

Bytes StarTx::txid() const {
    Encoder enc;
    for (const TxInput& in : inputs) {
        enc.field(in.parent_txid).field_u32(in.vout).field_u32(
            in.relative_timelock);
    }
    for (const TxOutput& out : outputs) {
        enc.field_u64(static_cast<uint64_t>(out.amount))
            .field(out.script.encode());
    }
    enc.field(owner.encode());
    return sha256(enc.take());
}

std::optional<size_t> StarTx::open_vout() const {
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].script.empty()) return i;
    }
    return std::nullopt;
}

Amount StarTx::output_total() const {
    Amount total = 0;
    for (const TxOutput& out : outputs) total += out.amount;
    return total;
}

InvalidationTx build_invalidation(const UpdateTx& revoked,
                                  const ChannelParams& params,
                                  const PublicKey& beneficiary,
                                  Amount remainder) {
    InvalidationTx inv;
    inv.revoked_seq = revoked.seq;
    StarTx& tx = inv.tx;
    tx.owner = beneficiary;
    tx.inputs.push_back({sha256(serialize_update(revoked)), 0, 0});
    Amount total = params.total_funds();
    if (remainder > total) remainder = total;
    tx.outputs.push_back({total - remainder, key_lock_script(beneficiary)});
    tx.outputs.push_back({remainder, Script{}});
    return inv;
}

Result<StarTx> forward_with_claim(const StarTx& parent,
                                  const KeyPair& watchtower, Amount claim,
                                  uint32_t timelock, Amount min_remainder) {
    auto open = parent.open_vout();
    if (!open.has_value()) {
        return {Err::RemainderTooSmall, "parent has no open output"};
    }
    Amount available = parent.outputs[*open].amount;
    if (claim < 0 || available < claim + min_remainder) {
        return {Err::RemainderTooSmall, "open output cannot cover the claim"};
    }
    auto script =
        compile_script(watchtower.public_key, parent.owner, timelock);
    if (!script.ok()) return script.error();

    StarTx child;
    child.owner = watchtower.public_key;
    child.inputs.push_back({parent.txid(), static_cast<uint32_t>(*open),
                            timelock});
    child.outputs.push_back({claim, script.value()});
    child.outputs.push_back({available - claim, Script{}});
    return child;
}

void HeightSim::advance_to(uint64_t h) {
    if (h > height_) height_ = h;
}

void HeightSim::seed(const Bytes& txid, uint64_t h) { confirmed_[txid] = h; }

Status HeightSim::confirm(const StarTx& tx) {
    for (const TxInput& in : tx.inputs) {
        auto it = confirmed_.find(in.parent_txid);
        if (it == confirmed_.end()) {
            return {Err::InvalidParams, "parent not confirmed"};
        }
        if (height_ < it->second + in.relative_timelock) {
            return {Err::InvalidTimelock, "relative timelock not yet met"};
        }
    }
    confirmed_[tx.txid()] = height_;
    return ok_status();
}

std::optional<uint64_t> HeightSim::height_of(const Bytes& txid) const {
    auto it = confirmed_.find(txid);
    if (it == confirmed_.end()) return std::nullopt;
    return it->second;
}

std::vector<uint64_t> landing_heights(const std::vector<StarTx>& chain,
                                      uint64_t base) {
    std::vector<uint64_t> heights;
    uint64_t h = base;
    for (size_t i = 0; i < chain.size(); ++i) {
        if (i > 0) {
            uint32_t lock = 0;
            for (const TxInput& in : chain[i].inputs) {
                lock = std::max(lock, in.relative_timelock);
            }
            h += lock;
        }
        heights.push_back(h);
    }
    return heights;
}

void StarWatchState::hold(const Bytes& channel_id, HeldChain chain) {
    per_channel[channel_id].push_back(std::move(chain));
}

const HeldChain* StarWatchState::chain_for(const Bytes& channel_id,
                                           uint64_t revoked_seq) const {
    auto it = per_channel.find(channel_id);
    if (it == per_channel.end()) return nullptr;
    for (const HeldChain& held : it->second) {
        if (held.revoked_seq == revoked_seq) return &held;
    }
    return nullptr;
}

size_t StarWatchState::count(const Bytes& channel_id) const {
    auto it = per_channel.find(channel_id);
    return it == per_channel.end() ? 0 : it->second.size();
}

StarSettleResult settle_star(const std::vector<StarTx>& forwarding_chain,
                             const std::vector<bool>& online,
                             uint64_t settle_height, uint32_t timelock_t) {
    StarSettleResult result;
    if (forwarding_chain.empty()) return result;
    result.landings = landing_heights(forwarding_chain, settle_height + 1);

    // The sender publishes instantly; hop k needs its whole prefix on chain
    // first, which the stacked relative timelocks delay to landings[k].
    size_t winner = forwarding_chain.size();
    for (size_t k = 0; k < forwarding_chain.size(); ++k) {
        size_t actor = k;
        if (actor >= online.size() || !online[actor]) continue;
        if (result.landings[k] > settle_height + timelock_t) break;
        winner = k;
        break;
    }
    if (winner == forwarding_chain.size()) return result;  // nobody acted

    result.invalidated = true;
    result.winner_hop = winner;
    const StarTx& inv = forwarding_chain[0];

    // Beneficiary output of the invalidation always pays its owner.
    result.payouts.push_back(
        {inv.owner, inv.outputs[0].amount, "invalidation beneficiary"});

    if (winner == 0) {
        // The sender sweeps the open remainder directly.
        result.payouts.push_back(
            {inv.owner, inv.outputs[1].amount, "open output swept by sender"});
        return result;
    }

    // Chain prefix [1..winner] lands; every claim vests with its watchtower
    // (everyone senior enough to override was offline), and the winner also
    // sweeps the final open output.
    for (size_t k = 1; k <= winner; ++k) {
        const StarTx& fwd = forwarding_chain[k];
        result.payouts.push_back({fwd.owner, fwd.outputs[0].amount,
                                  "claim of hop " + std::to_string(k)});
        if (k == winner) {
            result.payouts.push_back({fwd.owner, fwd.outputs[1].amount,
                                      "open output swept by winner"});
        }
    }
    return result;
}

}  // namespace dcwc::star
