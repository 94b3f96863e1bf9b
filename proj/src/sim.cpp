// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/sim.hpp"

#include <algorithm>
#include <set>

namespace dcwc {

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Honest: return "honest";
        case StrategyKind::ForgeExtraMessages: return "forge-extra-messages";
        case StrategyKind::DuplicateId: return "duplicate-id";
        case StrategyKind::EarlyCommit: return "early-commit";
        case StrategyKind::LateCommit: return "late-commit";
        case StrategyKind::WithholdForward: return "withhold-forward";
        case StrategyKind::StoreStaleProof: return "store-stale-proof";
        case StrategyKind::ShortenDepthAttempt: return "shorten-depth";
    }
    return "unknown";
}

int BuiltScenario::tower_index(const PublicKey& pk) const {
    for (size_t i = 0; i < towers.size(); ++i) {
        if (towers[i].public_key == pk) return static_cast<int>(i);
    }
    return -1;
}

const KeyPair& BuiltScenario::tower_keys(const PublicKey& pk) const {
    return towers[static_cast<size_t>(tower_index(pk))];
}

namespace {

WatchMessage with_payload(const UpdateTx& update) {
    WatchMessage m;
    m.payload = update;
    return m;
}

void trace_event(Trace& trace, uint64_t height, std::string actor,
                 std::string kind, std::string digest, std::string note) {
    trace.push_back({height, std::move(actor), std::move(kind),
                     std::move(digest), std::move(note)});
}

std::string tower_name(int index) {
    return index < 0 ? std::string("?") : "W" + std::to_string(index);
}

}  // namespace

Result<BuiltScenario> build_scenario(const SimConfig& config) {
    BuiltScenario built;
    Rng key_rng = Rng(config.seed).substream("keys");
    built.keys_a = keygen(config.scheme, key_rng.next_u64());
    built.keys_b = keygen(config.scheme, key_rng.next_u64());
    for (uint32_t i = 0; i < config.watchtower_count; ++i) {
        built.towers.push_back(keygen(config.scheme, key_rng.next_u64()));
    }

    ChannelParams params;
    params.channel_id =
        sha256(Encoder().field("dcwc.channel").field_u64(config.seed).take());
    params.channel_id.resize(8);
    params.party_a = built.keys_a.public_key;
    params.party_b = built.keys_b.public_key;
    params.fund_a = config.fund_a;
    params.fund_b = config.fund_b;
    params.rho = config.rho;
    params.fanout_n = config.fanout_n;
    params.rounds_l = config.rounds_l;
    params.blocks_per_round_b = config.blocks_per_round_b;
    params.settlement_timelock_t =
        config.settlement_timelock_t != 0
            ? config.settlement_timelock_t
            : config.rounds_l * config.blocks_per_round_b + 2;
    built.params = params;

    auto channel = new_channel(params, built.keys_a, built.keys_b);
    if (!channel.ok()) return channel.error();

    built.updates.push_back(channel.value().genesis);
    for (uint64_t i = 0; i < config.update_count; ++i) {
        const UpdateTx& prev = built.updates.back();
        Amount delta = prev.balance_a > 0 ? 1 : -1;
        auto next = make_update(params, prev, delta, built.keys_a, built.keys_b);
        if (!next.ok()) return next.error();
        built.updates.push_back(next.value());
    }
    if (config.fraud_seq >= built.updates.size()) {
        return {Err::InvalidParams, "fraud_seq beyond the update history"};
    }

    std::vector<PublicKey> tower_pks;
    for (const auto& k : built.towers) tower_pks.push_back(k.public_key);
    Topology topology(tower_pks, Rng(config.seed).substream("topology"));

    built.states.resize(built.towers.size());
    for (size_t i = 0; i < built.towers.size(); ++i) {
        built.states[i].identity = built.towers[i];
    }

    const bool stale_keeper =
        config.deviator.has_value() &&
        config.strategy.kind == StrategyKind::StoreStaleProof;

    auto offer_storage = [&](const WatchMessage& m) {
        int idx = built.tower_index(m.holder());
        if (idx < 0) return;
        // The stale hoarder refuses everything newer than the first update.
        if (stale_keeper && static_cast<size_t>(idx) == *config.deviator &&
            m.payload.seq > 1) {
            return;
        }
        if (store_best(built.states[static_cast<size_t>(idx)], m,
                       built.params)) {
            trace_event(built.trace, 0, tower_name(idx), "store",
                        to_hex(message_digest(m)),
                        "seq=" + std::to_string(m.payload.seq) +
                            " depth=" + std::to_string(m.depth()));
        }
    };

    const KeyPair& discloser =
        config.discloser == 'a' ? built.keys_a : built.keys_b;

    for (uint64_t u = 1; u < built.updates.size(); ++u) {
        const UpdateTx& update = built.updates[u];
        auto fan = disclose(discloser, update, params, topology,
                            params.fanout_n);
        if (!fan.ok()) return fan.error();
        built.degenerate |= fan.value().degenerate;
        std::vector<WatchMessage> frontier = fan.value().messages;
        for (const auto& m : frontier) {
            trace_event(built.trace, 0,
                        config.discloser == 'a' ? "A" : "B", "disclose",
                        to_hex(message_digest(m)),
                        "seq=" + std::to_string(update.seq) +
                            " hop=" + std::to_string(m.outermost().hop_id));
        }

        while (!frontier.empty()) {
            std::vector<WatchMessage> next;
            for (const WatchMessage& m : frontier) {
                built.sent.push_back(m);
                offer_storage(m);
                if (m.depth() + 1 > params.rounds_l) continue;
                int holder = built.tower_index(m.holder());
                if (holder < 0) continue;
                const KeyPair& keys = built.towers[static_cast<size_t>(holder)];
                bool is_deviator = config.deviator.has_value() &&
                                   static_cast<size_t>(holder) ==
                                       *config.deviator;

                if (is_deviator &&
                    config.strategy.kind == StrategyKind::WithholdForward) {
                    continue;
                }
                auto out = cascade(keys, m, params, topology, params.fanout_n,
                                   params.rounds_l);
                if (!out.ok()) continue;  // invalid incoming, dropped
                built.degenerate |= out.value().degenerate;
                for (const auto& c : out.value().messages) {
                    trace_event(built.trace, 0, tower_name(holder), "cascade",
                                to_hex(message_digest(c)),
                                "depth=" + std::to_string(c.depth()));
                    next.push_back(c);
                }

                if (is_deviator &&
                    (config.strategy.kind == StrategyKind::DuplicateId ||
                     config.strategy.kind ==
                         StrategyKind::ForgeExtraMessages)) {
                    auto wide = topology.neighbors(
                        keys.public_key, params.fanout_n + config.strategy.count);
                    for (uint32_t j = 0;
                         j < config.strategy.count &&
                         params.fanout_n + j < wide.size();
                         ++j) {
                        uint32_t hop =
                            config.strategy.kind == StrategyKind::DuplicateId
                                ? 1
                                : params.fanout_n + 1 + j;
                        WatchMessage extra = wrap_message(
                            keys, hop, wide[params.fanout_n + j], m);
                        trace_event(built.trace, 0, tower_name(holder),
                                    "cascade-extra",
                                    to_hex(message_digest(extra)),
                                    "hop=" + std::to_string(hop));
                        next.push_back(extra);
                    }
                }
            }
            frontier = std::move(next);
        }
    }
    return built;
}

std::vector<uint64_t> layer_sizes(const BuiltScenario& built) {
    // Only the newest update's messages compete: holders discard the rest.
    std::vector<uint64_t> sizes(built.params.rounds_l, 0);
    for (const auto& m : built.sent) {
        if (m.payload.seq != built.updates.back().seq) continue;
        if (m.depth() == 0 || m.depth() > built.params.rounds_l) continue;
        if (!verify_envelope_chain(m, built.params).ok()) continue;
        sizes[m.depth() - 1]++;
    }
    return sizes;
}

std::vector<uint64_t> watchtower_view(const BuiltScenario& built,
                                      size_t tower) {
    std::vector<uint64_t> counts(built.params.rounds_l, 0);
    const PublicKey& pk = built.towers[tower].public_key;
    for (const auto& m : built.sent) {
        if (m.payload.seq != built.updates.back().seq) continue;
        if (m.depth() == 0 || m.depth() > built.params.rounds_l) continue;
        if (!verify_envelope_chain(m, built.params).ok()) continue;
        for (const Envelope& layer : m.layers) {
            if (layer.recipient == pk) {
                counts[m.depth() - 1]++;
                break;
            }
        }
    }
    return counts;
}

std::vector<bool> draw_failures(const SimConfig& config, size_t towers,
                                Rng& rng) {
    std::vector<bool> offline(towers, false);
    for (size_t i = 0; i < towers; ++i) {
        offline[i] = rng.bernoulli(config.alpha);
    }
    for (size_t idx : config.forced_offline) {
        if (idx < towers) offline[idx] = true;
    }
    return offline;
}

TrialResult run_commit_phase(const BuiltScenario& built,
                             const SimConfig& config,
                             const std::vector<bool>& offline, Rng miner_rng,
                             Trace* trace) {
    const ChannelParams& params = built.params;
    TrialResult result;
    result.total_locked = params.total_funds() + 2 * params.rho;

    SimChain chain(miner_rng);
    if (config.miner_tower.has_value() &&
        *config.miner_tower < built.towers.size()) {
        chain.set_miner(built.towers[*config.miner_tower].public_key,
                        config.miner_prefers_own);
    }
    chain.register_channel(params);
    chain.mine_block();
    for (const auto& m : built.sent) chain.observe_message(m);

    SettlementTx settlement;
    settlement.update = built.updates[config.fraud_seq];
    settlement.publisher =
        config.cheater == 'a' ? params.party_a : params.party_b;
    chain.publish_settlement(settlement);
    chain.mine_block();
    uint64_t settle_height =
        chain.channel(params.channel_id)->settlement->published_height;
    if (trace != nullptr) {
        trace_event(*trace, settle_height,
                    config.cheater == 'a' ? "A" : "B", "settle",
                    to_hex(sha256(serialize_update(settlement.update))),
                    "seq=" + std::to_string(settlement.update.seq));
    }

    struct Planned {
        size_t tower;
        uint64_t round;
        WatchMessage message;
    };
    std::vector<Planned> planned;
    for (size_t i = 0; i < built.towers.size(); ++i) {
        if (offline[i]) continue;
        auto commit = on_settlement(built.states[i], settlement, params);
        if (!commit.has_value()) continue;
        const WatchMessage* held = built.states[i].slot(params.channel_id);
        Planned p{i, held->depth(), *held};
        if (config.deviator.has_value() && i == *config.deviator) {
            switch (config.strategy.kind) {
                case StrategyKind::EarlyCommit:
                    p.round = p.round > config.strategy.rounds
                                  ? p.round - config.strategy.rounds
                                  : 1;
                    break;
                case StrategyKind::LateCommit:
                    p.round += config.strategy.rounds;
                    break;
                case StrategyKind::ShortenDepthAttempt:
                    // Re-signs the payload as if it had arrived directly.
                    p.message = wrap_message(built.towers[i], 1,
                                             built.towers[i].public_key,
                                             with_payload(held->payload));
                    p.round = 1;
                    break;
                default:
                    break;
            }
        }
        planned.push_back(std::move(p));
    }

    for (uint64_t round = 1; round <= params.rounds_l; ++round) {
        uint64_t target =
            settle_height + round * params.blocks_per_round_b;
        while (chain.height() + 1 < target) chain.mine_block();

        std::vector<PofSubmission> submitted;
        for (const Planned& p : planned) {
            if (p.round != round) continue;
            PofSubmission sub;
            sub.message = p.message;
            sub.plaintext_path = plaintext_path_of(p.message);
            sub.submitter = built.towers[p.tower].public_key;
            sub.submit_height = target;
            chain.submit(sub);
            submitted.push_back(sub);
            if (trace != nullptr) {
                trace_event(*trace, target, tower_name(static_cast<int>(p.tower)),
                            "submit", to_hex(message_digest(p.message)),
                            "round=" + std::to_string(round));
            }
        }

        chain.mine_block();
        if (trace != nullptr) {
            for (const auto& rej : chain.last_rejections()) {
                trace_event(*trace, target,
                            tower_name(built.tower_index(rej.submitter)),
                            "reject", to_hex(rej.message_digest),
                            err_name(rej.error.code));
            }
        }

        const ChannelStatus* status = chain.channel(params.channel_id);
        if (status->included_proof.has_value()) {
            result.fraud_proven = true;
            result.proof_round = round;
            result.included_digest =
                message_digest(status->included_proof->message);
            std::set<Bytes> rejected;
            for (const auto& rej : chain.last_rejections()) {
                rejected.insert(rej.message_digest);
            }
            for (const auto& sub : submitted) {
                if (!rejected.contains(message_digest(sub.message))) {
                    result.winning_candidates.push_back(sub);
                }
            }
            if (trace != nullptr) {
                trace_event(*trace, target, "miner", "mine",
                            to_hex(message_digest(
                                status->included_proof->message)),
                            "proof included, round " + std::to_string(round));
            }
            break;
        }
    }

    auto outcome = finalize_channel(chain, params, config.fee);
    if (outcome.ok()) {
        result.outcome = outcome.value().kind;
        result.payouts = outcome.value().payouts;
        for (const auto& record : result.payouts) {
            result.total_paid += record.amount;
            if (record.role == PayoffRole::WatchtowerShare) {
                int idx = built.tower_index(record.recipient);
                if (idx >= 0) {
                    result.tower_payoff[static_cast<size_t>(idx)] +=
                        record.amount;
                }
            }
            if (trace != nullptr) {
                int idx = built.tower_index(record.recipient);
                std::string who =
                    idx >= 0 ? tower_name(idx)
                             : (record.recipient == params.party_a ? "A" : "B");
                trace_event(*trace, chain.height(), who, "payoff", "",
                            std::string(payoff_role_name(record.role)) + "=" +
                                std::to_string(record.amount));
            }
        }
        if (trace != nullptr) {
            trace_event(*trace, chain.height(), "chain", "finalize", "",
                        result.outcome == Outcome::Kind::FraudProven
                            ? "fraud proven"
                            : "settled clean");
        }
    }
    return result;
}

}  // namespace dcwc
