// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/chain.hpp"

#include <map>

#include "doctest.h"
#include "support.hpp"

using namespace dcwc;
using dcwc::test::Net;
using dcwc::test::bare_message;
using dcwc::test::honest_tree;
using dcwc::test::submission_for;
using dcwc::test::wrap_raw;

namespace {

// Chain with the channel funded and a settlement of `settle_seq` mined.
// Settlement lands at height 2.
SimChain settled_chain(const Net& net, uint64_t settle_seq,
                       uint64_t rng_seed = 1) {
    SimChain chain(Rng(rng_seed).substream("miner"));
    chain.register_channel(net.params);
    chain.mine_block();
    SettlementTx settlement;
    settlement.update = net.update(settle_seq);
    settlement.publisher = net.params.party_a;
    REQUIRE(chain.publish_settlement(settlement).ok());
    chain.mine_block();
    REQUIRE(chain.channel(net.params.channel_id)->settlement.has_value());
    return chain;
}

uint64_t settle_height(const SimChain& chain, const Net& net) {
    return chain.channel(net.params.channel_id)->settlement->published_height;
}

}  // namespace

TEST_CASE("each miner check fails for exactly its own reason") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));
    UpdateTx settled = net.update(3);

    SUBCASE("honest round-matched submission is valid") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        auto sub = submission_for(net, layers[0][0], h + 1);
        CHECK(validate_pof(sub, chain, net.params, h + 1).ok());
    }

    SUBCASE("check 1: prior proof on chain") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        chain.submit(submission_for(net, layers[0][0], h + 1));
        chain.mine_block();
        REQUIRE(chain.channel(net.params.channel_id)->included_proof);
        // A fresh depth-2 proof in its proper round fails only on check 1.
        auto sub = submission_for(net, layers[1][3], h + 2);
        auto st = validate_pof(sub, chain, net.params, h + 2);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::PriorProof);
    }

    SUBCASE("check 2: payload must be a protocol-valid update") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        UpdateTx forged = net.update(5);
        forged.sig_b.bytes[0] ^= 0x01;
        WatchMessage m = wrap_raw(net.keys_b, 1,
                                  net.tower_keys[0].public_key,
                                  bare_message(forged));
        auto st = validate_pof(submission_for(net, m, h + 1), chain,
                               net.params, h + 1);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::BadUpdate);
    }

    SUBCASE("check 3: payload seq must exceed the settled seq") {
        SimChain chain = settled_chain(net, 5);
        uint64_t h = settle_height(chain, net);
        auto sub = submission_for(net, layers[0][0], h + 1);
        auto st = validate_pof(sub, chain, net.params, h + 1);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::NotNewer);
    }

    SUBCASE("check 4: hop id out of range") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        WatchMessage m = wrap_raw(net.keys_b, net.params.fanout_n + 1,
                                  net.tower_keys[0].public_key,
                                  bare_message(net.update(5)));
        auto st = validate_pof(submission_for(net, m, h + 1), chain,
                               net.params, h + 1);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::IdOutOfRange);
    }

    SUBCASE("check 5: same path, same id, same level") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        WatchMessage first = wrap_raw(net.keys_b, 1,
                                      net.tower_keys[4].public_key,
                                      bare_message(net.update(5)));
        WatchMessage dup = wrap_raw(net.keys_b, 1,
                                    net.tower_keys[5].public_key,
                                    bare_message(net.update(5)));
        chain.submit(submission_for(net, first, h + 1));
        chain.submit(submission_for(net, dup, h + 1));
        chain.mine_block();
        REQUIRE(chain.last_rejections().size() == 1);
        CHECK(chain.last_rejections()[0].error.code == Err::DuplicateId);
        CHECK(chain.channel(net.params.channel_id)->included_proof.has_value());
    }

    SUBCASE("check 5 chain-wide: duplicate observed in transit is dead") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        WatchMessage first = wrap_raw(net.keys_b, 1,
                                      net.tower_keys[4].public_key,
                                      bare_message(net.update(5)));
        WatchMessage dup = wrap_raw(net.keys_b, 1,
                                    net.tower_keys[5].public_key,
                                    bare_message(net.update(5)));
        chain.observe_message(first);
        chain.observe_message(dup);
        // Even alone, the duplicate cannot be included later.
        auto st = validate_pof(submission_for(net, dup, h + 1), chain,
                               net.params, h + 1);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::DuplicateId);
        // The first-seen copy remains valid.
        CHECK(validate_pof(submission_for(net, first, h + 1), chain,
                           net.params, h + 1)
                  .ok());
    }

    SUBCASE("check 6: level must equal rounds passed") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        auto sub = submission_for(net, layers[1][0], h + 1);  // depth 2, round 1
        auto st = validate_pof(sub, chain, net.params, h + 1);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::RoundMismatch);
        // Late is just as invalid as early.
        auto late = submission_for(net, layers[0][0], h + 2);
        CHECK(validate_pof(late, chain, net.params, h + 2).code() ==
              Err::RoundMismatch);
    }

    SUBCASE("check 7: broken pk/sk linkage between layers") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        WatchMessage inner = wrap_raw(net.keys_b, 1,
                                      net.tower_keys[0].public_key,
                                      bare_message(net.update(5)));
        // Forwarded by somebody who never received it.
        WatchMessage outer = wrap_raw(net.tower_keys[1], 1,
                                      net.tower_keys[2].public_key, inner);
        auto st = validate_pof(submission_for(net, outer, h + 2), chain,
                               net.params, h + 2);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::ChainLinkBroken);
    }

    SUBCASE("plaintext mismatch is discarded before the checks") {
        SimChain chain = settled_chain(net, 3);
        uint64_t h = settle_height(chain, net);
        auto sub = submission_for(net, layers[0][0], h + 1);
        sub.plaintext_path[0].hop_id ^= 1;
        auto st = validate_pof(sub, chain, net.params, h + 1);
        REQUIRE_FALSE(st.ok());
        CHECK(st.code() == Err::PlaintextMismatch);
    }
}

TEST_CASE("empty mempool mines an empty block") {
    Net net(2, 2, 8);
    SimChain chain = settled_chain(net, 3);
    Block b = chain.mine_block();
    CHECK_FALSE(b.entry.has_value());
}

TEST_CASE("selection among valid submissions is uniform and seeded") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));

    // Same seed, same pick; different seed may differ.
    auto run_once = [&](uint64_t seed) {
        SimChain chain = settled_chain(net, 3, seed);
        uint64_t h = settle_height(chain, net);
        for (const auto& m : layers[0]) {
            chain.submit(submission_for(net, m, h + 1));
        }
        chain.mine_block();
        return message_digest(
            chain.channel(net.params.channel_id)->included_proof->message);
    };
    CHECK(run_once(11) == run_once(11));

    // Frequencies over many independent chains approach uniformity. The
    // expected values were computed from the binomial model: p = 1/3,
    // se = sqrt(p(1-p)/trials) ~ 0.0021; +-0.01 is ~4.7 se.
    Net net3(3, 1, 8);
    auto topo3 = net3.topology();
    auto fan = disclose(net3.keys_b, net3.update(5), net3.params, topo3, 3);
    REQUIRE(fan.ok());
    const int trials = 50000;
    std::map<Bytes, int> hits;
    for (int t = 0; t < trials; ++t) {
        SimChain chain(Rng(90000 + static_cast<uint64_t>(t)).substream("miner"));
        chain.register_channel(net3.params);
        chain.mine_block();
        SettlementTx settlement;
        settlement.update = net3.update(3);
        settlement.publisher = net3.params.party_a;
        chain.publish_settlement(settlement);
        chain.mine_block();
        uint64_t h = settle_height(chain, net3);
        for (const auto& m : fan.value().messages) {
            chain.submit(submission_for(net3, m, h + 1));
        }
        chain.mine_block();
        hits[message_digest(chain.channel(net3.params.channel_id)
                                ->included_proof->message)]++;
    }
    REQUIRE(hits.size() == 3);
    for (const auto& [digest, count] : hits) {
        double freq = static_cast<double>(count) / trials;
        CHECK(freq == doctest::Approx(1.0 / 3).epsilon(0.03));
        CHECK(std::abs(freq - 1.0 / 3) < 0.01 + 1e-12);
    }
}

TEST_CASE("payoff distribution splits the pool exactly") {
    Net net(2, 2, 8);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));
    PublicKey miner = keygen(Scheme::HmacSim, 77).public_key;

    SUBCASE("exact division") {
        // Depth 3 requires l = 3; build on a deeper net.
        Net deep(3, 3, 42);
        auto dtopo = deep.topology();
        auto dl = honest_tree(deep, dtopo, deep.update(5));
        ChannelParams dp = deep.params;
        dp.rho = 100;
        auto recs = distribute_payoff(submission_for(deep, dl[2][0], 0), dp,
                                      10, miner, deep.params.party_b);
        REQUIRE(recs.ok());
        Amount shares = 0, fee = 0, residue = 0;
        for (const auto& r : recs.value()) {
            if (r.role == PayoffRole::WatchtowerShare) shares += r.amount;
            if (r.role == PayoffRole::MinerFee) fee += r.amount;
            if (r.role == PayoffRole::PartyRefund) residue += r.amount;
        }
        CHECK(shares == 90);
        CHECK(fee == 10);
        CHECK(residue == 0);
        int share_count = 0;
        for (const auto& r : recs.value()) {
            if (r.role == PayoffRole::WatchtowerShare) {
                CHECK(r.amount == 30);
                ++share_count;
            }
        }
        CHECK(share_count == 3);
    }

    SUBCASE("integer residue returns to the honest party") {
        // depth 4: floor(90/4) = 22, residue 2.
        Net deep(2, 4, 64);
        auto dtopo = deep.topology();
        auto dl = honest_tree(deep, dtopo, deep.update(5));
        ChannelParams dp = deep.params;
        dp.rho = 100;
        auto recs = distribute_payoff(submission_for(deep, dl[3][0], 0), dp,
                                      10, miner, deep.params.party_b);
        REQUIRE(recs.ok());
        Amount total = 0;
        Amount residue = 0;
        for (const auto& r : recs.value()) {
            total += r.amount;
            if (r.role == PayoffRole::WatchtowerShare) CHECK(r.amount == 22);
            if (r.role == PayoffRole::PartyRefund) residue = r.amount;
        }
        CHECK(residue == 2);
        CHECK(total == 100);  // exactly the cheater's pool
    }

    SUBCASE("fee exceeding the pool is a misconfiguration") {
        ChannelParams p = net.params;
        p.rho = 5;
        auto recs = distribute_payoff(submission_for(net, layers[0][0], 0), p,
                                      10, miner, net.params.party_b);
        REQUIRE_FALSE(recs.ok());
        CHECK(recs.code() == Err::FeeExceedsPool);
    }
}

TEST_CASE("finalize awards the full stake on proven fraud") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));

    SimChain chain = settled_chain(net, 3);  // party A cheats with seq 3
    uint64_t h = settle_height(chain, net);
    chain.submit(submission_for(net, layers[0][0], h + 1));
    chain.mine_block();
    REQUIRE(chain.channel(net.params.channel_id)->included_proof.has_value());

    auto outcome = finalize_channel(chain, net.params, 2);
    REQUIRE(outcome.ok());
    CHECK(outcome.value().kind == Outcome::Kind::FraudProven);

    std::map<Bytes, Amount> received;
    Amount total = 0;
    for (const auto& r : outcome.value().payouts) {
        received[r.recipient.encode()] += r.amount;
        total += r.amount;
    }
    // Everything that was locked comes back out: funds + both reserves.
    CHECK(total == net.params.total_funds() + 2 * net.params.rho);
    // B gets the stake plus his own reserve; the submitter W gets rho - fee.
    CHECK(received[net.params.party_b.encode()] >=
          net.params.total_funds() + net.params.rho);
    CHECK(received[layers[0][0].holder().encode()] == net.params.rho - 2);
}

TEST_CASE("finalize pays settled balances when nobody objects") {
    Net net(2, 2, 12);
    SimChain chain = settled_chain(net, 3);

    // Window still open: refuse.
    auto early = finalize_channel(chain, net.params, 0);
    CHECK_FALSE(early.ok());

    chain.mine_block();
    chain.mine_block();  // l*b = 2 rounds elapsed
    auto outcome = finalize_channel(chain, net.params, 0);
    REQUIRE(outcome.ok());
    CHECK(outcome.value().kind == Outcome::Kind::SettledClean);
    std::map<Bytes, Amount> received;
    Amount total = 0;
    for (const auto& r : outcome.value().payouts) {
        received[r.recipient.encode()] += r.amount;
        total += r.amount;
    }
    CHECK(total == net.params.total_funds() + 2 * net.params.rho);
    CHECK(received[net.params.party_a.encode()] ==
          net.params.fund_a + net.params.rho);
    CHECK(received[net.params.party_b.encode()] ==
          net.params.fund_b + net.params.rho);
}

TEST_CASE("at most one proof per channel, ever") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));
    SimChain chain = settled_chain(net, 3);
    uint64_t h = settle_height(chain, net);
    for (const auto& m : layers[0]) chain.submit(submission_for(net, m, h + 1));
    chain.mine_block();
    for (const auto& m : layers[1]) chain.submit(submission_for(net, m, h + 2));
    chain.mine_block();

    int proofs = 0;
    for (const Block& b : chain.blocks()) {
        if (b.entry && std::holds_alternative<PofSubmission>(*b.entry)) {
            ++proofs;
        }
    }
    CHECK(proofs == 1);
    for (const auto& rej : chain.last_rejections()) {
        CHECK(rej.error.code == Err::PriorProof);
    }
}

TEST_CASE("a proof after the window closes changes nothing") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));
    SimChain chain = settled_chain(net, 3);
    uint64_t h = settle_height(chain, net);
    chain.mine_block();
    chain.mine_block();  // window of l = 2 rounds has passed
    auto outcome = finalize_channel(chain, net.params, 0);
    REQUIRE(outcome.ok());
    CHECK(outcome.value().kind == Outcome::Kind::SettledClean);

    // Round l+1 submission: rejected, channel stays settled.
    chain.submit(submission_for(net, layers[0][0], h + 3));
    chain.mine_block();
    CHECK_FALSE(chain.channel(net.params.channel_id)->included_proof);
}

TEST_CASE("a mining watchtower preferring its own proof changes nothing") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));

    for (bool prefer : {false, true}) {
        SimChain chain = settled_chain(net, 3);
        chain.set_miner(layers[0][1].holder(), prefer);
        uint64_t h = settle_height(chain, net);
        for (const auto& m : layers[0]) {
            chain.submit(submission_for(net, m, h + 1));
        }
        chain.mine_block();
        const auto& proof = chain.channel(net.params.channel_id)->included_proof;
        REQUIRE(proof.has_value());  // a valid proof lands either way
        if (prefer) {
            CHECK(proof->submitter == layers[0][1].holder());
        }
    }
}

TEST_CASE("chain dump is one stable line per block") {
    Net net(2, 2, 12);
    auto topo = net.topology();
    auto layers = honest_tree(net, topo, net.update(5));
    SimChain chain = settled_chain(net, 3);
    uint64_t h = settle_height(chain, net);
    chain.submit(submission_for(net, layers[0][0], h + 1));
    chain.mine_block();

    std::string dump = chain.dump();
    CHECK(dump.find("funding") != std::string::npos);
    CHECK(dump.find("settlement") != std::string::npos);
    CHECK(dump.find("pof") != std::string::npos);
    CHECK(dump == chain.dump());
}
