/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include "test_util.hpp"

using namespace petra;
using petra::test::TestChain;

namespace {

struct OwnedOutput {
    OutputRef ref;
    Asset asset;
    KeyPair key;
};

// Mints one asset to a fresh key via the fixture meter.
OwnedOutput mint_one(TestChain& chain, Rng& rng, const Asset& asset, Timestep now) {
    KeyPair kp = KeyPair::generate(rng);
    TxId id = chain.mint("m0", {AssetOutput{asset, kp.address()}}, now, rng);
    return OwnedOutput{OutputRef{id, asset.kind(), 0}, asset, kp};
}

EnergyFinancialTx build_eft(Rng& rng, const std::vector<OwnedOutput>& inputs,
                            const std::vector<Asset>& outputs) {
    EnergyFinancialTx tx;
    tx.nonce = rng.byte_array<16>();
    for (const auto& in : inputs) {
        AssetInput ai;
        ai.out = in.ref;
        switch (in.asset.kind()) {
            case AssetKind::epa: tx.epa_in.push_back(ai); break;
            case AssetKind::eca: tx.eca_in.push_back(ai); break;
            case AssetKind::fa: tx.fa_in.push_back(ai); break;
        }
    }
    for (const auto& asset : outputs) {
        AssetOutput out{asset, test::random_address(rng)};
        switch (asset.kind()) {
            case AssetKind::epa: tx.epa_out.push_back(out); break;
            case AssetKind::eca: tx.eca_out.push_back(out); break;
            case AssetKind::fa: tx.fa_out.push_back(out); break;
        }
    }
    const Bytes payload = signing_payload(Transaction{tx});
    auto fill = [&](std::vector<AssetInput>& list) {
        for (auto& in : list) {
            for (const auto& owned : inputs) {
                if (owned.ref == in.out) {
                    in.proof = make_spend_proof(owned.key, payload);
                    break;
                }
            }
        }
    };
    fill(tx.epa_in);
    fill(tx.eca_in);
    fill(tx.fa_in);
    return tx;
}

Asset epa(std::int64_t watts, std::uint64_t s, std::uint64_t e) {
    return Asset::epa(Power::from_watts(watts), Timestep{s}, Timestep{e});
}

}  // namespace

TEST_SUITE_BEGIN("transactions");

TEST_CASE("eft split preserving per-timestep sums is valid") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(1);
    auto in = mint_one(chain, rng, epa(5, 0, 3), Timestep{1});
    auto tx = build_eft(rng, {in}, {epa(2, 0, 3), epa(3, 0, 3)});
    CHECK(validate_eft(chain.ledger, tx).ok());
    CHECK(test::brute_force_eft_balanced(tx, [&](const OutputRef&) { return in.asset; }));
}

TEST_CASE("eft losing coverage at t=3 reports the first mismatching timestep") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(2);
    auto in = mint_one(chain, rng, epa(5, 0, 3), Timestep{1});
    auto tx = build_eft(rng, {in}, {epa(5, 0, 2)});
    Verdict verdict = validate_eft(chain.ledger, tx);
    REQUIRE_FALSE(verdict.ok());
    REQUIRE(verdict.has(ViolationCode::balance_mismatch));
    bool found = false;
    for (const auto& v : verdict.violations)
        if (v.code == ViolationCode::balance_mismatch && v.kind == AssetKind::epa &&
            v.at == Timestep{3})
            found = true;
    CHECK(found);
    CHECK_FALSE(test::brute_force_eft_balanced(tx, [&](const OutputRef&) { return in.asset; }));
}

TEST_CASE("eft merging adjacent intervals is valid") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(3);
    auto a = mint_one(chain, rng, epa(4, 0, 1), Timestep{1});
    auto b = mint_one(chain, rng, epa(4, 2, 3), Timestep{1});
    auto tx = build_eft(rng, {a, b}, {epa(4, 0, 3)});
    CHECK(validate_eft(chain.ledger, tx).ok());
    // Independent oracle: direct summation over t in 0..3 gives 4 on both sides.
    auto resolve = [&](const OutputRef& ref) { return ref == a.ref ? a.asset : b.asset; };
    CHECK(test::brute_force_eft_balanced(tx, resolve));
}

TEST_CASE("spending the same output twice is rejected on the second transaction") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(4);
    auto in = mint_one(chain, rng, epa(5, 0, 3), Timestep{1});
    auto first = build_eft(rng, {in}, {epa(5, 0, 3)});
    CHECK(chain.ledger.append(Transaction{first}, Timestep{2}).ok());
    auto second = build_eft(rng, {in}, {epa(5, 0, 3)});
    Verdict verdict = validate_eft(chain.ledger, second);
    CHECK_FALSE(verdict.ok());
    CHECK(verdict.has(ViolationCode::double_spend));
}

TEST_CASE("validation reports all violations, not just the first") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(5);
    auto in = mint_one(chain, rng, epa(5, 0, 3), Timestep{1});
    EnergyFinancialTx tx = build_eft(rng, {in}, {epa(9, 0, 3)});  // balance broken
    tx.epa_in.push_back(AssetInput{OutputRef{sha256(Bytes{1}), AssetKind::epa, 0}, {}});
    Verdict verdict = validate_eft(chain.ledger, tx);
    CHECK(verdict.has(ViolationCode::unknown_input));
    CHECK(verdict.has(ViolationCode::balance_mismatch));
    CHECK(verdict.has(ViolationCode::bad_signature));  // extra input invalidated the payload
}

TEST_CASE("empty transaction is malformed") {
    TestChain chain;
    CHECK(validate_eft(chain.ledger, EnergyFinancialTx{}).has(ViolationCode::malformed));
}

TEST_CASE("fa totals must match") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(6);
    auto in = mint_one(chain, rng, Asset::fa(Money::parse("10.00")), Timestep{1});
    auto ok = build_eft(rng, {in}, {Asset::fa(Money::parse("4.00")), Asset::fa(Money::parse("6.00"))});
    CHECK(validate_eft(chain.ledger, ok).ok());
    auto bad = build_eft(rng, {in}, {Asset::fa(Money::parse("9.99"))});
    Verdict verdict = validate_eft(chain.ledger, bad);
    CHECK(verdict.has(ViolationCode::balance_mismatch));
}

TEST_CASE("balance soundness over randomized transactions") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(42);
    std::size_t accepted = 0, rejected = 0;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t s = rng.below(6);
        std::uint64_t e = s + rng.below(6);
        std::int64_t power = 1 + static_cast<std::int64_t>(rng.below(9));
        auto in = mint_one(chain, rng, epa(power, s, e), Timestep{1});

        std::vector<Asset> outs;
        bool intend_valid = rng.chance(0.6);
        if (intend_valid) {
            // Random split at the same interval plus occasional interval cut.
            std::int64_t first = 1 + rng.range(0, power - 1);
            if (first < power)
                outs = {epa(first, s, e), epa(power - first, s, e)};
            else
                outs = {epa(power, s, e)};
            if (rng.chance(0.3) && e > s) {
                // Re-emit as two interval pieces.
                std::uint64_t cut = s + rng.below(e - s);
                outs = {epa(power, s, cut), epa(power, cut + 1, e)};
            }
        } else {
            outs = {epa(power + rng.range(1, 3), s, e)};
        }
        auto tx = build_eft(rng, {in}, outs);
        bool oracle = test::brute_force_eft_balanced(
            tx, [&](const OutputRef&) { return in.asset; });
        Verdict verdict = validate_eft(chain.ledger, tx);
        CHECK(verdict.ok() == oracle);
        verdict.ok() ? ++accepted : ++rejected;
        if (verdict.ok())
            REQUIRE(chain.ledger.append(Transaction{tx}, Timestep{2}).ok());
    }
    CHECK(accepted > 100);
    CHECK(rejected > 100);
}

TEST_CASE("verdicts are byte-identical across repeated validation") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(7);
    auto in = mint_one(chain, rng, epa(5, 0, 3), Timestep{1});
    auto tx = build_eft(rng, {in}, {epa(7, 0, 3)});
    Verdict a = validate_eft(chain.ledger, tx);
    Verdict b = validate_eft(chain.ledger, tx);
    CHECK(a.encode() == b.encode());
}

TEST_CASE("mutating any signed field invalidates the input signatures") {
    TestChain chain;
    chain.register_meters({"m0"});
    Rng rng(8);
    auto in = mint_one(chain, rng, epa(6, 0, 3), Timestep{1});
    auto fa = mint_one(chain, rng, Asset::fa(Money::parse("2.00")), Timestep{1});
    auto tx = build_eft(rng, {in, fa}, {epa(6, 0, 3), Asset::fa(Money::parse("2.00"))});
    REQUIRE(validate_eft(chain.ledger, tx).ok());

    auto expect_bad_sig = [&](EnergyFinancialTx mutated) {
        Verdict verdict = validate_eft(chain.ledger, mutated);
        CHECK(verdict.has(ViolationCode::bad_signature));
    };
    {
        auto m = tx;
        m.nonce[0] ^= 1;
        expect_bad_sig(m);
    }
    {
        auto m = tx;
        m.epa_out[0].address = test::random_address(rng);
        expect_bad_sig(m);
    }
    {
        auto m = tx;
        m.epa_out[0].asset = epa(6, 0, 2);
        expect_bad_sig(m);  // balance also breaks; the signature must too
    }
    {
        auto m = tx;
        m.fa_out[0].asset = Asset::fa(Money::parse("1.99"));
        expect_bad_sig(m);
    }
}

TEST_CASE("smart-meter transaction validity") {
    TestChain chain;
    chain.register_meters({"m0", "banned"});
    Rng rng(9);

    SUBCASE("registered meter with good signature") {
        SmartMeterTx tx;
        tx.epa_out.push_back(AssetOutput{epa(5, 2, 4), test::random_address(rng)});
        tx.id = "m0";
        tx.nonce = rng.byte_array<16>();
        sign_smt(tx, chain.meter_keys["m0"]);
        CHECK(validate_smt(chain.ledger, tx, Timestep{1}).ok());
    }
    SUBCASE("banned meter rejected after the ban activates") {
        RegulatoryTx ban;
        ban.ban.push_back("banned");
        ban.price_consumption = chain.genesis().price_consumption;
        ban.price_production = chain.genesis().price_production;
        ban.time = Timestep{2};
        sign_rt(ban, chain.dso_key);
        REQUIRE(chain.ledger.append(Transaction{ban}, Timestep{1}).ok());

        SmartMeterTx tx;
        tx.epa_out.push_back(AssetOutput{epa(5, 5, 6), test::random_address(rng)});
        tx.id = "banned";
        tx.nonce = rng.byte_array<16>();
        sign_smt(tx, chain.meter_keys["banned"]);
        CHECK(validate_smt(chain.ledger, tx, Timestep{2}).ok());  // ban not yet active
        Verdict after = validate_smt(chain.ledger, tx, Timestep{3});
        CHECK(after.has(ViolationCode::banned_meter));
    }
    SUBCASE("signature by another meter's key") {
        SmartMeterTx tx;
        tx.epa_out.push_back(AssetOutput{epa(5, 2, 4), test::random_address(rng)});
        tx.id = "m0";
        tx.nonce = rng.byte_array<16>();
        sign_smt(tx, chain.meter_keys["banned"]);
        CHECK(validate_smt(chain.ledger, tx, Timestep{1}).has(ViolationCode::bad_signature));
    }
    SUBCASE("unknown meter") {
        SmartMeterTx tx;
        tx.id = "ghost";
        tx.nonce = rng.byte_array<16>();
        sign_smt(tx, chain.meter_keys["m0"]);
        CHECK(validate_smt(chain.ledger, tx, Timestep{1}).has(ViolationCode::unknown_meter));
    }
}

TEST_CASE("regulatory transaction validity") {
    TestChain chain;
    Rng rng(10);
    RegulatoryTx rt;
    rt.price_consumption = Money::parse("0.10");
    rt.price_production = Money::parse("0.02");

    SUBCASE("time equal to now is not in the past") {
        rt.time = Timestep{5};
        sign_rt(rt, chain.dso_key);
        CHECK(validate_rt(chain.ledger, rt, Timestep{5}).ok());
    }
    SUBCASE("time one tick earlier is stale") {
        rt.time = Timestep{4};
        sign_rt(rt, chain.dso_key);
        CHECK(validate_rt(chain.ledger, rt, Timestep{5}).has(ViolationCode::stale_timestep));
    }
    SUBCASE("forged signature") {
        rt.time = Timestep{5};
        KeyPair forger = KeyPair::generate(rng);
        sign_rt(rt, forger);
        CHECK(validate_rt(chain.ledger, rt, Timestep{5}).has(ViolationCode::bad_signature));
    }
    SUBCASE("duplicate ids in authorize list are malformed") {
        rt.time = Timestep{5};
        KeyPair k = KeyPair::generate(rng);
        rt.authorize = {MeterAuthorization{"m1", k.verify_key},
                        MeterAuthorization{"m1", k.verify_key}};
        sign_rt(rt, chain.dso_key);
        CHECK(validate_rt(chain.ledger, rt, Timestep{5}).has(ViolationCode::malformed));
    }
}

TEST_CASE("active prices follow the last recorded regulation with time < t") {
    TestChain chain;
    auto mk = [&](Money pc, std::uint64_t time) {
        RegulatoryTx rt;
        rt.price_consumption = pc;
        rt.price_production = chain.genesis().price_production;
        rt.time = Timestep{time};
        sign_rt(rt, chain.dso_key);
        return rt;
    };
    SUBCASE("no regulation: genesis prices") {
        CHECK(active_prices(chain.ledger, Timestep{1}).consumption ==
              chain.genesis().price_consumption);
    }
    SUBCASE("later ledger entry with the same activation overrides") {
        REQUIRE(chain.ledger.append(Transaction{mk(Money::parse("0.07"), 5)}, Timestep{0}).ok());
        REQUIRE(chain.ledger.append(Transaction{mk(Money::parse("0.09"), 5)}, Timestep{0}).ok());
        CHECK(active_prices(chain.ledger, Timestep{6}).consumption == Money::parse("0.09"));
        // Strictly-less boundary: at t=5 the regulation is not active yet.
        CHECK(active_prices(chain.ledger, Timestep{5}).consumption ==
              chain.genesis().price_consumption);
    }
}

TEST_CASE("active registry folds authorize and ban in ledger order") {
    TestChain chain;
    Rng rng(11);
    KeyPair k1 = KeyPair::generate(rng);
    KeyPair k2 = KeyPair::generate(rng);
    auto mk = [&](std::vector<MeterAuthorization> auth, std::vector<MeterId> ban,
                  std::uint64_t time) {
        RegulatoryTx rt;
        rt.authorize = std::move(auth);
        rt.ban = std::move(ban);
        rt.price_consumption = chain.genesis().price_consumption;
        rt.price_production = chain.genesis().price_production;
        rt.time = Timestep{time};
        sign_rt(rt, chain.dso_key);
        return rt;
    };
    SUBCASE("authorize then ban leaves the meter banned") {
        REQUIRE(chain.ledger.append(Transaction{mk({{"m1", k1.verify_key}}, {}, 0)}, Timestep{0}).ok());
        REQUIRE(chain.ledger.append(Transaction{mk({}, {"m1"}, 0)}, Timestep{0}).ok());
        auto reg = active_registry(chain.ledger, Timestep{1});
        REQUIRE(reg.count("m1"));
        CHECK(reg["m1"].banned);
    }
    SUBCASE("ban then authorize restores the meter") {
        REQUIRE(chain.ledger.append(Transaction{mk({}, {"m1"}, 0)}, Timestep{0}).ok());
        REQUIRE(chain.ledger.append(Transaction{mk({{"m1", k1.verify_key}}, {}, 0)}, Timestep{0}).ok());
        auto reg = active_registry(chain.ledger, Timestep{1});
        REQUIRE(reg.count("m1"));
        CHECK_FALSE(reg["m1"].banned);
    }
    SUBCASE("re-authorization replaces the key") {
        REQUIRE(chain.ledger.append(Transaction{mk({{"m1", k1.verify_key}}, {}, 0)}, Timestep{0}).ok());
        REQUIRE(chain.ledger.append(Transaction{mk({{"m1", k2.verify_key}}, {}, 0)}, Timestep{0}).ok());
        auto reg = active_registry(chain.ledger, Timestep{1});
        CHECK(reg["m1"].pubkey == k2.verify_key);
    }
}

TEST_SUITE_END();
