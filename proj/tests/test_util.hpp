/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <petra/broadcast.hpp>
#include <petra/meter.hpp>

namespace petra::test {

// Single-ledger fixture with a DSO key and a set of registered meters.
// Timestep 0 carries the bootstrap regulation, so meters can mint from
// timestep 1 on.
struct TestChain {
    Rng rng{7};
    KeyPair dso_key = KeyPair::generate(rng);
    Ledger ledger;
    std::map<MeterId, KeyPair> meter_keys;

    explicit TestChain(Money price_consumption = Money::parse("0.05"),
                       Money price_production = Money::parse("0.03"))
        : ledger(GenesisHeader{dso_key.verify_key, price_consumption, price_production,
                               kSignatureScheme, 4}) {}

    const GenesisHeader& genesis() const { return ledger.genesis(); }

    KeyPair register_meters(const std::vector<MeterId>& ids, Timestep effective = Timestep{0},
                            Timestep now = Timestep{0}) {
        RegulatoryTx rt;
        for (const auto& id : ids) {
            KeyPair key = KeyPair::generate(rng);
            meter_keys[id] = key;
            rt.authorize.push_back(MeterAuthorization{id, key.verify_key});
        }
        rt.price_consumption = genesis().price_consumption;
        rt.price_production = genesis().price_production;
        rt.time = effective;
        sign_rt(rt, dso_key);
        auto verdict = ledger.append(Transaction{rt}, now);
        if (!verdict.ok())
            throw std::logic_error("fixture registration failed: " + verdict.str());
        return dso_key;
    }

    // Mints the given outputs from a registered meter at `now`.
    TxId mint(const MeterId& id, const std::vector<AssetOutput>& outs, Timestep now,
              Rng& nonce_rng) {
        SmartMeterTx tx;
        for (const auto& out : outs) {
            switch (out.asset.kind()) {
                case AssetKind::epa: tx.epa_out.push_back(out); break;
                case AssetKind::eca: tx.eca_out.push_back(out); break;
                case AssetKind::fa: tx.fa_out.push_back(out); break;
            }
        }
        tx.id = id;
        tx.nonce = nonce_rng.byte_array<16>();
        sign_smt(tx, meter_keys.at(id));
        auto verdict = ledger.append(Transaction{tx}, now);
        if (!verdict.ok())
            throw std::logic_error("fixture mint failed: " + verdict.str());
        return tx_id(Transaction{tx});
    }
};

// Independent balance oracle: walks every timestep of the touched range
// directly instead of using breakpoints. `resolve` maps an input ref to the
// asset it spends.
template <typename Resolve>
bool brute_force_eft_balanced(const EnergyFinancialTx& tx, Resolve&& resolve) {
    std::vector<Asset> in_epa, in_eca;
    Money fa_in, fa_out;
    for (const auto& in : tx.epa_in)
        in_epa.push_back(resolve(in.out));
    for (const auto& in : tx.eca_in)
        in_eca.push_back(resolve(in.out));
    for (const auto& in : tx.fa_in)
        fa_in += resolve(in.out).amount();
    for (const auto& out : tx.fa_out)
        fa_out += out.asset.amount();
    if (fa_in != fa_out)
        return false;

    auto check_kind = [&](const std::vector<Asset>& ins, const std::vector<AssetOutput>& outs) {
        std::uint64_t lo = UINT64_MAX, hi = 0;
        auto widen = [&](const Asset& a) {
            lo = std::min(lo, a.start().index());
            hi = std::max(hi, a.end().index());
        };
        for (const auto& a : ins)
            widen(a);
        for (const auto& o : outs)
            widen(o.asset);
        if (lo == UINT64_MAX)
            return outs.empty() && ins.empty();
        for (std::uint64_t t = lo; t <= hi; ++t) {
            Power in_sum, out_sum;
            for (const auto& a : ins)
                in_sum += coverage(a, Timestep{t});
            for (const auto& o : outs)
                out_sum += coverage(o.asset, Timestep{t});
            if (in_sum != out_sum)
                return false;
        }
        return true;
    };
    return check_kind(in_epa, tx.epa_out) && check_kind(in_eca, tx.eca_out);
}

inline Address random_address(Rng& rng) { return KeyPair::generate(rng).address(); }

}  // namespace petra::test
