/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/validation.hpp"

#include <algorithm>

namespace petra {

namespace {

// Resolves inputs of one list: existence, kind match, spent state, signature.
// Returns the referenced assets that resolved, for the balance check.
std::vector<Asset> check_inputs(const LedgerView& view, const std::vector<AssetInput>& inputs,
                                AssetKind expected, const Bytes& payload, Verdict& verdict) {
    std::vector<Asset> resolved;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& in = inputs[i];
        const std::string where = std::string(to_string(expected)) + "_in[" + std::to_string(i) + "]";
        if (in.out.list != expected) {
            verdict.add(ViolationCode::unknown_input, where + " references a " +
                                                          to_string(in.out.list) + " output");
            continue;
        }
        const Utxo* utxo = view.find_unspent(in.out);
        if (!utxo) {
            if (view.is_spent(in.out))
                verdict.add(ViolationCode::double_spend, where + " -> " + in.out.str());
            else
                verdict.add(ViolationCode::unknown_input, where + " -> " + in.out.str());
            continue;
        }
        if (utxo->asset.kind() != expected) {
            verdict.add(ViolationCode::unknown_input,
                        where + " resolves to a " + to_string(utxo->asset.kind()) + " output");
            continue;
        }
        if (!verify_for_address(utxo->address, in.proof.key, payload, in.proof.sig))
            verdict.add(ViolationCode::bad_signature, where);
        resolved.push_back(utxo->asset);
    }
    return resolved;
}

void check_energy_balance(const std::vector<Asset>& in_assets,
                          const std::vector<AssetOutput>& outs, AssetKind kind,
                          Verdict& verdict) {
    std::vector<Asset> all = in_assets;
    for (const auto& o : outs)
        all.push_back(o.asset);
    for (Timestep t : coverage_breakpoints(all)) {
        Power in_sum, out_sum;
        for (const auto& a : in_assets)
            in_sum += coverage(a, t);
        for (const auto& o : outs)
            out_sum += coverage(o.asset, t);
        if (in_sum != out_sum) {
            verdict.add(ViolationCode::balance_mismatch, kind, t,
                        "in=" + in_sum.str() + " out=" + out_sum.str());
            return;  // first mismatching timestep identifies the violation
        }
    }
}

bool outputs_well_formed(const Transaction& tx, Verdict& verdict) {
    bool ok = true;
    for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa}) {
        const auto* outs = outputs_of(tx, kind);
        if (!outs)
            continue;
        for (const auto& o : *outs) {
            if (o.asset.kind() != kind) {
                verdict.add(ViolationCode::malformed,
                            std::string(to_string(kind)) + "_out holds a " +
                                to_string(o.asset.kind()) + " asset");
                ok = false;
            }
        }
    }
    return ok;
}

}  // namespace

Verdict validate_eft(const LedgerView& view, const EnergyFinancialTx& tx) {
    Verdict verdict;
    if (tx.empty())
        verdict.add(ViolationCode::malformed, "transaction has no inputs or outputs");
    outputs_well_formed(Transaction{tx}, verdict);

    const Bytes payload = signing_payload(Transaction{tx});
    auto epa_assets = check_inputs(view, tx.epa_in, AssetKind::epa, payload, verdict);
    auto eca_assets = check_inputs(view, tx.eca_in, AssetKind::eca, payload, verdict);
    auto fa_assets = check_inputs(view, tx.fa_in, AssetKind::fa, payload, verdict);

    // Duplicate references within the transaction spend one output twice.
    std::vector<OutputRef> refs;
    for (const auto* list : {&tx.epa_in, &tx.eca_in, &tx.fa_in})
        for (const auto& in : *list)
            refs.push_back(in.out);
    std::sort(refs.begin(), refs.end());
    if (std::adjacent_find(refs.begin(), refs.end()) != refs.end())
        verdict.add(ViolationCode::double_spend, "output referenced twice within the transaction");

    check_energy_balance(epa_assets, tx.epa_out, AssetKind::epa, verdict);
    check_energy_balance(eca_assets, tx.eca_out, AssetKind::eca, verdict);

    Money fa_in_total, fa_out_total;
    for (const auto& a : fa_assets)
        fa_in_total += a.amount();
    for (const auto& o : tx.fa_out)
        fa_out_total += o.asset.amount();
    if (fa_in_total != fa_out_total)
        verdict.add(ViolationCode::balance_mismatch, AssetKind::fa,
                    "in=" + fa_in_total.str() + " out=" + fa_out_total.str());
    return verdict;
}

Verdict validate_smt(const LedgerView& view, const SmartMeterTx& tx, Timestep now) {
    Verdict verdict;
    outputs_well_formed(Transaction{tx}, verdict);
    auto status = meter_status(view, tx.id, now);
    if (!status) {
        verdict.add(ViolationCode::unknown_meter, tx.id);
        return verdict;
    }
    if (status->banned)
        verdict.add(ViolationCode::banned_meter, tx.id);
    if (!verify(status->pubkey, signing_payload(Transaction{tx}), tx.sig))
        verdict.add(ViolationCode::bad_signature, "meter " + tx.id);
    return verdict;
}

Verdict validate_rt(const LedgerView& view, const RegulatoryTx& tx, Timestep now) {
    Verdict verdict;
    if (tx.time < now)
        verdict.add(ViolationCode::stale_timestep,
                    "time=" + tx.time.str() + " now=" + now.str());
    if (tx.price_consumption.negative() || tx.price_production.negative())
        verdict.add(ViolationCode::malformed, "negative price");
    auto dup = [](std::vector<MeterId> ids) {
        std::sort(ids.begin(), ids.end());
        return std::adjacent_find(ids.begin(), ids.end()) != ids.end();
    };
    std::vector<MeterId> auth_ids;
    for (const auto& a : tx.authorize)
        auth_ids.push_back(a.id);
    if (dup(auth_ids) || dup(tx.ban))
        verdict.add(ViolationCode::malformed, "duplicate meter id in authorize/ban list");
    if (!verify(view.genesis().dso_key, signing_payload(Transaction{tx}), tx.sig))
        verdict.add(ViolationCode::bad_signature, "regulatory signature");
    return verdict;
}

Verdict validate_tx(const LedgerView& view, const Transaction& tx, Timestep now) {
    return std::visit(
        [&](const auto& t) -> Verdict {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, EnergyFinancialTx>)
                return validate_eft(view, t);
            else if constexpr (std::is_same_v<T, SmartMeterTx>)
                return validate_smt(view, t, now);
            else
                return validate_rt(view, t, now);
        },
        tx);
}

Prices active_prices(const LedgerView& view, Timestep t) {
    Prices prices{view.genesis().price_consumption, view.genesis().price_production};
    for (const auto& rec : view.regulatory_history()) {
        if (rec.tx.time < t)
            prices = Prices{rec.tx.price_consumption, rec.tx.price_production};
    }
    return prices;
}

std::map<MeterId, MeterStatus> active_registry(const LedgerView& view, Timestep t) {
    std::map<MeterId, MeterStatus> registry;
    for (const auto& rec : view.regulatory_history()) {
        if (!(rec.tx.time < t))
            continue;
        for (const auto& a : rec.tx.authorize)
            registry[a.id] = MeterStatus{a.pubkey, false};
        for (const auto& id : rec.tx.ban) {
            auto it = registry.find(id);
            if (it == registry.end())
                registry[id] = MeterStatus{VerifyKey{}, true};
            else
                it->second.banned = true;
        }
    }
    return registry;
}

std::optional<MeterStatus> meter_status(const LedgerView& view, const MeterId& id, Timestep t) {
    auto registry = active_registry(view, t);
    auto it = registry.find(id);
    if (it == registry.end())
        return std::nullopt;
    return it->second;
}

}  // namespace petra
