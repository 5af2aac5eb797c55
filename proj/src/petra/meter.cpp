/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/meter.hpp"

#include <algorithm>

namespace petra {

const char* to_string(DenialCode code) {
    switch (code) {
        case DenialCode::limit_exceeded: return "LIMIT_EXCEEDED";
        case DenialCode::past_interval: return "PAST_INTERVAL";
        case DenialCode::credit_exceeded: return "CREDIT_EXCEEDED";
        case DenialCode::obligation_outstanding: return "OBLIGATION_OUTSTANDING";
    }
    return "?";
}

std::string WithdrawalDenial::str() const {
    std::string out = to_string(code);
    if (kind)
        out += std::string("{") + to_string(*kind) + (at ? ",t=" + at->str() : "") + "}";
    else if (at)
        out += "{t=" + at->str() + "}";
    return out;
}

SmartMeter::SmartMeter(MeterId id, ProsumerId prosumer, KeyPair key, MeterLimits limits, Rng rng)
    : id_(std::move(id)),
      prosumer_(std::move(prosumer)),
      key_(key),
      limits_(limits),
      rng_(rng) {}

Power SmartMeter::coverage_at(const std::vector<Asset>& assets, Timestep t) {
    Power total;
    for (const auto& a : assets)
        total += coverage(a, t);
    return total;
}

WithdrawalResult SmartMeter::request_withdrawal(const std::vector<AssetOutput>& want,
                                                Timestep now) {
    auto deny = [](DenialCode code, std::optional<AssetKind> kind,
                   std::optional<Timestep> at) {
        return WithdrawalResult{std::nullopt, WithdrawalDenial{code, kind, at}};
    };

    for (const auto& out : want) {
        if (out.asset.is_energy() && out.asset.start() < now)
            return deny(DenialCode::past_interval, out.asset.kind(), out.asset.start());
    }
    if (obligation_overdue(now)) {
        for (const auto& [t, owed] : obligation_)
            if (!owed.is_zero() && t < now)
                return deny(DenialCode::obligation_outstanding, AssetKind::eca, t);
    }

    std::vector<Asset> req_epa, req_eca;
    Money req_fa;
    for (const auto& out : want) {
        switch (out.asset.kind()) {
            case AssetKind::epa: req_epa.push_back(out.asset); break;
            case AssetKind::eca: req_eca.push_back(out.asset); break;
            case AssetKind::fa: req_fa += out.asset.amount(); break;
        }
    }

    auto check_limit = [&](const std::vector<Asset>& history, const std::vector<Asset>& requested,
                           Power max, AssetKind kind) -> std::optional<WithdrawalResult> {
        std::vector<Asset> all = history;
        all.insert(all.end(), requested.begin(), requested.end());
        for (Timestep t : coverage_breakpoints(all)) {
            if (coverage_at(history, t) + coverage_at(requested, t) > max)
                return deny(DenialCode::limit_exceeded, kind, t);
        }
        return std::nullopt;
    };
    if (auto denial = check_limit(created_epa_, req_epa, limits_.max_epa, AssetKind::epa))
        return *denial;
    if (auto denial = check_limit(created_eca_, req_eca, limits_.max_eca, AssetKind::eca))
        return *denial;
    if (fa_outstanding_ + req_fa > limits_.credit_limit)
        return deny(DenialCode::credit_exceeded, AssetKind::fa, std::nullopt);

    SmartMeterTx tx;
    for (const auto& out : want) {
        switch (out.asset.kind()) {
            case AssetKind::epa: tx.epa_out.push_back(out); break;
            case AssetKind::eca: tx.eca_out.push_back(out); break;
            case AssetKind::fa: tx.fa_out.push_back(out); break;
        }
    }
    tx.id = id_;
    tx.nonce = rng_.byte_array<16>();
    sign_smt(tx, key_);

    created_.push_back(tx);
    created_epa_.insert(created_epa_.end(), req_epa.begin(), req_epa.end());
    created_eca_.insert(created_eca_.end(), req_eca.begin(), req_eca.end());
    fa_outstanding_ += req_fa;
    // Withdrawn production capacity must come back as consumption assets.
    for (const auto& a : req_epa)
        for (Timestep t = a.start(); t <= a.end(); t = t.next())
            obligation_[t] += a.power();
    return WithdrawalResult{tx, std::nullopt};
}

Address SmartMeter::fresh_deposit_address() { return deposit_wallet_.fresh_address(rng_); }

void SmartMeter::reduce_obligation(const Asset& eca_like, bool flag_excess) {
    for (Timestep t = eca_like.start(); t <= eca_like.end(); t = t.next()) {
        Power& owed = obligation_[t];
        if (eca_like.power() > owed) {
            if (flag_excess && !eca_like.power().is_zero())
                over_deposit_flags_.push_back(OverDepositFlag{t, eca_like.power() - owed});
            owed = Power{};
        } else {
            owed -= eca_like.power();
        }
    }
}

void SmartMeter::observe_ledger(const Ledger& view) {
    const auto& entries = view.entries();
    for (; watermark_ < entries.size(); ++watermark_) {
        const LedgerEntry& entry = entries[watermark_];
        if (const auto* smt = std::get_if<SmartMeterTx>(&entry.tx)) {
            if (smt->id != id_)
                continue;
            for (const auto& out : smt->epa_out)
                recorded_epa_.push_back(out.asset);
            for (const auto& out : smt->fa_out)
                fa_withdrawn_by_slot_[entry.timeslot] += out.asset.amount();
            continue;
        }
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry.tx);
        if (!eft)
            continue;
        for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa}) {
            for (const auto& out : *outputs_of(entry.tx, kind)) {
                if (!deposit_wallet_.controls(out.address))
                    continue;
                deposits_.push_back(DepositRecord{entry.timeslot, out.asset, entry.id});
                switch (kind) {
                    case AssetKind::fa:
                        fa_outstanding_ -= out.asset.amount();
                        fa_deposited_by_slot_[entry.timeslot] += out.asset.amount();
                        break;
                    case AssetKind::eca:
                        reduce_obligation(out.asset, /*flag_excess=*/true);
                        break;
                    case AssetKind::epa:
                        deposited_epa_.push_back(out.asset);
                        // Production capacity returned unused before its
                        // start can no longer trade; cancel its obligation.
                        if (entry.timeslot < out.asset.start())
                            reduce_obligation(out.asset, /*flag_excess=*/false);
                        break;
                }
            }
        }
    }
}

void SmartMeter::record_measurement(Timestep t, Power net_consumption) {
    measurements_[t] = net_consumption;
}

std::optional<Power> SmartMeter::energy_balance(Timestep t) const {
    auto it = measurements_.find(t);
    if (it == measurements_.end())
        return std::nullopt;
    return it->second - coverage_at(deposited_epa_, t) + coverage_at(recorded_epa_, t);
}

std::optional<Money> SmartMeter::compute_bill(Timestep t, const LedgerView& view) const {
    auto energy = energy_balance(t);
    if (!energy)
        return std::nullopt;
    Money withdrawn, deposited;
    if (auto it = fa_withdrawn_by_slot_.find(t); it != fa_withdrawn_by_slot_.end())
        withdrawn = it->second;
    if (auto it = fa_deposited_by_slot_.find(t); it != fa_deposited_by_slot_.end())
        deposited = it->second;
    Prices prices = active_prices(view, t);
    Money rate = energy->negative() ? prices.production : prices.consumption;
    return withdrawn - deposited + energy_cost(*energy, rate);
}

std::optional<BillLine> SmartMeter::bill_line(Timestep t, const LedgerView& view) const {
    auto energy = energy_balance(t);
    auto bill = compute_bill(t, view);
    if (!energy || !bill)
        return std::nullopt;
    return BillLine{prosumer_, t, *energy, *bill};
}

Power SmartMeter::obligation_at(Timestep t) const {
    auto it = obligation_.find(t);
    return it == obligation_.end() ? Power{} : it->second;
}

bool SmartMeter::obligation_overdue(Timestep now) const {
    for (const auto& [t, owed] : obligation_) {
        if (!(t < now))
            break;
        if (!owed.is_zero())
            return true;
    }
    return false;
}

}  // namespace petra
