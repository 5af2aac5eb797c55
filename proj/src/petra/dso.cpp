/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/dso.hpp"

namespace petra {

std::string LoadForecast::render_line(Timestep t) const {
    auto get = [&](const std::map<Timestep, Power>& m) {
        auto it = m.find(t);
        return it == m.end() ? Power{} : it->second;
    };
    return "t=" + t.str() + " committed=" + get(committed).str() +
           " supply=" + get(open_supply).str() + " demand=" + get(open_demand).str();
}

RegulatoryTx Dso::issue_regulation(std::vector<MeterAuthorization> authorize,
                                   std::vector<MeterId> ban, Prices prices,
                                   Timestep effective) const {
    RegulatoryTx tx;
    tx.authorize = std::move(authorize);
    tx.ban = std::move(ban);
    tx.price_consumption = prices.consumption;
    tx.price_production = prices.production;
    tx.time = effective;
    sign_rt(tx, key_);
    return tx;
}

LoadForecast Dso::forecast_load(const Ledger& view, const BidBoard& board, Timestep from,
                                Timestep to, const std::set<Address>& excluded) {
    LoadForecast forecast;
    forecast.from = from;
    forecast.to = to;
    for (Timestep t = from; t <= to; t = t.next()) {
        Power committed;
        for (const auto& [ref, utxo] : view.unspent_set()) {
            if (excluded.count(utxo.address))
                continue;
            if (utxo.asset.kind() == AssetKind::eca)
                committed += coverage(utxo.asset, t);
            else if (utxo.asset.kind() == AssetKind::epa)
                committed -= coverage(utxo.asset, t);
        }
        forecast.committed[t] = committed;

        Power supply, demand;
        for (const auto& [id, order] : board.orders()) {
            if (order.status != OrderStatus::open)
                continue;
            if (order.side == OrderSide::ask)
                supply += coverage(order.asset, t);
            else
                demand += coverage(order.asset, t);
        }
        forecast.open_supply[t] = supply;
        forecast.open_demand[t] = demand;
        if (t.index() == UINT64_MAX)
            break;
    }
    return forecast;
}

std::optional<RegulatoryTx> Dso::apply_threshold(const LoadForecast& forecast, Prices current,
                                                 const ThresholdPolicy& policy,
                                                 Timestep effective) const {
    for (const auto& [t, load] : forecast.committed) {
        if (load > policy.cap) {
            Prices raised{current.consumption + policy.bump, current.production};
            return issue_regulation({}, {}, raised, effective);
        }
    }
    return std::nullopt;
}

}  // namespace petra
