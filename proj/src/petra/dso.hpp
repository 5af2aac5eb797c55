/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "petra/board.hpp"
#include "petra/ledger.hpp"

namespace petra {

// Net load committed on the ledger plus the offered-but-unmatched sides of
// the board, per timestep over a horizon. Positive committed load is net
// consumption.
struct LoadForecast {
    Timestep from;
    Timestep to;  // inclusive
    std::map<Timestep, Power> committed;    // unspent ECA minus unspent EPA
    std::map<Timestep, Power> open_supply;  // open asks
    std::map<Timestep, Power> open_demand;  // open bids

    std::string render_line(Timestep t) const;
};

class Dso {
public:
    explicit Dso(KeyPair key) : key_(key) {}

    const VerifyKey& pubkey() const { return key_.verify_key; }

    RegulatoryTx issue_regulation(std::vector<MeterAuthorization> authorize,
                                  std::vector<MeterId> ban, Prices prices,
                                  Timestep effective) const;

    // Pure aggregation over the snapshot pair. Outputs held at the excluded
    // addresses (meter deposit addresses, reported by the trusted meters)
    // are retired holdings, not outstanding trades.
    static LoadForecast forecast_load(const Ledger& view, const BidBoard& board, Timestep from,
                                      Timestep to, const std::set<Address>& excluded);

    // Threshold price rule: when committed load anywhere in the horizon
    // exceeds `cap`, raise the consumption price one `bump`.
    struct ThresholdPolicy {
        Power cap;
        Money bump;
    };
    std::optional<RegulatoryTx> apply_threshold(const LoadForecast& forecast, Prices current,
                                                const ThresholdPolicy& policy,
                                                Timestep effective) const;

private:
    KeyPair key_;
};

}  // namespace petra
