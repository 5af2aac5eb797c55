/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "petra/fixed.hpp"
#include "petra/timestep.hpp"
#include "petra/validation.hpp"

namespace petra {

enum class Policy : std::uint8_t {
    sell,
    buy,
    idle,
    over_withdraw,     // requests beyond MAXEPA, then forges a meter tx
    obligation_dodge,  // sells but never deposits the owed consumption assets
    double_spend,      // races two transfers of the same output
    spam_asks,         // posts asks without valid ownership proofs
};

const char* to_string(Policy p);
std::optional<Policy> policy_from_string(const std::string& s);

bool is_adversarial(Policy p);

struct ProsumerSpec {
    std::string id;
    Policy policy = Policy::idle;
    Power max_epa;            // watts per timestep
    Power max_eca;
    Money credit;
    Money price;              // ask price (sell) or price ceiling (buy)
    std::uint32_t trade_units = 1;
    Power measurement_bias;   // offset added to delivered-as-traded ground truth
};

struct PriceChange {
    Timestep effective;
    Prices prices;
};

struct BanEvent {
    std::string prosumer;
    Timestep effective;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::uint64_t ticks = 100;
    std::uint64_t tick_seconds = 4;
    std::size_t replicas = 3;
    std::uint64_t latency_ticks = 1;
    Prices genesis_prices{Money::parse("0.05"), Money::parse("0.03")};

    std::uint64_t start_tick = 2;
    std::uint64_t epoch_ticks = 20;

    bool mixing_enabled = true;
    std::size_t k_min = 8;
    std::uint64_t mix_rounds = 2;
    std::uint64_t round_deadline_ticks = 3;
    bool enforce_denominations = true;

    bool discipline = true;  // idle agents keep the standard withdrawal footprint

    Power epa_unit = Power::from_watts(100);   // denomination templates
    Power eca_unit = Power::from_watts(100);
    Money fa_unit = Money::parse("120.00");
    std::uint32_t bundle_units = 2;            // units per kind per epoch

    std::uint64_t challenge_ttl_ticks = 10;
    std::uint64_t token_ttl_ticks = 10;
    bool zero_transfer_proofs = false;

    std::string dso_strategy = "fixed";        // or "threshold"
    Power dso_cap = Power::from_watts(1000);
    Money dso_bump = Money::parse("0.01");
    std::uint64_t forecast_horizon = 16;
    std::vector<PriceChange> price_changes;
    std::vector<BanEvent> bans;

    std::vector<ProsumerSpec> prosumers;

    // Derived schedule (see sim): tick offsets inside an epoch.
    std::uint64_t mix_set_offset(std::uint64_t round) const {
        return 2 + round * (round_deadline_ticks + 1);
    }
    std::uint64_t trade_offset() const {
        return mixing_enabled ? mix_set_offset(mix_rounds) : 4;
    }
    std::uint64_t deposit_offset() const { return trade_offset() + 7; }
    std::uint64_t min_epoch_ticks() const { return deposit_offset() + 3; }

    // Field-path diagnostics; empty when the config is runnable.
    std::vector<std::string> validate() const;

    std::string to_json() const;
    static ScenarioConfig from_json(const std::string& text);
};

}  // namespace petra
