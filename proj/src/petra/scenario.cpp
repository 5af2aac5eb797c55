/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/scenario.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

namespace petra {

using json = nlohmann::ordered_json;

const char* to_string(Policy p) {
    switch (p) {
        case Policy::sell: return "sell";
        case Policy::buy: return "buy";
        case Policy::idle: return "idle";
        case Policy::over_withdraw: return "over_withdraw";
        case Policy::obligation_dodge: return "obligation_dodge";
        case Policy::double_spend: return "double_spend";
        case Policy::spam_asks: return "spam_asks";
    }
    return "?";
}

std::optional<Policy> policy_from_string(const std::string& s) {
    for (Policy p : {Policy::sell, Policy::buy, Policy::idle, Policy::over_withdraw,
                     Policy::obligation_dodge, Policy::double_spend, Policy::spam_asks})
        if (s == to_string(p))
            return p;
    return std::nullopt;
}

bool is_adversarial(Policy p) {
    return p == Policy::over_withdraw || p == Policy::obligation_dodge ||
           p == Policy::double_spend || p == Policy::spam_asks;
}

namespace {

Money money_field(const json& j, const char* key, Money fallback) {
    if (!j.contains(key))
        return fallback;
    auto v = Money::try_parse(j.at(key).get<std::string>());
    if (!v)
        throw std::invalid_argument(std::string("bad money literal in field ") + key);
    return *v;
}

Power power_field(const json& j, const char* key, Power fallback) {
    if (!j.contains(key))
        return fallback;
    auto v = Power::try_parse(j.at(key).get<std::string>());
    if (!v)
        throw std::invalid_argument(std::string("bad power literal in field ") + key);
    return *v;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::vector<std::string> ScenarioConfig::validate() const {
    std::vector<std::string> errors;
    auto bad = [&](const std::string& path, const std::string& why) {
        errors.push_back(path + ": " + why);
    };
    if (ticks == 0 || ticks > (1ull << 32))
        bad("ticks", "must be in [1, 2^32]");
    if (tick_seconds == 0)
        bad("tick_seconds", "must be positive");
    if (replicas == 0)
        bad("replicas", "at least one replica");
    if (latency_ticks == 0 || latency_ticks > 2)
        bad("latency_ticks", "supported range is [1, 2]");
    if (genesis_prices.consumption.negative() || genesis_prices.production.negative())
        bad("genesis_prices", "prices must be non-negative");
    if (epoch_ticks < min_epoch_ticks())
        bad("epoch_ticks", "must be at least " + std::to_string(min_epoch_ticks()) +
                               " for the configured mixing schedule");
    if (start_tick < latency_ticks + 1)
        bad("start_tick", "agents must start after the bootstrap regulation lands");
    if (mixing_enabled && k_min == 0)
        bad("mixing.k_min", "must be positive");
    if (mixing_enabled && mix_rounds == 0)
        bad("mixing.rounds", "must be positive when mixing is enabled");
    if (epa_unit <= Power{} || eca_unit <= Power{})
        bad("denominations", "energy units must be positive");
    if (fa_unit <= Money{})
        bad("denominations.fa", "must be positive");
    if (bundle_units == 0)
        bad("bundle_units", "must be positive");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < prosumers.size(); ++i) {
        const auto& p = prosumers[i];
        const std::string path = "prosumers[" + std::to_string(i) + "]";
        if (p.id.empty())
            bad(path + ".id", "must be non-empty");
        if (!ids.insert(p.id).second)
            bad(path + ".id", "duplicate id " + p.id);
        if (p.max_epa.negative() || p.max_eca.negative())
            bad(path, "limits must be non-negative");
        if (p.credit.negative())
            bad(path + ".credit", "must be non-negative");
        if (p.price.negative())
            bad(path + ".price", "must be non-negative");
        if (p.trade_units > bundle_units)
            bad(path + ".trade_units", "exceeds bundle_units");
        Power bundle_power = epa_unit.scaled(bundle_units);
        bool withdraws = discipline || !is_adversarial(p.policy);
        if (withdraws && p.policy != Policy::over_withdraw && bundle_power > p.max_epa &&
            (discipline || p.policy == Policy::sell))
            bad(path + ".max_epa_watts", "standard bundle would exceed the limit");
    }
    for (std::size_t i = 0; i < price_changes.size(); ++i)
        if (price_changes[i].effective.index() < latency_ticks)
            bad("dso.price_changes[" + std::to_string(i) + "]", "effective tick too early");
    for (std::size_t i = 0; i < bans.size(); ++i)
        if (!ids.count(bans[i].prosumer))
            bad("dso.bans[" + std::to_string(i) + "]", "unknown prosumer " + bans[i].prosumer);
    if (dso_strategy != "fixed" && dso_strategy != "threshold")
        bad("dso.strategy", "unknown strategy " + dso_strategy);
    return errors;
}

std::string ScenarioConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["ticks"] = ticks;
    j["tick_seconds"] = tick_seconds;
    j["replicas"] = replicas;
    j["latency_ticks"] = latency_ticks;
    j["genesis_prices"] = {{"consumption", genesis_prices.consumption.str()},
                           {"production", genesis_prices.production.str()}};
    j["start_tick"] = start_tick;
    j["epoch_ticks"] = epoch_ticks;
    j["mixing"] = {{"enabled", mixing_enabled},
                   {"k_min", k_min},
                   {"rounds", mix_rounds},
                   {"deadline_ticks", round_deadline_ticks},
                   {"enforce_denominations", enforce_denominations}};
    j["discipline"] = discipline;
    j["denominations"] = {{"epa_watts", epa_unit.str()},
                          {"eca_watts", eca_unit.str()},
                          {"fa", fa_unit.str()}};
    j["bundle_units"] = bundle_units;
    j["board"] = {{"challenge_ttl_ticks", challenge_ttl_ticks},
                  {"token_ttl_ticks", token_ttl_ticks},
                  {"proof_mode", zero_transfer_proofs ? "zero_transfer" : "challenge"}};
    json dso;
    dso["strategy"] = dso_strategy;
    dso["cap_watts"] = dso_cap.str();
    dso["bump"] = dso_bump.str();
    dso["forecast_horizon"] = forecast_horizon;
    dso["price_changes"] = json::array();
    for (const auto& pc : price_changes)
        dso["price_changes"].push_back({{"effective", pc.effective.index()},
                                        {"consumption", pc.prices.consumption.str()},
                                        {"production", pc.prices.production.str()}});
    dso["bans"] = json::array();
    for (const auto& b : bans)
        dso["bans"].push_back({{"prosumer", b.prosumer}, {"effective", b.effective.index()}});
    j["dso"] = dso;
    j["prosumers"] = json::array();
    for (const auto& p : prosumers)
        j["prosumers"].push_back({{"id", p.id},
                                  {"policy", to_string(p.policy)},
                                  {"max_epa_watts", p.max_epa.str()},
                                  {"max_eca_watts", p.max_eca.str()},
                                  {"credit", p.credit.str()},
                                  {"price", p.price.str()},
                                  {"trade_units", p.trade_units},
                                  {"measurement_bias_watts", p.measurement_bias.str()}});
    return j.dump(2) + "\n";
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    ScenarioConfig c;
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.ticks = get_or<std::uint64_t>(j, "ticks", c.ticks);
    c.tick_seconds = get_or<std::uint64_t>(j, "tick_seconds", c.tick_seconds);
    c.replicas = get_or<std::size_t>(j, "replicas", c.replicas);
    c.latency_ticks = get_or<std::uint64_t>(j, "latency_ticks", c.latency_ticks);
    if (j.contains("genesis_prices")) {
        const auto& g = j.at("genesis_prices");
        c.genesis_prices.consumption = money_field(g, "consumption", c.genesis_prices.consumption);
        c.genesis_prices.production = money_field(g, "production", c.genesis_prices.production);
    }
    c.start_tick = get_or<std::uint64_t>(j, "start_tick", c.start_tick);
    c.epoch_ticks = get_or<std::uint64_t>(j, "epoch_ticks", c.epoch_ticks);
    if (j.contains("mixing")) {
        const auto& m = j.at("mixing");
        c.mixing_enabled = get_or<bool>(m, "enabled", c.mixing_enabled);
        c.k_min = get_or<std::size_t>(m, "k_min", c.k_min);
        c.mix_rounds = get_or<std::uint64_t>(m, "rounds", c.mix_rounds);
        c.round_deadline_ticks = get_or<std::uint64_t>(m, "deadline_ticks", c.round_deadline_ticks);
        c.enforce_denominations = get_or<bool>(m, "enforce_denominations", c.enforce_denominations);
    }
    c.discipline = get_or<bool>(j, "discipline", c.discipline);
    if (j.contains("denominations")) {
        const auto& d = j.at("denominations");
        c.epa_unit = power_field(d, "epa_watts", c.epa_unit);
        c.eca_unit = power_field(d, "eca_watts", c.eca_unit);
        c.fa_unit = money_field(d, "fa", c.fa_unit);
    }
    c.bundle_units = get_or<std::uint32_t>(j, "bundle_units", c.bundle_units);
    if (j.contains("board")) {
        const auto& b = j.at("board");
        c.challenge_ttl_ticks = get_or<std::uint64_t>(b, "challenge_ttl_ticks", c.challenge_ttl_ticks);
        c.token_ttl_ticks = get_or<std::uint64_t>(b, "token_ttl_ticks", c.token_ttl_ticks);
        c.zero_transfer_proofs =
            get_or<std::string>(b, "proof_mode", "challenge") == "zero_transfer";
    }
    if (j.contains("dso")) {
        const auto& d = j.at("dso");
        c.dso_strategy = get_or<std::string>(d, "strategy", c.dso_strategy);
        c.dso_cap = power_field(d, "cap_watts", c.dso_cap);
        c.dso_bump = money_field(d, "bump", c.dso_bump);
        c.forecast_horizon = get_or<std::uint64_t>(d, "forecast_horizon", c.forecast_horizon);
        if (d.contains("price_changes"))
            for (const auto& pc : d.at("price_changes"))
                c.price_changes.push_back(
                    PriceChange{Timestep{pc.at("effective").get<std::uint64_t>()},
                                Prices{money_field(pc, "consumption", c.genesis_prices.consumption),
                                       money_field(pc, "production", c.genesis_prices.production)}});
        if (d.contains("bans"))
            for (const auto& b : d.at("bans"))
                c.bans.push_back(BanEvent{b.at("prosumer").get<std::string>(),
                                          Timestep{b.at("effective").get<std::uint64_t>()}});
    }
    if (j.contains("prosumers")) {
        for (const auto& pj : j.at("prosumers")) {
            ProsumerSpec p;
            p.id = pj.at("id").get<std::string>();
            auto policy = policy_from_string(get_or<std::string>(pj, "policy", "idle"));
            if (!policy)
                throw std::invalid_argument("unknown policy for prosumer " + p.id);
            p.policy = *policy;
            p.max_epa = power_field(pj, "max_epa_watts", Power::from_watts(400));
            p.max_eca = power_field(pj, "max_eca_watts", Power::from_watts(400));
            p.credit = money_field(pj, "credit", Money::parse("10000.00"));
            p.price = money_field(pj, "price", Money::parse("0.05"));
            p.trade_units = get_or<std::uint32_t>(pj, "trade_units", 1);
            p.measurement_bias = power_field(pj, "measurement_bias_watts", Power{});
            c.prosumers.push_back(std::move(p));
        }
    }
    return c;
}

}  // namespace petra
