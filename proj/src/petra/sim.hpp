/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <filesystem>
#include <memory>

#include "petra/agents.hpp"
#include "petra/dso.hpp"

namespace petra {

// Meter-private and service-private facts persisted for the checkers.
// Observer models never receive this file.
struct GroundTruth {
    std::map<std::string, std::string> owners;  // address hex -> owner label
    std::map<ProsumerId, std::string> roles;    // policy name
    std::map<ProsumerId, MeterId> meters;
    std::map<ProsumerId, std::int64_t> max_epa_mw;
    std::map<ProsumerId, std::int64_t> max_eca_mw;
    std::map<ProsumerId, std::vector<std::string>> deposit_addresses;
    std::vector<RoundGroundTruth> mix_rounds;

    std::string owner_of(const Address& addr) const;
    bool is_prosumer(const std::string& owner) const { return roles.count(owner) != 0; }
};

struct BillRecord {
    std::uint64_t t = 0;
    std::int64_t energy_mw = 0;
    std::int64_t bill_cents = 0;
};

// Everything a run leaves behind; checkers work from this alone.
struct RunArtifacts {
    ScenarioConfig config;
    Bytes ledger_snapshot;
    std::map<ProsumerId, std::map<std::uint64_t, Power>> measurements;
    std::map<ProsumerId, std::vector<BillRecord>> bills;
    std::vector<TraceRecord> trace;
    GroundTruth ground_truth;
    std::vector<std::string> transcript;
    std::vector<std::string> forecasts;
    Hash256 chain_hash{};

    Ledger ledger() const;  // replays the snapshot; throws when corrupt

    void save(const std::filesystem::path& dir) const;
    static RunArtifacts load(const std::filesystem::path& dir);
};

// Discrete-tick harness wiring the replicated ledger, services, DSO and
// agents together. Agents run sequentially in roster order inside a tick;
// every draw comes from streams forked off the scenario seed, so a config
// determines its ledger hash.
class Simulation final : public AgentWorld {
public:
    explicit Simulation(const ScenarioConfig& config);  // throws on config errors

    void run_tick();
    void run_all();
    RunArtifacts finish();  // measurements, bills, snapshot

    // AgentWorld
    Timestep now() const override { return Timestep{tick_}; }
    const Ledger& view() const override { return cluster_->view(); }
    ReplicatedLedger::Ticket submit(const Transaction& tx, const std::string& actor,
                                    bool adversarial, const std::string& group,
                                    const std::string& note) override;
    SubmitOutcome status(ReplicatedLedger::Ticket ticket) const override;
    Bus& bus() override { return bus_; }
    MixingService& mixer() override { return *mixer_; }
    BidBoard& board() override { return *board_; }
    SmartMeter& meter(const std::string& prosumer) override;
    void note_address(const Address& addr, const std::string& owner) override;
    void transcript(const std::string& line) override { transcript_.push_back(line); }
    void record_denial(const std::string& actor, const std::string& what) override;
    std::optional<std::uint64_t> mix_round(AssetKind kind, std::uint64_t set) const override;

    EpochInfo epoch_info() const;
    const ReplicatedLedger& cluster() const { return *cluster_; }
    const std::vector<std::unique_ptr<ProsumerAgent>>& agents() const { return agents_; }
    const Dso& dso() const { return *dso_; }
    std::uint64_t tick() const { return tick_; }

private:
    void dso_step();
    void mixing_services_step();
    void emit_forecast();

    ScenarioConfig config_;
    Rng master_;
    std::unique_ptr<ReplicatedLedger> cluster_;
    Bus bus_;
    std::unique_ptr<MixingService> mixer_;
    std::unique_ptr<BidBoard> board_;
    std::unique_ptr<Dso> dso_;
    std::map<ProsumerId, std::unique_ptr<SmartMeter>> meters_;
    std::vector<std::unique_ptr<ProsumerAgent>> agents_;
    std::map<ProsumerId, Policy> policies_;

    GroundTruth gt_;
    std::set<Address> deposit_addrs_;
    std::vector<std::string> transcript_;
    std::vector<std::string> forecasts_;
    std::uint64_t tick_ = 0;
    Prices current_prices_;
    std::map<std::pair<std::uint8_t, std::uint64_t>, std::uint64_t> current_rounds_;
    std::vector<std::pair<ReplicatedLedger::Ticket, std::size_t>> unresolved_;
    bool bootstrap_done_ = false;
};

RunArtifacts run_scenario(const ScenarioConfig& config);

}  // namespace petra
