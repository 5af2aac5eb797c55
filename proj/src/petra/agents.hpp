/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "petra/broadcast.hpp"
#include "petra/bus.hpp"
#include "petra/board.hpp"
#include "petra/meter.hpp"
#include "petra/mixing.hpp"
#include "petra/scenario.hpp"

namespace petra {

// Environment an agent acts in; implemented by the simulation world.
class AgentWorld {
public:
    virtual ~AgentWorld() = default;

    virtual Timestep now() const = 0;
    virtual const Ledger& view() const = 0;
    virtual ReplicatedLedger::Ticket submit(const Transaction& tx, const std::string& actor,
                                            bool adversarial, const std::string& group,
                                            const std::string& note) = 0;
    virtual SubmitOutcome status(ReplicatedLedger::Ticket ticket) const = 0;
    virtual Bus& bus() = 0;
    virtual MixingService& mixer() = 0;
    virtual BidBoard& board() = 0;
    virtual SmartMeter& meter(const std::string& prosumer) = 0;
    virtual void note_address(const Address& addr, const std::string& owner) = 0;
    virtual void transcript(const std::string& line) = 0;
    virtual void record_denial(const std::string& actor, const std::string& what) = 0;
    // Round opened by the harness for this epoch's denomination of `kind`,
    // round set `set`.
    virtual std::optional<std::uint64_t> mix_round(AssetKind kind, std::uint64_t set) const = 0;
};

// Where the current tick falls in the epoch cycle.
struct EpochInfo {
    bool active = false;       // inside a runnable epoch
    std::uint64_t epoch = 0;
    std::uint64_t phase = 0;   // tick offset from epoch start
    Timestep window_start;     // delivery interval traded this epoch
    Timestep window_end;
};

// Negotiation payloads carried over anonymous channels.
struct TradeProposal {
    std::uint64_t ask_order_id = 0;
    OutputRef eca_ref;
    std::vector<OutputRef> fa_refs;
    Address epa_receive;
    Address fa_change;
    ChannelId reply;

    Bytes encode() const;
    static std::optional<TradeProposal> decode(const Bytes& data);
};

struct SettlementOffer {
    std::uint64_t ask_order_id = 0;
    EnergyFinancialTx tx;  // seller inputs signed; buyer signs its own

    Bytes encode() const;
    static std::optional<SettlementOffer> decode(const Bytes& data);
};

// Scripted prosumer following the withdraw → split → mix → trade → deposit
// cycle each epoch; adversarial policies deviate at specific steps.
class ProsumerAgent {
public:
    ProsumerAgent(ProsumerSpec spec, const ScenarioConfig& config, Rng rng);

    void step(AgentWorld& world, const EpochInfo& epoch);

    const ProsumerSpec& spec() const { return spec_; }
    std::uint32_t trades_settled() const { return trades_settled_; }
    std::uint32_t trades_bought() const { return trades_bought_; }
    const Wallet& wallet() const { return wallet_; }

private:
    enum class Stage : std::uint8_t {
        resting,
        wait_withdraw,
        wait_split,
        mixing,
        trading,
        wait_deposit,
        done,
    };

    struct Holding {
        OutputRef ref;
        Asset asset;
    };

    struct MixTracker {
        std::uint64_t set = 0;             // which round set the assets sit in
        std::vector<Address> targets;      // expected landing addresses
        std::vector<Address> refunds;
    };

    struct OpenAsk {
        std::uint64_t order_id = 0;
        Holding unit;
        Address proceeds_eca;
        Address proceeds_fa;
        bool offered = false;
        bool counted = false;
    };

    struct PendingBuy {
        std::uint64_t ask_order_id = 0;
        Holding eca;
        std::vector<Holding> fa;
        Address receive;
        Address change;
        Money payment;
        Asset expected_asset;
        std::uint64_t proposed_at = 0;
        std::optional<ReplicatedLedger::Ticket> settlement;
        bool counted = false;
        bool released = false;
    };

    struct PendingZeroProof {
        Address probe;
        Holding holding;  // post-proof location of the asset
        Address addr;
    };

    struct TokenizedHolding {
        Holding holding;
        ProofToken token;
    };

    Address fresh_address(AgentWorld& world);
    std::vector<Holding> unspent_holdings(AgentWorld& world) const;
    void begin_epoch(AgentWorld& world, const EpochInfo& epoch);
    void run_adversarial_preamble(AgentWorld& world, const EpochInfo& epoch);
    void submit_withdrawal(AgentWorld& world, const EpochInfo& epoch,
                           const std::vector<AssetOutput>& outs);
    void poll_withdrawal(AgentWorld& world);
    void submit_splits(AgentWorld& world);
    void poll_splits(AgentWorld& world, const EpochInfo& epoch);
    void double_spend_probe(AgentWorld& world, const EpochInfo& epoch);
    void mixing_step(AgentWorld& world, const EpochInfo& epoch);
    void join_round_set(AgentWorld& world, std::uint64_t set);
    void trading_step(AgentWorld& world, const EpochInfo& epoch);
    void seller_post_asks(AgentWorld& world, const EpochInfo& epoch);
    void seller_handle_proposals(AgentWorld& world, const EpochInfo& epoch);
    void buyer_post_bids(AgentWorld& world, const EpochInfo& epoch);
    void maybe_place_bid(AgentWorld& world);
    void buyer_propose(AgentWorld& world, const EpochInfo& epoch);
    void buyer_handle_offers(AgentWorld& world, const EpochInfo& epoch);
    void buyer_poll_settlements(AgentWorld& world);
    void spam_board(AgentWorld& world, const EpochInfo& epoch);
    void deposit_all(AgentWorld& world, const EpochInfo& epoch);
    std::optional<ProofToken> prove_address(AgentWorld& world, const Address& addr,
                                            const Holding& holding);

    ProsumerSpec spec_;
    const ScenarioConfig* config_;
    Rng rng_;
    Wallet wallet_;

    Stage stage_ = Stage::resting;
    std::uint64_t current_epoch_ = 0;
    std::optional<ReplicatedLedger::Ticket> withdraw_ticket_;
    SmartMeterTx withdraw_tx_;
    std::vector<ReplicatedLedger::Ticket> split_tickets_;
    std::vector<EnergyFinancialTx> split_txs_;
    std::vector<Holding> mix_pool_;        // units currently being cycled
    MixTracker mix_;
    std::vector<Holding> tradeable_;       // post-mix holdings
    std::vector<OpenAsk> asks_;
    std::vector<PendingBuy> buys_;
    std::set<std::uint64_t> asks_tried_;
    std::vector<PendingZeroProof> pending_zero_;
    std::map<OutputRef, TokenizedHolding> unit_tokens_;
    std::set<OutputRef> used_units_;
    bool bid_posted_ = false;
    std::uint32_t trades_bought_epoch_ = 0;
    ChannelId channel_;
    std::optional<ReplicatedLedger::Ticket> deposit_ticket_;
    bool gave_up_ = false;                 // obligation dodger after denial
    std::uint32_t trades_settled_ = 0;
    std::uint32_t trades_bought_ = 0;
};

}  // namespace petra
