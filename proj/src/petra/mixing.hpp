/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "petra/ledger.hpp"
#include "petra/wallet.hpp"

namespace petra {

// Tumbler-style mixing service. A participant transfers one
// denomination-exact asset to a fresh escrow address and names a blinded
// target; settlement spends every escrow in one transaction and pays the
// targets in an order drawn uniformly at random. The input-to-target map is
// handed to the ground-truth sink at settlement and erased from the service.

enum class RoundState : std::uint8_t { open, executing, settled, refunded };

const char* to_string(RoundState s);

enum class JoinError : std::uint8_t {
    wrong_denomination,
    round_closed,
    reused_target,
    bad_transfer,
};

const char* to_string(JoinError e);

struct MixReceipt {
    std::uint64_t round_id = 0;
    TxId settlement{};
};

// Settled-round disclosure for scoring observers: which escrowed input fed
// which target.
struct RoundGroundTruth {
    std::uint64_t round_id = 0;
    TxId settlement{};
    std::vector<std::pair<OutputRef, Address>> input_to_target;  // escrow ref -> target
};

class MixingService {
public:
    struct Params {
        std::size_t k_min = 8;
        std::uint64_t deadline_ticks = 5;
        // Extra ticks past the deadline to let in-transfers submitted just
        // before it clear delivery latency.
        std::uint64_t grace_ticks = 2;
        bool enforce_denomination = true;
    };

    using SubmitFn = std::function<void(const Transaction&, const std::string& note)>;

    MixingService(Rng rng, Params params) : rng_(rng), params_(params) {}

    const Params& params() const { return params_; }

    std::uint64_t open_round(const Asset& denomination, Timestep now);

    // Fresh escrow address for a join attempt; nullopt once the round left
    // the open state.
    std::optional<Address> escrow_address(std::uint64_t round_id);

    // in_transfer must pay exactly one output, of the round denomination, to
    // the escrow address obtained above. The service submits the transfer
    // and tracks its confirmation; target must never have been seen before.
    std::optional<JoinError> join_round(std::uint64_t round_id,
                                        const EnergyFinancialTx& in_transfer,
                                        const Address& escrow, const Address& target,
                                        const Address& refund, SubmitFn submit);

    // Emits the settlement transaction for a round whose confirmed
    // participants reached k_min. Exclusive per round.
    std::optional<MixReceipt> execute_round(std::uint64_t round_id, const Ledger& view,
                                            SubmitFn submit);

    // Confirms in-transfers and executes or refunds rounds whose deadline
    // passed. Returns receipts for rounds settled this tick.
    std::vector<MixReceipt> step(Timestep now, const Ledger& view, SubmitFn submit);

    RoundState round_state(std::uint64_t round_id) const;
    std::size_t confirmed_participants(std::uint64_t round_id, const Ledger& view) const;

    // Settled-round disclosures accumulated since the last call.
    std::vector<RoundGroundTruth> take_ground_truth();

private:
    struct Participant {
        EnergyFinancialTx in_transfer;
        OutputRef escrow_ref;   // output the settlement will spend
        Address escrow;
        Address target;
        Address refund;
    };

    struct Round {
        std::uint64_t id = 0;
        Asset denomination;
        Timestep opened;
        Timestep deadline;
        RoundState state = RoundState::open;
        std::vector<Participant> participants;
    };

    Round* find_round(std::uint64_t id);
    const Round* find_round(std::uint64_t id) const;
    bool all_confirmed(const Round& round, const Ledger& view) const;
    void refund_round(Round& round, SubmitFn submit);

    Rng rng_;
    Params params_;
    Wallet escrow_wallet_;
    std::map<std::uint64_t, Round> rounds_;
    std::set<Address> seen_targets_;
    std::map<Address, std::uint64_t> escrow_round_;  // handed-out escrows
    std::vector<RoundGroundTruth> ground_truth_;
    std::uint64_t next_round_id_ = 0;
};

// Splits each holding into denomination-sized pieces paid to fresh wallet
// addresses; a non-divisible remainder rides along as a final output and is
// reported back as unmixable. Holdings of another kind or interval are left
// untouched and reported unmixable as a whole.
struct SplitPlan {
    std::vector<EnergyFinancialTx> txs;
    std::vector<Asset> unmixable;
};

SplitPlan split_to_denominations(const std::vector<std::pair<OutputRef, Utxo>>& holdings,
                                 const Asset& unit, Wallet& wallet, Rng& rng);

}  // namespace petra
