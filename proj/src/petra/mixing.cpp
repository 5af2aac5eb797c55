/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/mixing.hpp"

#include <algorithm>

namespace petra {

namespace {

// The single output the participant escrowed.
const AssetOutput& escrowed_output(const EnergyFinancialTx& in_transfer) {
    if (!in_transfer.epa_out.empty())
        return in_transfer.epa_out.front();
    if (!in_transfer.eca_out.empty())
        return in_transfer.eca_out.front();
    return in_transfer.fa_out.front();
}

void add_input(EnergyFinancialTx& tx, AssetKind kind, const AssetInput& in) {
    switch (kind) {
        case AssetKind::epa: tx.epa_in.push_back(in); break;
        case AssetKind::eca: tx.eca_in.push_back(in); break;
        case AssetKind::fa: tx.fa_in.push_back(in); break;
    }
}

void add_output(EnergyFinancialTx& tx, const AssetOutput& out) {
    switch (out.asset.kind()) {
        case AssetKind::epa: tx.epa_out.push_back(out); break;
        case AssetKind::eca: tx.eca_out.push_back(out); break;
        case AssetKind::fa: tx.fa_out.push_back(out); break;
    }
}

}  // namespace

const char* to_string(RoundState s) {
    switch (s) {
        case RoundState::open: return "open";
        case RoundState::executing: return "executing";
        case RoundState::settled: return "settled";
        case RoundState::refunded: return "refunded";
    }
    return "?";
}

const char* to_string(JoinError e) {
    switch (e) {
        case JoinError::wrong_denomination: return "WRONG_DENOMINATION";
        case JoinError::round_closed: return "ROUND_CLOSED";
        case JoinError::reused_target: return "REUSED_TARGET";
        case JoinError::bad_transfer: return "BAD_TRANSFER";
    }
    return "?";
}

std::uint64_t MixingService::open_round(const Asset& denomination, Timestep now) {
    Round round;
    round.id = next_round_id_++;
    round.denomination = denomination;
    round.opened = now;
    round.deadline = now.plus(params_.deadline_ticks);
    rounds_.emplace(round.id, round);
    return round.id;
}

MixingService::Round* MixingService::find_round(std::uint64_t id) {
    auto it = rounds_.find(id);
    return it == rounds_.end() ? nullptr : &it->second;
}

const MixingService::Round* MixingService::find_round(std::uint64_t id) const {
    auto it = rounds_.find(id);
    return it == rounds_.end() ? nullptr : &it->second;
}

std::optional<Address> MixingService::escrow_address(std::uint64_t round_id) {
    Round* round = find_round(round_id);
    if (!round || round->state != RoundState::open)
        return std::nullopt;
    Address escrow = escrow_wallet_.fresh_address(rng_);
    escrow_round_[escrow] = round_id;
    return escrow;
}

std::optional<JoinError> MixingService::join_round(std::uint64_t round_id,
                                                   const EnergyFinancialTx& in_transfer,
                                                   const Address& escrow, const Address& target,
                                                   const Address& refund, SubmitFn submit) {
    Round* round = find_round(round_id);
    if (!round || round->state != RoundState::open)
        return JoinError::round_closed;
    auto handed = escrow_round_.find(escrow);
    if (handed == escrow_round_.end() || handed->second != round_id ||
        !escrow_wallet_.controls(escrow))
        return JoinError::bad_transfer;
    if (seen_targets_.count(target))
        return JoinError::reused_target;

    // The transfer must pay exactly one output, to the handed-out escrow.
    std::size_t total_outputs =
        in_transfer.epa_out.size() + in_transfer.eca_out.size() + in_transfer.fa_out.size();
    if (total_outputs != 1)
        return JoinError::bad_transfer;
    const AssetOutput& out = escrowed_output(in_transfer);
    if (out.address != escrow)
        return JoinError::bad_transfer;
    if (out.asset.kind() != round->denomination.kind())
        return JoinError::wrong_denomination;
    if (params_.enforce_denomination && out.asset != round->denomination)
        return JoinError::wrong_denomination;

    Participant participant;
    participant.in_transfer = in_transfer;
    participant.escrow_ref =
        OutputRef{tx_id(Transaction{in_transfer}), round->denomination.kind(), 0};
    participant.escrow = escrow;
    participant.target = target;
    participant.refund = refund;
    round->participants.push_back(std::move(participant));
    seen_targets_.insert(target);
    submit(Transaction{in_transfer}, "mix-in r" + std::to_string(round_id));
    return std::nullopt;
}

bool MixingService::all_confirmed(const Round& round, const Ledger& view) const {
    for (const auto& p : round.participants)
        if (!view.find_unspent(p.escrow_ref))
            return false;
    return true;
}

std::size_t MixingService::confirmed_participants(std::uint64_t round_id,
                                                  const Ledger& view) const {
    const Round* round = find_round(round_id);
    if (!round)
        return 0;
    std::size_t n = 0;
    for (const auto& p : round->participants)
        if (view.find_unspent(p.escrow_ref))
            ++n;
    return n;
}

std::optional<MixReceipt> MixingService::execute_round(std::uint64_t round_id, const Ledger& view,
                                                       SubmitFn submit) {
    Round* round = find_round(round_id);
    if (!round || round->state != RoundState::open)
        return std::nullopt;
    std::vector<const Participant*> confirmed;
    for (const auto& p : round->participants)
        if (view.find_unspent(p.escrow_ref))
            confirmed.push_back(&p);
    if (confirmed.size() < params_.k_min)
        return std::nullopt;
    round->state = RoundState::executing;

    EnergyFinancialTx settlement;
    settlement.nonce = rng_.byte_array<16>();
    for (const auto* p : confirmed)
        add_input(settlement, round->denomination.kind(), AssetInput{p->escrow_ref, {}});
    std::vector<const Participant*> order = confirmed;
    rng_.shuffle(order);  // output position carries no join information
    for (const auto* p : order)
        add_output(settlement, AssetOutput{escrowed_output(p->in_transfer).asset, p->target});
    sign_inputs(settlement, escrow_wallet_, [&](const OutputRef& ref) -> std::optional<Address> {
        const Utxo* utxo = view.find_unspent(ref);
        if (!utxo)
            return std::nullopt;
        return utxo->address;
    });

    RoundGroundTruth truth;
    truth.round_id = round->id;
    truth.settlement = tx_id(Transaction{settlement});
    for (const auto* p : confirmed)
        truth.input_to_target.emplace_back(p->escrow_ref, p->target);
    ground_truth_.push_back(std::move(truth));

    submit(Transaction{settlement}, "mix-settle r" + std::to_string(round_id));
    round->state = RoundState::settled;
    round->participants.clear();  // the service forgets who fed which target
    return MixReceipt{round->id, tx_id(Transaction{settlement})};
}

void MixingService::refund_round(Round& round, SubmitFn submit) {
    for (const auto& p : round.participants) {
        EnergyFinancialTx refund;
        refund.nonce = rng_.byte_array<16>();
        const Asset& asset = escrowed_output(p.in_transfer).asset;
        add_input(refund, asset.kind(), AssetInput{p.escrow_ref, {}});
        add_output(refund, AssetOutput{asset, p.refund});
        sign_inputs(refund, escrow_wallet_,
                    [&](const OutputRef&) -> std::optional<Address> { return p.escrow; });
        submit(Transaction{refund}, "mix-refund r" + std::to_string(round.id));
    }
    round.state = RoundState::refunded;
    round.participants.clear();
}

std::vector<MixReceipt> MixingService::step(Timestep now, const Ledger& view, SubmitFn submit) {
    std::vector<MixReceipt> receipts;
    for (auto& [id, round] : rounds_) {
        if (round.state != RoundState::open)
            continue;
        if (now < round.deadline)
            continue;
        if (!all_confirmed(round, view) && now < round.deadline.plus(params_.grace_ticks))
            continue;  // grant late in-transfers their delivery latency
        if (confirmed_participants(id, view) >= params_.k_min) {
            if (auto receipt = execute_round(id, view, submit))
                receipts.push_back(*receipt);
        } else {
            // UNDERSUBSCRIBED: confirmed inputs go back to refund addresses.
            std::vector<Participant> confirmed_only;
            for (auto& p : round.participants)
                if (view.find_unspent(p.escrow_ref))
                    confirmed_only.push_back(p);
            round.participants = std::move(confirmed_only);
            refund_round(round, submit);
        }
    }
    return receipts;
}

RoundState MixingService::round_state(std::uint64_t round_id) const {
    const Round* round = find_round(round_id);
    return round ? round->state : RoundState::refunded;
}

std::vector<RoundGroundTruth> MixingService::take_ground_truth() {
    return std::exchange(ground_truth_, {});
}

SplitPlan split_to_denominations(const std::vector<std::pair<OutputRef, Utxo>>& holdings,
                                 const Asset& unit, Wallet& wallet, Rng& rng) {
    SplitPlan plan;
    for (const auto& [ref, utxo] : holdings) {
        const Asset& asset = utxo.asset;
        std::int64_t units = 0;
        if (asset.kind() == unit.kind()) {
            if (asset.kind() == AssetKind::fa) {
                if (!unit.amount().is_zero())
                    units = asset.amount().cents() / unit.amount().cents();
            } else if (asset.start() == unit.start() && asset.end() == unit.end()) {
                if (!unit.power().is_zero())
                    units = asset.power().milliwatts() / unit.power().milliwatts();
            }
        }
        if (units == 0) {
            plan.unmixable.push_back(asset);
            continue;
        }
        EnergyFinancialTx tx;
        tx.nonce = rng.byte_array<16>();
        add_input(tx, asset.kind(), AssetInput{ref, {}});
        for (std::int64_t i = 0; i < units; ++i)
            add_output(tx, AssetOutput{unit, wallet.fresh_address(rng)});
        if (asset.kind() == AssetKind::fa) {
            Money rem = asset.amount() - unit.amount().scaled(units);
            if (!rem.is_zero()) {
                Asset remainder = Asset::fa(rem);
                add_output(tx, AssetOutput{remainder, wallet.fresh_address(rng)});
                plan.unmixable.push_back(remainder);
            }
        } else {
            Power rem = asset.power() - unit.power().scaled(units);
            if (!rem.is_zero()) {
                Asset remainder = asset.kind() == AssetKind::epa
                                      ? Asset::epa(rem, asset.start(), asset.end())
                                      : Asset::eca(rem, asset.start(), asset.end());
                add_output(tx, AssetOutput{remainder, wallet.fresh_address(rng)});
                plan.unmixable.push_back(remainder);
            }
        }
        sign_inputs(tx, wallet,
                    [&](const OutputRef&) -> std::optional<Address> { return utxo.address; });
        plan.txs.push_back(std::move(tx));
    }
    return plan;
}

}  // namespace petra
