/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/broadcast.hpp"

#include <stdexcept>

namespace petra {

ReplicatedLedger::ReplicatedLedger(const GenesisHeader& genesis, std::size_t replicas, Rng rng,
                                   std::uint64_t latency_ticks)
    : rng_(rng), latency_ticks_(latency_ticks) {
    if (replicas == 0)
        throw std::invalid_argument("at least one replica required");
    for (std::size_t i = 0; i < replicas; ++i)
        replicas_.push_back(ReplicaNode{static_cast<NodeId>(i), Ledger(genesis)});
}

ReplicatedLedger::Ticket ReplicatedLedger::submit(const Transaction& tx, Timestep submitted_at) {
    Ticket ticket = next_ticket_++;
    queue_.push_back(PendingTx{ticket, submitted_at, tx, tx_id(tx)});
    outcomes_.emplace(ticket, SubmitOutcome{});
    return ticket;
}

void ReplicatedLedger::advance(Timestep now) {
    std::vector<PendingTx> batch;
    while (!queue_.empty() && queue_.front().submitted_at.plus(latency_ticks_) <= now) {
        batch.push_back(std::move(queue_.front()));
        queue_.pop_front();
    }
    if (batch.empty())
        return;
    // Arrival order at individual replicas is not meaningful; the agreed
    // order within a batch comes from the consensus stream.
    rng_.shuffle(batch);
    for (const auto& pending : batch) {
        std::optional<Verdict> first;
        for (auto& node : replicas_) {
            Verdict verdict = node.ledger.append(pending.tx, now);
            if (!first) {
                first = verdict;
            } else if (first->encode() != verdict.encode()) {
                throw std::logic_error("replica verdicts diverged for tx " + to_hex(pending.id));
            }
        }
        auto& outcome = outcomes_[pending.ticket];
        if (first->ok()) {
            outcome.state = SubmitOutcome::State::accepted;
            outcome.seq = replicas_.front().ledger.size() - 1;
        } else {
            outcome.state = SubmitOutcome::State::rejected;
            outcome.verdict = *first;
        }
    }
    if (!replicas_agree())
        throw std::logic_error("replica state diverged after delivery");
}

SubmitOutcome ReplicatedLedger::status(Ticket ticket) const {
    auto it = outcomes_.find(ticket);
    return it == outcomes_.end() ? SubmitOutcome{} : it->second;
}

bool ReplicatedLedger::replicas_agree() const {
    const Hash256 head = replicas_.front().ledger.chain_hash();
    for (const auto& node : replicas_)
        if (node.ledger.chain_hash() != head)
            return false;
    return true;
}

}  // namespace petra
