/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "petra/ledger.hpp"
#include "petra/rng.hpp"

namespace petra {

using NodeId = std::uint32_t;

// Outcome of a submitted transaction once the broadcast has delivered it.
struct SubmitOutcome {
    enum class State { pending, accepted, rejected };
    State state = State::pending;
    std::uint64_t seq = 0;  // valid when accepted
    Verdict verdict;        // populated when rejected

    bool accepted() const { return state == State::accepted; }
    bool rejected() const { return state == State::rejected; }
};

struct ReplicaNode {
    NodeId id;
    Ledger ledger;
};

// Replicated ledger behind an injected total-order broadcast. Submissions
// collected during a tick are sequenced after a configurable delivery
// latency; intra-batch order is drawn from the seeded consensus stream, the
// same on every replica. Replicas apply the agreed sequence independently
// and must stay in lockstep; divergence throws.
class ReplicatedLedger {
public:
    ReplicatedLedger(const GenesisHeader& genesis, std::size_t replicas, Rng rng,
                     std::uint64_t latency_ticks = 1);

    using Ticket = std::uint64_t;

    // Queues the transaction for ordering at the current tick. Each
    // submission gets its own ticket, so resubmitting a recorded
    // transaction observably rejects as DUPLICATE.
    Ticket submit(const Transaction& tx, Timestep submitted_at);

    // Delivers every batch due at `now` on all replicas.
    void advance(Timestep now);

    SubmitOutcome status(Ticket ticket) const;

    const Ledger& view() const { return replicas_.front().ledger; }
    const std::vector<ReplicaNode>& replicas() const { return replicas_; }
    std::uint64_t latency_ticks() const { return latency_ticks_; }

    // All replicas expose the same chain hash.
    bool replicas_agree() const;

private:
    struct PendingTx {
        Ticket ticket;
        Timestep submitted_at;
        Transaction tx;
        TxId id;
    };

    std::vector<ReplicaNode> replicas_;
    Rng rng_;
    std::uint64_t latency_ticks_;
    Ticket next_ticket_ = 0;
    std::deque<PendingTx> queue_;
    std::map<Ticket, SubmitOutcome> outcomes_;
};

}  // namespace petra
