/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "petra/validation.hpp"
#include "petra/view.hpp"

namespace petra {

struct LedgerEntry {
    std::uint64_t seq = 0;
    Timestep timeslot;     // tick at which the entry was agreed
    Transaction tx;
    TxId id{};
    Hash256 chain_hash{};  // hash chain up to and including this entry
};

// Append-only transaction log plus state derived from it: the spent set,
// unspent outputs by address, and the regulatory history. Derived state is a
// pure function of the entry prefix; replay rebuilds and re-checks it.
class Ledger : public LedgerView {
public:
    explicit Ledger(GenesisHeader genesis);

    // Validates against the current prefix and appends when valid. The
    // verdict is returned either way; `now` becomes the entry timeslot.
    Verdict append(const Transaction& tx, Timestep now);
    Verdict validate(const Transaction& tx, Timestep now) const;

    // LedgerView
    const GenesisHeader& genesis() const override { return genesis_; }
    const Utxo* find_unspent(const OutputRef& ref) const override;
    bool is_spent(const OutputRef& ref) const override;
    bool known_tx(const TxId& id) const override;
    std::span<const RtRecord> regulatory_history() const override { return rt_history_; }

    const std::vector<LedgerEntry>& entries() const { return entries_; }
    std::uint64_t size() const { return entries_.size(); }
    std::optional<std::uint64_t> find_seq(const TxId& id) const;
    const LedgerEntry* find_entry(const TxId& id) const;
    // Resolves an output whether or not it has been spent.
    std::optional<Utxo> find_output(const OutputRef& ref) const;
    Timestep last_timeslot() const {
        return entries_.empty() ? Timestep{0} : entries_.back().timeslot;
    }

    // Unspent outputs held at addr, ordered by OutputRef.
    std::vector<std::pair<OutputRef, Asset>> query_unspent(const Address& addr) const;
    const std::map<OutputRef, Utxo>& unspent_set() const { return unspent_; }

    // Hash chain over entries (genesis hash for an empty ledger).
    Hash256 chain_hash() const;
    // Digest of the derived state; equal chains imply equal digests.
    Hash256 state_digest() const;

    Bytes snapshot() const;

    struct ReplayError {
        std::uint64_t seq;  // first bad entry (0 when the header is bad)
        std::string detail;
    };
    // Re-validates every entry; any corruption or invalid entry yields
    // REPLAY_INVALID with the offending sequence number.
    static std::optional<Ledger> replay(const Bytes& snapshot, ReplayError* error = nullptr);

private:
    void apply(const Transaction& tx, const TxId& id, Timestep now, std::uint64_t seq);

    GenesisHeader genesis_;
    Hash256 genesis_hash_{};
    std::vector<LedgerEntry> entries_;
    std::map<OutputRef, Utxo> unspent_;
    std::set<OutputRef> spent_;
    std::map<TxId, std::uint64_t> tx_ids_;
    std::map<Address, std::set<OutputRef>> by_address_;
    std::vector<RtRecord> rt_history_;
};

}  // namespace petra
