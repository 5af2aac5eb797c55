/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "petra/tx.hpp"

namespace petra {

// Fixed at ledger creation; replicas must agree on it before the first entry.
struct GenesisHeader {
    VerifyKey dso_key{};
    Money price_consumption;
    Money price_production;
    std::string scheme = kSignatureScheme;
    std::uint64_t tick_seconds = 4;

    void encode(Encoder& enc) const;
    static GenesisHeader decode(Decoder& dec);
    auto operator<=>(const GenesisHeader&) const = default;
};

struct Utxo {
    Asset asset;
    Address address;
    auto operator<=>(const Utxo&) const = default;
};

// A regulatory transaction in ledger order, with the tick it was recorded.
struct RtRecord {
    std::uint64_t seq = 0;
    Timestep timeslot;
    RegulatoryTx tx;
};

// Read side of a consistent ledger prefix, as seen by validators.
class LedgerView {
public:
    virtual ~LedgerView() = default;

    virtual const GenesisHeader& genesis() const = 0;
    // The output if it exists and is unspent; nullptr otherwise.
    virtual const Utxo* find_unspent(const OutputRef& ref) const = 0;
    virtual bool is_spent(const OutputRef& ref) const = 0;
    virtual bool known_tx(const TxId& id) const = 0;
    virtual std::span<const RtRecord> regulatory_history() const = 0;
};

}  // namespace petra
