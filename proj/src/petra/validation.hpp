/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <optional>

#include "petra/verdict.hpp"
#include "petra/view.hpp"

namespace petra {

// Validity rules for the three transaction kinds. All checks run to
// completion; every failed condition appends its own coded violation.

Verdict validate_eft(const LedgerView& view, const EnergyFinancialTx& tx);

// `now` is the timeslot the transaction would be recorded at. The meter must
// be authorized and not banned per the registry active at that timeslot, and
// the meter signature must verify under its registered key. Withdrawal
// limits are the meter's own policy and are not re-checked here.
Verdict validate_smt(const LedgerView& view, const SmartMeterTx& tx, Timestep now);

Verdict validate_rt(const LedgerView& view, const RegulatoryTx& tx, Timestep now);

Verdict validate_tx(const LedgerView& view, const Transaction& tx, Timestep now);

struct Prices {
    Money consumption;
    Money production;
    auto operator<=>(const Prices&) const = default;
};

// Prices from the regulatory transaction recorded last on the ledger among
// those with time strictly less than t; genesis prices if there is none.
Prices active_prices(const LedgerView& view, Timestep t);

struct MeterStatus {
    VerifyKey pubkey{};
    bool banned = false;
};

// Registry at timestep t: authorize/ban lists of all regulatory transactions
// with time < t folded in ledger order, later entries overriding.
std::map<MeterId, MeterStatus> active_registry(const LedgerView& view, Timestep t);

std::optional<MeterStatus> meter_status(const LedgerView& view, const MeterId& id, Timestep t);

}  // namespace petra
