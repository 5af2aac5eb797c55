/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "petra/ledger.hpp"
#include "petra/rng.hpp"
#include "petra/wallet.hpp"

namespace petra {

using ProsumerId = std::string;

struct MeterLimits {
    Power max_epa;         // per-timestep withdrawal ceiling, inclusive
    Power max_eca;
    Money credit_limit;    // cap on outstanding withdrawn-minus-deposited FA
};

enum class DenialCode : std::uint8_t {
    limit_exceeded,
    past_interval,
    credit_exceeded,
    obligation_outstanding,
};

const char* to_string(DenialCode code);

struct WithdrawalDenial {
    DenialCode code;
    std::optional<AssetKind> kind;
    std::optional<Timestep> at;
    std::string str() const;
};

struct WithdrawalResult {
    std::optional<SmartMeterTx> tx;
    std::optional<WithdrawalDenial> denial;
    bool ok() const { return tx.has_value(); }
};

struct BillLine {
    ProsumerId prosumer;
    Timestep t;
    Power energy;  // E: signed net unaccounted consumption
    Money bill;    // B: owed to the DSO (negative = credit)
};

// Trusted per-prosumer meter. Withdrawal limits range over the transactions
// the meter has *created* (a signed transaction counts against the limit even
// if it never lands). Billing, by contrast, is computed from what the ledger
// actually recorded, so an independent scan of ledger plus measurement log
// reproduces every bill.
class SmartMeter {
public:
    SmartMeter(MeterId id, ProsumerId prosumer, KeyPair key, MeterLimits limits, Rng rng);

    const MeterId& id() const { return id_; }
    const ProsumerId& prosumer() const { return prosumer_; }
    const VerifyKey& pubkey() const { return key_.verify_key; }
    const MeterLimits& limits() const { return limits_; }

    // Signs a minting transaction iff every requested interval starts at or
    // after `now`, no obligation is overdue, and the post-withdrawal totals
    // stay within MAXEPA/MAXECA and the credit limit.
    WithdrawalResult request_withdrawal(const std::vector<AssetOutput>& want, Timestep now);

    // Fresh anonymous address controlled by the meter; transfers here are
    // deposits.
    Address fresh_deposit_address();

    // Ingests newly recorded entries: indexes this meter's own minting
    // transactions by timeslot and processes transfers to deposit addresses
    // (FA credits, ECA obligation reduction, EPA recording and early-return
    // cancellation).
    void observe_ledger(const Ledger& view);

    void record_measurement(Timestep t, Power net_consumption);
    bool has_measurement(Timestep t) const { return measurements_.count(t) != 0; }

    // E = measured(t) − Σ deposited EPA coverage + Σ withdrawn EPA coverage;
    // nullopt when the measurement for t is missing.
    std::optional<Power> energy_balance(Timestep t) const;

    // B = FA withdrawn during t − FA deposited during t + E·price, where the
    // price side follows the sign of E and prices come from the regulatory
    // history. Requires the measurement for t.
    std::optional<Money> compute_bill(Timestep t, const LedgerView& view) const;
    std::optional<BillLine> bill_line(Timestep t, const LedgerView& view) const;

    // Scenario event: payment outside the ledger restoring credit headroom.
    void receive_outside_payment(Money amount) { fa_outstanding_ -= amount; }

    Power obligation_at(Timestep t) const;
    bool obligation_overdue(Timestep now) const;
    Money fa_outstanding() const { return fa_outstanding_; }

    Power created_epa_coverage(Timestep t) const { return coverage_at(created_epa_, t); }
    Power created_eca_coverage(Timestep t) const { return coverage_at(created_eca_, t); }
    Power recorded_epa_coverage(Timestep t) const { return coverage_at(recorded_epa_, t); }
    Power deposited_epa_coverage(Timestep t) const { return coverage_at(deposited_epa_, t); }

    struct OverDepositFlag {
        Timestep t;
        Power excess;
    };
    const std::vector<OverDepositFlag>& over_deposit_flags() const { return over_deposit_flags_; }

    const Wallet& deposit_wallet() const { return deposit_wallet_; }
    const std::vector<SmartMeterTx>& created() const { return created_; }

    struct DepositRecord {
        Timestep timeslot;
        Asset asset;
        TxId tx;
    };
    const std::vector<DepositRecord>& deposits() const { return deposits_; }

private:
    static Power coverage_at(const std::vector<Asset>& assets, Timestep t);
    void reduce_obligation(const Asset& eca_like, bool flag_excess);

    MeterId id_;
    ProsumerId prosumer_;
    KeyPair key_;
    MeterLimits limits_;
    Rng rng_;
    Wallet deposit_wallet_;

    std::vector<SmartMeterTx> created_;   // all transactions this meter signed
    std::vector<Asset> created_epa_;      // limit accounting (creation time)
    std::vector<Asset> created_eca_;
    Money fa_outstanding_;

    std::uint64_t watermark_ = 0;         // entries already observed
    std::vector<Asset> recorded_epa_;     // own SMT outputs seen on-ledger
    std::map<Timestep, Money> fa_withdrawn_by_slot_;
    std::vector<DepositRecord> deposits_;
    std::vector<Asset> deposited_epa_;
    std::map<Timestep, Money> fa_deposited_by_slot_;
    std::map<Timestep, Power> obligation_;
    std::vector<OverDepositFlag> over_deposit_flags_;

    std::map<Timestep, Power> measurements_;
};

}  // namespace petra
