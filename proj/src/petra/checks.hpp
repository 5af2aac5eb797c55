/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "petra/sim.hpp"

namespace petra {

struct CheckItem {
    std::string name;
    bool pass = false;
    std::string context;
};

struct InvariantReport {
    std::string suite;
    std::vector<CheckItem> items;

    bool all_pass() const;
    void add(const std::string& name, bool pass, const std::string& context = {});
    std::string render() const;
};

// Net-sold / net-bought bounds from the recorded settlements, via brute-force
// ledger scan over the meter-private ownership map: per prosumer and
// timestep, and for random prosumer subsets.
InvariantReport check_safety(const RunArtifacts& artifacts, std::size_t subset_checks = 50);

// Mix-round linking and trade counterparty experiments against an observer
// that sees only public artifacts, scored with the private maps.
InvariantReport check_privacy(const RunArtifacts& artifacts);

// Snapshot replay with full re-validation, the independent billing
// recomputation, rejection of every adversarial submission, and the
// no-double-reference scan.
InvariantReport check_security(const RunArtifacts& artifacts);

// ---- reusable experiment pieces ----

// Informed guess: match settlement inputs to outputs using only public
// ledger data (asset equality classes); uniform among indistinguishable
// candidates. Returns the fraction of correctly linked participants.
double link_round_accuracy(const Ledger& view, const RoundGroundTruth& truth, Rng& rng);

// Observer guess of the prosumer behind an energy asset by walking the
// public transfer graph backwards; picks uniformly at mixing joins.
MeterId trace_epa_source(const Ledger& view, const OutputRef& ref, Rng& rng);

// Independent per-timeslot recomputation of E and B from raw entries, the
// measurement log and the deposit-address list.
struct OracleBill {
    Power energy;
    Money bill;
};
OracleBill oracle_bill(const Ledger& view, const GroundTruth& gt, const ProsumerId& prosumer,
                       const std::map<std::uint64_t, Power>& measurements, Timestep t);

// Per-prosumer withdrawal footprint over epochs, extracted from the public
// ledger; the classifier input for the discipline experiment.
struct FootprintSample {
    ProsumerId prosumer;
    bool trader = false;
    std::vector<double> features;  // mean/variance of per-epoch totals, counts
};
std::vector<FootprintSample> withdrawal_footprints(const RunArtifacts& artifacts);

// Best single-feature threshold classifier, scored in-sample.
double best_stump_accuracy(const std::vector<FootprintSample>& samples);

}  // namespace petra
