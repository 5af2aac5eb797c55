/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/checks.hpp"

#include <algorithm>
#include <cmath>

namespace petra {

bool InvariantReport::all_pass() const {
    for (const auto& item : items)
        if (!item.pass)
            return false;
    return true;
}

void InvariantReport::add(const std::string& name, bool pass, const std::string& context) {
    items.push_back(CheckItem{name, pass, context});
}

std::string InvariantReport::render() const {
    std::string out = "== " + suite + " ==\n";
    for (const auto& item : items) {
        out += (item.pass ? "PASS " : "FAIL ") + item.name;
        if (!item.context.empty())
            out += " — " + item.context;
        out += "\n";
    }
    return out;
}

namespace {

struct AssetFlow {
    std::vector<Asset> sold;    // left this prosumer toward another prosumer
    std::vector<Asset> bought;  // arrived from another prosumer
};

// Per-prosumer EPA (or ECA) movements across ownership boundaries.
std::map<ProsumerId, AssetFlow> settlement_flows(const Ledger& view, const GroundTruth& gt,
                                                 AssetKind kind) {
    std::map<ProsumerId, AssetFlow> flows;
    for (const auto& entry : view.entries()) {
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry.tx);
        if (!eft)
            continue;
        const auto& ins = kind == AssetKind::epa ? eft->epa_in : eft->eca_in;
        const auto& outs = kind == AssetKind::epa ? eft->epa_out : eft->eca_out;
        // A settlement moves value between distinct prosumers. Ownership of
        // each side comes from the private address map.
        std::vector<std::pair<std::string, Asset>> in_assets;
        for (const auto& in : ins) {
            auto utxo = view.find_output(in.out);
            if (!utxo)
                continue;
            in_assets.emplace_back(gt.owner_of(utxo->address), utxo->asset);
        }
        for (const auto& out : outs) {
            std::string to = gt.owner_of(out.address);
            if (!gt.is_prosumer(to))
                continue;
            // Outputs paid to `to` that were fed by a *different* prosumer
            // count as bought; the feeding side counts as sold.
            for (const auto& [from, asset] : in_assets) {
                if (!gt.is_prosumer(from) || from == to)
                    continue;
                flows[to].bought.push_back(out.asset);
                flows[from].sold.push_back(out.asset);
                break;  // attribute each output once
            }
        }
    }
    return flows;
}

Power coverage_sum(const std::vector<Asset>& assets, Timestep t) {
    Power total;
    for (const auto& a : assets)
        total += coverage(a, t);
    return total;
}

}  // namespace

InvariantReport check_safety(const RunArtifacts& artifacts, std::size_t subset_checks) {
    InvariantReport report;
    report.suite = "safety";
    Ledger view = artifacts.ledger();
    const GroundTruth& gt = artifacts.ground_truth;

    for (AssetKind kind : {AssetKind::epa, AssetKind::eca}) {
        auto flows = settlement_flows(view, gt, kind);
        const auto& limits = kind == AssetKind::epa ? gt.max_epa_mw : gt.max_eca_mw;
        bool per_prosumer_ok = true;
        std::string first_violation;
        std::map<ProsumerId, std::map<std::uint64_t, Power>> net;
        for (const auto& [limit_owner, limit_mw] : limits) {
            auto it = flows.find(limit_owner);
            std::vector<Asset> all;
            if (it != flows.end()) {
                all = it->second.sold;
                all.insert(all.end(), it->second.bought.begin(), it->second.bought.end());
            }
            for (Timestep t : coverage_breakpoints(all)) {
                Power sold = it == flows.end() ? Power{} : coverage_sum(it->second.sold, t);
                Power bought = it == flows.end() ? Power{} : coverage_sum(it->second.bought, t);
                Power n = sold - bought;
                net[limit_owner][t.index()] = n;
                if (n > Power::from_milliwatts(limit_mw) && first_violation.empty()) {
                    per_prosumer_ok = false;
                    first_violation = limit_owner + " t=" + t.str() + " net=" + n.str();
                }
            }
        }
        const char* label = kind == AssetKind::epa ? "net-sold" : "net-bought";
        report.add(std::string(label) + " within per-prosumer limit", per_prosumer_ok,
                   first_violation);

        // Group bound over random subsets.
        Rng rng(artifacts.config.seed ^ 0x5afe5afeull);
        std::vector<ProsumerId> ids;
        for (const auto& [id, role] : gt.roles)
            ids.push_back(id);
        bool group_ok = true;
        std::string group_violation;
        std::set<std::uint64_t> all_ts;
        for (const auto& [id, series] : net)
            for (const auto& [t, v] : series)
                all_ts.insert(t);
        for (std::size_t i = 0; i < subset_checks && !ids.empty(); ++i) {
            std::vector<ProsumerId> shuffled = ids;
            rng.shuffle(shuffled);
            std::size_t size = 1 + rng.below(shuffled.size());
            shuffled.resize(size);
            Power limit_sum;
            for (const auto& id : shuffled)
                limit_sum += Power::from_milliwatts(limits.count(id) ? limits.at(id) : 0);
            for (std::uint64_t t : all_ts) {
                Power group_net;
                for (const auto& id : shuffled) {
                    auto pit = net.find(id);
                    if (pit == net.end())
                        continue;
                    auto tit = pit->second.find(t);
                    if (tit != pit->second.end())
                        group_net += tit->second;
                }
                if (group_net > limit_sum) {
                    group_ok = false;
                    group_violation = "subset of " + std::to_string(size) + " at t=" +
                                      std::to_string(t);
                    break;
                }
            }
        }
        report.add(std::string(label) + " group bound over " + std::to_string(subset_checks) +
                       " random subsets",
                   group_ok, group_violation);
    }
    return report;
}

double link_round_accuracy(const Ledger& view, const RoundGroundTruth& truth, Rng& rng) {
    const LedgerEntry* entry = view.find_entry(truth.settlement);
    if (!entry)
        return 0.0;
    const auto* eft = std::get_if<EnergyFinancialTx>(&entry->tx);
    if (!eft)
        return 0.0;

    struct Side {
        std::size_t pos;
        Asset asset;
    };
    std::vector<Side> inputs;
    std::vector<Side> outputs;
    std::vector<OutputRef> input_refs;
    std::vector<Address> output_addrs;
    for (const auto* list : {&eft->epa_in, &eft->eca_in, &eft->fa_in}) {
        for (const auto& in : *list) {
            auto utxo = view.find_output(in.out);
            if (!utxo)
                return 0.0;
            inputs.push_back(Side{inputs.size(), utxo->asset});
            input_refs.push_back(in.out);
        }
    }
    for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa}) {
        for (const auto& out : *outputs_of(entry->tx, kind)) {
            outputs.push_back(Side{outputs.size(), out.asset});
            output_addrs.push_back(out.address);
        }
    }
    if (inputs.size() != outputs.size() || inputs.empty())
        return 0.0;

    // Group by exact asset value; within a class any assignment is equally
    // plausible, so draw one uniformly.
    std::map<Asset, std::vector<std::size_t>> in_classes, out_classes;
    for (const auto& side : inputs)
        in_classes[side.asset].push_back(side.pos);
    for (const auto& side : outputs)
        out_classes[side.asset].push_back(side.pos);
    std::vector<std::size_t> guess(inputs.size(), SIZE_MAX);
    for (auto& [asset, in_pos] : in_classes) {
        auto& out_pos = out_classes[asset];
        if (out_pos.size() != in_pos.size())
            continue;
        std::vector<std::size_t> shuffled = out_pos;
        rng.shuffle(shuffled);
        for (std::size_t i = 0; i < in_pos.size(); ++i)
            guess[in_pos[i]] = shuffled[i];
    }

    std::map<OutputRef, Address> truth_map(truth.input_to_target.begin(),
                                           truth.input_to_target.end());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (guess[i] == SIZE_MAX)
            continue;
        auto it = truth_map.find(input_refs[i]);
        if (it != truth_map.end() && output_addrs[guess[i]] == it->second)
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(inputs.size());
}

MeterId trace_epa_source(const Ledger& view, const OutputRef& ref, Rng& rng) {
    OutputRef cursor = ref;
    for (int depth = 0; depth < 64; ++depth) {
        const LedgerEntry* entry = view.find_entry(cursor.txid);
        if (!entry)
            return {};
        if (const auto* smt = std::get_if<SmartMeterTx>(&entry->tx))
            return smt->id;
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry->tx);
        if (!eft || eft->epa_in.empty())
            return {};
        if (eft->epa_in.size() == 1) {
            cursor = eft->epa_in[0].out;
        } else {
            cursor = eft->epa_in[rng.below(eft->epa_in.size())].out;
        }
    }
    return {};
}

InvariantReport check_privacy(const RunArtifacts& artifacts) {
    InvariantReport report;
    report.suite = "privacy";
    Ledger view = artifacts.ledger();
    const GroundTruth& gt = artifacts.ground_truth;
    Rng rng(artifacts.config.seed ^ 0x0b5e77e5ull);

    if (!artifacts.ground_truth.mix_rounds.empty()) {
        double total = 0.0;
        std::size_t rounds = 0;
        for (const auto& truth : gt.mix_rounds) {
            total += link_round_accuracy(view, truth, rng);
            ++rounds;
        }
        double mean = total / static_cast<double>(rounds);
        double baseline = 1.0 / static_cast<double>(artifacts.config.k_min);
        report.add("mix-round linking near the 1/k baseline", mean <= 0.5,
                   "mean=" + std::to_string(mean) + " baseline=" + std::to_string(baseline) +
                       " rounds=" + std::to_string(rounds));
    }

    // Counterparty linking: the observer names the selling meter behind each
    // settlement; scored against the ownership map.
    std::size_t trades = 0, linked = 0;
    for (const auto& entry : view.entries()) {
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry.tx);
        if (!eft || eft->epa_in.empty() || eft->eca_in.empty() || eft->fa_in.empty())
            continue;  // the swap shape: EPA one way, ECA+FA the other
        auto epa_src = view.find_output(eft->epa_in[0].out);
        if (!epa_src)
            continue;
        std::string true_owner = gt.owner_of(epa_src->address);
        if (!gt.is_prosumer(true_owner))
            continue;
        ++trades;
        MeterId guess = trace_epa_source(view, eft->epa_in[0].out, rng);
        auto mit = gt.meters.find(true_owner);
        if (mit != gt.meters.end() && guess == mit->second)
            ++linked;
    }
    if (trades > 0) {
        double accuracy = static_cast<double>(linked) / static_cast<double>(trades);
        if (artifacts.config.mixing_enabled) {
            report.add("trade counterparties not traceable", accuracy <= 0.5,
                       "accuracy=" + std::to_string(accuracy) + " over " +
                           std::to_string(trades) + " trades");
        } else {
            report.add("without mixing every trade is traceable", accuracy == 1.0,
                       "accuracy=" + std::to_string(accuracy));
        }
    }

    // With discipline on, every honest prosumer shows the same withdrawal
    // footprint.
    if (artifacts.config.discipline) {
        auto samples = withdrawal_footprints(artifacts);
        bool equal = true;
        std::string detail;
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (samples[i].features != samples[0].features) {
                equal = false;
                detail = samples[i].prosumer + " differs from " + samples[0].prosumer;
                break;
            }
        }
        report.add("withdrawal footprints identical under discipline", equal, detail);
    }
    return report;
}

OracleBill oracle_bill(const Ledger& view, const GroundTruth& gt, const ProsumerId& prosumer,
                       const std::map<std::uint64_t, Power>& measurements, Timestep t) {
    const MeterId meter = gt.meters.at(prosumer);
    std::set<std::string> deposit_addrs;
    if (auto it = gt.deposit_addresses.find(prosumer); it != gt.deposit_addresses.end())
        deposit_addrs.insert(it->second.begin(), it->second.end());

    Power withdrawn_cov, deposited_cov;
    Money fa_withdrawn, fa_deposited;
    for (const auto& entry : view.entries()) {
        if (const auto* smt = std::get_if<SmartMeterTx>(&entry.tx)) {
            if (smt->id != meter)
                continue;
            for (const auto& out : smt->epa_out)
                withdrawn_cov += coverage(out.asset, t);
            if (entry.timeslot == t)
                for (const auto& out : smt->fa_out)
                    fa_withdrawn += out.asset.amount();
            continue;
        }
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry.tx);
        if (!eft)
            continue;
        for (const auto& out : eft->epa_out)
            if (deposit_addrs.count(out.address.hex()))
                deposited_cov += coverage(out.asset, t);
        if (entry.timeslot == t)
            for (const auto& out : eft->fa_out)
                if (deposit_addrs.count(out.address.hex()))
                    fa_deposited += out.asset.amount();
    }

    auto mit = measurements.find(t.index());
    Power measured = mit == measurements.end() ? Power{} : mit->second;
    Power energy = measured - deposited_cov + withdrawn_cov;

    // Active prices: fold regulatory entries in ledger order, keeping the
    // last one whose activation timestep precedes t.
    Money price_c = view.genesis().price_consumption;
    Money price_p = view.genesis().price_production;
    for (const auto& entry : view.entries()) {
        if (const auto* rt = std::get_if<RegulatoryTx>(&entry.tx)) {
            if (rt->time < t) {
                price_c = rt->price_consumption;
                price_p = rt->price_production;
            }
        }
    }
    Money bill = fa_withdrawn - fa_deposited +
                 energy_cost(energy, energy.negative() ? price_p : price_c);
    return OracleBill{energy, bill};
}

InvariantReport check_security(const RunArtifacts& artifacts) {
    InvariantReport report;
    report.suite = "security";

    Ledger::ReplayError error;
    auto replayed = Ledger::replay(artifacts.ledger_snapshot, &error);
    report.add("snapshot replays with every entry re-validated", replayed.has_value(),
               replayed ? "entries=" + std::to_string(replayed->size())
                        : "REPLAY_INVALID{seq=" + std::to_string(error.seq) + "} " + error.detail);
    if (!replayed)
        return report;
    const Ledger& view = *replayed;

    report.add("replayed chain hash matches recorded hash",
               view.chain_hash() == artifacts.chain_hash);

    // No output is referenced by two accepted transactions.
    std::set<OutputRef> seen;
    bool unique_refs = true;
    for (const auto& entry : view.entries()) {
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry.tx);
        if (!eft)
            continue;
        for (const auto* list : {&eft->epa_in, &eft->eca_in, &eft->fa_in})
            for (const auto& in : *list)
                if (!seen.insert(in.out).second)
                    unique_refs = false;
    }
    report.add("no output referenced by two accepted transactions", unique_refs);

    // Billing oracle equality.
    bool bills_ok = true;
    std::string bill_context;
    for (const auto& [prosumer, lines] : artifacts.bills) {
        auto mit = artifacts.measurements.find(prosumer);
        if (mit == artifacts.measurements.end()) {
            bills_ok = false;
            bill_context = "missing measurements for " + prosumer;
            break;
        }
        for (const auto& line : lines) {
            OracleBill oracle = oracle_bill(view, artifacts.ground_truth, prosumer, mit->second,
                                            Timestep{line.t});
            if (oracle.energy.milliwatts() != line.energy_mw ||
                oracle.bill.cents() != line.bill_cents) {
                bills_ok = false;
                bill_context = prosumer + " t=" + std::to_string(line.t) + " meter B=" +
                               Money::from_cents(line.bill_cents).str() + " oracle B=" +
                               oracle.bill.str();
                break;
            }
        }
        if (!bills_ok)
            break;
    }
    report.add("bills equal independent recomputation", bills_ok, bill_context);

    // Every adversarial submission was rejected; double-spend groups settle
    // exactly one winner.
    std::map<std::string, std::pair<std::size_t, std::size_t>> groups;  // accepted, rejected
    bool lone_adversarial_ok = true;
    for (const auto& rec : artifacts.trace) {
        if (rec.kind != "submit" || !rec.adversarial)
            continue;
        bool accepted = rec.outcome == "accepted";
        if (!rec.group.empty()) {
            auto& [acc, rej] = groups[rec.group];
            accepted ? ++acc : ++rej;
        } else if (accepted) {
            lone_adversarial_ok = false;
        }
    }
    bool groups_ok = true;
    std::string group_context;
    for (const auto& [group, counts] : groups) {
        bool is_race = group.rfind("ds-", 0) == 0;
        std::size_t accepted = counts.first;
        if ((is_race && accepted != 1) || (!is_race && accepted != 0)) {
            groups_ok = false;
            group_context = group + " accepted=" + std::to_string(accepted);
            break;
        }
    }
    report.add("adversarial submissions rejected (double-spend races settle one)",
               groups_ok && lone_adversarial_ok, group_context);
    return report;
}

std::vector<FootprintSample> withdrawal_footprints(const RunArtifacts& artifacts) {
    Ledger view = artifacts.ledger();
    const GroundTruth& gt = artifacts.ground_truth;
    const ScenarioConfig& cfg = artifacts.config;

    std::map<MeterId, ProsumerId> prosumer_of;
    for (const auto& [p, m] : gt.meters)
        prosumer_of[m] = p;

    const std::uint64_t epochs =
        cfg.epoch_ticks == 0 ? 1 : std::max<std::uint64_t>(1, (cfg.ticks - cfg.start_tick) /
                                                                  cfg.epoch_ticks);
    struct Tally {
        std::vector<double> epa_mw, eca_mw, fa_cents, txs;
    };
    std::map<ProsumerId, Tally> tallies;
    for (const auto& [p, role] : gt.roles) {
        if (policy_from_string(role) && is_adversarial(*policy_from_string(role)))
            continue;  // classifier separates honest traders from idlers
        Tally t;
        t.epa_mw.assign(epochs, 0.0);
        t.eca_mw.assign(epochs, 0.0);
        t.fa_cents.assign(epochs, 0.0);
        t.txs.assign(epochs, 0.0);
        tallies[p] = std::move(t);
    }

    for (const auto& entry : view.entries()) {
        const auto* smt = std::get_if<SmartMeterTx>(&entry.tx);
        if (!smt)
            continue;
        auto pit = prosumer_of.find(smt->id);
        if (pit == prosumer_of.end())
            continue;
        auto tit = tallies.find(pit->second);
        if (tit == tallies.end())
            continue;
        std::uint64_t tick = entry.timeslot.index();
        std::uint64_t epoch =
            tick < cfg.start_tick ? 0 : std::min(epochs - 1, (tick - cfg.start_tick) / cfg.epoch_ticks);
        for (const auto& out : smt->epa_out)
            tit->second.epa_mw[epoch] += static_cast<double>(out.asset.power().milliwatts());
        for (const auto& out : smt->eca_out)
            tit->second.eca_mw[epoch] += static_cast<double>(out.asset.power().milliwatts());
        for (const auto& out : smt->fa_out)
            tit->second.fa_cents[epoch] += static_cast<double>(out.asset.amount().cents());
        tit->second.txs[epoch] += 1.0;
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v)
            s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    auto variance = [&](const std::vector<double>& v) {
        double m = mean(v), s = 0;
        for (double x : v)
            s += (x - m) * (x - m);
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };

    std::vector<FootprintSample> samples;
    for (const auto& [p, tally] : tallies) {
        FootprintSample sample;
        sample.prosumer = p;
        const std::string& role = gt.roles.at(p);
        sample.trader = role == "sell" || role == "buy";
        sample.features = {mean(tally.epa_mw),   variance(tally.epa_mw), mean(tally.eca_mw),
                           variance(tally.eca_mw), mean(tally.fa_cents),  variance(tally.fa_cents),
                           mean(tally.txs)};
        samples.push_back(std::move(sample));
    }
    return samples;
}

double best_stump_accuracy(const std::vector<FootprintSample>& samples) {
    if (samples.empty())
        return 0.0;
    const std::size_t n = samples.size();
    const std::size_t dims = samples.front().features.size();
    std::size_t traders = 0;
    for (const auto& s : samples)
        traders += s.trader ? 1 : 0;
    // Majority vote is always available.
    double best = static_cast<double>(std::max(traders, n - traders)) / static_cast<double>(n);
    for (std::size_t d = 0; d < dims; ++d) {
        std::vector<double> values;
        for (const auto& s : samples)
            values.push_back(s.features[d]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            double threshold = (values[i] + values[i + 1]) / 2.0;
            std::size_t correct_hi = 0;  // predict trader when feature > threshold
            for (const auto& s : samples) {
                bool predicted = s.features[d] > threshold;
                if (predicted == s.trader)
                    ++correct_hi;
            }
            double acc = static_cast<double>(correct_hi) / static_cast<double>(n);
            best = std::max({best, acc, 1.0 - acc});
        }
    }
    return best;
}

}  // namespace petra
