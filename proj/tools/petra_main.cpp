/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "petra/checks.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    petra::ScenarioConfig config = petra::ScenarioConfig::from_json(read_file(config_path));
    auto errors = config.validate();
    if (!errors.empty()) {
        for (const auto& e : errors)
            std::cerr << "config error: " << e << "\n";
        return 2;
    }
    petra::RunArtifacts artifacts = petra::run_scenario(config);
    artifacts.save(out_dir);
    std::cout << "run complete: " << artifacts.transcript.size() << " events, ledger hash "
              << petra::to_hex(artifacts.chain_hash) << "\n"
              << "artifacts written to " << out_dir << "\n";
    return 0;
}

int cmd_check(const std::string& dir) {
    petra::RunArtifacts artifacts = petra::RunArtifacts::load(dir);
    bool ok = true;
    for (auto report : {petra::check_safety(artifacts), petra::check_privacy(artifacts),
                        petra::check_security(artifacts)}) {
        std::cout << report.render();
        ok = ok && report.all_pass();
    }
    std::cout << (ok ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    return ok ? 0 : 1;
}

int cmd_inspect(const std::string& ledger_path) {
    std::string raw = read_file(ledger_path);
    petra::Bytes snapshot(raw.begin(), raw.end());
    petra::Ledger::ReplayError error;
    auto ledger = petra::Ledger::replay(snapshot, &error);
    if (!ledger) {
        std::cerr << "REPLAY_INVALID{seq=" << error.seq << "}: " << error.detail << "\n";
        return 1;
    }
    std::cout << "entries: " << ledger->size() << "\n"
              << "chain hash: " << petra::to_hex(ledger->chain_hash()) << "\n"
              << "scheme: " << ledger->genesis().scheme << "\n";
    for (const auto& entry : ledger->entries()) {
        std::cout << "seq=" << entry.seq << " slot=" << entry.timeslot.str() << " "
                  << petra::tx_kind_name(entry.tx)
                  << " id=" << petra::to_hex(entry.id).substr(0, 16);
        if (const auto* smt = std::get_if<petra::SmartMeterTx>(&entry.tx))
            std::cout << " meter=" << smt->id;
        if (const auto* rt = std::get_if<petra::RegulatoryTx>(&entry.tx))
            std::cout << " time=" << rt->time.str() << " authorize=" << rt->authorize.size()
                      << " ban=" << rt->ban.size();
        std::cout << "\n";
    }
    std::cout << "unspent outputs: " << ledger->unspent_set().size() << "\n";
    for (const auto& [ref, utxo] : ledger->unspent_set())
        std::cout << "  " << ref.str() << " " << utxo.asset.str() << " -> "
                  << utxo.address.short_hex() << "\n";
    return 0;
}

int cmd_bill(const std::string& dir, const std::string& prosumer) {
    petra::RunArtifacts artifacts = petra::RunArtifacts::load(dir);
    auto it = artifacts.bills.find(prosumer);
    if (it == artifacts.bills.end()) {
        std::cerr << "unknown prosumer " << prosumer << "\n";
        return 1;
    }
    petra::Money total;
    petra::Power net_energy;
    for (const auto& line : it->second) {
        petra::Money bill = petra::Money::from_cents(line.bill_cents);
        petra::Power energy = petra::Power::from_milliwatts(line.energy_mw);
        total += bill;
        net_energy += energy;
        if (line.bill_cents != 0 || line.energy_mw != 0)
            std::cout << "t=" << line.t << " E=" << energy.str() << "W B=" << bill.str() << "\n";
    }
    std::cout << "aggregate E=" << net_energy.str() << "W B=" << total.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PETra transactive-microgrid protocol simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "petra-out", artifacts_dir, ledger_path, prosumer;

    auto* run = app.add_subcommand("run", "execute a scenario and write artifacts");
    run->add_option("config", config_path, "scenario config (JSON)")->required();
    run->add_option("-o,--out", out_dir, "artifacts directory");

    auto* check = app.add_subcommand("check", "run invariant checks over artifacts");
    check->add_option("artifacts", artifacts_dir, "artifacts directory")->required();

    auto* inspect = app.add_subcommand("inspect", "dump a ledger snapshot");
    inspect->add_option("ledger", ledger_path, "ledger snapshot file")->required();

    auto* bill = app.add_subcommand("bill", "billing report for one prosumer");
    bill->add_option("artifacts", artifacts_dir, "artifacts directory")->required();
    bill->add_option("--prosumer", prosumer, "prosumer id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_dir);
        if (check->parsed())
            return cmd_check(artifacts_dir);
        if (inspect->parsed())
            return cmd_inspect(ledger_path);
        if (bill->parsed())
            return cmd_bill(artifacts_dir, prosumer);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
