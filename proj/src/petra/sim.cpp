/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/sim.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace petra {

using json = nlohmann::ordered_json;

namespace {

std::string short_id(const TxId& id) { return to_hex(id).substr(0, 12); }

MeterId meter_id_for(const ProsumerId& p) { return "m-" + p; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json ref_to_json(const OutputRef& ref) {
    return json{{"tx", to_hex(ref.txid)},
                {"list", to_string(ref.list)},
                {"index", ref.index}};
}

OutputRef ref_from_json(const json& j) {
    OutputRef ref;
    if (!from_hex(j.at("tx").get<std::string>(), ref.txid))
        throw std::invalid_argument("bad tx id in output ref");
    std::string list = j.at("list").get<std::string>();
    ref.list = list == "EPA" ? AssetKind::epa : list == "ECA" ? AssetKind::eca : AssetKind::fa;
    ref.index = j.at("index").get<std::uint32_t>();
    return ref;
}

}  // namespace

std::string GroundTruth::owner_of(const Address& addr) const {
    auto it = owners.find(addr.hex());
    return it == owners.end() ? std::string("?") : it->second;
}

Ledger RunArtifacts::ledger() const {
    Ledger::ReplayError error;
    auto replayed = Ledger::replay(ledger_snapshot, &error);
    if (!replayed)
        throw std::runtime_error("artifact ledger replay failed at seq " +
                                 std::to_string(error.seq) + ": " + error.detail);
    return std::move(*replayed);
}

Simulation::Simulation(const ScenarioConfig& config)
    : config_(config), master_(config.seed) {
    auto errors = config_.validate();
    if (!errors.empty()) {
        std::string what = "invalid scenario config:";
        for (const auto& e : errors)
            what += "\n  " + e;
        throw std::invalid_argument(what);
    }

    Rng dso_rng = master_.fork("dso");
    KeyPair dso_key = KeyPair::generate(dso_rng);
    dso_ = std::make_unique<Dso>(dso_key);

    GenesisHeader genesis;
    genesis.dso_key = dso_key.verify_key;
    genesis.price_consumption = config_.genesis_prices.consumption;
    genesis.price_production = config_.genesis_prices.production;
    genesis.tick_seconds = config_.tick_seconds;
    current_prices_ = config_.genesis_prices;

    cluster_ = std::make_unique<ReplicatedLedger>(genesis, config_.replicas,
                                                  master_.fork("consensus"),
                                                  config_.latency_ticks);
    mixer_ = std::make_unique<MixingService>(
        master_.fork("mixer"),
        MixingService::Params{config_.k_min, config_.round_deadline_ticks,
                              config_.latency_ticks + 1, config_.enforce_denominations});
    board_ = std::make_unique<BidBoard>(
        master_.fork("board"), BidBoard::Params{config_.challenge_ttl_ticks,
                                                config_.token_ttl_ticks,
                                                config_.zero_transfer_proofs});

    for (const auto& spec : config_.prosumers) {
        Rng meter_rng = master_.fork("meter:" + spec.id);
        KeyPair meter_key = KeyPair::generate(meter_rng);
        meters_.emplace(spec.id, std::make_unique<SmartMeter>(
                                     meter_id_for(spec.id), spec.id, meter_key,
                                     MeterLimits{spec.max_epa, spec.max_eca, spec.credit},
                                     meter_rng.fork("addresses")));
        gt_.roles[spec.id] = to_string(spec.policy);
        gt_.meters[spec.id] = meter_id_for(spec.id);
        gt_.max_epa_mw[spec.id] = spec.max_epa.milliwatts();
        gt_.max_eca_mw[spec.id] = spec.max_eca.milliwatts();
        policies_[spec.id] = spec.policy;
    }
    for (const auto& spec : config_.prosumers)
        agents_.push_back(
            std::make_unique<ProsumerAgent>(spec, config_, master_.fork("agent:" + spec.id)));
}

SmartMeter& Simulation::meter(const std::string& prosumer) {
    auto it = meters_.find(prosumer);
    if (it == meters_.end())
        throw std::out_of_range("unknown prosumer " + prosumer);
    return *it->second;
}

ReplicatedLedger::Ticket Simulation::submit(const Transaction& tx, const std::string& actor,
                                            bool adversarial, const std::string& group,
                                            const std::string& note) {
    auto ticket = cluster_->submit(tx, now());
    TraceRecord rec;
    rec.tick = now();
    rec.kind = "submit";
    rec.txid = to_hex(tx_id(tx));
    rec.size = encode_tx(tx).size();
    rec.actor = actor;
    rec.adversarial = adversarial;
    rec.group = group;
    rec.note = note;
    unresolved_.emplace_back(ticket, bus_.record(std::move(rec)));
    return ticket;
}

SubmitOutcome Simulation::status(ReplicatedLedger::Ticket ticket) const {
    return cluster_->status(ticket);
}

void Simulation::note_address(const Address& addr, const std::string& owner) {
    auto [it, inserted] = gt_.owners.emplace(addr.hex(), owner);
    if (!inserted && it->second != owner)
        throw std::logic_error("address registered to two owners");
    if (owner.rfind("meter:", 0) == 0) {
        deposit_addrs_.insert(addr);
        gt_.deposit_addresses[owner.substr(6)].push_back(addr.hex());
    }
}

void Simulation::record_denial(const std::string& actor, const std::string& what) {
    TraceRecord rec;
    rec.tick = now();
    rec.kind = "denial";
    rec.actor = actor;
    auto it = policies_.find(actor);
    rec.adversarial = it != policies_.end() && is_adversarial(it->second);
    rec.note = what;
    bus_.record(std::move(rec));
    transcript_.push_back("t=" + now().str() + " " + actor + " denied " + what);
}

std::optional<std::uint64_t> Simulation::mix_round(AssetKind kind, std::uint64_t set) const {
    auto it = current_rounds_.find({static_cast<std::uint8_t>(kind), set});
    if (it == current_rounds_.end())
        return std::nullopt;
    return it->second;
}

EpochInfo Simulation::epoch_info() const {
    EpochInfo ep;
    if (config_.prosumers.empty() || tick_ < config_.start_tick)
        return ep;
    const std::uint64_t rel = tick_ - config_.start_tick;
    const std::uint64_t e = rel / config_.epoch_ticks;
    const std::uint64_t epoch_start = config_.start_tick + e * config_.epoch_ticks;
    if (epoch_start + config_.epoch_ticks > config_.ticks)
        return ep;  // would run past the end of the scenario
    ep.active = true;
    ep.epoch = e;
    ep.phase = rel % config_.epoch_ticks;
    ep.window_start = Timestep{epoch_start + config_.epoch_ticks};
    ep.window_end = Timestep{epoch_start + 2 * config_.epoch_ticks - 1};
    return ep;
}

void Simulation::dso_step() {
    const Timestep t = now();
    if (!bootstrap_done_) {
        std::vector<MeterAuthorization> auths;
        for (const auto& [id, meter] : meters_)
            auths.push_back(MeterAuthorization{meter->id(), meter->pubkey()});
        RegulatoryTx rt = dso_->issue_regulation(std::move(auths), {}, current_prices_,
                                                 Timestep{config_.latency_ticks});
        submit(Transaction{rt}, "dso", false, "", "bootstrap registry");
        transcript_.push_back("t=" + t.str() + " dso authorize meters=" +
                              std::to_string(meters_.size()));
        bootstrap_done_ = true;
    }
    for (const auto& pc : config_.price_changes) {
        if (pc.effective.index() != tick_ + config_.latency_ticks)
            continue;
        RegulatoryTx rt = dso_->issue_regulation({}, {}, pc.prices, pc.effective);
        submit(Transaction{rt}, "dso", false, "", "price change");
        current_prices_ = pc.prices;
        transcript_.push_back("t=" + t.str() + " dso price-change effective=" +
                              pc.effective.str() + " consumption=" +
                              pc.prices.consumption.str() + " production=" +
                              pc.prices.production.str());
    }
    for (const auto& ban : config_.bans) {
        if (ban.effective.index() != tick_ + config_.latency_ticks)
            continue;
        RegulatoryTx rt = dso_->issue_regulation({}, {meter_id_for(ban.prosumer)},
                                                 current_prices_, ban.effective);
        submit(Transaction{rt}, "dso", false, "", "ban meter");
        transcript_.push_back("t=" + t.str() + " dso ban prosumer=" + ban.prosumer +
                              " effective=" + ban.effective.str());
    }
    if (config_.dso_strategy == "threshold") {
        EpochInfo ep = epoch_info();
        if (ep.active && ep.phase == 0) {
            LoadForecast forecast = Dso::forecast_load(
                view(), *board_, t, t.plus(config_.forecast_horizon), deposit_addrs_);
            auto rt = dso_->apply_threshold(forecast, current_prices_,
                                            Dso::ThresholdPolicy{config_.dso_cap, config_.dso_bump},
                                            t.plus(config_.latency_ticks));
            if (rt) {
                submit(Transaction{*rt}, "dso", false, "", "threshold price update");
                current_prices_ =
                    Prices{rt->price_consumption, rt->price_production};
                transcript_.push_back("t=" + t.str() + " dso threshold-update consumption=" +
                                      current_prices_.consumption.str());
            }
        }
    }
}

void Simulation::mixing_services_step() {
    if (!config_.mixing_enabled || config_.prosumers.empty())
        return;
    EpochInfo ep = epoch_info();
    if (ep.active) {
        for (std::uint64_t set = 0; set < config_.mix_rounds; ++set) {
            if (ep.phase != config_.mix_set_offset(set))
                continue;
            Asset epa = Asset::epa(config_.epa_unit, ep.window_start, ep.window_end);
            Asset eca = Asset::eca(config_.eca_unit, ep.window_start, ep.window_end);
            Asset fa = Asset::fa(config_.fa_unit);
            for (const Asset& denom : {epa, eca, fa}) {
                auto id = mixer_->open_round(denom, now());
                current_rounds_[{static_cast<std::uint8_t>(denom.kind()), set}] = id;
                transcript_.push_back("t=" + now().str() + " mixer open round=" +
                                      std::to_string(id) + " set=" + std::to_string(set) +
                                      " denom=" + denom.str());
            }
        }
    }
    auto receipts = mixer_->step(now(), view(), [&](const Transaction& tx, const std::string& note) {
        submit(tx, "mixer", false, "", note);
    });
    for (const auto& receipt : receipts)
        transcript_.push_back("t=" + now().str() + " mixer settle round=" +
                              std::to_string(receipt.round_id) + " tx=" +
                              short_id(receipt.settlement));
    for (auto& truth : mixer_->take_ground_truth())
        gt_.mix_rounds.push_back(std::move(truth));
}

void Simulation::emit_forecast() {
    LoadForecast forecast = Dso::forecast_load(view(), *board_, now().next(),
                                               now().plus(config_.forecast_horizon),
                                               deposit_addrs_);
    forecasts_.push_back("t=" + now().str() + " " + forecast.render_line(now().next()));
}

void Simulation::run_tick() {
    if (tick_ >= config_.ticks)
        return;
    cluster_->advance(now());
    for (auto it = unresolved_.begin(); it != unresolved_.end();) {
        SubmitOutcome outcome = cluster_->status(it->first);
        if (outcome.accepted()) {
            bus_.set_outcome(it->second, "accepted");
            it = unresolved_.erase(it);
        } else if (outcome.rejected()) {
            bus_.set_outcome(it->second, "rejected: " + outcome.verdict.str());
            it = unresolved_.erase(it);
        } else {
            ++it;
        }
    }
    for (auto& [id, meter] : meters_)
        meter->observe_ledger(view());
    board_->step(view(), now());
    dso_step();
    mixing_services_step();
    emit_forecast();
    EpochInfo ep = epoch_info();
    for (auto& agent : agents_)
        agent->step(*this, ep);
    ++tick_;
}

void Simulation::run_all() {
    while (tick_ < config_.ticks)
        run_tick();
}

RunArtifacts Simulation::finish() {
    // Deliver anything still in flight so meters see the final ledger.
    cluster_->advance(Timestep{tick_ + config_.latency_ticks});
    for (auto& [id, meter] : meters_)
        meter->observe_ledger(view());

    RunArtifacts artifacts;
    artifacts.config = config_;

    // Delivered-as-traded measurements: each prosumer's physical net
    // consumption equals its final asset position plus the configured bias.
    for (const auto& spec : config_.prosumers) {
        SmartMeter& m = meter(spec.id);
        for (std::uint64_t t = 0; t < config_.ticks; ++t) {
            Timestep ts{t};
            Power measured = m.deposited_epa_coverage(ts) - m.recorded_epa_coverage(ts) +
                             spec.measurement_bias;
            m.record_measurement(ts, measured);
            artifacts.measurements[spec.id][t] = measured;
        }
        for (std::uint64_t t = 0; t < config_.ticks; ++t) {
            auto line = m.bill_line(Timestep{t}, view());
            artifacts.bills[spec.id].push_back(BillRecord{
                t, line->energy.milliwatts(), line->bill.cents()});
        }
    }

    artifacts.ledger_snapshot = view().snapshot();
    artifacts.chain_hash = view().chain_hash();
    artifacts.trace = bus_.trace();
    artifacts.ground_truth = gt_;
    artifacts.transcript = transcript_;
    artifacts.forecasts = forecasts_;
    return artifacts;
}

RunArtifacts run_scenario(const ScenarioConfig& config) {
    Simulation sim(config);
    sim.run_all();
    return sim.finish();
}

void RunArtifacts::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    write_file(dir / "config.json", config.to_json());
    write_file(dir / "ledger.bin",
               std::string(ledger_snapshot.begin(), ledger_snapshot.end()));

    std::string mtext;
    for (const auto& [p, series] : measurements)
        for (const auto& [t, mw] : series)
            mtext += p + " " + std::to_string(t) + " " + mw.str() + "\n";
    write_file(dir / "measurements.txt", mtext);

    json jbills = json::object();
    std::string btext;
    for (const auto& [p, lines] : bills) {
        json arr = json::array();
        Money total;
        for (const auto& line : lines) {
            arr.push_back({{"t", line.t},
                           {"energy_mw", line.energy_mw},
                           {"bill_cents", line.bill_cents}});
            if (line.bill_cents != 0 || line.energy_mw != 0)
                btext += p + " t=" + std::to_string(line.t) + " E=" +
                         Power::from_milliwatts(line.energy_mw).str() + "W B=" +
                         Money::from_cents(line.bill_cents).str() + "\n";
            total += Money::from_cents(line.bill_cents);
        }
        btext += p + " TOTAL B=" + total.str() + "\n";
        jbills[p] = std::move(arr);
    }
    write_file(dir / "bills.json", jbills.dump(2) + "\n");
    write_file(dir / "bills.txt", btext);

    json jtrace = json::array();
    for (const auto& rec : trace)
        jtrace.push_back({{"tick", rec.tick.index()},
                          {"kind", rec.kind},
                          {"channel", rec.channel},
                          {"txid", rec.txid},
                          {"size", rec.size},
                          {"outcome", rec.outcome},
                          {"actor", rec.actor},
                          {"adversarial", rec.adversarial},
                          {"group", rec.group},
                          {"note", rec.note}});
    write_file(dir / "trace.json", jtrace.dump(2) + "\n");

    json jgt;
    jgt["owners"] = ground_truth.owners;
    jgt["roles"] = ground_truth.roles;
    jgt["meters"] = ground_truth.meters;
    jgt["max_epa_mw"] = ground_truth.max_epa_mw;
    jgt["max_eca_mw"] = ground_truth.max_eca_mw;
    jgt["deposit_addresses"] = ground_truth.deposit_addresses;
    jgt["mix_rounds"] = json::array();
    for (const auto& round : ground_truth.mix_rounds) {
        json pairs = json::array();
        for (const auto& [ref, target] : round.input_to_target)
            pairs.push_back({{"input", ref_to_json(ref)}, {"target", target.hex()}});
        jgt["mix_rounds"].push_back({{"round", round.round_id},
                                     {"settlement", to_hex(round.settlement)},
                                     {"pairs", std::move(pairs)}});
    }
    write_file(dir / "ground_truth.json", jgt.dump(2) + "\n");

    std::string ttext;
    for (const auto& line : transcript)
        ttext += line + "\n";
    write_file(dir / "transcript.txt", ttext);
    std::string ftext;
    for (const auto& line : forecasts)
        ftext += line + "\n";
    write_file(dir / "forecasts.txt", ftext);

    json meta;
    meta["seed"] = config.seed;
    meta["ticks"] = config.ticks;
    meta["chain_hash"] = to_hex(chain_hash);
    meta["scheme"] = kSignatureScheme;
    write_file(dir / "meta.json", meta.dump(2) + "\n");
}

RunArtifacts RunArtifacts::load(const std::filesystem::path& dir) {
    RunArtifacts artifacts;
    artifacts.config = ScenarioConfig::from_json(read_file(dir / "config.json"));
    std::string snap = read_file(dir / "ledger.bin");
    artifacts.ledger_snapshot = Bytes(snap.begin(), snap.end());

    std::istringstream mstream(read_file(dir / "measurements.txt"));
    std::string prosumer, watts;
    std::uint64_t t;
    while (mstream >> prosumer >> t >> watts)
        artifacts.measurements[prosumer][t] = Power::parse(watts);

    json jbills = json::parse(read_file(dir / "bills.json"));
    for (auto it = jbills.begin(); it != jbills.end(); ++it)
        for (const auto& line : it.value())
            artifacts.bills[it.key()].push_back(BillRecord{
                line.at("t").get<std::uint64_t>(), line.at("energy_mw").get<std::int64_t>(),
                line.at("bill_cents").get<std::int64_t>()});

    json jtrace = json::parse(read_file(dir / "trace.json"));
    for (const auto& r : jtrace) {
        TraceRecord rec;
        rec.tick = Timestep{r.at("tick").get<std::uint64_t>()};
        rec.kind = r.at("kind").get<std::string>();
        rec.channel = r.at("channel").get<std::string>();
        rec.txid = r.at("txid").get<std::string>();
        rec.size = r.at("size").get<std::size_t>();
        rec.outcome = r.at("outcome").get<std::string>();
        rec.actor = r.at("actor").get<std::string>();
        rec.adversarial = r.at("adversarial").get<bool>();
        rec.group = r.at("group").get<std::string>();
        rec.note = r.at("note").get<std::string>();
        artifacts.trace.push_back(std::move(rec));
    }

    json jgt = json::parse(read_file(dir / "ground_truth.json"));
    artifacts.ground_truth.owners =
        jgt.at("owners").get<std::map<std::string, std::string>>();
    artifacts.ground_truth.roles = jgt.at("roles").get<std::map<std::string, std::string>>();
    artifacts.ground_truth.meters = jgt.at("meters").get<std::map<std::string, std::string>>();
    artifacts.ground_truth.max_epa_mw =
        jgt.at("max_epa_mw").get<std::map<std::string, std::int64_t>>();
    artifacts.ground_truth.max_eca_mw =
        jgt.at("max_eca_mw").get<std::map<std::string, std::int64_t>>();
    artifacts.ground_truth.deposit_addresses =
        jgt.at("deposit_addresses").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& r : jgt.at("mix_rounds")) {
        RoundGroundTruth round;
        round.round_id = r.at("round").get<std::uint64_t>();
        if (!from_hex(r.at("settlement").get<std::string>(), round.settlement))
            throw std::invalid_argument("bad settlement id in ground truth");
        for (const auto& pair : r.at("pairs")) {
            Address target;
            if (!from_hex(pair.at("target").get<std::string>(), target.fingerprint))
                throw std::invalid_argument("bad target address in ground truth");
            round.input_to_target.emplace_back(ref_from_json(pair.at("input")), target);
        }
        artifacts.ground_truth.mix_rounds.push_back(std::move(round));
    }

    std::istringstream tstream(read_file(dir / "transcript.txt"));
    std::string line;
    while (std::getline(tstream, line))
        artifacts.transcript.push_back(line);

    json meta = json::parse(read_file(dir / "meta.json"));
    if (!from_hex(meta.at("chain_hash").get<std::string>(), artifacts.chain_hash))
        throw std::invalid_argument("bad chain hash in meta.json");
    return artifacts;
}

}  // namespace petra
