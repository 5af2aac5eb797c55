/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/agents.hpp"

#include <algorithm>

namespace petra {

namespace {

std::string short_id(const TxId& id) { return to_hex(id).substr(0, 12); }

std::uint64_t interval_steps(const Asset& a) {
    return a.end().index() - a.start().index() + 1;
}

Money trade_payment(const Asset& epa, Money price) {
    return energy_cost(epa.power(), price).scaled(static_cast<std::int64_t>(interval_steps(epa)));
}

void add_tx_input(EnergyFinancialTx& tx, AssetKind kind, const OutputRef& ref) {
    AssetInput in;
    in.out = ref;
    switch (kind) {
        case AssetKind::epa: tx.epa_in.push_back(in); break;
        case AssetKind::eca: tx.eca_in.push_back(in); break;
        case AssetKind::fa: tx.fa_in.push_back(in); break;
    }
}

void add_tx_output(EnergyFinancialTx& tx, const Asset& asset, const Address& addr) {
    AssetOutput out{asset, addr};
    switch (asset.kind()) {
        case AssetKind::epa: tx.epa_out.push_back(out); break;
        case AssetKind::eca: tx.eca_out.push_back(out); break;
        case AssetKind::fa: tx.fa_out.push_back(out); break;
    }
}

}  // namespace

Bytes TradeProposal::encode() const {
    Encoder enc;
    enc.u64(ask_order_id);
    eca_ref.encode(enc);
    enc.list(fa_refs, [](Encoder& e, const OutputRef& r) { r.encode(e); });
    enc.fixed_bytes(epa_receive.fingerprint);
    enc.fixed_bytes(fa_change.fingerprint);
    enc.bytes(reply);
    return enc.take();
}

std::optional<TradeProposal> TradeProposal::decode(const Bytes& data) {
    try {
        Decoder dec(data);
        TradeProposal p;
        p.ask_order_id = dec.u64();
        p.eca_ref = OutputRef::decode(dec);
        p.fa_refs = dec.list<OutputRef>([](Decoder& d) { return OutputRef::decode(d); });
        p.epa_receive.fingerprint = dec.fixed_bytes<32>();
        p.fa_change.fingerprint = dec.fixed_bytes<32>();
        p.reply = dec.bytes();
        dec.expect_done();
        return p;
    } catch (const codec_error&) {
        return std::nullopt;
    }
}

Bytes SettlementOffer::encode() const {
    Encoder enc;
    enc.u64(ask_order_id);
    enc.bytes(encode_tx(Transaction{tx}));
    return enc.take();
}

std::optional<SettlementOffer> SettlementOffer::decode(const Bytes& data) {
    try {
        Decoder dec(data);
        SettlementOffer o;
        o.ask_order_id = dec.u64();
        Transaction tx = decode_tx(dec.bytes());
        dec.expect_done();
        auto* eft = std::get_if<EnergyFinancialTx>(&tx);
        if (!eft)
            return std::nullopt;
        o.tx = *eft;
        return o;
    } catch (const codec_error&) {
        return std::nullopt;
    }
}

ProsumerAgent::ProsumerAgent(ProsumerSpec spec, const ScenarioConfig& config, Rng rng)
    : spec_(std::move(spec)), config_(&config), rng_(rng) {}

Address ProsumerAgent::fresh_address(AgentWorld& world) {
    Address addr = wallet_.fresh_address(rng_);
    world.note_address(addr, spec_.id);
    return addr;
}

std::vector<ProsumerAgent::Holding> ProsumerAgent::unspent_holdings(AgentWorld& world) const {
    std::vector<Holding> out;
    for (const auto& [addr, kp] : wallet_.keys())
        for (const auto& [ref, asset] : world.view().query_unspent(addr))
            out.push_back(Holding{ref, asset});
    return out;
}

void ProsumerAgent::step(AgentWorld& world, const EpochInfo& epoch) {
    if (gave_up_)
        return;
    if (!epoch.active) {
        if (stage_ == Stage::wait_deposit)
            deposit_all(world, epoch);  // keep retrying until it lands
        return;
    }
    if (epoch.phase == 0)
        begin_epoch(world, epoch);

    switch (stage_) {
        case Stage::resting:
        case Stage::done:
            break;
        case Stage::wait_withdraw:
            poll_withdrawal(world);
            break;
        case Stage::wait_split:
            poll_splits(world, epoch);
            break;
        case Stage::mixing:
            if (epoch.phase >= config_->deposit_offset())
                deposit_all(world, epoch);
            else
                mixing_step(world, epoch);
            break;
        case Stage::trading:
            trading_step(world, epoch);
            break;
        case Stage::wait_deposit:
            deposit_all(world, epoch);
            break;
    }
}

void ProsumerAgent::begin_epoch(AgentWorld& world, const EpochInfo& epoch) {
    current_epoch_ = epoch.epoch;
    withdraw_ticket_.reset();
    split_tickets_.clear();
    split_txs_.clear();
    mix_pool_.clear();
    mix_ = MixTracker{};
    tradeable_.clear();
    asks_.clear();
    buys_.clear();
    asks_tried_.clear();
    pending_zero_.clear();
    unit_tokens_.clear();
    used_units_.clear();
    bid_posted_ = false;
    trades_bought_epoch_ = 0;
    deposit_ticket_.reset();
    channel_ = rng_.bytes(16);
    stage_ = Stage::resting;

    if (spec_.policy == Policy::over_withdraw || spec_.policy == Policy::spam_asks ||
        spec_.policy == Policy::double_spend)
        run_adversarial_preamble(world, epoch);

    const bool disciplined = config_->discipline;
    bool want_epa = false, want_eca = false, want_fa = false;
    switch (spec_.policy) {
        case Policy::sell:
        case Policy::obligation_dodge:
            want_epa = true;
            want_eca = want_fa = disciplined;
            break;
        case Policy::buy:
            want_eca = want_fa = true;
            want_epa = disciplined;
            break;
        case Policy::double_spend:
            want_eca = want_fa = true;
            want_epa = true;  // the race needs a production asset to spend twice
            break;
        case Policy::idle:
        case Policy::over_withdraw:
        case Policy::spam_asks:
            want_epa = want_eca = want_fa = disciplined;
            break;
    }
    if (!want_epa && !want_eca && !want_fa) {
        stage_ = Stage::done;
        return;
    }

    const std::int64_t n = config_->bundle_units;
    std::vector<AssetOutput> outs;
    if (want_epa)
        outs.push_back(AssetOutput{
            Asset::epa(config_->epa_unit.scaled(n), epoch.window_start, epoch.window_end),
            fresh_address(world)});
    if (want_eca)
        outs.push_back(AssetOutput{
            Asset::eca(config_->eca_unit.scaled(n), epoch.window_start, epoch.window_end),
            fresh_address(world)});
    if (want_fa)
        outs.push_back(AssetOutput{Asset::fa(config_->fa_unit.scaled(n)), fresh_address(world)});
    submit_withdrawal(world, epoch, outs);
}

void ProsumerAgent::run_adversarial_preamble(AgentWorld& world, const EpochInfo& epoch) {
    SmartMeter& meter = world.meter(spec_.id);
    if (spec_.policy == Policy::over_withdraw) {
        // Ask for one unit more than the per-timestep ceiling allows.
        std::int64_t over_units =
            spec_.max_epa.milliwatts() / config_->epa_unit.milliwatts() + 1;
        std::vector<AssetOutput> req{AssetOutput{
            Asset::epa(config_->epa_unit.scaled(over_units), epoch.window_start,
                       epoch.window_end),
            fresh_address(world)}};
        auto res = meter.request_withdrawal(req, world.now());
        if (!res.ok())
            world.record_denial(spec_.id, res.denial->str());

        // Forged minting: correct meter id, wrong key.
        KeyPair rogue = KeyPair::generate(rng_);
        SmartMeterTx forged;
        forged.epa_out.push_back(AssetOutput{
            Asset::epa(config_->epa_unit, epoch.window_start, epoch.window_end),
            fresh_address(world)});
        forged.id = meter.id();
        forged.nonce = rng_.byte_array<16>();
        sign_smt(forged, rogue);
        world.submit(Transaction{forged}, spec_.id, true, "forged-smt-" + spec_.id,
                     "self-signed meter tx");

        SmartMeterTx ghost = forged;
        ghost.id = "ghost-" + spec_.id;
        ghost.nonce = rng_.byte_array<16>();
        sign_smt(ghost, rogue);
        world.submit(Transaction{ghost}, spec_.id, true, "ghost-smt-" + spec_.id,
                     "unregistered meter id");
    }
}

void ProsumerAgent::submit_withdrawal(AgentWorld& world, const EpochInfo& epoch,
                                      const std::vector<AssetOutput>& outs) {
    SmartMeter& meter = world.meter(spec_.id);
    auto res = meter.request_withdrawal(outs, world.now());
    if (!res.ok()) {
        world.record_denial(spec_.id, res.denial->str());
        if (spec_.policy == Policy::obligation_dodge)
            gave_up_ = true;
        stage_ = Stage::done;
        return;
    }
    withdraw_tx_ = *res.tx;
    withdraw_ticket_ =
        world.submit(Transaction{withdraw_tx_}, spec_.id, false, "", "withdraw");
    world.transcript("t=" + world.now().str() + " " + spec_.id +
                     " withdraw tx=" + short_id(tx_id(Transaction{withdraw_tx_})) +
                     " outputs=" + std::to_string(outs.size()));
    (void)epoch;
    stage_ = Stage::wait_withdraw;
}

void ProsumerAgent::poll_withdrawal(AgentWorld& world) {
    auto outcome = world.status(*withdraw_ticket_);
    if (outcome.state == SubmitOutcome::State::pending)
        return;
    if (outcome.rejected()) {
        world.transcript("t=" + world.now().str() + " " + spec_.id +
                         " withdraw rejected: " + outcome.verdict.str());
        stage_ = Stage::done;
        return;
    }
    submit_splits(world);
}

void ProsumerAgent::submit_splits(AgentWorld& world) {
    const TxId smt_id = tx_id(Transaction{withdraw_tx_});
    std::vector<std::pair<OutputRef, Utxo>> holdings;
    auto collect = [&](const std::vector<AssetOutput>& outs, AssetKind kind) {
        for (std::uint32_t i = 0; i < outs.size(); ++i)
            holdings.emplace_back(OutputRef{smt_id, kind, i},
                                  Utxo{outs[i].asset, outs[i].address});
    };
    collect(withdraw_tx_.epa_out, AssetKind::epa);
    collect(withdraw_tx_.eca_out, AssetKind::eca);
    collect(withdraw_tx_.fa_out, AssetKind::fa);

    split_txs_.clear();
    split_tickets_.clear();
    for (const auto& [ref, utxo] : holdings) {
        Asset unit;
        switch (utxo.asset.kind()) {
            case AssetKind::epa:
                unit = Asset::epa(config_->epa_unit, utxo.asset.start(), utxo.asset.end());
                break;
            case AssetKind::eca:
                unit = Asset::eca(config_->eca_unit, utxo.asset.start(), utxo.asset.end());
                break;
            case AssetKind::fa:
                unit = Asset::fa(config_->fa_unit);
                break;
        }
        SplitPlan plan = split_to_denominations({{ref, utxo}}, unit, wallet_, rng_);
        for (auto& tx : plan.txs) {
            for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa})
                for (const auto& out : *outputs_of(Transaction{tx}, kind))
                    world.note_address(out.address, spec_.id);
            split_tickets_.push_back(
                world.submit(Transaction{tx}, spec_.id, false, "", "split"));
            split_txs_.push_back(tx);
        }
    }
    stage_ = Stage::wait_split;
}

void ProsumerAgent::poll_splits(AgentWorld& world, const EpochInfo& epoch) {
    for (auto ticket : split_tickets_) {
        auto outcome = world.status(ticket);
        if (outcome.state == SubmitOutcome::State::pending)
            return;
        if (outcome.rejected()) {
            world.transcript("t=" + world.now().str() + " " + spec_.id +
                             " split rejected: " + outcome.verdict.str());
            stage_ = Stage::done;
            return;
        }
    }
    mix_pool_.clear();
    for (const auto& tx : split_txs_) {
        const TxId id = tx_id(Transaction{tx});
        for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa}) {
            const auto& outs = *outputs_of(Transaction{tx}, kind);
            for (std::uint32_t i = 0; i < outs.size(); ++i)
                mix_pool_.push_back(Holding{OutputRef{id, kind, i}, outs[i].asset});
        }
    }
    if (spec_.policy == Policy::double_spend)
        double_spend_probe(world, epoch);
    stage_ = Stage::mixing;
    mixing_step(world, epoch);
}

void ProsumerAgent::double_spend_probe(AgentWorld& world, const EpochInfo& epoch) {
    auto it = std::find_if(mix_pool_.begin(), mix_pool_.end(), [](const Holding& h) {
        return h.asset.kind() == AssetKind::epa;
    });
    if (it == mix_pool_.end())
        return;
    Holding unit = *it;
    mix_pool_.erase(it);
    const std::string group =
        "ds-" + spec_.id + "-e" + std::to_string(epoch.epoch);
    for (int copy = 0; copy < 2; ++copy) {
        EnergyFinancialTx tx;
        tx.nonce = rng_.byte_array<16>();
        add_tx_input(tx, AssetKind::epa, unit.ref);
        add_tx_output(tx, unit.asset, fresh_address(world));
        sign_inputs(tx, wallet_, [&](const OutputRef&) -> std::optional<Address> {
            const Utxo* utxo = world.view().find_unspent(unit.ref);
            if (!utxo)
                return std::nullopt;
            return utxo->address;
        });
        world.submit(Transaction{tx}, spec_.id, true, group, "double spend race");
    }
    world.transcript("t=" + world.now().str() + " " + spec_.id + " double-spend race group=" +
                     group);
}

void ProsumerAgent::mixing_step(AgentWorld& world, const EpochInfo& epoch) {
    if (!config_->mixing_enabled) {
        // Direct transfer to fresh anonymous addresses, no tumbling.
        if (mix_.targets.empty() && !mix_pool_.empty()) {
            for (const auto& h : mix_pool_) {
                EnergyFinancialTx tx;
                tx.nonce = rng_.byte_array<16>();
                Address target = fresh_address(world);
                add_tx_input(tx, h.asset.kind(), h.ref);
                add_tx_output(tx, h.asset, target);
                sign_inputs(tx, wallet_, [&](const OutputRef&) -> std::optional<Address> {
                    const Utxo* utxo = world.view().find_unspent(h.ref);
                    if (!utxo)
                        return std::nullopt;
                    return utxo->address;
                });
                world.submit(Transaction{tx}, spec_.id, false, "", "direct transfer");
                mix_.targets.push_back(target);
            }
            mix_pool_.clear();
            return;
        }
    } else if (epoch.phase == config_->mix_set_offset(mix_.set) && !mix_pool_.empty()) {
        join_round_set(world, mix_.set);
        return;
    }

    if (mix_.targets.empty()) {
        if (mix_pool_.empty() && tradeable_.empty()) {
            stage_ = Stage::trading;  // nothing to cycle
        }
        return;
    }
    // Harvest once every expected address is funded (target, or refund for
    // rounds that fell through).
    std::vector<Holding> landed;
    for (std::size_t i = 0; i < mix_.targets.size(); ++i) {
        auto at_target = world.view().query_unspent(mix_.targets[i]);
        if (at_target.empty() && i < mix_.refunds.size())
            at_target = world.view().query_unspent(mix_.refunds[i]);
        if (at_target.empty())
            return;  // still in flight
        for (const auto& [ref, asset] : at_target)
            landed.push_back(Holding{ref, asset});
    }
    mix_.targets.clear();
    mix_.refunds.clear();
    mix_pool_ = std::move(landed);
    ++mix_.set;
    if (!config_->mixing_enabled || mix_.set >= config_->mix_rounds) {
        tradeable_ = mix_pool_;
        mix_pool_.clear();
        stage_ = Stage::trading;
    }
}

void ProsumerAgent::join_round_set(AgentWorld& world, std::uint64_t set) {
    std::vector<Holding> keep;
    for (const auto& h : mix_pool_) {
        auto round = world.mix_round(h.asset.kind(), set);
        std::optional<Address> escrow;
        if (round)
            escrow = world.mixer().escrow_address(*round);
        if (!round || !escrow) {
            keep.push_back(h);
            continue;
        }
        world.note_address(*escrow, "mixer");
        EnergyFinancialTx in_transfer;
        in_transfer.nonce = rng_.byte_array<16>();
        add_tx_input(in_transfer, h.asset.kind(), h.ref);
        add_tx_output(in_transfer, h.asset, *escrow);
        sign_inputs(in_transfer, wallet_, [&](const OutputRef&) -> std::optional<Address> {
            const Utxo* utxo = world.view().find_unspent(h.ref);
            if (!utxo)
                return std::nullopt;
            return utxo->address;
        });
        Address target = fresh_address(world);
        Address refund = fresh_address(world);
        auto err = world.mixer().join_round(
            *round, in_transfer, *escrow, target, refund,
            [&](const Transaction& tx, const std::string& note) {
                world.submit(tx, spec_.id, false, "", note);
            });
        if (err) {
            world.record_denial(spec_.id, to_string(*err));
            keep.push_back(h);
            continue;
        }
        mix_.targets.push_back(target);
        mix_.refunds.push_back(refund);
    }
    mix_pool_ = std::move(keep);
    if (!mix_.targets.empty())
        world.transcript("t=" + world.now().str() + " " + spec_.id + " mix-join set=" +
                         std::to_string(set) + " units=" + std::to_string(mix_.targets.size()));
}

std::optional<ProofToken> ProsumerAgent::prove_address(AgentWorld& world, const Address& addr,
                                                       const Holding& holding) {
    BidBoard& board = world.board();
    if (!config_->zero_transfer_proofs) {
        OwnershipChallenge challenge = board.issue_challenge(addr, world.now());
        const KeyPair& kp = wallet_.key_for(addr);
        Sig64 sig = sign(kp, challenge.nonce);
        ProofError err{};
        auto token = board.prove_ownership(challenge.id, kp.verify_key, sig, world.now(), &err);
        if (!token)
            world.record_denial(spec_.id, to_string(err));
        return token;
    }
    // Zero-transfer variant: self-spend plus a zero-valued output to the
    // probe; the token becomes available once the transfer is recorded.
    Address probe = board.zero_proof_probe(addr, world.now());
    EnergyFinancialTx tx;
    tx.nonce = rng_.byte_array<16>();
    add_tx_input(tx, holding.asset.kind(), holding.ref);
    add_tx_output(tx, holding.asset, addr);  // asset stays where it is
    add_tx_output(tx, Asset::fa(Money{}), probe);
    sign_inputs(tx, wallet_,
                [&](const OutputRef&) -> std::optional<Address> { return addr; });
    world.submit(Transaction{tx}, spec_.id, false, "", "zero-value ownership proof");
    pending_zero_.push_back(PendingZeroProof{
        probe, Holding{OutputRef{tx_id(Transaction{tx}), holding.asset.kind(), 0}, holding.asset},
        addr});
    return std::nullopt;
}

void ProsumerAgent::trading_step(AgentWorld& world, const EpochInfo& epoch) {
    if (epoch.phase >= config_->deposit_offset()) {
        deposit_all(world, epoch);
        return;
    }
    const std::uint64_t t0 = config_->trade_offset();
    switch (spec_.policy) {
        case Policy::sell:
        case Policy::obligation_dodge:
            if (epoch.phase == t0 || epoch.phase == t0 + 1)
                seller_post_asks(world, epoch);
            seller_handle_proposals(world, epoch);
            break;
        case Policy::buy:
            if (epoch.phase == t0 || epoch.phase == t0 + 1)
                buyer_post_bids(world, epoch);
            if (epoch.phase >= t0 + 2 && epoch.phase + 3 <= config_->deposit_offset())
                buyer_propose(world, epoch);
            buyer_handle_offers(world, epoch);
            buyer_poll_settlements(world);
            break;
        case Policy::spam_asks:
            if (epoch.phase == t0)
                spam_board(world, epoch);
            break;
        default:
            break;
    }
}

void ProsumerAgent::seller_post_asks(AgentWorld& world, const EpochInfo& epoch) {
    (void)epoch;
    BidBoard& board = world.board();
    // Complete zero-transfer proofs started last tick.
    for (auto it = pending_zero_.begin(); it != pending_zero_.end();) {
        auto token = board.poll_zero_proof(it->probe);
        if (!token) {
            ++it;
            continue;
        }
        auto res = board.post_ask(*token, it->holding.ref, spec_.price, channel_, world.view(),
                                  world.now());
        if (res.ok()) {
            asks_.push_back(OpenAsk{*res.order_id, it->holding, Address{}, Address{}, false});
            world.transcript("t=" + world.now().str() + " " + spec_.id + " ask order=" +
                             std::to_string(*res.order_id) + " price=" + spec_.price.str());
        } else {
            world.record_denial(spec_.id, to_string(*res.error));
        }
        it = pending_zero_.erase(it);
    }
    if (!asks_.empty() || !pending_zero_.empty())
        return;

    std::uint32_t to_sell = spec_.trade_units;
    for (const auto& h : tradeable_) {
        if (to_sell == 0)
            break;
        if (h.asset.kind() != AssetKind::epa)
            continue;
        const Utxo* utxo = world.view().find_unspent(h.ref);
        if (!utxo)
            continue;
        auto token = prove_address(world, utxo->address, h);
        if (!token)
            continue;  // zero-transfer mode finishes next tick
        auto res = board.post_ask(*token, h.ref, spec_.price, channel_, world.view(), world.now());
        if (res.ok()) {
            asks_.push_back(OpenAsk{*res.order_id, h, Address{}, Address{}, false});
            world.transcript("t=" + world.now().str() + " " + spec_.id + " ask order=" +
                             std::to_string(*res.order_id) + " price=" + spec_.price.str());
            --to_sell;
        } else {
            world.record_denial(spec_.id, to_string(*res.error));
        }
    }
}

void ProsumerAgent::seller_handle_proposals(AgentWorld& world, const EpochInfo& epoch) {
    (void)epoch;
    for (auto& msg : world.bus().drain(channel_)) {
        if (msg.kind != "propose")
            continue;
        auto proposal = TradeProposal::decode(msg.body);
        if (!proposal)
            continue;
        auto ask = std::find_if(asks_.begin(), asks_.end(), [&](const OpenAsk& a) {
            return a.order_id == proposal->ask_order_id && !a.offered;
        });
        if (ask == asks_.end())
            continue;
        const Utxo* my_epa = world.view().find_unspent(ask->unit.ref);
        if (!my_epa)
            continue;
        const Utxo* eca = world.view().find_unspent(proposal->eca_ref);
        if (!eca || eca->asset.kind() != AssetKind::eca ||
            eca->asset.power() != my_epa->asset.power() ||
            eca->asset.start() != my_epa->asset.start() ||
            eca->asset.end() != my_epa->asset.end())
            continue;  // counterpart consumption asset must mirror the unit
        Money fa_total;
        bool fa_ok = true;
        for (const auto& ref : proposal->fa_refs) {
            const Utxo* fa = world.view().find_unspent(ref);
            if (!fa || fa->asset.kind() != AssetKind::fa) {
                fa_ok = false;
                break;
            }
            fa_total += fa->asset.amount();
        }
        const Money payment = trade_payment(my_epa->asset, spec_.price);
        if (!fa_ok || fa_total < payment)
            continue;

        EnergyFinancialTx tx;
        tx.nonce = rng_.byte_array<16>();
        add_tx_input(tx, AssetKind::epa, ask->unit.ref);
        add_tx_input(tx, AssetKind::eca, proposal->eca_ref);
        for (const auto& ref : proposal->fa_refs)
            add_tx_input(tx, AssetKind::fa, ref);
        add_tx_output(tx, my_epa->asset, proposal->epa_receive);
        ask->proceeds_eca = fresh_address(world);
        ask->proceeds_fa = fresh_address(world);
        add_tx_output(tx, eca->asset, ask->proceeds_eca);
        add_tx_output(tx, Asset::fa(payment), ask->proceeds_fa);
        if (fa_total > payment)
            add_tx_output(tx, Asset::fa(fa_total - payment), proposal->fa_change);
        sign_inputs(tx, wallet_, [&](const OutputRef& ref) -> std::optional<Address> {
            const Utxo* utxo = world.view().find_unspent(ref);
            if (!utxo)
                return std::nullopt;
            return utxo->address;
        });
        SettlementOffer offer{proposal->ask_order_id, tx};
        world.bus().send(world.now(), proposal->reply, "offer", offer.encode(), spec_.id);
        ask->offered = true;
        world.transcript("t=" + world.now().str() + " " + spec_.id + " offer ask=" +
                         std::to_string(proposal->ask_order_id));
    }
    // A spent unit means the swap landed.
    for (auto& ask : asks_) {
        if (ask.offered && !ask.counted && world.view().is_spent(ask.unit.ref)) {
            ask.counted = true;
            ++trades_settled_;
            world.transcript("t=" + world.now().str() + " " + spec_.id + " trade-settled ask=" +
                             std::to_string(ask.order_id));
        }
    }
}

void ProsumerAgent::buyer_post_bids(AgentWorld& world, const EpochInfo& epoch) {
    (void)epoch;
    BidBoard& board = world.board();
    for (auto it = pending_zero_.begin(); it != pending_zero_.end();) {
        auto token = board.poll_zero_proof(it->probe);
        if (!token) {
            ++it;
            continue;
        }
        unit_tokens_.emplace(it->holding.ref, TokenizedHolding{it->holding, *token});
        it = pending_zero_.erase(it);
    }
    if (!unit_tokens_.empty() || !pending_zero_.empty()) {
        maybe_place_bid(world);
        return;
    }
    std::uint32_t eca_needed = spec_.trade_units;
    std::uint32_t fa_needed = spec_.trade_units;
    for (const auto& h : tradeable_) {
        bool want = (h.asset.kind() == AssetKind::eca && eca_needed > 0) ||
                    (h.asset.kind() == AssetKind::fa && fa_needed > 0);
        if (!want)
            continue;
        const Utxo* utxo = world.view().find_unspent(h.ref);
        if (!utxo)
            continue;
        auto token = prove_address(world, utxo->address, h);
        if (token)
            unit_tokens_.emplace(h.ref, TokenizedHolding{h, *token});
        if (h.asset.kind() == AssetKind::eca)
            --eca_needed;
        else
            --fa_needed;
    }
    maybe_place_bid(world);
}

void ProsumerAgent::maybe_place_bid(AgentWorld& world) {
    if (bid_posted_)
        return;
    const TokenizedHolding* eca = nullptr;
    const TokenizedHolding* fa = nullptr;
    for (const auto& [ref, th] : unit_tokens_) {
        if (!eca && th.holding.asset.kind() == AssetKind::eca)
            eca = &th;
        if (!fa && th.holding.asset.kind() == AssetKind::fa)
            fa = &th;
    }
    if (!eca || !fa)
        return;
    auto res = world.board().post_bid(eca->token, eca->holding.ref, fa->token, fa->holding.ref,
                                      spec_.price, channel_, world.view(), world.now());
    if (res.ok()) {
        bid_posted_ = true;
        world.transcript("t=" + world.now().str() + " " + spec_.id + " bid order=" +
                         std::to_string(*res.order_id) + " limit=" + spec_.price.str());
    } else {
        world.record_denial(spec_.id, to_string(*res.error));
    }
}

void ProsumerAgent::buyer_propose(AgentWorld& world, const EpochInfo& epoch) {
    std::uint32_t outstanding = 0;
    for (auto& b : buys_) {
        if (b.settlement)
            continue;
        if (b.proposed_at + 2 > world.now().index()) {
            ++outstanding;
        } else if (!b.released) {
            // Unanswered proposal: free its units for another attempt.
            b.released = true;
            used_units_.erase(b.eca.ref);
            for (const auto& h : b.fa)
                used_units_.erase(h.ref);
        }
    }
    std::uint32_t done = trades_bought_epoch_;
    if (done + outstanding >= spec_.trade_units)
        return;

    BidBoard::Filter filter;
    filter.side = OrderSide::ask;
    filter.overlap_start = epoch.window_start;
    filter.overlap_end = epoch.window_end;
    filter.max_price = spec_.price;
    auto asks = world.board().query(filter);
    for (const auto& ask : asks) {
        if (done + outstanding >= spec_.trade_units)
            break;
        if (asks_tried_.count(ask.id))
            continue;
        // One consumption unit mirroring the ask plus funds that cover it.
        const TokenizedHolding* eca = nullptr;
        std::vector<const TokenizedHolding*> fa;
        Money fa_total;
        const Money payment = trade_payment(ask.asset, ask.price);
        for (const auto& [ref, th] : unit_tokens_) {
            if (used_units_.count(ref))
                continue;
            if (!eca && th.holding.asset.kind() == AssetKind::eca &&
                th.holding.asset.power() == ask.asset.power() &&
                th.holding.asset.start() == ask.asset.start() &&
                th.holding.asset.end() == ask.asset.end())
                eca = &th;
        }
        for (const auto& [ref, th] : unit_tokens_) {
            if (used_units_.count(ref) || th.holding.asset.kind() != AssetKind::fa)
                continue;
            if (fa_total >= payment)
                break;
            fa.push_back(&th);
            fa_total += th.holding.asset.amount();
        }
        if (!eca || fa_total < payment)
            continue;

        PendingBuy buy;
        buy.ask_order_id = ask.id;
        buy.eca = eca->holding;
        for (const auto* th : fa)
            buy.fa.push_back(th->holding);
        buy.receive = fresh_address(world);
        buy.change = fresh_address(world);
        buy.payment = payment;
        buy.expected_asset = ask.asset;
        buy.proposed_at = world.now().index();
        TradeProposal proposal;
        proposal.ask_order_id = ask.id;
        proposal.eca_ref = buy.eca.ref;
        for (const auto& h : buy.fa)
            proposal.fa_refs.push_back(h.ref);
        proposal.epa_receive = buy.receive;
        proposal.fa_change = buy.change;
        proposal.reply = channel_;
        world.bus().send(world.now(), ask.channel, "propose", proposal.encode(), spec_.id);
        world.transcript("t=" + world.now().str() + " " + spec_.id + " propose ask=" +
                         std::to_string(ask.id));
        used_units_.insert(buy.eca.ref);
        for (const auto& h : buy.fa)
            used_units_.insert(h.ref);
        asks_tried_.insert(ask.id);
        buys_.push_back(std::move(buy));
        ++outstanding;
    }
}

void ProsumerAgent::buyer_handle_offers(AgentWorld& world, const EpochInfo& epoch) {
    (void)epoch;
    for (auto& msg : world.bus().drain(channel_)) {
        if (msg.kind != "offer")
            continue;
        auto offer = SettlementOffer::decode(msg.body);
        if (!offer)
            continue;
        auto buy = std::find_if(buys_.begin(), buys_.end(), [&](const PendingBuy& b) {
            return b.ask_order_id == offer->ask_order_id && !b.settlement && !b.released;
        });
        if (buy == buys_.end())
            continue;
        const EnergyFinancialTx& tx = offer->tx;
        // The production asset must land at our address, and our funds must
        // come back as the agreed change; anything else is declined.
        bool epa_ok = tx.epa_out.size() == 1 && tx.epa_out[0].address == buy->receive &&
                      tx.epa_out[0].asset == buy->expected_asset;
        bool eca_ok = tx.eca_in.size() == 1 && tx.eca_in[0].out == buy->eca.ref;
        Money fa_in_total;
        bool fa_ok = tx.fa_in.size() == buy->fa.size();
        if (fa_ok) {
            for (std::size_t i = 0; i < buy->fa.size(); ++i) {
                if (tx.fa_in[i].out != buy->fa[i].ref)
                    fa_ok = false;
                else
                    fa_in_total += buy->fa[i].asset.amount();
            }
        }
        Money change_expected = fa_in_total - buy->payment;
        Money change_seen;
        bool change_ok = true;
        for (const auto& out : tx.fa_out) {
            if (out.address == buy->change)
                change_seen += out.asset.amount();
        }
        change_ok = change_seen == change_expected;
        bool paid_ok = false;
        for (const auto& out : tx.fa_out)
            if (out.address != buy->change && out.asset.amount() == buy->payment)
                paid_ok = true;
        if (buy->payment.is_zero())
            paid_ok = true;
        if (!(epa_ok && eca_ok && fa_ok && change_ok && paid_ok)) {
            world.record_denial(spec_.id, "rejected settlement offer for ask " +
                                              std::to_string(offer->ask_order_id));
            continue;
        }
        EnergyFinancialTx signed_tx = tx;
        sign_inputs(signed_tx, wallet_, [&](const OutputRef& ref) -> std::optional<Address> {
            const Utxo* utxo = world.view().find_unspent(ref);
            if (!utxo)
                return std::nullopt;
            return utxo->address;
        });
        buy->settlement =
            world.submit(Transaction{signed_tx}, spec_.id, false, "", "trade settlement");
        world.transcript("t=" + world.now().str() + " " + spec_.id + " settle ask=" +
                         std::to_string(offer->ask_order_id) + " tx=" +
                         short_id(tx_id(Transaction{signed_tx})));
    }
}

void ProsumerAgent::buyer_poll_settlements(AgentWorld& world) {
    for (auto& buy : buys_) {
        if (!buy.settlement || buy.counted)
            continue;
        auto outcome = world.status(*buy.settlement);
        if (outcome.accepted()) {
            buy.counted = true;
            ++trades_bought_;
            ++trades_bought_epoch_;
            world.transcript("t=" + world.now().str() + " " + spec_.id +
                             " trade-complete ask=" + std::to_string(buy.ask_order_id));
        } else if (outcome.rejected()) {
            buy.counted = true;  // funds stay with us; swept at deposit
            world.record_denial(spec_.id, "settlement rejected: " + outcome.verdict.str());
        }
    }
}

void ProsumerAgent::spam_board(AgentWorld& world, const EpochInfo& epoch) {
    (void)epoch;
    BidBoard& board = world.board();
    // Wrong key over a fresh challenge.
    Address victim = fresh_address(world);
    OwnershipChallenge challenge = board.issue_challenge(victim, world.now());
    KeyPair rogue = KeyPair::generate(rng_);
    ProofError err{};
    if (!board.prove_ownership(challenge.id, rogue.verify_key, sign(rogue, challenge.nonce),
                               world.now(), &err))
        world.record_denial(spec_.id, to_string(err));
    // Fabricated token.
    ProofToken bogus{902000 + current_epoch_, victim, world.now().plus(5)};
    OutputRef fake_ref{};
    auto res = board.post_ask(bogus, fake_ref, spec_.price, channel_, world.view(), world.now());
    if (!res.ok())
        world.record_denial(spec_.id, to_string(*res.error));
    // Replay of a consumed challenge.
    const KeyPair& kp = wallet_.key_for(victim);
    OwnershipChallenge c2 = board.issue_challenge(victim, world.now());
    Sig64 good = sign(kp, c2.nonce);
    board.prove_ownership(c2.id, kp.verify_key, good, world.now(), nullptr);
    if (!board.prove_ownership(c2.id, kp.verify_key, good, world.now(), &err))
        world.record_denial(spec_.id, to_string(err));
}

void ProsumerAgent::deposit_all(AgentWorld& world, const EpochInfo& epoch) {
    (void)epoch;
    if (spec_.policy == Policy::obligation_dodge) {
        stage_ = Stage::done;  // walks away; the meter will refuse it later
        return;
    }
    if (deposit_ticket_) {
        auto outcome = world.status(*deposit_ticket_);
        if (outcome.state == SubmitOutcome::State::pending)
            return;
        if (outcome.accepted()) {
            world.transcript("t=" + world.now().str() + " " + spec_.id + " deposit confirmed");
            stage_ = Stage::done;
            return;
        }
        deposit_ticket_.reset();  // rebuild from what is actually unspent
    }
    auto holdings = unspent_holdings(world);
    if (holdings.empty()) {
        stage_ = Stage::done;
        return;
    }
    SmartMeter& meter = world.meter(spec_.id);
    EnergyFinancialTx tx;
    tx.nonce = rng_.byte_array<16>();
    // Merge same-shaped assets so each deposit pays one output per group.
    std::map<std::tuple<AssetKind, std::uint64_t, std::uint64_t>, Power> energy;
    Money fa_total;
    for (const auto& h : holdings) {
        add_tx_input(tx, h.asset.kind(), h.ref);
        if (h.asset.kind() == AssetKind::fa)
            fa_total += h.asset.amount();
        else
            energy[{h.asset.kind(), h.asset.start().index(), h.asset.end().index()}] +=
                h.asset.power();
    }
    for (const auto& [key, power] : energy) {
        auto [kind, s, e] = key;
        Asset merged = kind == AssetKind::epa ? Asset::epa(power, Timestep{s}, Timestep{e})
                                              : Asset::eca(power, Timestep{s}, Timestep{e});
        Address addr = meter.fresh_deposit_address();
        world.note_address(addr, "meter:" + spec_.id);
        add_tx_output(tx, merged, addr);
    }
    if (!fa_total.is_zero()) {
        Address addr = meter.fresh_deposit_address();
        world.note_address(addr, "meter:" + spec_.id);
        add_tx_output(tx, Asset::fa(fa_total), addr);
    }
    sign_inputs(tx, wallet_, [&](const OutputRef& ref) -> std::optional<Address> {
        const Utxo* utxo = world.view().find_unspent(ref);
        if (!utxo)
            return std::nullopt;
        return utxo->address;
    });
    deposit_ticket_ = world.submit(Transaction{tx}, spec_.id, false, "", "deposit");
    world.transcript("t=" + world.now().str() + " " + spec_.id + " deposit tx=" +
                     short_id(tx_id(Transaction{tx})) + " inputs=" +
                     std::to_string(holdings.size()));
    stage_ = Stage::wait_deposit;
}

}  // namespace petra
