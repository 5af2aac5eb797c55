/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/ledger.hpp"

namespace petra {

namespace {
constexpr char kSnapshotMagic[8] = {'P', 'E', 'T', 'R', 'A', 'L', 'v', '1'};

Bytes entry_body(const LedgerEntry& e) {
    Encoder enc;
    enc.u64(e.seq);
    enc.timestep(e.timeslot);
    enc.bytes(encode_tx(e.tx));
    return enc.take();
}

Hash256 chain_step(const Hash256& prev, const Bytes& body) {
    Bytes buf(prev.begin(), prev.end());
    buf.insert(buf.end(), body.begin(), body.end());
    return sha256(buf);
}
}  // namespace

void GenesisHeader::encode(Encoder& enc) const {
    enc.fixed_bytes(dso_key);
    enc.money(price_consumption);
    enc.money(price_production);
    enc.str(scheme);
    enc.u64(tick_seconds);
}

GenesisHeader GenesisHeader::decode(Decoder& dec) {
    GenesisHeader g;
    g.dso_key = dec.fixed_bytes<32>();
    g.price_consumption = dec.money();
    g.price_production = dec.money();
    g.scheme = dec.str();
    g.tick_seconds = dec.u64();
    return g;
}

Ledger::Ledger(GenesisHeader genesis) : genesis_(std::move(genesis)) {
    Encoder enc;
    genesis_.encode(enc);
    genesis_hash_ = sha256(enc.data());
}

const Utxo* Ledger::find_unspent(const OutputRef& ref) const {
    auto it = unspent_.find(ref);
    return it == unspent_.end() ? nullptr : &it->second;
}

bool Ledger::is_spent(const OutputRef& ref) const { return spent_.count(ref) != 0; }

bool Ledger::known_tx(const TxId& id) const { return tx_ids_.count(id) != 0; }

std::optional<std::uint64_t> Ledger::find_seq(const TxId& id) const {
    auto it = tx_ids_.find(id);
    if (it == tx_ids_.end())
        return std::nullopt;
    return it->second;
}

const LedgerEntry* Ledger::find_entry(const TxId& id) const {
    auto seq = find_seq(id);
    return seq ? &entries_[*seq] : nullptr;
}

std::optional<Utxo> Ledger::find_output(const OutputRef& ref) const {
    const LedgerEntry* entry = find_entry(ref.txid);
    if (!entry)
        return std::nullopt;
    const auto* outs = outputs_of(entry->tx, ref.list);
    if (!outs || ref.index >= outs->size())
        return std::nullopt;
    return Utxo{(*outs)[ref.index].asset, (*outs)[ref.index].address};
}

Verdict Ledger::validate(const Transaction& tx, Timestep now) const {
    Verdict verdict;
    if (known_tx(tx_id(tx))) {
        verdict.add(ViolationCode::duplicate, "transaction already recorded");
        return verdict;
    }
    return validate_tx(*this, tx, now);
}

Verdict Ledger::append(const Transaction& tx, Timestep now) {
    if (!entries_.empty() && now < entries_.back().timeslot)
        now = entries_.back().timeslot;  // timeslot is non-decreasing in seq
    Verdict verdict = validate(tx, now);
    if (!verdict.ok())
        return verdict;
    apply(tx, tx_id(tx), now, entries_.size());
    return verdict;
}

void Ledger::apply(const Transaction& tx, const TxId& id, Timestep now, std::uint64_t seq) {
    LedgerEntry entry{seq, now, tx, id, Hash256{}};
    entry.chain_hash = chain_step(chain_hash(), entry_body(entry));
    tx_ids_.emplace(id, seq);

    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, EnergyFinancialTx>) {
                for (const auto* list : {&t.epa_in, &t.eca_in, &t.fa_in}) {
                    for (const auto& in : *list) {
                        auto it = unspent_.find(in.out);
                        by_address_[it->second.address].erase(in.out);
                        unspent_.erase(it);
                        spent_.insert(in.out);
                    }
                }
            } else if constexpr (std::is_same_v<T, RegulatoryTx>) {
                rt_history_.push_back(RtRecord{seq, now, t});
            }
        },
        tx);

    for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa}) {
        const auto* outs = outputs_of(tx, kind);
        if (!outs)
            continue;
        for (std::uint32_t i = 0; i < outs->size(); ++i) {
            OutputRef ref{id, kind, i};
            unspent_.emplace(ref, Utxo{(*outs)[i].asset, (*outs)[i].address});
            by_address_[(*outs)[i].address].insert(ref);
        }
    }
    entries_.push_back(std::move(entry));
}

std::vector<std::pair<OutputRef, Asset>> Ledger::query_unspent(const Address& addr) const {
    std::vector<std::pair<OutputRef, Asset>> out;
    auto it = by_address_.find(addr);
    if (it == by_address_.end())
        return out;
    for (const auto& ref : it->second)
        out.emplace_back(ref, unspent_.at(ref).asset);
    return out;
}

Hash256 Ledger::chain_hash() const {
    return entries_.empty() ? genesis_hash_ : entries_.back().chain_hash;
}

Hash256 Ledger::state_digest() const {
    Encoder enc;
    enc.fixed_bytes(chain_hash());
    enc.u64(unspent_.size());
    for (const auto& [ref, utxo] : unspent_) {
        ref.encode(enc);
        utxo.asset.encode(enc);
        enc.fixed_bytes(utxo.address.fingerprint);
    }
    enc.u64(spent_.size());
    for (const auto& ref : spent_)
        ref.encode(enc);
    enc.u64(rt_history_.size());
    return sha256(enc.data());
}

Bytes Ledger::snapshot() const {
    Encoder enc;
    for (char c : kSnapshotMagic)
        enc.u8(static_cast<std::uint8_t>(c));
    Encoder genc;
    genesis_.encode(genc);
    enc.bytes(genc.data());
    enc.u64(entries_.size());
    for (const auto& e : entries_) {
        enc.bytes(entry_body(e));
        enc.fixed_bytes(e.chain_hash);
    }
    return enc.take();
}

std::optional<Ledger> Ledger::replay(const Bytes& snapshot, ReplayError* error) {
    auto fail = [&](std::uint64_t seq, const std::string& detail) -> std::optional<Ledger> {
        if (error)
            *error = ReplayError{seq, detail};
        return std::nullopt;
    };
    try {
        Decoder dec(snapshot);
        for (char c : kSnapshotMagic)
            if (dec.u8() != static_cast<std::uint8_t>(c))
                return fail(0, "bad snapshot magic");
        Bytes genesis_bytes = dec.bytes();
        Decoder gdec(genesis_bytes);
        Ledger ledger(GenesisHeader::decode(gdec));
        gdec.expect_done();
        std::uint64_t count = dec.u64();
        for (std::uint64_t i = 0; i < count; ++i) {
            Bytes body = dec.bytes();
            Hash256 recorded_hash = dec.fixed_bytes<32>();
            Hash256 expected = chain_step(ledger.chain_hash(), body);
            if (expected != recorded_hash)
                return fail(i, "hash chain mismatch");
            Decoder bdec(body);
            std::uint64_t seq = bdec.u64();
            Timestep timeslot = bdec.timestep();
            Transaction tx = decode_tx(bdec.bytes());
            bdec.expect_done();
            if (seq != i)
                return fail(i, "sequence number mismatch");
            if (!ledger.entries_.empty() && timeslot < ledger.entries_.back().timeslot)
                return fail(i, "timeslot decreases");
            Verdict verdict = ledger.validate(tx, timeslot);
            if (!verdict.ok())
                return fail(i, "entry fails validation: " + verdict.str());
            ledger.apply(tx, tx_id(tx), timeslot, seq);
        }
        dec.expect_done();
        return ledger;
    } catch (const codec_error& e) {
        return fail(0, std::string("snapshot decode error: ") + e.what());
    } catch (const std::exception& e) {
        return fail(0, std::string("snapshot rejected: ") + e.what());
    }
}

}  // namespace petra
