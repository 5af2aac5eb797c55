/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/tx.hpp"

namespace petra {

namespace {

constexpr std::uint8_t kTagEft = 0;
constexpr std::uint8_t kTagSmt = 1;
constexpr std::uint8_t kTagRt = 2;

void encode_output_list(Encoder& enc, const std::vector<AssetOutput>& outs) {
    enc.list(outs, [](Encoder& e, const AssetOutput& o) { o.encode(e); });
}

std::vector<AssetOutput> decode_output_list(Decoder& dec) {
    return dec.list<AssetOutput>([](Decoder& d) { return AssetOutput::decode(d); });
}

void encode_input_list(Encoder& enc, const std::vector<AssetInput>& ins, bool with_sigs) {
    enc.list(ins, [with_sigs](Encoder& e, const AssetInput& in) { in.encode(e, with_sigs); });
}

std::vector<AssetInput> decode_input_list(Decoder& dec) {
    return dec.list<AssetInput>([](Decoder& d) { return AssetInput::decode(d); });
}

void encode_eft(Encoder& enc, const EnergyFinancialTx& tx, bool with_sigs) {
    enc.u8(kTagEft);
    encode_input_list(enc, tx.epa_in, with_sigs);
    encode_input_list(enc, tx.eca_in, with_sigs);
    encode_input_list(enc, tx.fa_in, with_sigs);
    encode_output_list(enc, tx.epa_out);
    encode_output_list(enc, tx.eca_out);
    encode_output_list(enc, tx.fa_out);
    enc.fixed_bytes(tx.nonce);
}

void encode_smt(Encoder& enc, const SmartMeterTx& tx, bool with_sigs) {
    enc.u8(kTagSmt);
    encode_output_list(enc, tx.epa_out);
    encode_output_list(enc, tx.eca_out);
    encode_output_list(enc, tx.fa_out);
    enc.str(tx.id);
    enc.fixed_bytes(tx.nonce);
    enc.fixed_bytes(with_sigs ? tx.sig : Sig64{});
}

void encode_rt(Encoder& enc, const RegulatoryTx& tx, bool with_sigs) {
    enc.u8(kTagRt);
    enc.list(tx.authorize, [](Encoder& e, const MeterAuthorization& a) {
        e.str(a.id);
        e.fixed_bytes(a.pubkey);
    });
    enc.list(tx.ban, [](Encoder& e, const MeterId& id) { e.str(id); });
    enc.money(tx.price_consumption);
    enc.money(tx.price_production);
    enc.timestep(tx.time);
    enc.fixed_bytes(with_sigs ? tx.sig : Sig64{});
}

Bytes encode_with(const Transaction& tx, bool with_sigs) {
    Encoder enc;
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, EnergyFinancialTx>)
                encode_eft(enc, t, with_sigs);
            else if constexpr (std::is_same_v<T, SmartMeterTx>)
                encode_smt(enc, t, with_sigs);
            else
                encode_rt(enc, t, with_sigs);
        },
        tx);
    return enc.take();
}

}  // namespace

std::string OutputRef::str() const {
    return to_hex(txid).substr(0, 12) + ":" + to_string(list) + ":" + std::to_string(index);
}

void OutputRef::encode(Encoder& enc) const {
    enc.fixed_bytes(txid);
    enc.u8(static_cast<std::uint8_t>(list));
    enc.u32(index);
}

OutputRef OutputRef::decode(Decoder& dec) {
    OutputRef ref;
    ref.txid = dec.fixed_bytes<32>();
    auto tag = dec.u8();
    if (tag > 2)
        throw codec_error("unknown output list tag");
    ref.list = static_cast<AssetKind>(tag);
    ref.index = dec.u32();
    return ref;
}

void AssetOutput::encode(Encoder& enc) const {
    asset.encode(enc);
    enc.fixed_bytes(address.fingerprint);
}

AssetOutput AssetOutput::decode(Decoder& dec) {
    AssetOutput out;
    out.asset = Asset::decode(dec);
    out.address.fingerprint = dec.fixed_bytes<32>();
    return out;
}

void AssetInput::encode(Encoder& enc, bool with_sigs) const {
    out.encode(enc);
    if (with_sigs) {
        enc.fixed_bytes(proof.key);
        enc.fixed_bytes(proof.sig);
    } else {
        enc.fixed_bytes(VerifyKey{});
        enc.fixed_bytes(Sig64{});
    }
}

AssetInput AssetInput::decode(Decoder& dec) {
    AssetInput in;
    in.out = OutputRef::decode(dec);
    in.proof.key = dec.fixed_bytes<32>();
    in.proof.sig = dec.fixed_bytes<64>();
    return in;
}

Bytes encode_tx(const Transaction& tx) { return encode_with(tx, true); }

Bytes signing_payload(const Transaction& tx) { return encode_with(tx, false); }

Transaction decode_tx(Decoder& dec) {
    auto tag = dec.u8();
    switch (tag) {
        case kTagEft: {
            EnergyFinancialTx tx;
            tx.epa_in = decode_input_list(dec);
            tx.eca_in = decode_input_list(dec);
            tx.fa_in = decode_input_list(dec);
            tx.epa_out = decode_output_list(dec);
            tx.eca_out = decode_output_list(dec);
            tx.fa_out = decode_output_list(dec);
            tx.nonce = dec.fixed_bytes<16>();
            return tx;
        }
        case kTagSmt: {
            SmartMeterTx tx;
            tx.epa_out = decode_output_list(dec);
            tx.eca_out = decode_output_list(dec);
            tx.fa_out = decode_output_list(dec);
            tx.id = dec.str();
            tx.nonce = dec.fixed_bytes<16>();
            tx.sig = dec.fixed_bytes<64>();
            return tx;
        }
        case kTagRt: {
            RegulatoryTx tx;
            tx.authorize = dec.list<MeterAuthorization>([](Decoder& d) {
                MeterAuthorization a;
                a.id = d.str();
                a.pubkey = d.fixed_bytes<32>();
                return a;
            });
            tx.ban = dec.list<MeterId>([](Decoder& d) { return d.str(); });
            tx.price_consumption = dec.money();
            tx.price_production = dec.money();
            tx.time = dec.timestep();
            tx.sig = dec.fixed_bytes<64>();
            return tx;
        }
        default:
            throw codec_error("unknown transaction tag");
    }
}

Transaction decode_tx(const Bytes& data) {
    Decoder dec(data);
    Transaction tx = decode_tx(dec);
    dec.expect_done();
    return tx;
}

TxId tx_id(const Transaction& tx) { return sha256(encode_tx(tx)); }

std::string tx_kind_name(const Transaction& tx) {
    if (std::holds_alternative<EnergyFinancialTx>(tx)) return "eft";
    if (std::holds_alternative<SmartMeterTx>(tx)) return "smt";
    return "rt";
}

const std::vector<AssetOutput>* outputs_of(const Transaction& tx, AssetKind kind) {
    const std::vector<AssetOutput>* out = nullptr;
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, RegulatoryTx>) {
                out = nullptr;
            } else {
                switch (kind) {
                    case AssetKind::epa: out = &t.epa_out; break;
                    case AssetKind::eca: out = &t.eca_out; break;
                    case AssetKind::fa: out = &t.fa_out; break;
                }
            }
        },
        tx);
    return out;
}

SpendProof make_spend_proof(const KeyPair& owner, const Bytes& payload) {
    return SpendProof{owner.verify_key, sign(owner, payload)};
}

void sign_smt(SmartMeterTx& tx, const KeyPair& meter_key) {
    tx.sig = Sig64{};
    tx.sig = sign(meter_key, signing_payload(Transaction{tx}));
}

void sign_rt(RegulatoryTx& tx, const KeyPair& dso_key) {
    tx.sig = Sig64{};
    tx.sig = sign(dso_key, signing_payload(Transaction{tx}));
}

}  // namespace petra
