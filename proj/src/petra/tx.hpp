/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "petra/asset.hpp"
#include "petra/crypto.hpp"

namespace petra {

using TxId = Hash256;
using MeterId = std::string;
using Nonce = ByteArray<16>;

// Points at one output of a prior transaction: (tx id, output list, index).
struct OutputRef {
    TxId txid{};
    AssetKind list = AssetKind::epa;
    std::uint32_t index = 0;

    auto operator<=>(const OutputRef&) const = default;
    std::string str() const;

    void encode(Encoder& enc) const;
    static OutputRef decode(Decoder& dec);
};

struct AssetOutput {
    Asset asset;
    Address address;

    auto operator<=>(const AssetOutput&) const = default;
    void encode(Encoder& enc) const;
    static AssetOutput decode(Decoder& dec);
};

// The verification key rides along so validators can check the signature
// against the referenced output's address fingerprint.
struct SpendProof {
    VerifyKey key{};
    Sig64 sig{};

    auto operator<=>(const SpendProof&) const = default;
};

struct AssetInput {
    OutputRef out;
    SpendProof proof;

    auto operator<=>(const AssetInput&) const = default;
    void encode(Encoder& enc, bool with_sigs) const;
    static AssetInput decode(Decoder& dec);
};

// Moves assets between addresses; may split or combine them as long as the
// per-timestep (EPA/ECA) and total-amount (FA) balances hold.
struct EnergyFinancialTx {
    std::vector<AssetInput> epa_in, eca_in, fa_in;
    std::vector<AssetOutput> epa_out, eca_out, fa_out;
    Nonce nonce{};

    bool empty() const {
        return epa_in.empty() && eca_in.empty() && fa_in.empty() && epa_out.empty() &&
               eca_out.empty() && fa_out.empty();
    }
    auto operator<=>(const EnergyFinancialTx&) const = default;
};

// Mints assets from a smart meter to its prosumer's addresses.
struct SmartMeterTx {
    std::vector<AssetOutput> epa_out, eca_out, fa_out;
    MeterId id;
    Nonce nonce{};
    Sig64 sig{};

    auto operator<=>(const SmartMeterTx&) const = default;
};

struct MeterAuthorization {
    MeterId id;
    VerifyKey pubkey{};
    auto operator<=>(const MeterAuthorization&) const = default;
};

// DSO-signed registry and price update, effective strictly after `time`.
struct RegulatoryTx {
    std::vector<MeterAuthorization> authorize;
    std::vector<MeterId> ban;
    Money price_consumption;
    Money price_production;
    Timestep time;
    Sig64 sig{};

    auto operator<=>(const RegulatoryTx&) const = default;
};

using Transaction = std::variant<EnergyFinancialTx, SmartMeterTx, RegulatoryTx>;

// Canonical encoding, signature bytes included.
Bytes encode_tx(const Transaction& tx);
Transaction decode_tx(Decoder& dec);
Transaction decode_tx(const Bytes& data);

// Canonical encoding with every signature field zeroed; this is the byte
// message each signature covers.
Bytes signing_payload(const Transaction& tx);

TxId tx_id(const Transaction& tx);
std::string tx_kind_name(const Transaction& tx);

// Output list of the given kind (EFT and SMT; regulatory txs carry none).
const std::vector<AssetOutput>* outputs_of(const Transaction& tx, AssetKind kind);

// Convenience for building and signing.
SpendProof make_spend_proof(const KeyPair& owner, const Bytes& payload);
void sign_smt(SmartMeterTx& tx, const KeyPair& meter_key);
void sign_rt(RegulatoryTx& tx, const KeyPair& dso_key);

}  // namespace petra
