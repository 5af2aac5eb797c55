/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "petra/bytes.hpp"
#include "petra/rng.hpp"

namespace petra {

// Ed25519 signatures with SHA-256 fingerprints and transaction ids. The
// scheme identifier is pinned in the ledger genesis header so replicas agree.
inline constexpr const char* kSignatureScheme = "ed25519-sha256";

using Hash256 = ByteArray<32>;
using VerifyKey = ByteArray<32>;
using Sig64 = ByteArray<64>;

Hash256 sha256(const std::uint8_t* data, std::size_t len);
inline Hash256 sha256(const Bytes& b) { return sha256(b.data(), b.size()); }

// Destination for asset transfers: the fingerprint of a verification key.
struct Address {
    Hash256 fingerprint{};

    static Address of(const VerifyKey& vk);
    std::string hex() const { return to_hex(fingerprint); }
    std::string short_hex() const { return to_hex(fingerprint).substr(0, 12); }
    bool is_zero() const;

    auto operator<=>(const Address&) const = default;
};

struct KeyPair {
    ByteArray<32> seed{};
    VerifyKey verify_key{};
    ByteArray<64> signing_key{};

    // Deterministic under a fixed seed.
    static KeyPair from_seed(const ByteArray<32>& seed);
    static KeyPair generate(Rng& rng) { return from_seed(rng.byte_array<32>()); }

    Address address() const { return Address::of(verify_key); }
};

Sig64 sign(const KeyPair& key, const std::uint8_t* msg, std::size_t len);
inline Sig64 sign(const KeyPair& key, const Bytes& msg) { return sign(key, msg.data(), msg.size()); }

// Malformed signatures verify false, never throw.
bool verify(const VerifyKey& vk, const std::uint8_t* msg, std::size_t len, const Sig64& sig);
inline bool verify(const VerifyKey& vk, const Bytes& msg, const Sig64& sig) {
    return verify(vk, msg.data(), msg.size(), sig);
}

// Verifies that vk matches the address fingerprint and the signature checks
// out over the message.
bool verify_for_address(const Address& addr, const VerifyKey& vk, const Bytes& msg, const Sig64& sig);

}  // namespace petra
