/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace petra {

namespace {
void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0)
            throw std::runtime_error("libsodium initialization failed");
    });
}
}  // namespace

Hash256 sha256(const std::uint8_t* data, std::size_t len) {
    ensure_sodium();
    Hash256 out;
    crypto_hash_sha256(out.data(), data, len);
    return out;
}

Address Address::of(const VerifyKey& vk) {
    return Address{sha256(vk.data(), vk.size())};
}

bool Address::is_zero() const {
    for (auto b : fingerprint)
        if (b != 0)
            return false;
    return true;
}

KeyPair KeyPair::from_seed(const ByteArray<32>& seed) {
    ensure_sodium();
    KeyPair kp;
    kp.seed = seed;
    if (crypto_sign_seed_keypair(kp.verify_key.data(), kp.signing_key.data(), seed.data()) != 0)
        throw std::runtime_error("keypair derivation failed");
    return kp;
}

Sig64 sign(const KeyPair& key, const std::uint8_t* msg, std::size_t len) {
    ensure_sodium();
    Sig64 sig;
    if (crypto_sign_detached(sig.data(), nullptr, msg, len, key.signing_key.data()) != 0)
        throw std::runtime_error("signing failed");
    return sig;
}

bool verify(const VerifyKey& vk, const std::uint8_t* msg, std::size_t len, const Sig64& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.data(), msg, len, vk.data()) == 0;
}

bool verify_for_address(const Address& addr, const VerifyKey& vk, const Bytes& msg, const Sig64& sig) {
    return Address::of(vk) == addr && verify(vk, msg, sig);
}

}  // namespace petra
