/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <optional>
#include <stdexcept>

#include "petra/crypto.hpp"
#include "petra/tx.hpp"

namespace petra {

// Key material for a set of addresses. Address generation is cheap and
// unlimited; honest actors mint a fresh one per transfer.
class Wallet {
public:
    Address fresh_address(Rng& rng) {
        KeyPair kp = KeyPair::generate(rng);
        Address addr = kp.address();
        keys_.emplace(addr, kp);
        return addr;
    }

    void adopt(const KeyPair& kp) { keys_.emplace(kp.address(), kp); }

    bool controls(const Address& addr) const { return keys_.count(addr) != 0; }

    const KeyPair& key_for(const Address& addr) const {
        auto it = keys_.find(addr);
        if (it == keys_.end())
            throw std::out_of_range("wallet does not control address " + addr.short_hex());
        return it->second;
    }

    const std::map<Address, KeyPair>& keys() const { return keys_; }

private:
    std::map<Address, KeyPair> keys_;
};

// Fills in the spend proofs of every input whose referenced output the
// wallet controls. `resolve` maps an OutputRef to the address it pays.
template <typename Resolve>
void sign_inputs(EnergyFinancialTx& tx, const Wallet& wallet, Resolve&& resolve) {
    const Bytes payload = signing_payload(Transaction{tx});
    for (auto* list : {&tx.epa_in, &tx.eca_in, &tx.fa_in}) {
        for (auto& in : *list) {
            std::optional<Address> addr = resolve(in.out);
            if (addr && wallet.controls(*addr))
                in.proof = make_spend_proof(wallet.key_for(*addr), payload);
        }
    }
}

}  // namespace petra
