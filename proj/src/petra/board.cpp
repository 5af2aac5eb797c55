/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/board.hpp"

#include <algorithm>

namespace petra {

const char* to_string(ProofError e) {
    switch (e) {
        case ProofError::bad_signature: return "BAD_SIGNATURE";
        case ProofError::challenge_expired: return "CHALLENGE_EXPIRED";
        case ProofError::challenge_reused: return "CHALLENGE_REUSED";
        case ProofError::unknown_challenge: return "UNKNOWN_CHALLENGE";
    }
    return "?";
}

const char* to_string(OrderStatus s) {
    switch (s) {
        case OrderStatus::open: return "open";
        case OrderStatus::consumed: return "consumed";
        case OrderStatus::withdrawn: return "withdrawn";
        case OrderStatus::stale: return "stale";
    }
    return "?";
}

const char* to_string(PostError e) {
    switch (e) {
        case PostError::unauthorized_token: return "UNAUTHORIZED_TOKEN";
        case PostError::spent_asset: return "SPENT_ASSET";
        case PostError::duplicate_order: return "DUPLICATE_ORDER";
        case PostError::wrong_asset_kind: return "WRONG_ASSET_KIND";
    }
    return "?";
}

OwnershipChallenge BidBoard::issue_challenge(const Address& addr, Timestep now) {
    OwnershipChallenge challenge;
    challenge.id = next_challenge_++;
    challenge.nonce = rng_.bytes(32);
    challenge.addr = addr;
    challenge.expiry = now.plus(params_.challenge_ttl_ticks);
    challenges_[challenge.id] = ChallengeState{challenge, false};
    return challenge;
}

ProofToken BidBoard::grant_token(const Address& addr, Timestep now) {
    ProofToken token{next_token_++, addr, now.plus(params_.token_ttl_ticks)};
    tokens_[token.id] = token;
    return token;
}

std::optional<ProofToken> BidBoard::prove_ownership(std::uint64_t challenge_id,
                                                    const VerifyKey& vk, const Sig64& sig,
                                                    Timestep now, ProofError* error) {
    auto report = [&](ProofError e) -> std::optional<ProofToken> {
        if (error)
            *error = e;
        return std::nullopt;
    };
    auto it = challenges_.find(challenge_id);
    if (it == challenges_.end())
        return report(ProofError::unknown_challenge);
    ChallengeState& state = it->second;
    if (state.used)
        return report(ProofError::challenge_reused);
    if (now > state.challenge.expiry)
        return report(ProofError::challenge_expired);
    if (!verify_for_address(state.challenge.addr, vk, state.challenge.nonce, sig))
        return report(ProofError::bad_signature);
    state.used = true;
    return grant_token(state.challenge.addr, now);
}

Address BidBoard::zero_proof_probe(const Address& addr, Timestep now) {
    // The probe key pair is never used to spend; only the address matters.
    KeyPair kp = KeyPair::generate(rng_);
    probes_[kp.address()] = ZeroProbe{addr, now.plus(params_.challenge_ttl_ticks), std::nullopt};
    return kp.address();
}

std::optional<ProofToken> BidBoard::poll_zero_proof(const Address& probe) const {
    auto it = probes_.find(probe);
    if (it == probes_.end())
        return std::nullopt;
    return it->second.token;
}

bool BidBoard::token_valid(const ProofToken& token, Timestep now) const {
    auto it = tokens_.find(token.id);
    return it != tokens_.end() && it->second.addr == token.addr && !(now > it->second.expiry);
}

PostResult BidBoard::place(Order order, const Ledger& view) {
    if (open_refs_.count(order.asset_ref) ||
        (order.fa_ref && open_refs_.count(*order.fa_ref)))
        return PostResult{std::nullopt, PostError::duplicate_order};
    order.id = next_order_++;
    open_refs_.insert(order.asset_ref);
    if (order.fa_ref)
        open_refs_.insert(*order.fa_ref);
    (void)view;
    std::uint64_t id = order.id;
    orders_[id] = std::move(order);
    return PostResult{id, std::nullopt};
}

PostResult BidBoard::post_ask(const ProofToken& token, const OutputRef& epa_ref, Money price,
                              const ChannelId& channel, const Ledger& view, Timestep now) {
    if (!token_valid(token, now))
        return PostResult{std::nullopt, PostError::unauthorized_token};
    const Utxo* utxo = view.find_unspent(epa_ref);
    if (!utxo)
        return PostResult{std::nullopt, PostError::spent_asset};
    if (utxo->address != token.addr)
        return PostResult{std::nullopt, PostError::unauthorized_token};
    if (utxo->asset.kind() != AssetKind::epa)
        return PostResult{std::nullopt, PostError::wrong_asset_kind};
    Order order;
    order.side = OrderSide::ask;
    order.asset_ref = epa_ref;
    order.asset = utxo->asset;
    order.price = price;
    order.channel = channel;
    return place(std::move(order), view);
}

PostResult BidBoard::post_bid(const ProofToken& eca_token, const OutputRef& eca_ref,
                              const ProofToken& fa_token, const OutputRef& fa_ref, Money price,
                              const ChannelId& channel, const Ledger& view, Timestep now) {
    if (!token_valid(eca_token, now) || !token_valid(fa_token, now))
        return PostResult{std::nullopt, PostError::unauthorized_token};
    const Utxo* eca = view.find_unspent(eca_ref);
    const Utxo* fa = view.find_unspent(fa_ref);
    if (!eca || !fa)
        return PostResult{std::nullopt, PostError::spent_asset};
    if (eca->address != eca_token.addr || fa->address != fa_token.addr)
        return PostResult{std::nullopt, PostError::unauthorized_token};
    if (eca->asset.kind() != AssetKind::eca || fa->asset.kind() != AssetKind::fa)
        return PostResult{std::nullopt, PostError::wrong_asset_kind};
    Order order;
    order.side = OrderSide::bid;
    order.asset_ref = eca_ref;
    order.fa_ref = fa_ref;
    order.asset = eca->asset;
    order.price = price;
    order.channel = channel;
    return place(std::move(order), view);
}

bool BidBoard::withdraw_order(std::uint64_t order_id, const ProofToken& token) {
    auto it = orders_.find(order_id);
    if (it == orders_.end() || it->second.status != OrderStatus::open)
        return false;
    auto tok = tokens_.find(token.id);
    if (tok == tokens_.end() || tok->second.addr != token.addr)
        return false;
    it->second.status = OrderStatus::withdrawn;
    open_refs_.erase(it->second.asset_ref);
    if (it->second.fa_ref)
        open_refs_.erase(*it->second.fa_ref);
    return true;
}

std::vector<Order> BidBoard::query(const Filter& filter) const {
    std::vector<Order> out;
    for (const auto& [id, order] : orders_) {
        if (order.status != OrderStatus::open)
            continue;
        if (filter.side && order.side != *filter.side)
            continue;
        if (filter.min_price && order.price < *filter.min_price)
            continue;
        if (filter.max_price && order.price > *filter.max_price)
            continue;
        if (filter.overlap_start || filter.overlap_end) {
            Timestep a = filter.overlap_start.value_or(Timestep{0});
            Timestep b = filter.overlap_end.value_or(Timestep{UINT64_MAX});
            if (!(order.asset.start() <= b && a <= order.asset.end()))
                continue;
        }
        out.push_back(order);
    }
    std::sort(out.begin(), out.end(), [](const Order& x, const Order& y) {
        return x.price != y.price ? x.price < y.price : x.id < y.id;
    });
    return out;
}

std::optional<Order> BidBoard::find_order(std::uint64_t id) const {
    auto it = orders_.find(id);
    if (it == orders_.end())
        return std::nullopt;
    return it->second;
}

void BidBoard::step(const Ledger& view, Timestep now) {
    for (auto& [id, order] : orders_) {
        if (order.status != OrderStatus::open)
            continue;
        bool spent = view.is_spent(order.asset_ref) ||
                     (order.fa_ref && view.is_spent(*order.fa_ref));
        if (spent) {
            order.status = OrderStatus::consumed;
        } else if (order.asset.is_energy() && order.asset.end() < now) {
            order.status = OrderStatus::stale;
        } else {
            continue;
        }
        open_refs_.erase(order.asset_ref);
        if (order.fa_ref)
            open_refs_.erase(*order.fa_ref);
    }

    // Complete zero-transfer proofs: a new entry that spends from the
    // claimed address and pays a zero-valued asset to the probe.
    const auto& entries = view.entries();
    for (; probe_watermark_ < entries.size(); ++probe_watermark_) {
        const LedgerEntry& entry = entries[probe_watermark_];
        const auto* eft = std::get_if<EnergyFinancialTx>(&entry.tx);
        if (!eft)
            continue;
        for (AssetKind kind : {AssetKind::epa, AssetKind::eca, AssetKind::fa}) {
            for (const auto& out : *outputs_of(entry.tx, kind)) {
                auto it = probes_.find(out.address);
                if (it == probes_.end() || it->second.token.has_value())
                    continue;
                if (now > it->second.expiry)
                    continue;
                bool zero_valued = out.asset.kind() == AssetKind::fa
                                       ? out.asset.amount().is_zero()
                                       : out.asset.power().is_zero();
                if (!zero_valued)
                    continue;
                // The spender must control the claimed address: some input
                // of this transaction must have been held there.
                bool from_claimed = false;
                for (const auto* list : {&eft->epa_in, &eft->eca_in, &eft->fa_in}) {
                    for (const auto& in : *list) {
                        if (Address::of(in.proof.key) == it->second.addr)
                            from_claimed = true;
                    }
                }
                if (from_claimed)
                    it->second.token = grant_token(it->second.addr, now);
            }
        }
    }
}

}  // namespace petra
