/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "petra/bus.hpp"
#include "petra/ledger.hpp"

namespace petra {

// Anonymous order board. Posting requires proving control of the address
// holding the referenced assets, either by signing a fresh challenge or by a
// zero-valued transfer to a probe address the board hands out. The board
// never records where a request came from; the anonymous channel identifier
// in an order is the only path back to its poster.

struct OwnershipChallenge {
    std::uint64_t id = 0;
    Bytes nonce;
    Address addr;
    Timestep expiry;
};

struct ProofToken {
    std::uint64_t id = 0;
    Address addr;
    Timestep expiry;
};

enum class ProofError : std::uint8_t {
    bad_signature,
    challenge_expired,
    challenge_reused,
    unknown_challenge,
};
const char* to_string(ProofError e);

enum class OrderStatus : std::uint8_t { open, consumed, withdrawn, stale };
const char* to_string(OrderStatus s);

enum class OrderSide : std::uint8_t { ask, bid };

struct Order {
    std::uint64_t id = 0;
    OrderSide side = OrderSide::ask;
    OutputRef asset_ref;                  // EPA for asks, ECA for bids
    std::optional<OutputRef> fa_ref;      // bids prove funds as well
    Asset asset;                          // snapshot for interval filters
    Money price;                          // currency per watt-timestep
    ChannelId channel;
    OrderStatus status = OrderStatus::open;
};

enum class PostError : std::uint8_t {
    unauthorized_token,
    spent_asset,
    duplicate_order,
    wrong_asset_kind,
};
const char* to_string(PostError e);

struct PostResult {
    std::optional<std::uint64_t> order_id;
    std::optional<PostError> error;
    bool ok() const { return order_id.has_value(); }
};

class BidBoard {
public:
    struct Params {
        std::uint64_t challenge_ttl_ticks = 10;
        std::uint64_t token_ttl_ticks = 10;
        bool zero_transfer_proofs = false;  // alternative ownership proof
    };

    BidBoard(Rng rng, Params params) : rng_(rng), params_(params) {}

    const Params& params() const { return params_; }

    OwnershipChallenge issue_challenge(const Address& addr, Timestep now);

    // Challenge-signature proof: sig must cover the challenge nonce under
    // the key whose fingerprint is the challenge's address.
    std::optional<ProofToken> prove_ownership(std::uint64_t challenge_id, const VerifyKey& vk,
                                              const Sig64& sig, Timestep now,
                                              ProofError* error = nullptr);

    // Zero-transfer proof: the board hands out a fresh probe address; a
    // ledger transaction spending from `addr` that pays a zero-valued asset
    // to the probe completes the proof on the next step().
    Address zero_proof_probe(const Address& addr, Timestep now);
    std::optional<ProofToken> poll_zero_proof(const Address& probe) const;

    PostResult post_ask(const ProofToken& token, const OutputRef& epa_ref, Money price,
                        const ChannelId& channel, const Ledger& view, Timestep now);
    PostResult post_bid(const ProofToken& eca_token, const OutputRef& eca_ref,
                        const ProofToken& fa_token, const OutputRef& fa_ref, Money price,
                        const ChannelId& channel, const Ledger& view, Timestep now);

    bool withdraw_order(std::uint64_t order_id, const ProofToken& token);

    struct Filter {
        std::optional<OrderSide> side;
        std::optional<Timestep> overlap_start;  // inclusive interval overlap
        std::optional<Timestep> overlap_end;
        std::optional<Money> min_price;
        std::optional<Money> max_price;
    };
    // Open orders matching the filter, ordered by (price, order id).
    std::vector<Order> query(const Filter& filter) const;

    std::optional<Order> find_order(std::uint64_t id) const;
    const std::map<std::uint64_t, Order>& orders() const { return orders_; }

    // Marks orders whose outputs were spent consumed, expires past
    // intervals, and completes pending zero-transfer proofs.
    void step(const Ledger& view, Timestep now);

private:
    struct ChallengeState {
        OwnershipChallenge challenge;
        bool used = false;
    };
    struct ZeroProbe {
        Address addr;
        Timestep expiry;
        std::optional<ProofToken> token;
    };

    bool token_valid(const ProofToken& token, Timestep now) const;
    ProofToken grant_token(const Address& addr, Timestep now);
    PostResult place(Order order, const Ledger& view);

    Rng rng_;
    Params params_;
    std::map<std::uint64_t, ChallengeState> challenges_;
    std::map<std::uint64_t, ProofToken> tokens_;
    std::map<Address, ZeroProbe> probes_;
    std::map<std::uint64_t, Order> orders_;
    std::set<OutputRef> open_refs_;
    std::uint64_t next_challenge_ = 0;
    std::uint64_t next_token_ = 0;
    std::uint64_t next_order_ = 0;
    std::uint64_t probe_watermark_ = 0;
};

}  // namespace petra
