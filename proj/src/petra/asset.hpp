/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "petra/codec.hpp"
#include "petra/fixed.hpp"
#include "petra/timestep.hpp"

namespace petra {

enum class AssetKind : std::uint8_t { epa = 0, eca = 1, fa = 2 };

const char* to_string(AssetKind kind);

// Permission to produce (sell) power over an inclusive timestep interval.
struct Epa {
    Power power;
    Timestep start;
    Timestep end;
    auto operator<=>(const Epa&) const = default;
};

// Permission to consume (buy); same shape as Epa.
struct Eca {
    Power power;
    Timestep start;
    Timestep end;
    auto operator<=>(const Eca&) const = default;
};

// Transferable money amount.
struct Fa {
    Money amount;
    auto operator<=>(const Fa&) const = default;
};

class Asset {
public:
    Asset() : kind_(AssetKind::fa) {}

    static Asset epa(Power power, Timestep start, Timestep end) {
        return make_energy(AssetKind::epa, power, start, end);
    }
    static Asset eca(Power power, Timestep start, Timestep end) {
        return make_energy(AssetKind::eca, power, start, end);
    }
    static Asset fa(Money amount) {
        if (amount.negative())
            throw std::invalid_argument("financial asset amount must be non-negative");
        Asset a;
        a.kind_ = AssetKind::fa;
        a.amount_ = amount;
        return a;
    }

    AssetKind kind() const { return kind_; }
    bool is_energy() const { return kind_ != AssetKind::fa; }
    Power power() const { return power_; }
    Timestep start() const { return start_; }
    Timestep end() const { return end_; }
    Money amount() const { return amount_; }

    std::string str() const;

    void encode(Encoder& enc) const;
    static Asset decode(Decoder& dec);

    auto operator<=>(const Asset&) const = default;

private:
    static Asset make_energy(AssetKind kind, Power power, Timestep start, Timestep end) {
        if (power.negative())
            throw std::invalid_argument("energy asset power must be non-negative");
        if (end < start)
            throw std::invalid_argument("energy asset interval end precedes start");
        Asset a;
        a.kind_ = kind;
        a.power_ = power;
        a.start_ = start;
        a.end_ = end;
        return a;
    }

    AssetKind kind_;
    Power power_{};      // energy assets only
    Timestep start_{};
    Timestep end_{};
    Money amount_{};     // financial assets only
};

// Power contributed by an asset at timestep t: asset.power inside the
// inclusive [start, end] interval, zero outside. Zero for financial assets.
Power coverage(const Asset& asset, Timestep t);

// Sorted distinct points where the summed coverage of the given assets can
// change (each start and each end+1). Equality of two coverage sums at every
// breakpoint implies equality at every timestep.
std::vector<Timestep> coverage_breakpoints(const std::vector<Asset>& assets);

}  // namespace petra
