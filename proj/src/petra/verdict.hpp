/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "petra/asset.hpp"
#include "petra/codec.hpp"

namespace petra {

// Stable public violation codes.
enum class ViolationCode : std::uint8_t {
    double_spend = 0,
    bad_signature = 1,
    balance_mismatch = 2,
    unknown_meter = 3,
    banned_meter = 4,
    stale_timestep = 5,
    unknown_input = 6,
    duplicate = 7,
    malformed = 8,
    replay_invalid = 9,
};

const char* to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::optional<AssetKind> kind;
    std::optional<Timestep> at;
    std::string detail;

    std::string str() const;
    auto operator<=>(const Violation&) const = default;
};

// Validation outcome; valid exactly when no violations were recorded.
struct Verdict {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationCode code) const;

    void add(ViolationCode code, std::string detail = {});
    void add(ViolationCode code, AssetKind kind, std::string detail = {});
    void add(ViolationCode code, AssetKind kind, Timestep at, std::string detail = {});

    std::string str() const;
    Bytes encode() const;  // canonical bytes, for replay-determinism checks

    auto operator<=>(const Verdict&) const = default;
};

}  // namespace petra
