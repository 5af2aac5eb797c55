/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace petra {

// Discrete tick on the shared timeline. One tick maps to a fixed wall-clock
// duration set per scenario (default 4 s).
class Timestep {
public:
    constexpr Timestep() = default;
    explicit constexpr Timestep(std::uint64_t index) : index_(index) {}

    constexpr std::uint64_t index() const { return index_; }
    std::string str() const { return std::to_string(index_); }

    Timestep next() const {
        if (index_ == UINT64_MAX)
            throw std::overflow_error("timestep overflow");
        return Timestep{index_ + 1};
    }
    Timestep plus(std::uint64_t n) const {
        if (index_ > UINT64_MAX - n)
            throw std::overflow_error("timestep overflow");
        return Timestep{index_ + n};
    }

    auto operator<=>(const Timestep&) const = default;

private:
    std::uint64_t index_ = 0;
};

}  // namespace petra
