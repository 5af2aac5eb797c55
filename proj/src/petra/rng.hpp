/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "petra/bytes.hpp"

namespace petra {

// Seeded generator with explicitly specified draws. std::mt19937_64 output
// is pinned by the standard; the bounded draw and shuffle are spelled out
// here so streams never depend on library-defined distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0)
            return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool chance(double p) {
        return static_cast<double>(below(1u << 30)) < p * static_cast<double>(1u << 30);
    }

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        for (auto& b : out)
            b = static_cast<std::uint8_t>(below(256));
        return out;
    }

    template <std::size_t N>
    ByteArray<N> byte_array() {
        ByteArray<N> out;
        for (auto& b : out)
            b = static_cast<std::uint8_t>(below(256));
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {  // Fisher-Yates
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream for a named component.
    Rng fork(const std::string& tag) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : tag) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return Rng(h ^ engine_());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace petra
