/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace petra {

using Bytes = std::vector<std::uint8_t>;

template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

std::string to_hex(const std::uint8_t* data, std::size_t len);

inline std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

template <std::size_t N>
std::string to_hex(const ByteArray<N>& a) { return to_hex(a.data(), N); }

// Returns false on odd length or non-hex characters.
bool from_hex(const std::string& hex, Bytes& out);

template <std::size_t N>
bool from_hex(const std::string& hex, ByteArray<N>& out) {
    Bytes tmp;
    if (!from_hex(hex, tmp) || tmp.size() != N)
        return false;
    std::copy(tmp.begin(), tmp.end(), out.begin());
    return true;
}

}  // namespace petra
