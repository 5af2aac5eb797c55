/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/fixed.hpp"

#include <cctype>
#include <limits>

namespace petra {
namespace detail {

std::optional<std::int64_t> try_parse_fixed(const std::string& text, int frac_digits) {
    if (text.empty())
        return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '-' || text[i] == '+') {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
        return std::nullopt;
    __int128 value = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        value = value * 10 + (text[i] - '0');
        if (value > std::numeric_limits<std::int64_t>::max())
            return std::nullopt;
        ++i;
    }
    int frac_seen = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (i >= text.size())
            return std::nullopt;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (frac_seen == frac_digits)
                return std::nullopt;  // more precision than the type carries
            value = value * 10 + (text[i] - '0');
            if (value > std::numeric_limits<std::int64_t>::max())
                return std::nullopt;
            ++frac_seen;
            ++i;
        }
    }
    if (i != text.size())
        return std::nullopt;
    for (; frac_seen < frac_digits; ++frac_seen) {
        value *= 10;
        if (value > std::numeric_limits<std::int64_t>::max())
            return std::nullopt;
    }
    if (neg)
        value = -value;
    return static_cast<std::int64_t>(value);
}

std::int64_t parse_fixed(const std::string& text, int frac_digits) {
    auto v = try_parse_fixed(text, frac_digits);
    if (!v)
        throw std::invalid_argument("malformed fixed-point literal: '" + text + "'");
    return *v;
}

std::string format_fixed(std::int64_t raw, int frac_digits) {
    std::int64_t scale = 1;
    for (int i = 0; i < frac_digits; ++i)
        scale *= 10;
    bool neg = raw < 0;
    unsigned long long mag = neg ? 0ull - static_cast<unsigned long long>(raw)
                                 : static_cast<unsigned long long>(raw);
    unsigned long long whole = mag / static_cast<unsigned long long>(scale);
    unsigned long long frac = mag % static_cast<unsigned long long>(scale);
    std::string out = neg ? "-" : "";
    out += std::to_string(whole);
    if (frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(f.begin(), static_cast<std::size_t>(frac_digits) - f.size(), '0');
        while (!f.empty() && f.back() == '0')
            f.pop_back();
        out += "." + f;
    }
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("fixed-point addition overflow");
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw std::overflow_error("fixed-point subtraction overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("fixed-point multiplication overflow");
    return r;
}

}  // namespace detail

Money energy_cost(Power p, Money price_per_watt_step) {
    // (mW * cents/W) / 1000, half away from zero.
    __int128 num = static_cast<__int128>(p.milliwatts()) * price_per_watt_step.cents();
    bool neg = num < 0;
    if (neg)
        num = -num;
    __int128 q = (num + 500) / 1000;
    if (q > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("energy cost overflow");
    auto cents = static_cast<std::int64_t>(q);
    return Money::from_cents(neg ? -cents : cents);
}

}  // namespace petra
