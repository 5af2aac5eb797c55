/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace petra {

// Fixed-point quantities so balance equations compare exactly.
// Power carries milliwatt resolution, Money two fractional digits.

namespace detail {

std::int64_t parse_fixed(const std::string& text, int frac_digits);
std::optional<std::int64_t> try_parse_fixed(const std::string& text, int frac_digits);
std::string format_fixed(std::int64_t raw, int frac_digits);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace detail

class Power {
public:
    constexpr Power() = default;
    static constexpr Power from_milliwatts(std::int64_t mw) { return Power{mw}; }
    static constexpr Power from_watts(std::int64_t w) { return Power{w * 1000}; }
    // Accepts decimal strings like "12.345" (up to 3 fractional digits).
    static Power parse(const std::string& text) { return Power{detail::parse_fixed(text, 3)}; }
    static std::optional<Power> try_parse(const std::string& text) {
        auto raw = detail::try_parse_fixed(text, 3);
        if (!raw) return std::nullopt;
        return Power{*raw};
    }

    constexpr std::int64_t milliwatts() const { return mw_; }
    std::string str() const { return detail::format_fixed(mw_, 3); }
    constexpr bool is_zero() const { return mw_ == 0; }
    constexpr bool negative() const { return mw_ < 0; }

    Power operator+(Power o) const { return Power{detail::checked_add(mw_, o.mw_)}; }
    Power operator-(Power o) const { return Power{detail::checked_sub(mw_, o.mw_)}; }
    Power operator-() const { return Power{detail::checked_sub(0, mw_)}; }
    Power& operator+=(Power o) { mw_ = detail::checked_add(mw_, o.mw_); return *this; }
    Power& operator-=(Power o) { mw_ = detail::checked_sub(mw_, o.mw_); return *this; }
    Power scaled(std::int64_t n) const { return Power{detail::checked_mul(mw_, n)}; }

    auto operator<=>(const Power&) const = default;

private:
    explicit constexpr Power(std::int64_t mw) : mw_(mw) {}
    std::int64_t mw_ = 0;
};

class Money {
public:
    constexpr Money() = default;
    static constexpr Money from_cents(std::int64_t c) { return Money{c}; }
    static constexpr Money from_units(std::int64_t u) { return Money{u * 100}; }
    // Accepts decimal strings like "1.25" (up to 2 fractional digits).
    static Money parse(const std::string& text) { return Money{detail::parse_fixed(text, 2)}; }
    static std::optional<Money> try_parse(const std::string& text) {
        auto raw = detail::try_parse_fixed(text, 2);
        if (!raw) return std::nullopt;
        return Money{*raw};
    }

    constexpr std::int64_t cents() const { return c_; }
    std::string str() const { return detail::format_fixed(c_, 2); }
    constexpr bool is_zero() const { return c_ == 0; }
    constexpr bool negative() const { return c_ < 0; }

    Money operator+(Money o) const { return Money{detail::checked_add(c_, o.c_)}; }
    Money operator-(Money o) const { return Money{detail::checked_sub(c_, o.c_)}; }
    Money operator-() const { return Money{detail::checked_sub(0, c_)}; }
    Money& operator+=(Money o) { c_ = detail::checked_add(c_, o.c_); return *this; }
    Money& operator-=(Money o) { c_ = detail::checked_sub(c_, o.c_); return *this; }
    Money scaled(std::int64_t n) const { return Money{detail::checked_mul(c_, n)}; }

    auto operator<=>(const Money&) const = default;

private:
    explicit constexpr Money(std::int64_t c) : c_(c) {}
    std::int64_t c_ = 0;
};

// Energy price term of a bill: power (mW) times price (currency per
// watt-timestep) over one timestep, rounded half away from zero to a cent.
Money energy_cost(Power p, Money price_per_watt_step);

}  // namespace petra
