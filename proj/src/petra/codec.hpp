/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "petra/bytes.hpp"
#include "petra/fixed.hpp"
#include "petra/timestep.hpp"

namespace petra {

// Canonical wire form: little-endian fixed-width integers, u32
// length-prefixed byte strings and lists, fields in declaration order.

struct codec_error : std::runtime_error {
    explicit codec_error(const std::string& what) : std::runtime_error(what) {}
};

class Encoder {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void bytes(const std::uint8_t* data, std::size_t len) {
        if (len > UINT32_MAX)
            throw codec_error("byte string too long");
        u32(static_cast<std::uint32_t>(len));
        buf_.insert(buf_.end(), data, data + len);
    }
    void bytes(const Bytes& b) { bytes(b.data(), b.size()); }
    template <std::size_t N>
    void fixed_bytes(const ByteArray<N>& a) {
        buf_.insert(buf_.end(), a.begin(), a.end());
    }
    void str(const std::string& s) {
        bytes(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
    }
    void power(Power p) { i64(p.milliwatts()); }
    void money(Money m) { i64(m.cents()); }
    void timestep(Timestep t) { u64(t.index()); }
    template <typename T, typename F>
    void list(const std::vector<T>& v, F&& each) {
        if (v.size() > UINT32_MAX)
            throw codec_error("list too long");
        u32(static_cast<std::uint32_t>(v.size()));
        for (const auto& item : v)
            each(*this, item);
    }

    const Bytes& data() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class Decoder {
public:
    explicit Decoder(const Bytes& data) : data_(data.data()), size_(data.size()) {}
    Decoder(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        const std::uint8_t* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const std::uint8_t* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    Bytes bytes() {
        std::uint32_t len = u32();
        const std::uint8_t* p = take(len);
        return Bytes(p, p + len);
    }
    template <std::size_t N>
    ByteArray<N> fixed_bytes() {
        const std::uint8_t* p = take(N);
        ByteArray<N> out;
        std::copy(p, p + N, out.begin());
        return out;
    }
    std::string str() {
        Bytes b = bytes();
        return std::string(b.begin(), b.end());
    }
    Power power() { return Power::from_milliwatts(i64()); }
    Money money() { return Money::from_cents(i64()); }
    Timestep timestep() { return Timestep{u64()}; }
    template <typename T, typename F>
    std::vector<T> list(F&& each) {
        std::uint32_t n = u32();
        if (static_cast<std::size_t>(n) > remaining())
            throw codec_error("list length exceeds input");
        std::vector<T> out;
        out.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i)
            out.push_back(each(*this));
        return out;
    }

    std::size_t remaining() const { return size_ - pos_; }
    bool done() const { return pos_ == size_; }
    void expect_done() const {
        if (!done())
            throw codec_error("trailing bytes after value");
    }

private:
    const std::uint8_t* take(std::size_t n) {
        if (n > size_ - pos_)
            throw codec_error("input truncated");
        const std::uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace petra
