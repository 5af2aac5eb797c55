/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/verdict.hpp"

namespace petra {

const char* to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::double_spend: return "DOUBLE_SPEND";
        case ViolationCode::bad_signature: return "BAD_SIGNATURE";
        case ViolationCode::balance_mismatch: return "BALANCE_MISMATCH";
        case ViolationCode::unknown_meter: return "UNKNOWN_METER";
        case ViolationCode::banned_meter: return "BANNED_METER";
        case ViolationCode::stale_timestep: return "STALE_TIMESTEP";
        case ViolationCode::unknown_input: return "UNKNOWN_INPUT";
        case ViolationCode::duplicate: return "DUPLICATE";
        case ViolationCode::malformed: return "MALFORMED";
        case ViolationCode::replay_invalid: return "REPLAY_INVALID";
    }
    return "?";
}

std::string Violation::str() const {
    std::string out = to_string(code);
    if (kind || at) {
        out += "{";
        if (kind)
            out += to_string(*kind);
        if (at) {
            if (kind)
                out += ",";
            out += "t=" + at->str();
        }
        out += "}";
    }
    if (!detail.empty())
        out += " (" + detail + ")";
    return out;
}

bool Verdict::has(ViolationCode code) const {
    for (const auto& v : violations)
        if (v.code == code)
            return true;
    return false;
}

void Verdict::add(ViolationCode code, std::string detail) {
    violations.push_back(Violation{code, std::nullopt, std::nullopt, std::move(detail)});
}

void Verdict::add(ViolationCode code, AssetKind kind, std::string detail) {
    violations.push_back(Violation{code, kind, std::nullopt, std::move(detail)});
}

void Verdict::add(ViolationCode code, AssetKind kind, Timestep at, std::string detail) {
    violations.push_back(Violation{code, kind, at, std::move(detail)});
}

std::string Verdict::str() const {
    if (ok())
        return "valid";
    std::string out = "invalid:";
    for (const auto& v : violations)
        out += " " + v.str();
    return out;
}

Bytes Verdict::encode() const {
    Encoder enc;
    enc.list(violations, [](Encoder& e, const Violation& v) {
        e.u8(static_cast<std::uint8_t>(v.code));
        e.u8(v.kind ? static_cast<std::uint8_t>(*v.kind) + 1 : 0);
        e.u8(v.at ? 1 : 0);
        e.u64(v.at ? v.at->index() : 0);
        e.str(v.detail);
    });
    return enc.take();
}

}  // namespace petra
