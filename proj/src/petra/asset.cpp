/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/asset.hpp"

#include <algorithm>

namespace petra {

const char* to_string(AssetKind kind) {
    switch (kind) {
        case AssetKind::epa: return "EPA";
        case AssetKind::eca: return "ECA";
        case AssetKind::fa: return "FA";
    }
    return "?";
}

std::string Asset::str() const {
    if (kind_ == AssetKind::fa)
        return std::string("FA{") + amount_.str() + "}";
    return std::string(to_string(kind_)) + "{" + power_.str() + "W,[" + start_.str() + "," +
           end_.str() + "]}";
}

void Asset::encode(Encoder& enc) const {
    enc.u8(static_cast<std::uint8_t>(kind_));
    if (kind_ == AssetKind::fa) {
        enc.money(amount_);
    } else {
        enc.power(power_);
        enc.timestep(start_);
        enc.timestep(end_);
    }
}

Asset Asset::decode(Decoder& dec) {
    auto tag = dec.u8();
    switch (static_cast<AssetKind>(tag)) {
        case AssetKind::fa:
            return Asset::fa(dec.money());
        case AssetKind::epa: {
            Power p = dec.power();
            Timestep s = dec.timestep();
            Timestep e = dec.timestep();
            return Asset::epa(p, s, e);
        }
        case AssetKind::eca: {
            Power p = dec.power();
            Timestep s = dec.timestep();
            Timestep e = dec.timestep();
            return Asset::eca(p, s, e);
        }
    }
    throw codec_error("unknown asset kind tag");
}

Power coverage(const Asset& asset, Timestep t) {
    if (!asset.is_energy())
        return Power{};
    if (asset.start() <= t && t <= asset.end())
        return asset.power();
    return Power{};
}

std::vector<Timestep> coverage_breakpoints(const std::vector<Asset>& assets) {
    std::vector<Timestep> points;
    for (const auto& a : assets) {
        if (!a.is_energy())
            continue;
        points.push_back(a.start());
        if (a.end().index() != UINT64_MAX)
            points.push_back(a.end().next());
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

}  // namespace petra
