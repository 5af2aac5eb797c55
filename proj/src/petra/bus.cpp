/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#include "petra/bus.hpp"

namespace petra {

void Bus::send(Timestep tick, const ChannelId& to, std::string kind, Bytes body,
               const std::string& actor) {
    TraceRecord rec;
    rec.tick = tick;
    rec.kind = "msg";
    rec.channel = to_hex(to);
    rec.size = body.size();
    rec.actor = actor;
    rec.note = kind;
    trace_.push_back(std::move(rec));
    mailboxes_[to].push_back(BusMessage{tick, to, std::move(kind), std::move(body)});
}

std::vector<BusMessage> Bus::drain(const ChannelId& channel) {
    auto it = mailboxes_.find(channel);
    if (it == mailboxes_.end())
        return {};
    std::vector<BusMessage> out(it->second.begin(), it->second.end());
    mailboxes_.erase(it);
    return out;
}

}  // namespace petra
