/* Copyright (c) 2026 The PETra Authors
 * SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "petra/bytes.hpp"
#include "petra/timestep.hpp"

namespace petra {

// Opaque anonymous communication identifier; a mailbox key. Network-level
// anonymity is out of scope, so possession of the identifier is the only
// way to read or target a channel.
using ChannelId = Bytes;

struct BusMessage {
    Timestep tick;
    ChannelId to;
    std::string kind;
    Bytes body;
};

// One trace record per observable event. The fields before `actor` are
// public metadata; `actor`, `adversarial`, `group` and `note` are
// ground-truth annotations for checkers and are withheld from observer
// models.
struct TraceRecord {
    Timestep tick;
    std::string kind;      // "msg", "submit", "round", "order", "denial"
    std::string channel;   // hex, for messages
    std::string txid;      // hex, for submissions
    std::size_t size = 0;
    std::string outcome;   // "accepted" / "rejected:<codes>" / event detail

    std::string actor;
    bool adversarial = false;
    std::string group;     // ties related adversarial submissions together
    std::string note;
};

class Bus {
public:
    void send(Timestep tick, const ChannelId& to, std::string kind, Bytes body,
              const std::string& actor);

    // Removes and returns everything queued for the channel.
    std::vector<BusMessage> drain(const ChannelId& channel);

    std::size_t record(TraceRecord record) {
        trace_.push_back(std::move(record));
        return trace_.size() - 1;
    }
    void set_outcome(std::size_t index, std::string outcome) {
        trace_.at(index).outcome = std::move(outcome);
    }
    const std::vector<TraceRecord>& trace() const { return trace_; }

private:
    std::map<ChannelId, std::deque<BusMessage>> mailboxes_;
    std::vector<TraceRecord> trace_;
};

}  // namespace petra
