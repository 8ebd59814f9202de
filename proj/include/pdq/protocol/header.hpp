#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "pdq/sim/time.hpp"

namespace pdq::protocol {

using sim::SimTime;

/// Switch identifier carried in pauseby. Links double as switch ids.
using SwitchId = int32_t;
constexpr SwitchId no_switch = -1;

constexpr uint32_t base_header_bytes = 40;
constexpr uint32_t scheduling_header_bytes = 16;
constexpr uint32_t mss_bytes = 1500;
constexpr uint32_t data_payload_bytes = mss_bytes - base_header_bytes - scheduling_header_bytes;
constexpr uint32_t control_packet_bytes = base_header_bytes + scheduling_header_bytes;

struct SchedulingHeader {
    double rate = 0.0; // bits/s
    SwitchId pauseby = no_switch;
    std::optional<SimTime> deadline;
    SimTime expected_tx_time;
    double inter_probe = 0.0; // multiple of RTT
    SimTime rtt;

    bool paused() const { return pauseby != no_switch; }
    bool operator==(const SchedulingHeader&) const = default;
};

using WireHeader = std::array<uint8_t, scheduling_header_bytes>;

/// Forward layout: rate(kbps) | pauseby+1 | deadline(us, all-ones = none) | T(100 ns units).
WireHeader encode_forward(const SchedulingHeader& h);
SchedulingHeader decode_forward(const WireHeader& w);

/// Reverse layout reuses the last two words: rate | pauseby+1 | inter_probe(float32) | rtt(ns).
WireHeader encode_reverse(const SchedulingHeader& h);
SchedulingHeader decode_reverse(const WireHeader& w);

} // namespace pdq::protocol
