#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "pdq/protocol/header.hpp"
#include "pdq/sim/time.hpp"

namespace pdq::sim {

enum class PacketKind : uint8_t { syn, syn_ack, data, ack, probe, term };

std::string_view to_string(PacketKind k);

using Route = std::vector<uint32_t>;

/// Flow key used by switches: parent flow id in the high bits, subflow in the low 8.
using FlowKey = uint64_t;
constexpr FlowKey make_flow_key(uint32_t flow_id, uint16_t subflow) { return (uint64_t{flow_id} << 8) | subflow; }
constexpr uint32_t flow_of(FlowKey k) { return static_cast<uint32_t>(k >> 8); }
constexpr uint16_t subflow_of(FlowKey k) { return static_cast<uint16_t>(k & 0xFF); }

struct Packet {
    PacketKind kind = PacketKind::data;
    uint32_t flow_id = 0;
    uint16_t subflow_id = 0;
    uint32_t size = 0;    // bytes on the wire
    uint32_t payload = 0; // application bytes
    uint64_t seq = 0;
    uint64_t byte_offset = 0;
    SimTime send_time;

    bool has_header = false;
    protocol::SchedulingHeader header;

    // Baseline (D3) request fields.
    bool rate_request = false;
    double demand = 0.0;

    // ACK echo.
    PacketKind echo_kind = PacketKind::data;
    SimTime echo_send_time;
    uint32_t echo_len = 0;

    // Source route: forward link ids. Reverse packets walk it backwards.
    std::shared_ptr<const Route> route;
    int32_t hop = 0;
    bool reverse = false;

    uint64_t uid = 0;

    FlowKey flow_key() const { return make_flow_key(flow_id, subflow_id); }
};

} // namespace pdq::sim
