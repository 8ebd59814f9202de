#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace pdq::oracle {

enum class FlowLevelProtocol { pdq, rcp, d3 };

struct FlowLevelFlow {
    uint64_t id = 0;
    uint64_t size = 0;              // payload bytes
    std::optional<double> deadline; // absolute seconds
    double start = 0;               // seconds
    std::vector<uint32_t> links;
    double max_rate = 1e9;
    double init_latency = 0; // handshake before the first byte leaves
    double tail_latency = 0; // last byte sent to last byte acknowledged
};

struct FlowLevelConfig {
    FlowLevelProtocol protocol = FlowLevelProtocol::pdq;
    double max_step = 1e-3;
    uint32_t payload_per_packet = 1444;
    uint32_t overhead_per_packet = 56;
    bool early_termination = true; // PDQ Early Termination, D3 quenching
};

struct FlowLevelResult {
    std::vector<std::optional<double>> completion; // absolute
    std::vector<bool> terminated;
    std::vector<bool> deadline_met;

    double mean_fct(const std::vector<FlowLevelFlow>& flows) const;
    double application_throughput(const std::vector<FlowLevelFlow>& flows) const;
};

/// Bytes on the wire for a payload, header included.
double wire_bytes(uint64_t payload, uint32_t payload_per_packet, uint32_t overhead_per_packet);

FlowLevelResult flow_level_simulate(const std::vector<FlowLevelFlow>& flows, const std::vector<double>& capacity,
                                    const FlowLevelConfig& cfg);

} // namespace pdq::oracle
