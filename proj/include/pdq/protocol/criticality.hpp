#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "pdq/sim/time.hpp"

namespace pdq::protocol {

using sim::SimTime;

struct FlowSummary {
    std::optional<SimTime> deadline;
    SimTime expected_tx_time;
    uint64_t flow_id = 0;
};

/// `less` means a is more critical: earlier deadline, then any deadline over none,
/// then smaller expected transmission time, then smaller id.
std::strong_ordering compare_criticality(const FlowSummary& a, const FlowSummary& b);

inline bool more_critical(const FlowSummary& a, const FlowSummary& b)
{
    return compare_criticality(a, b) < 0;
}

} // namespace pdq::protocol
