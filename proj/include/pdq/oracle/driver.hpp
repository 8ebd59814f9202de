#pragma once

#include <cstdint>
#include <vector>

#include "pdq/protocol/criticality.hpp"

namespace pdq::oracle {

struct DriverFlow {
    protocol::FlowSummary summary;
    std::vector<uint32_t> links;
};

struct DriverAnalysis {
    std::vector<bool> driver;               // per input flow
    std::vector<size_t> precedential_counts; // per input flow
    size_t p_max = 0;
};

/// A flow is a driver iff every more critical flow sharing a link with it is a non-driver.
DriverAnalysis driver_analysis(const std::vector<DriverFlow>& flows);

} // namespace pdq::oracle
