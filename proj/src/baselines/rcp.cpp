#include "pdq/baselines/rcp.hpp"

#include <algorithm>

namespace pdq::baselines {

double CapacityAdapter::update(double input_rate, uint64_t queue_bytes, SimTime rtt)
{
    const double drain = rtt.ns() > 0 ? static_cast<double>(queue_bytes) * 8.0 / rtt.seconds() : 0.0;
    effective += alpha * (link_capacity - input_rate) - beta * drain;
    effective = std::clamp(effective, 0.0, link_capacity);
    return effective;
}

double RcpLinkState::fair_rate() const
{
    return adapter_.effective / static_cast<double>(std::max<size_t>(1, flows_.size()));
}

double RcpLinkState::allocate(uint64_t flow, double header_rate)
{
    flows_.insert(flow);
    return std::min(header_rate, fair_rate());
}

} // namespace pdq::baselines
