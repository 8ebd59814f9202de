#pragma once

#include <cstdint>
#include <set>

#include "pdq/sim/time.hpp"

namespace pdq::baselines {

using sim::SimTime;

/// Capacity tracking shared by the baselines: C_eff += alpha (C - y) - beta q / rtt, clamped to [0, C].
struct CapacityAdapter {
    double link_capacity = 1e9;
    double effective = 1e9;
    double alpha = 0.1;
    double beta = 1.0;

    /// `input_rate` is the measured arrival rate over the last epoch in bits/s.
    double update(double input_rate, uint64_t queue_bytes, SimTime rtt);
};

class RcpLinkState {
public:
    explicit RcpLinkState(double capacity) : adapter_{capacity, capacity} {}

    void add_flow(uint64_t flow) { flows_.insert(flow); }
    void remove_flow(uint64_t flow) { flows_.erase(flow); }
    bool has_flow(uint64_t flow) const { return flows_.contains(flow); }
    size_t exact_flow_count() const { return flows_.size(); }

    double fair_rate() const;
    /// Applies this link's share to a header rate: min(rate, fair_rate).
    double allocate(uint64_t flow, double header_rate);

    double link_capacity() const { return adapter_.link_capacity; }
    double effective_capacity() const { return adapter_.effective; }
    CapacityAdapter& adapter() { return adapter_; }

private:
    CapacityAdapter adapter_;
    std::set<uint64_t> flows_;
};

} // namespace pdq::baselines
