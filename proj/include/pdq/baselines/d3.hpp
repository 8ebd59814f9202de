#pragma once

#include <cstdint>
#include <map>

#include "pdq/baselines/rcp.hpp"

namespace pdq::baselines {

/// Simplified D3: first-come first-served rate reservations with a non-negative fair share.
class D3LinkState {
public:
    explicit D3LinkState(double capacity) : adapter_{capacity, capacity} {}

    /// Re-request from `flow` with demand `request` (0 for deadline-free flows).
    /// The flow's previous grant is returned to the pool before the new grant is computed.
    double request(uint64_t flow, double request);
    void release(uint64_t flow);

    double reserved() const { return reserved_; }
    double demand_total() const { return demand_; }
    double fair_share() const;
    size_t flow_count() const { return table_.size(); }
    double grant_of(uint64_t flow) const;

    CapacityAdapter& adapter() { return adapter_; }
    double effective_capacity() const { return adapter_.effective; }

private:
    struct Entry {
        double demand = 0;
        double grant = 0;
    };
    CapacityAdapter adapter_;
    std::map<uint64_t, Entry> table_;
    double reserved_ = 0;
    double demand_ = 0;
};

} // namespace pdq::baselines
