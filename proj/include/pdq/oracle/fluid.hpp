#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace pdq::oracle {

constexpr double unlimited = std::numeric_limits<double>::infinity();

/// Flow in a fluid model. Units are arbitrary but consistent (bits and seconds, or the unit example).
struct FluidFlow {
    uint64_t id = 0;
    double size = 0;
    std::optional<double> deadline; // absolute
    double arrival = 0;
    std::vector<uint32_t> links;
    double max_rate = unlimited;
};

struct FluidSegment {
    double start = 0;
    double end = 0;
    std::vector<double> rates; // indexed like the input flows
};

struct FluidSchedule {
    std::vector<std::optional<double>> completion;
    std::vector<bool> discarded;
    std::vector<FluidSegment> segments;

    bool deadline_met(size_t i, const std::vector<FluidFlow>& flows) const;
    double mean_completion() const;
    size_t deadlines_missed(const std::vector<FluidFlow>& flows) const;
};

struct ActiveFlow {
    size_t index = 0;
    double remaining = 0;
};

/// Rates for the currently active flows (same order as `active`).
using RatePolicy =
    std::function<std::vector<double>(double now, const std::vector<ActiveFlow>& active, const std::vector<FluidFlow>& flows,
                                      const std::vector<double>& capacity)>;

/// Event-driven fluid run. Rates are recomputed at arrivals, completions, and every `max_step`.
FluidSchedule simulate_fluid(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity,
                             const RatePolicy& policy, double max_step = unlimited);

/// Max-min fair rates (progressive filling) with per-flow rate caps.
std::vector<double> max_min_rates(const std::vector<ActiveFlow>& active, const std::vector<FluidFlow>& flows,
                                  const std::vector<double>& capacity);

/// Greedy allocation in the given order: each flow gets min(max_rate, residual along its path).
std::vector<double> greedy_rates(const std::vector<size_t>& order, const std::vector<ActiveFlow>& active,
                                 const std::vector<FluidFlow>& flows, const std::vector<double>& capacity);

FluidSchedule fluid_fair_sharing(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity);
/// Shortest remaining size first, one at a time per bottleneck.
FluidSchedule fluid_sjf(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity);
/// Earliest deadline first; deadline-free flows after, by size.
FluidSchedule fluid_edf(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity);
/// Centralized PDQ: by criticality (deadline, then remaining / max_rate, then id), grant min(R_max, residual).
FluidSchedule centralized_pdq_schedule(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity);

/// D3 allocation for one instant: requests in `order`, each r = remaining / (deadline - now),
/// granted in full plus a non-negative fair share when capacity is left, otherwise the remainder.
std::vector<double> d3_rates(double now, const std::vector<size_t>& order, const std::vector<ActiveFlow>& active,
                             const std::vector<FluidFlow>& flows, const std::vector<double>& capacity);

/// D3 with re-requests every `epoch`; `order` ranks flows by arrival.
FluidSchedule fluid_d3(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity,
                       const std::vector<size_t>& order, double epoch);

} // namespace pdq::oracle
