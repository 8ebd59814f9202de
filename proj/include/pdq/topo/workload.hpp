#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pdq/protocol/sender.hpp"
#include "pdq/sim/rng.hpp"
#include "pdq/topo/topology.hpp"

namespace pdq::topo {

using sim::SimTime;

struct FlowSpec {
    uint32_t id = 0;
    uint32_t src = 0;
    uint32_t dst = 0;
    uint64_t size = 0;
    std::optional<SimTime> deadline; // absolute
    SimTime start;
    protocol::CriticalityMode mode = protocol::CriticalityMode::exact_size;
};

constexpr uint64_t kilobyte = 1000;
constexpr uint64_t megabyte = 1000 * 1000;

struct SizeModel {
    bool deadlines = false;
    uint64_t deadline_size_lo = 2 * kilobyte;
    uint64_t deadline_size_hi = 198 * kilobyte;
    SimTime deadline_mean = sim::milliseconds(20);
    SimTime deadline_floor = sim::milliseconds(3);
    uint64_t mean_size = 100 * kilobyte; // deadline-free flows
    uint64_t min_size = 2 * kilobyte;
};

/// Uniform size; deadline-free flows draw from [min, 2 mean - min].
uint64_t draw_size(const SizeModel& m, sim::Rng& rng);
/// Relative deadline: max(floor, Exp(mean)).
SimTime draw_deadline(const SizeModel& m, sim::Rng& rng);

enum class Pattern { aggregation, stride, staggered, permutation };

struct WorkloadParams {
    Pattern pattern = Pattern::aggregation;
    uint32_t n_flows = 10;
    uint32_t stride = 1;         // stride(i)
    double staggered_p = 0.5;    // staggered prob(p)
    uint32_t flows_per_host = 1; // stride/staggered/permutation
    std::optional<uint32_t> aggregator;
    SizeModel sizes;
    SimTime start;
    protocol::CriticalityMode mode = protocol::CriticalityMode::exact_size;
};

std::vector<FlowSpec> gen_workload(const Topology& t, const WorkloadParams& p, sim::Rng& rng);

/// Five flows of about 1 MB; a smaller index is more critical.
std::vector<FlowSpec> scenario1_workload(uint32_t n_flows = 5);

/// One long flow at t = 0 plus `n_short` flows of 20 KB +- 1% starting at `burst_at`.
std::vector<FlowSpec> scenario2_workload(sim::Rng& rng, uint32_t n_short = 50, uint64_t long_size = 5 * megabyte,
                                         SimTime burst_at = sim::milliseconds(10));

} // namespace pdq::topo
