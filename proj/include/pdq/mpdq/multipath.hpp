#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdq/mpdq/interval_set.hpp"
#include "pdq/sim/time.hpp"

namespace pdq::mpdq {

struct SubflowPlan {
    uint16_t subflow_id = 0;
    size_t path_index = 0;
    IntervalSet bytes;
};

struct MultipathFlowState {
    uint32_t parent = 0;
    uint64_t size = 0;
    std::vector<SubflowPlan> subflows;
    IntervalSet delivered;
    sim::SimTime shift_period;
    std::string warning;
};

/// Deterministic path hash for a flow; subflow i uses (hash + i) mod n_paths.
size_t ecmp_index(uint32_t flow_id, uint16_t subflow, size_t n_paths);

/// Splits [0, size) into `n` contiguous, nearly equal pieces. n is clamped to `n_paths`.
MultipathFlowState split_flow(uint32_t flow_id, uint64_t size, size_t n, size_t n_paths);

/// Load view of one subflow for shifting.
struct SubflowLoad {
    bool sending = false;
    bool active = true; // not yet terminated
    IntervalSet* unsent = nullptr;
};

/// Moves unsent bytes of paused subflows onto the sending subflow with the least unsent load.
/// Returns the indices of paused subflows whose unsent set became empty.
std::vector<size_t> shift_load(std::vector<SubflowLoad>& subs);

} // namespace pdq::mpdq
