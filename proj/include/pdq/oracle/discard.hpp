#pragma once

#include <cstddef>
#include <vector>

namespace pdq::oracle {

/// A job on one shared resource, all released at time 0.
struct Job {
    double processing = 0;
    double deadline = 0;
};

struct DiscardResult {
    std::vector<size_t> kept;      // EDF order
    std::vector<size_t> discarded; // ascending index
    std::vector<double> completion; // per kept job, same order as `kept`
};

/// Moore-Hodgson: maximum number of on-time jobs on a single machine.
DiscardResult optimal_deadline_discard(const std::vector<Job>& jobs);

/// Exhaustive search for the maximum on-time subset size (n <= 20).
size_t brute_force_max_on_time(const std::vector<Job>& jobs);

} // namespace pdq::oracle
