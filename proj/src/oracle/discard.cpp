#include "pdq/oracle/discard.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pdq::oracle {

namespace {
constexpr double slack = 1e-12;

std::vector<size_t> edf_order(const std::vector<Job>& jobs)
{
    std::vector<size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return jobs[a].deadline < jobs[b].deadline; });
    return order;
}
} // namespace

DiscardResult optimal_deadline_discard(const std::vector<Job>& jobs)
{
    std::vector<size_t> kept;
    double t = 0;
    DiscardResult out;
    for (size_t j : edf_order(jobs)) {
        kept.push_back(j);
        t += jobs[j].processing;
        if (t > jobs[j].deadline + slack) {
            auto longest = std::max_element(kept.begin(), kept.end(), [&](size_t a, size_t b) {
                if (jobs[a].processing != jobs[b].processing) return jobs[a].processing < jobs[b].processing;
                return a < b;
            });
            t -= jobs[*longest].processing;
            out.discarded.push_back(*longest);
            kept.erase(longest);
        }
    }
    std::sort(out.discarded.begin(), out.discarded.end());
    t = 0;
    for (size_t j : kept) {
        t += jobs[j].processing;
        out.completion.push_back(t);
    }
    out.kept = std::move(kept);
    return out;
}

size_t brute_force_max_on_time(const std::vector<Job>& jobs)
{
    if (jobs.size() > 20) throw std::invalid_argument("brute force limited to 20 jobs");
    const auto order = edf_order(jobs);
    size_t best = 0;
    const uint32_t n = static_cast<uint32_t>(jobs.size());
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto count = static_cast<size_t>(__builtin_popcount(mask));
        if (count <= best) continue;
        double t = 0;
        bool ok = true;
        for (size_t j : order) {
            if (!(mask >> j & 1u)) continue;
            t += jobs[j].processing;
            if (t > jobs[j].deadline + slack) {
                ok = false;
                break;
            }
        }
        if (ok) best = count;
    }
    return best;
}

} // namespace pdq::oracle
