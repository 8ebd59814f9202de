#include "pdq/oracle/driver.hpp"

#include <algorithm>
#include <numeric>

namespace pdq::oracle {

namespace {
bool competing(const DriverFlow& a, const DriverFlow& b)
{
    for (uint32_t l : a.links)
        if (std::find(b.links.begin(), b.links.end(), l) != b.links.end()) return true;
    return false;
}
} // namespace

DriverAnalysis driver_analysis(const std::vector<DriverFlow>& flows)
{
    const size_t n = flows.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return protocol::more_critical(flows[a].summary, flows[b].summary); });

    DriverAnalysis out;
    out.driver.assign(n, false);
    out.precedential_counts.assign(n, 0);
    for (size_t r = 0; r < n; ++r) {
        const size_t f = order[r];
        bool blocked = false;
        for (size_t q = 0; q < r; ++q) {
            const size_t g = order[q];
            if (!competing(flows[f], flows[g])) continue;
            ++out.precedential_counts[f];
            if (out.driver[g]) blocked = true;
        }
        out.driver[f] = !blocked;
        out.p_max = std::max(out.p_max, out.precedential_counts[f]);
    }
    return out;
}

} // namespace pdq::oracle
