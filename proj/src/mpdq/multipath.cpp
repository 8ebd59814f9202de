#include "pdq/mpdq/multipath.hpp"

#include <algorithm>

namespace pdq::mpdq {

size_t ecmp_index(uint32_t flow_id, uint16_t subflow, size_t n_paths)
{
    if (n_paths == 0) return 0;
    uint64_t h = flow_id;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ULL;
    h ^= h >> 33;
    return static_cast<size_t>((h + subflow) % n_paths);
}

MultipathFlowState split_flow(uint32_t flow_id, uint64_t size, size_t n, size_t n_paths)
{
    MultipathFlowState st;
    st.parent = flow_id;
    st.size = size;
    if (n == 0) n = 1;
    if (n_paths > 0 && n > n_paths) {
        st.warning = "subflows clamped from " + std::to_string(n) + " to " + std::to_string(n_paths);
        n = n_paths;
    }
    if (n > 255) n = 255;
    for (size_t i = 0; i < n; ++i) {
        SubflowPlan p;
        p.subflow_id = static_cast<uint16_t>(i);
        p.path_index = ecmp_index(flow_id, p.subflow_id, n_paths);
        const uint64_t lo = size * i / n;
        const uint64_t hi = size * (i + 1) / n;
        p.bytes.add(lo, hi);
        st.subflows.push_back(std::move(p));
    }
    return st;
}

std::vector<size_t> shift_load(std::vector<SubflowLoad>& subs)
{
    std::vector<size_t> emptied;
    size_t target = subs.size();
    for (size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i].active || !subs[i].sending || !subs[i].unsent) continue;
        if (target == subs.size() || subs[i].unsent->total() < subs[target].unsent->total()) target = i;
    }
    if (target == subs.size()) return emptied;
    for (size_t i = 0; i < subs.size(); ++i) {
        if (i == target || !subs[i].active || subs[i].sending || !subs[i].unsent) continue;
        if (subs[i].unsent->empty()) continue;
        subs[target].unsent->merge(*subs[i].unsent);
        subs[i].unsent->clear();
        emptied.push_back(i);
    }
    return emptied;
}

} // namespace pdq::mpdq
