#include "pdq/topo/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdq::topo {

uint64_t draw_size(const SizeModel& m, sim::Rng& rng)
{
    if (m.deadlines) return rng.uniform_int(m.deadline_size_lo, m.deadline_size_hi);
    const uint64_t hi = 2 * m.mean_size > m.min_size ? 2 * m.mean_size - m.min_size : m.min_size;
    return rng.uniform_int(std::min(m.min_size, hi), hi);
}

SimTime draw_deadline(const SizeModel& m, sim::Rng& rng)
{
    const double ns = rng.exponential(static_cast<double>(m.deadline_mean.ns()));
    return std::max(m.deadline_floor, sim::nanoseconds(std::llround(ns)));
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, sim::Rng& rng)
{
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = rng.uniform_int(0, i - 1);
        std::swap(v[i - 1], v[j]);
    }
}

FlowSpec make_flow(uint32_t id, uint32_t src, uint32_t dst, const WorkloadParams& p, sim::Rng& rng)
{
    FlowSpec f;
    f.id = id;
    f.src = src;
    f.dst = dst;
    f.size = draw_size(p.sizes, rng);
    f.start = p.start;
    f.mode = p.mode;
    if (p.sizes.deadlines) f.deadline = p.start + draw_deadline(p.sizes, rng);
    return f;
}

} // namespace

std::vector<FlowSpec> gen_workload(const Topology& t, const WorkloadParams& p, sim::Rng& rng)
{
    const auto hosts = t.hosts();
    if (hosts.size() < 2) throw TopologyError("workload needs at least two hosts");
    std::vector<FlowSpec> flows;
    const auto n = static_cast<uint32_t>(hosts.size());

    switch (p.pattern) {
    case Pattern::aggregation: {
        const uint32_t agg = p.aggregator.value_or(hosts.back());
        std::vector<uint32_t> senders;
        for (uint32_t h : hosts)
            if (h != agg) senders.push_back(h);
        shuffle(senders, rng);
        // Round-robin over a shuffled sender order gives each floor(f/n) or ceil(f/n) flows.
        for (uint32_t i = 0; i < p.n_flows; ++i)
            flows.push_back(make_flow(i, senders[i % senders.size()], agg, p, rng));
        break;
    }
    case Pattern::stride: {
        uint32_t id = 0;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t k = 0; k < p.flows_per_host; ++k)
                flows.push_back(make_flow(id++, hosts[i], hosts[(i + p.stride) % n], p, rng));
        break;
    }
    case Pattern::staggered: {
        uint32_t id = 0;
        for (uint32_t i = 0; i < n; ++i) {
            for (uint32_t k = 0; k < p.flows_per_host; ++k) {
                const uint32_t rack = rack_of(t, hosts[i]);
                std::vector<uint32_t> same, other;
                for (uint32_t h : hosts) {
                    if (h == hosts[i]) continue;
                    (rack_of(t, h) == rack ? same : other).push_back(h);
                }
                const bool pick_same = !same.empty() && (other.empty() || rng.uniform01() < p.staggered_p);
                const auto& pool = pick_same ? same : other;
                const uint32_t dst = pool[rng.uniform_int(0, pool.size() - 1)];
                flows.push_back(make_flow(id++, hosts[i], dst, p, rng));
            }
        }
        break;
    }
    case Pattern::permutation: {
        // Sattolo's algorithm yields a single cycle, so no host maps to itself.
        std::vector<uint32_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0u);
        for (uint32_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<uint32_t>(rng.uniform_int(0, i - 1));
            std::swap(perm[i], perm[j]);
        }
        uint32_t id = 0;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t k = 0; k < p.flows_per_host; ++k)
                flows.push_back(make_flow(id++, hosts[i], hosts[perm[i]], p, rng));
        break;
    }
    }
    return flows;
}

std::vector<FlowSpec> scenario1_workload(uint32_t n_flows)
{
    std::vector<FlowSpec> flows;
    for (uint32_t i = 0; i < n_flows; ++i) {
        FlowSpec f;
        f.id = i;
        f.src = i;
        f.dst = n_flows;
        f.size = megabyte + i * kilobyte;
        flows.push_back(f);
    }
    return flows;
}

std::vector<FlowSpec> scenario2_workload(sim::Rng& rng, uint32_t n_short, uint64_t long_size, SimTime burst_at)
{
    std::vector<FlowSpec> flows;
    const uint32_t rx = n_short + 1;
    FlowSpec lf;
    lf.id = 0;
    lf.src = 0;
    lf.dst = rx;
    lf.size = long_size;
    flows.push_back(lf);
    for (uint32_t i = 1; i <= n_short; ++i) {
        FlowSpec f;
        f.id = i;
        f.src = i;
        f.dst = rx;
        f.size = static_cast<uint64_t>(std::llround(20.0 * kilobyte * rng.uniform(0.99, 1.01)));
        f.start = burst_at;
        flows.push_back(f);
    }
    return flows;
}

} // namespace pdq::topo
