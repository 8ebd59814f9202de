#include "pdq/oracle/flow_level.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "pdq/oracle/fluid.hpp"

namespace pdq::oracle {

double wire_bytes(uint64_t payload, uint32_t payload_per_packet, uint32_t overhead_per_packet)
{
    const uint64_t packets = (payload + payload_per_packet - 1) / payload_per_packet;
    return static_cast<double>(payload + packets * overhead_per_packet);
}

double FlowLevelResult::mean_fct(const std::vector<FlowLevelFlow>& flows) const
{
    double sum = 0;
    size_t n = 0;
    for (size_t i = 0; i < flows.size(); ++i)
        if (completion[i]) {
            sum += *completion[i] - flows[i].start;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double FlowLevelResult::application_throughput(const std::vector<FlowLevelFlow>& flows) const
{
    size_t total = 0, met = 0;
    for (size_t i = 0; i < flows.size(); ++i) {
        if (!flows[i].deadline) continue;
        ++total;
        if (deadline_met[i]) ++met;
    }
    return total ? static_cast<double>(met) / static_cast<double>(total) : 1.0;
}

FlowLevelResult flow_level_simulate(const std::vector<FlowLevelFlow>& flows, const std::vector<double>& capacity,
                                    const FlowLevelConfig& cfg)
{
    const size_t n = flows.size();
    FlowLevelResult out;
    out.completion.assign(n, std::nullopt);
    out.terminated.assign(n, false);
    out.deadline_met.assign(n, false);

    // Fluid view in bits; a flow is eligible once its handshake completes.
    std::vector<FluidFlow> fluid(n);
    std::vector<double> remaining(n), eligible(n);
    for (size_t i = 0; i < n; ++i) {
        fluid[i].id = flows[i].id;
        fluid[i].size = wire_bytes(flows[i].size, cfg.payload_per_packet, cfg.overhead_per_packet) * 8.0;
        fluid[i].links = flows[i].links;
        fluid[i].max_rate = flows[i].max_rate;
        fluid[i].deadline = flows[i].deadline;
        remaining[i] = fluid[i].size;
        eligible[i] = flows[i].start + flows[i].init_latency;
    }
    std::vector<size_t> fcfs(n);
    std::iota(fcfs.begin(), fcfs.end(), size_t{0});
    std::stable_sort(fcfs.begin(), fcfs.end(), [&](size_t a, size_t b) {
        return std::tie(flows[a].start, flows[a].id) < std::tie(flows[b].start, flows[b].id);
    });

    std::vector<bool> done(n, false);
    size_t left = n;
    double now = 0;
    if (n) now = eligible[*std::min_element(fcfs.begin(), fcfs.end(), [&](size_t a, size_t b) { return eligible[a] < eligible[b]; })];

    auto finish = [&](size_t i, double t_sent) {
        done[i] = true;
        --left;
        const double c = t_sent + flows[i].tail_latency;
        out.completion[i] = c;
        out.deadline_met[i] = !flows[i].deadline || c <= *flows[i].deadline + 1e-12;
    };
    auto terminate = [&](size_t i) {
        done[i] = true;
        --left;
        out.terminated[i] = true;
    };

    while (left > 0) {
        std::vector<ActiveFlow> active;
        double next_eligible = unlimited;
        for (size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            if (eligible[i] <= now + 1e-15)
                active.push_back({i, remaining[i]});
            else
                next_eligible = std::min(next_eligible, eligible[i]);
        }
        if (active.empty()) {
            now = next_eligible;
            continue;
        }

        std::vector<double> rate;
        switch (cfg.protocol) {
        case FlowLevelProtocol::rcp: rate = max_min_rates(active, fluid, capacity); break;
        case FlowLevelProtocol::pdq: {
            std::vector<size_t> order(active.size());
            std::iota(order.begin(), order.end(), size_t{0});
            auto key = [&](size_t k) {
                const size_t i = active[k].index;
                const double d = flows[i].deadline ? *flows[i].deadline : unlimited;
                const double t = static_cast<double>(flows[i].size) * (active[k].remaining / fluid[i].size) * 8.0 / flows[i].max_rate;
                return std::make_tuple(d, t, flows[i].id);
            };
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return key(a) < key(b); });
            rate = greedy_rates(order, active, fluid, capacity);
            break;
        }
        case FlowLevelProtocol::d3: {
            std::vector<size_t> order;
            for (size_t i : fcfs)
                for (size_t k = 0; k < active.size(); ++k)
                    if (active[k].index == i) order.push_back(k);
            rate = d3_rates(now, order, active, fluid, capacity);
            break;
        }
        }

        if (cfg.early_termination) {
            bool any = false;
            for (size_t k = 0; k < active.size(); ++k) {
                const size_t i = active[k].index;
                if (!flows[i].deadline) continue;
                const double d = *flows[i].deadline;
                const double t_rem = active[k].remaining / flows[i].max_rate;
                bool kill = now > d || now + t_rem > d;
                if (cfg.protocol == FlowLevelProtocol::pdq && rate[k] <= 0 && now + flows[i].tail_latency > d) kill = true;
                if (kill) {
                    terminate(i);
                    any = true;
                }
            }
            if (any) continue; // reallocate without the terminated flows
        }

        double dt = std::min(cfg.max_step, next_eligible - now);
        for (size_t k = 0; k < active.size(); ++k)
            if (rate[k] > 0) dt = std::min(dt, active[k].remaining / rate[k]);
        if (cfg.early_termination)
            for (const auto& a : active)
                if (flows[a.index].deadline && *flows[a.index].deadline > now)
                    dt = std::min(dt, *flows[a.index].deadline - now + 1e-9);
        if (!std::isfinite(dt) || dt <= 0) dt = cfg.max_step;
        const double t_next = now + dt;
        for (size_t k = 0; k < active.size(); ++k) {
            const size_t i = active[k].index;
            remaining[i] -= rate[k] * dt;
            if (remaining[i] <= 1e-6) finish(i, t_next);
        }
        now = t_next;
    }
    return out;
}

} // namespace pdq::oracle
