#include "pdq/oracle/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace pdq::oracle {

namespace {
constexpr double eps = 1e-12;
}

bool FluidSchedule::deadline_met(size_t i, const std::vector<FluidFlow>& flows) const
{
    if (!flows[i].deadline) return completion[i].has_value();
    return completion[i] && *completion[i] <= *flows[i].deadline + 1e-9;
}

double FluidSchedule::mean_completion() const
{
    double sum = 0;
    size_t n = 0;
    for (const auto& c : completion)
        if (c) {
            sum += *c;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

size_t FluidSchedule::deadlines_missed(const std::vector<FluidFlow>& flows) const
{
    size_t missed = 0;
    for (size_t i = 0; i < flows.size(); ++i)
        if (flows[i].deadline && !deadline_met(i, flows)) ++missed;
    return missed;
}

FluidSchedule simulate_fluid(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity,
                             const RatePolicy& policy, double max_step)
{
    FluidSchedule out;
    out.completion.assign(flows.size(), std::nullopt);
    out.discarded.assign(flows.size(), false);

    std::vector<size_t> pending(flows.size());
    std::iota(pending.begin(), pending.end(), size_t{0});
    std::stable_sort(pending.begin(), pending.end(), [&](size_t a, size_t b) { return flows[a].arrival < flows[b].arrival; });
    size_t next_arrival = 0;

    std::vector<ActiveFlow> active;
    double now = pending.empty() ? 0.0 : flows[pending[0]].arrival;

    while (next_arrival < pending.size() || !active.empty()) {
        while (next_arrival < pending.size() && flows[pending[next_arrival]].arrival <= now + eps) {
            const size_t i = pending[next_arrival++];
            if (flows[i].size <= 0)
                out.completion[i] = now;
            else
                active.push_back({i, flows[i].size});
        }
        if (active.empty()) {
            now = flows[pending[next_arrival]].arrival;
            continue;
        }
        const auto rates = policy(now, active, flows, capacity);
        double dt = max_step;
        if (next_arrival < pending.size()) dt = std::min(dt, flows[pending[next_arrival]].arrival - now);
        for (size_t k = 0; k < active.size(); ++k)
            if (rates[k] > eps) dt = std::min(dt, active[k].remaining / rates[k]);
        if (!std::isfinite(dt)) break; // nothing can progress
        FluidSegment seg{now, now + dt, std::vector<double>(flows.size(), 0.0)};
        for (size_t k = 0; k < active.size(); ++k) seg.rates[active[k].index] = rates[k];
        out.segments.push_back(std::move(seg));
        now += dt;
        std::vector<ActiveFlow> still;
        for (size_t k = 0; k < active.size(); ++k) {
            active[k].remaining -= rates[k] * dt;
            if (active[k].remaining <= 1e-9 * std::max(1.0, flows[active[k].index].size))
                out.completion[active[k].index] = now;
            else
                still.push_back(active[k]);
        }
        active = std::move(still);
    }
    return out;
}

std::vector<double> max_min_rates(const std::vector<ActiveFlow>& active, const std::vector<FluidFlow>& flows,
                                  const std::vector<double>& capacity)
{
    std::vector<double> rate(active.size(), 0.0);
    std::vector<bool> frozen(active.size(), false);
    std::vector<double> residual = capacity;
    size_t left = active.size();
    while (left > 0) {
        std::vector<size_t> users(capacity.size(), 0);
        for (size_t k = 0; k < active.size(); ++k)
            if (!frozen[k])
                for (uint32_t l : flows[active[k].index].links) ++users[l];
        double inc = unlimited;
        for (size_t l = 0; l < capacity.size(); ++l)
            if (users[l] > 0) inc = std::min(inc, residual[l] / static_cast<double>(users[l]));
        for (size_t k = 0; k < active.size(); ++k)
            if (!frozen[k]) inc = std::min(inc, flows[active[k].index].max_rate - rate[k]);
        if (!std::isfinite(inc)) inc = 0;
        inc = std::max(0.0, inc);
        for (size_t k = 0; k < active.size(); ++k) {
            if (frozen[k]) continue;
            rate[k] += inc;
            for (uint32_t l : flows[active[k].index].links) residual[l] -= inc;
        }
        size_t newly = 0;
        for (size_t k = 0; k < active.size(); ++k) {
            if (frozen[k]) continue;
            bool stop = rate[k] >= flows[active[k].index].max_rate - eps;
            for (uint32_t l : flows[active[k].index].links)
                if (residual[l] <= eps * std::max(1.0, capacity[l])) stop = true;
            if (stop) {
                frozen[k] = true;
                ++newly;
            }
        }
        left -= newly;
        if (newly == 0) break;
    }
    return rate;
}

std::vector<double> greedy_rates(const std::vector<size_t>& order, const std::vector<ActiveFlow>& active,
                                 const std::vector<FluidFlow>& flows, const std::vector<double>& capacity)
{
    std::vector<double> rate(active.size(), 0.0);
    std::vector<double> residual = capacity;
    for (size_t k : order) {
        const auto& f = flows[active[k].index];
        double r = f.max_rate;
        for (uint32_t l : f.links) r = std::min(r, residual[l]);
        r = std::max(0.0, r);
        rate[k] = r;
        for (uint32_t l : f.links) residual[l] -= r;
    }
    return rate;
}

namespace {

template <typename Key>
RatePolicy priority_policy(Key key)
{
    return [key](double now, const std::vector<ActiveFlow>& active, const std::vector<FluidFlow>& flows,
                 const std::vector<double>& capacity) {
        std::vector<size_t> order(active.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return key(now, active[a], flows[active[a].index]) < key(now, active[b], flows[active[b].index]);
        });
        return greedy_rates(order, active, flows, capacity);
    };
}

double deadline_or_inf(const FluidFlow& f) { return f.deadline ? *f.deadline : unlimited; }

} // namespace

FluidSchedule fluid_fair_sharing(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity)
{
    return simulate_fluid(flows, capacity, [](double, const auto& active, const auto& fl, const auto& cap) {
        return max_min_rates(active, fl, cap);
    });
}

FluidSchedule fluid_sjf(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity)
{
    return simulate_fluid(flows, capacity, priority_policy([](double, const ActiveFlow& a, const FluidFlow& f) {
        return std::make_tuple(a.remaining, f.id);
    }));
}

FluidSchedule fluid_edf(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity)
{
    return simulate_fluid(flows, capacity, priority_policy([](double, const ActiveFlow& a, const FluidFlow& f) {
        return std::make_tuple(deadline_or_inf(f), a.remaining, f.id);
    }));
}

FluidSchedule centralized_pdq_schedule(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity)
{
    return simulate_fluid(flows, capacity, priority_policy([](double, const ActiveFlow& a, const FluidFlow& f) {
        const double t = std::isfinite(f.max_rate) ? a.remaining / f.max_rate : a.remaining;
        return std::make_tuple(deadline_or_inf(f), t, f.id);
    }));
}

std::vector<double> d3_rates(double now, const std::vector<size_t>& order, const std::vector<ActiveFlow>& active,
                             const std::vector<FluidFlow>& flows, const std::vector<double>& capacity)
{
    std::vector<double> request(active.size(), 0.0);
    std::vector<double> demand(capacity.size(), 0.0);
    std::vector<size_t> users(capacity.size(), 0);
    for (size_t k = 0; k < active.size(); ++k) {
        const auto& f = flows[active[k].index];
        if (f.deadline) {
            const double left = *f.deadline - now;
            request[k] = left > eps ? active[k].remaining / left : unlimited;
        }
        for (uint32_t l : f.links) {
            demand[l] += std::min(request[k], capacity[l]);
            ++users[l];
        }
    }
    std::vector<double> reserved(capacity.size(), 0.0);
    std::vector<double> rate(active.size(), 0.0);
    for (size_t k : order) {
        const auto& f = flows[active[k].index];
        double avail = f.max_rate;
        double fs = unlimited;
        for (uint32_t l : f.links) {
            avail = std::min(avail, capacity[l] - reserved[l]);
            fs = std::min(fs, std::max(0.0, (capacity[l] - demand[l]) / static_cast<double>(users[l])));
        }
        avail = std::max(0.0, avail);
        if (f.links.empty()) fs = 0;
        const double g = avail >= request[k] ? std::min(avail, request[k] + fs) : avail;
        rate[k] = g;
        for (uint32_t l : f.links) reserved[l] += g;
    }
    return rate;
}

FluidSchedule fluid_d3(const std::vector<FluidFlow>& flows, const std::vector<double>& capacity,
                       const std::vector<size_t>& order, double epoch)
{
    std::vector<size_t> rank(flows.size(), 0);
    for (size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return simulate_fluid(
        flows, capacity,
        [&rank](double now, const std::vector<ActiveFlow>& active, const std::vector<FluidFlow>& fl,
                const std::vector<double>& cap) {
            std::vector<size_t> by_arrival(active.size());
            std::iota(by_arrival.begin(), by_arrival.end(), size_t{0});
            std::sort(by_arrival.begin(), by_arrival.end(),
                      [&](size_t a, size_t b) { return rank[active[a].index] < rank[active[b].index]; });
            return d3_rates(now, by_arrival, active, fl, cap);
        },
        epoch);
}

} // namespace pdq::oracle
