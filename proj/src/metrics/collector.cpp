#include "pdq/metrics/collector.hpp"

#include <algorithm>

namespace pdq::metrics {

namespace {

std::string reason_name(protocol::TerminationReason r)
{
    switch (r) {
    case protocol::TerminationReason::none: return "";
    case protocol::TerminationReason::deadline_passed: return "deadline_passed";
    case protocol::TerminationReason::insufficient_time: return "insufficient_time";
    case protocol::TerminationReason::paused_near_deadline: return "paused_near_deadline";
    }
    return "";
}

} // namespace

FlowRecord to_record(const net::FlowOutcome& o)
{
    FlowRecord f;
    f.id = o.flow_id;
    f.src = o.src;
    f.dst = o.dst;
    f.size = o.size;
    f.subflows = o.subflows;
    f.start = o.start;
    f.deadline = o.deadline;
    f.completion = o.completion;
    f.terminated = o.terminated;
    f.reason = reason_name(o.reason);
    f.payload_acked = o.payload_acked;
    f.probes = o.probes;
    f.retransmits = o.retransmits;
    return f;
}

Collector::Collector(const net::Network& net, SimTime bin_width, bool sample_queues)
    : net_(net), bin_(bin_width), sample_queues_(sample_queues), samples_(net.link_count())
{
}

void Collector::sample(const sim::Link& l, SimTime t)
{
    if (!sample_queues_) return;
    auto& v = samples_[l.id()];
    QueueSample q{t, l.id(), l.queue_bytes(), l.queue_packets(), l.queue_data_packets()};
    if (!v.empty() && v.back().t == t)
        v.back() = q;
    else
        v.push_back(q);
}

void Collector::on_enqueue(const sim::Link& l, const sim::Packet&, SimTime t) { sample(l, t); }

void Collector::on_tx_start(const sim::Link& l, const sim::Packet& p, SimTime s, SimTime e)
{
    sample(l, s);
    const double total = p.size * 8.0;
    const int64_t w = bin_.ns();
    const int64_t span = (e - s).ns();
    if (span <= 0) {
        bits_[{l.id(), static_cast<uint64_t>(s.ns() / w)}] += total;
        return;
    }
    for (int64_t a = s.ns(); a < e.ns();) {
        const int64_t bin = a / w;
        const int64_t z = std::min(e.ns(), (bin + 1) * w);
        bits_[{l.id(), static_cast<uint64_t>(bin)}] += total * static_cast<double>(z - a) / static_cast<double>(span);
        a = z;
    }
}

MetricsReport Collector::finalize(SimTime end, uint64_t events, std::vector<FlowRecord> flows) const
{
    MetricsReport r;
    r.bin_width = bin_;
    r.end_time = end;
    r.events = events;
    r.flows = std::move(flows);
    std::sort(r.flows.begin(), r.flows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (size_t i = 0; i < net_.link_count(); ++i) {
        const auto& l = net_.link(static_cast<uint32_t>(i));
        r.links.push_back({l.id(), l.src(), l.dst(), l.rate(), l.bytes_delivered(), l.drop_count(), l.random_drop_count()});
    }
    for (const auto& [key, bits] : bits_)
        if (bits > 0) r.bins.push_back({key.first, key.second, bits});

    // Tick samples carry the last observed value forward every bin width.
    for (const auto& v : samples_) {
        if (v.empty()) continue;
        size_t k = 0;
        QueueSample cur = v.front();
        for (SimTime t = bin_ * (v.front().t.ns() / bin_.ns() + 1); t <= v.back().t; t += bin_) {
            while (k < v.size() && v[k].t <= t) {
                r.queues.push_back(v[k]);
                cur = v[k++];
            }
            if (r.queues.back().t != t) {
                QueueSample q = cur;
                q.t = t;
                r.queues.push_back(q);
            }
        }
        while (k < v.size()) r.queues.push_back(v[k++]);
    }
    std::stable_sort(r.queues.begin(), r.queues.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return r;
}

} // namespace pdq::metrics
