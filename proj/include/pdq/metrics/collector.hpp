#pragma once

#include <map>
#include <vector>

#include "pdq/metrics/report.hpp"
#include "pdq/net/network.hpp"

namespace pdq::metrics {

/// Records link utilization bins and queue samples while a run is in progress.
class Collector : public net::NetworkObserver {
public:
    explicit Collector(const net::Network& net, SimTime bin_width = sim::microseconds(100), bool sample_queues = true);

    void on_enqueue(const sim::Link& l, const sim::Packet& p, SimTime t) override;
    void on_tx_start(const sim::Link& l, const sim::Packet& p, SimTime s, SimTime e) override;

    /// Adds link totals, tick samples and the given flow records.
    MetricsReport finalize(SimTime end, uint64_t events, std::vector<FlowRecord> flows) const;

private:
    void sample(const sim::Link& l, SimTime t);

    const net::Network& net_;
    SimTime bin_;
    bool sample_queues_;
    std::map<std::pair<uint32_t, uint64_t>, double> bits_;
    std::vector<std::vector<QueueSample>> samples_; // per link
};

FlowRecord to_record(const net::FlowOutcome& o);

} // namespace pdq::metrics
