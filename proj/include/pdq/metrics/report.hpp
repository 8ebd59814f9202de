#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/sim/time.hpp"

namespace pdq::metrics {

using sim::SimTime;

struct FlowRecord {
    uint32_t id = 0;
    uint32_t src = 0;
    uint32_t dst = 0;
    uint64_t size = 0;
    uint32_t subflows = 1;
    SimTime start;
    std::optional<SimTime> deadline;
    std::optional<SimTime> completion;
    bool terminated = false;
    std::string reason; // termination reason, empty when none
    uint64_t payload_acked = 0;
    uint64_t probes = 0;
    uint64_t retransmits = 0;

    std::optional<SimTime> fct() const;
    bool deadline_met() const { return completion && (!deadline || *completion <= *deadline); }
    bool operator==(const FlowRecord&) const = default;
};

/// Bits that finished serialization inside one bin of one link.
struct LinkBin {
    uint32_t link = 0;
    uint64_t bin = 0;
    double bits = 0;
    bool operator==(const LinkBin&) const = default;
};

struct LinkRecord {
    uint32_t id = 0;
    uint32_t src = 0;
    uint32_t dst = 0;
    double rate = 0;
    uint64_t bytes_delivered = 0;
    uint64_t drops = 0;
    uint64_t random_drops = 0;
    bool operator==(const LinkRecord&) const = default;
};

struct QueueSample {
    SimTime t;
    uint32_t link = 0;
    uint64_t bytes = 0;
    uint32_t packets = 0;
    uint32_t data_packets = 0;
    bool operator==(const QueueSample&) const = default;
};

struct Summary {
    size_t flows = 0;
    size_t completed = 0;
    size_t terminated = 0;
    size_t deadline_flows = 0;
    size_t deadlines_met = 0;
    double mean_fct_ms = 0;
    double median_fct_ms = 0;
    double p99_fct_ms = 0;
    std::optional<double> application_throughput; // none without deadline flows
    uint64_t drops = 0;
    uint64_t random_drops = 0;
    uint64_t probes = 0;
    uint64_t retransmits = 0;
};

struct MetricsReport {
    SimTime bin_width = sim::microseconds(100);
    SimTime end_time;
    uint64_t events = 0;
    std::vector<FlowRecord> flows;
    std::vector<LinkRecord> links;
    std::vector<LinkBin> bins; // sorted by (link, bin); zero bins omitted
    std::vector<QueueSample> queues;

    /// Fraction of capacity used by `link` in bin `bin`.
    double utilization(uint32_t link, uint64_t bin) const;
    /// Mean utilization of `link` over [from, to).
    double utilization(uint32_t link, SimTime from, SimTime to) const;
    uint32_t max_queue_data_packets(uint32_t link, SimTime from = {}, SimTime to = SimTime::max()) const;
    Summary summary() const;

    bool operator==(const MetricsReport&) const = default;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes flows.csv, links.csv, links_timeseries.csv, queues.csv and summary.txt into `dir`.
void write_report(const MetricsReport& r, const std::filesystem::path& dir);
void write_flows_csv(const MetricsReport& r, std::ostream& os);
void write_links_csv(const MetricsReport& r, std::ostream& os);
void write_timeseries_csv(const MetricsReport& r, std::ostream& os);
void write_queues_csv(const MetricsReport& r, std::ostream& os);
void write_summary(const MetricsReport& r, std::ostream& os);

/// Reads back what write_report produced.
MetricsReport read_report(const std::filesystem::path& dir);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

} // namespace pdq::metrics
