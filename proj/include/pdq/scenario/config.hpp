#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/net/network.hpp"
#include "pdq/protocol/switch_state.hpp"
#include "pdq/topo/topology.hpp"
#include "pdq/topo/workload.hpp"

namespace pdq::scenario {

using sim::SimTime;

/// Parse or validation failure. `where` is "file:line" when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// Flat "section.key" -> value map that remembers where each value came from.
struct RawConfig {
    struct Entry {
        std::string value;
        std::string where;
    };
    std::map<std::string, Entry> entries;
};

RawConfig parse_ini(std::istream& is, const std::string& source);
RawConfig parse_ini_file(const std::filesystem::path& p);
/// Applies "section.key=value".
void apply_override(RawConfig& raw, const std::string& assignment);

enum class TopologyKind { single_bottleneck, tree, fat_tree, parallel_paths, chain };
enum class WorkloadKind { scenario1, scenario2, aggregation, stride, staggered, permutation };
enum class LossScope { bottleneck, all };

struct TopologySpec {
    TopologyKind kind = TopologyKind::single_bottleneck;
    uint32_t senders = 0; // single_bottleneck; 0 = enough for the workload
    uint32_t k = 4;       // fat_tree
    uint32_t paths = 4;   // parallel_paths
    uint32_t switches = 3;
    uint32_t hosts_per_switch = 2;
    sim::LinkParams link;
};

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::aggregation;
    uint32_t flows = 10;
    uint32_t stride = 1;
    double staggered_p = 0.5;
    uint32_t flows_per_host = 1;
    std::optional<uint32_t> aggregator;
    bool deadlines = false;
    uint64_t mean_size = 100 * topo::kilobyte;
    uint64_t min_size = 2 * topo::kilobyte;
    uint64_t deadline_size_lo = 2 * topo::kilobyte;
    uint64_t deadline_size_hi = 198 * topo::kilobyte;
    SimTime deadline_mean = sim::milliseconds(20);
    SimTime deadline_floor = sim::milliseconds(3);
    SimTime start;
    protocol::CriticalityMode criticality = protocol::CriticalityMode::exact_size;
    uint32_t short_flows = 50;
    uint64_t long_size = 5 * topo::megabyte;
    SimTime burst_at = sim::milliseconds(10);
};

struct ScenarioConfig {
    std::string name = "unnamed";
    net::Protocol protocol = net::Protocol::pdq;
    uint64_t seed = 1;
    SimTime duration = sim::milliseconds(1000);
    double loss_rate = 0.0;
    LossScope loss_scope = LossScope::bottleneck;
    SimTime nominal_rtt; // zero = measured from the first flow's path
    uint64_t event_ceiling = 2'000'000'000ULL;

    TopologySpec topology;
    WorkloadSpec workload;

    protocol::SwitchConfig pdq;
    bool early_termination = true;
    double aging_alpha = 0.0;
    double rto_rtts = 3.0;

    double baseline_alpha = 0.1;
    double baseline_beta = 1.0;

    uint32_t subflows = 1;
    double shift_period_rtts = 2.0;

    SimTime bin_width = sim::microseconds(100);
    bool sample_queues = true;
};

/// Converts and validates; unknown keys are errors.
ScenarioConfig from_raw(const RawConfig& raw);
ScenarioConfig load_config(const std::filesystem::path& p, const std::vector<std::string>& overrides = {});
/// Every key with its effective value; parses back to the same config.
std::string to_ini(const ScenarioConfig& c);

std::string to_string(net::Protocol p);

} // namespace pdq::scenario
