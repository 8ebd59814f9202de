#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pdq/metrics/collector.hpp"
#include "pdq/net/agents.hpp"
#include "pdq/net/controllers.hpp"
#include "pdq/scenario/config.hpp"

namespace pdq::scenario {

topo::Topology build_topology(const ScenarioConfig& c, uint32_t flows_hint);
std::vector<topo::FlowSpec> build_workload(const ScenarioConfig& c, const topo::Topology& t, sim::Rng& rng);

/// One simulation instance: topology, workload, controllers and agents, wired and ready to run.
class ScenarioRun {
public:
    explicit ScenarioRun(const ScenarioConfig& cfg);
    /// Uses the given flows instead of generating them from the config.
    ScenarioRun(const ScenarioConfig& cfg, topo::Topology topology, std::vector<topo::FlowSpec> flows);
    ~ScenarioRun();
    ScenarioRun(const ScenarioRun&) = delete;
    ScenarioRun& operator=(const ScenarioRun&) = delete;

    /// Must be called before run().
    void add_observer(net::NetworkObserver* o) { net_->add_observer(o); }

    metrics::MetricsReport run();

    const ScenarioConfig& config() const { return cfg_; }
    sim::Simulator& simulator() { return sim_; }
    net::Network& network() { return *net_; }
    const topo::Topology& topology() const { return topo_; }
    const std::vector<topo::FlowSpec>& flows() const { return flows_; }
    const net::FlowAgent& agent(size_t i) const { return *agents_.at(i); }
    size_t agent_count() const { return agents_.size(); }
    /// Null unless the protocol is PDQ.
    net::PdqController* pdq_controller(uint32_t link);
    SimTime nominal_rtt() const { return nominal_rtt_; }
    const std::vector<topo::Path>& flow_paths(size_t i) const { return paths_.at(i); }
    /// Links subject to random loss.
    const std::vector<uint32_t>& lossy_links() const { return lossy_; }

    /// Conservation and bookkeeping checks; each string describes one violation.
    std::vector<std::string> check_invariants() const;

private:
    void wire();

    ScenarioConfig cfg_;
    topo::Topology topo_;
    std::vector<topo::FlowSpec> flows_;
    sim::Simulator sim_;
    std::unique_ptr<net::Network> net_;
    std::unique_ptr<metrics::Collector> collector_;
    std::unique_ptr<sim::Rng> loss_rng_;
    std::vector<std::unique_ptr<net::FlowAgent>> agents_;
    std::vector<std::unique_ptr<net::ReceiverAgent>> receivers_;
    std::vector<std::vector<topo::Path>> paths_;
    std::vector<uint32_t> lossy_;
    SimTime nominal_rtt_;
    SimTime last_event_;
    uint64_t sink_payload_ = 0;
    bool ran_ = false;

    class SinkCounter;
    std::unique_ptr<SinkCounter> sink_;
};

/// Runs a config end to end and writes the report and the effective config into `out`.
/// Returns the invariant violations found.
std::vector<std::string> run_to_directory(const ScenarioConfig& cfg, const std::filesystem::path& out,
                                          metrics::MetricsReport* report = nullptr);

} // namespace pdq::scenario
