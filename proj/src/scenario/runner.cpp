#include "pdq/scenario/runner.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "pdq/mpdq/multipath.hpp"

namespace pdq::scenario {

topo::Topology build_topology(const ScenarioConfig& c, uint32_t flows_hint)
{
    const auto& t = c.topology;
    switch (t.kind) {
    case TopologyKind::single_bottleneck: return topo::build_single_bottleneck(t.senders ? t.senders : flows_hint, t.link);
    case TopologyKind::tree: return topo::build_single_rooted_tree(t.link);
    case TopologyKind::fat_tree: return topo::build_fat_tree(t.k, t.link);
    case TopologyKind::parallel_paths: return topo::build_parallel_paths(t.paths, t.link);
    case TopologyKind::chain: return topo::build_chain(t.switches, t.hosts_per_switch, t.link);
    }
    throw topo::TopologyError("unknown topology");
}

std::vector<topo::FlowSpec> build_workload(const ScenarioConfig& c, const topo::Topology& t, sim::Rng& rng)
{
    const auto& w = c.workload;
    std::vector<topo::FlowSpec> flows;
    if (w.kind == WorkloadKind::scenario1) {
        flows = topo::scenario1_workload(w.flows);
    } else if (w.kind == WorkloadKind::scenario2) {
        flows = topo::scenario2_workload(rng, w.short_flows, w.long_size, w.burst_at);
    } else {
        topo::WorkloadParams p;
        p.pattern = w.kind == WorkloadKind::aggregation ? topo::Pattern::aggregation
                    : w.kind == WorkloadKind::stride    ? topo::Pattern::stride
                    : w.kind == WorkloadKind::staggered ? topo::Pattern::staggered
                                                        : topo::Pattern::permutation;
        p.n_flows = w.flows;
        p.stride = w.stride;
        p.staggered_p = w.staggered_p;
        p.flows_per_host = w.flows_per_host;
        p.aggregator = w.aggregator;
        p.sizes.deadlines = w.deadlines;
        p.sizes.deadline_size_lo = w.deadline_size_lo;
        p.sizes.deadline_size_hi = w.deadline_size_hi;
        p.sizes.deadline_mean = w.deadline_mean;
        p.sizes.deadline_floor = w.deadline_floor;
        p.sizes.mean_size = w.mean_size;
        p.sizes.min_size = w.min_size;
        p.start = w.start;
        p.mode = w.criticality;
        flows = topo::gen_workload(t, p, rng);
    }
    for (auto& f : flows) {
        if (w.kind == WorkloadKind::scenario1 || w.kind == WorkloadKind::scenario2) {
            f.start += w.start;
            if (f.deadline) *f.deadline += w.start;
        }
        f.mode = w.criticality;
    }
    return flows;
}

/// Counts payload handed to receivers by the last link of each forward route.
class ScenarioRun::SinkCounter : public net::NetworkObserver {
public:
    explicit SinkCounter(uint64_t& total) : total_(total) {}
    void on_deliver(const sim::Link&, const sim::Packet& p, SimTime) override
    {
        if (!p.reverse && p.kind == sim::PacketKind::data && p.route &&
            p.hop + 1 == static_cast<int32_t>(p.route->size()))
            total_ += p.payload;
    }

private:
    uint64_t& total_;
};

namespace {

uint32_t flows_hint(const ScenarioConfig& c)
{
    if (c.workload.kind == WorkloadKind::scenario2) return c.workload.short_flows + 1;
    return c.workload.flows;
}

} // namespace

ScenarioRun::ScenarioRun(const ScenarioConfig& cfg) : cfg_(cfg), topo_(build_topology(cfg, flows_hint(cfg)))
{
    sim::Rng rng(cfg.seed, "workload");
    flows_ = build_workload(cfg_, topo_, rng);
    wire();
}

ScenarioRun::ScenarioRun(const ScenarioConfig& cfg, topo::Topology topology, std::vector<topo::FlowSpec> flows)
    : cfg_(cfg), topo_(std::move(topology)), flows_(std::move(flows))
{
    wire();
}

ScenarioRun::~ScenarioRun() = default;

void ScenarioRun::wire()
{
    sim_.set_event_ceiling(cfg_.event_ceiling);
    net_ = std::make_unique<net::Network>(sim_, topo_);

    for (const auto& f : flows_) {
        const auto& all = topo_.paths(f.src, f.dst);
        if (all.empty())
            throw topo::TopologyError("no path from " + std::to_string(f.src) + " to " + std::to_string(f.dst));
        paths_.emplace_back();
        const size_t n = std::min<size_t>(cfg_.subflows, all.size());
        for (size_t i = 0; i < n; ++i)
            paths_.back().push_back(all[mpdq::ecmp_index(f.id, static_cast<uint16_t>(i), all.size())]);
    }

    nominal_rtt_ = cfg_.nominal_rtt;
    if (nominal_rtt_.ns() == 0)
        nominal_rtt_ = paths_.empty() ? sim::microseconds(150)
                                      : topo_.path_rtt(paths_.front().front(), protocol::mss_bytes,
                                                       protocol::control_packet_bytes);

    for (uint32_t l = 0; l < net_->link_count(); ++l) {
        if (cfg_.protocol == net::Protocol::pdq) {
            protocol::SwitchConfig sc = cfg_.pdq;
            sc.r_pdq = net_->link(l).rate();
            sc.nominal_rtt = nominal_rtt_;
            net_->set_controller(l, std::make_unique<net::PdqController>(*net_, l, sc));
        } else {
            net::BaselineConfig bc{nominal_rtt_, cfg_.baseline_alpha, cfg_.baseline_beta};
            if (cfg_.protocol == net::Protocol::rcp)
                net_->set_controller(l, std::make_unique<net::RcpController>(*net_, l, bc));
            else
                net_->set_controller(l, std::make_unique<net::D3Controller>(*net_, l, bc));
        }
    }

    if (cfg_.loss_rate > 0) {
        loss_rng_ = std::make_unique<sim::Rng>(cfg_.seed, "loss");
        std::set<uint32_t> lossy;
        if (cfg_.loss_scope == LossScope::all) {
            for (uint32_t l = 0; l < net_->link_count(); ++l) lossy.insert(l);
        } else {
            // the last hop into each destination, both directions
            for (const auto& ps : paths_)
                for (const auto& p : ps) {
                    lossy.insert(p.back());
                    lossy.insert(topo::Topology::reverse(p.back()));
                }
        }
        for (uint32_t l : lossy) net_->link(l).set_loss(cfg_.loss_rate, loss_rng_.get());
        lossy_.assign(lossy.begin(), lossy.end());
    }

    collector_ = std::make_unique<metrics::Collector>(*net_, cfg_.bin_width, cfg_.sample_queues);
    net_->add_observer(collector_.get());
    sink_ = std::make_unique<SinkCounter>(sink_payload_);
    net_->add_observer(sink_.get());

    net::AgentConfig ac;
    ac.protocol = cfg_.protocol;
    ac.early_termination = cfg_.early_termination;
    ac.aging_alpha = cfg_.aging_alpha;
    ac.rto_rtts = cfg_.rto_rtts;
    ac.shift_period_rtts = cfg_.shift_period_rtts;

    sim::Rng crit(cfg_.seed, "criticality");
    for (size_t i = 0; i < flows_.size(); ++i) {
        const auto& f = flows_[i];
        const auto& ps = paths_[i];
        const auto split = mpdq::split_flow(f.id, f.size, ps.size(), ps.size());
        std::vector<net::FlowAgent::SubflowPath> sp;
        for (size_t s = 0; s < ps.size(); ++s) {
            auto route = std::make_shared<const sim::Route>(ps[s]);
            const double rate = std::min(net_->link(ps[s].front()).rate(), net_->link(ps[s].back()).rate());
            sp.push_back({route, topo_.path_rtt(ps[s], protocol::mss_bytes, protocol::control_packet_bytes), rate,
                          split.subflows[s].bytes});
        }
        SimTime random_t;
        if (f.mode == protocol::CriticalityMode::random)
            random_t = protocol::expected_tx_time_for(
                static_cast<uint64_t>(crit.uniform(0, 2.0 * static_cast<double>(cfg_.workload.mean_size))),
                sp.front().max_rate);
        const double rx_rate = net_->link(ps.front().back()).rate();
        auto rx = std::make_unique<net::ReceiverAgent>(*net_, rx_rate);
        for (size_t s = 0; s < ps.size(); ++s)
            net_->register_receiver(sim::make_flow_key(f.id, static_cast<uint16_t>(s)), rx.get());
        receivers_.push_back(std::move(rx));
        agents_.push_back(std::make_unique<net::FlowAgent>(*net_, f, std::move(sp), ac, random_t));
    }
}

net::PdqController* ScenarioRun::pdq_controller(uint32_t link)
{
    return dynamic_cast<net::PdqController*>(net_->controller(link));
}

metrics::MetricsReport ScenarioRun::run()
{
    if (!ran_) {
        ran_ = true;
        for (auto& a : agents_) a->install();
        sim_.set_trace([this](const sim::Event& e) { last_event_ = e.fire_at; });
        sim_.run(cfg_.duration);
    }
    std::vector<metrics::FlowRecord> recs;
    for (const auto& a : agents_) recs.push_back(metrics::to_record(a->outcome()));
    return collector_->finalize(std::min(last_event_, cfg_.duration), sim_.processed(), std::move(recs));
}

std::vector<std::string> ScenarioRun::check_invariants() const
{
    std::vector<std::string> bad;
    for (uint32_t l = 0; l < net_->link_count(); ++l) {
        const auto& k = net_->link(l);
        if (k.bytes_injected() != k.bytes_delivered() + k.bytes_dropped() + k.bytes_in_flight())
            bad.push_back("link " + std::to_string(l) + ": byte conservation violated");
    }
    if (net_->undeliverable()) bad.push_back(std::to_string(net_->undeliverable()) + " undeliverable packets");
    uint64_t received = 0;
    for (const auto& r : receivers_) received += r->raw_payload();
    if (received != sink_payload_)
        bad.push_back("receivers saw " + std::to_string(received) + " payload bytes, sink links delivered " +
                      std::to_string(sink_payload_));
    for (size_t i = 0; i < agents_.size(); ++i) {
        const auto& o = agents_[i]->outcome();
        if (o.payload_acked > o.size) bad.push_back("flow " + std::to_string(o.flow_id) + ": acked more than its size");
        if (o.completion && receivers_[i]->delivered_payload() != o.size)
            bad.push_back("flow " + std::to_string(o.flow_id) + ": completed without full delivery");
    }
    for (uint32_t l = 0; l < net_->link_count(); ++l)
        if (auto* c = dynamic_cast<const net::PdqController*>(net_->controller(l)); c && c->sortedness_violations())
            bad.push_back("link " + std::to_string(l) + ": flow list out of criticality order");
    return bad;
}

std::vector<std::string> run_to_directory(const ScenarioConfig& cfg, const std::filesystem::path& out,
                                          metrics::MetricsReport* report)
{
    ScenarioRun run(cfg);
    auto r = run.run();
    metrics::write_report(r, out);
    const auto cfg_path = out / "effective.cfg";
    std::ofstream os(cfg_path, std::ios::binary);
    if (!os) throw metrics::IoError("cannot open " + cfg_path.string() + " for writing");
    os << to_ini(cfg);
    if (!os) throw metrics::IoError("write failed: " + cfg_path.string());
    if (report) *report = std::move(r);
    return run.check_invariants();
}

} // namespace pdq::scenario
