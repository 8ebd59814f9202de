#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pdq/protocol/header.hpp"
#include "pdq/protocol/sender.hpp"
#include "pdq/protocol/switch_state.hpp"
#include "pdq/sim/link.hpp"
#include "pdq/sim/simulator.hpp"
#include "pdq/topo/topology.hpp"

namespace pdq::net {

using sim::FlowKey;
using sim::Packet;
using sim::PacketKind;
using sim::SimTime;

enum class Protocol { pdq, rcp, d3 };

/// Per-link protocol logic. Forward packets are seen when they enter the link;
/// reverse packets when they reach the link's source node on the way back.
class LinkController {
public:
    virtual ~LinkController() = default;
    virtual void on_forward(Packet& pkt, SimTime now) = 0;
    virtual void on_reverse(Packet& pkt, SimTime now) = 0;
};

class Endpoint {
public:
    virtual ~Endpoint() = default;
    virtual void receive(Packet&& pkt) = 0;
};

struct FlowOutcome {
    uint32_t flow_id = 0;
    uint32_t src = 0;
    uint32_t dst = 0;
    uint64_t size = 0;
    SimTime start;
    std::optional<SimTime> deadline;
    std::optional<SimTime> completion;
    std::optional<SimTime> first_data;
    bool terminated = false;
    protocol::TerminationReason reason = protocol::TerminationReason::none;
    uint64_t payload_acked = 0;
    uint64_t probes = 0;
    uint64_t retransmits = 0;
    uint32_t subflows = 1;

    bool deadline_met() const { return completion && (!deadline || *completion <= *deadline); }
};

/// Everything a run may want to watch. All hooks default to no-ops.
class NetworkObserver : public sim::LinkObserver {
public:
    virtual void on_rate_change(FlowKey, SimTime, double /*rate*/, protocol::SwitchId /*pauseby*/) {}
    virtual void on_probe_sent(FlowKey, SimTime) {}
    virtual void on_packet_sent(const Packet&, SimTime) {}
    virtual void on_switch_data(uint32_t /*link*/, FlowKey, protocol::DataDecision, SimTime) {}
    virtual void on_flow_started(uint32_t /*flow*/, SimTime) {}
    virtual void on_flow_done(const FlowOutcome&, SimTime) {}
};

class Network : private sim::LinkObserver {
public:
    Network(sim::Simulator& sim, const topo::Topology& topo);
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    sim::Simulator& sim() { return sim_; }
    const topo::Topology& topology() const { return topo_; }
    sim::Link& link(uint32_t id) { return *links_.at(id); }
    const sim::Link& link(uint32_t id) const { return *links_.at(id); }
    size_t link_count() const { return links_.size(); }

    void set_controller(uint32_t link, std::unique_ptr<LinkController> c);
    LinkController* controller(uint32_t link) { return controllers_.at(link).get(); }

    void register_sender(FlowKey key, Endpoint* e) { senders_[key] = e; }
    void register_receiver(FlowKey key, Endpoint* e) { receivers_[key] = e; }

    /// Injects a packet at the head of its route. Reverse packets start at the route's last hop.
    void send(Packet pkt);

    void add_observer(NetworkObserver* o) { observers_.push_back(o); }
    const std::vector<NetworkObserver*>& observers() const { return observers_; }

    uint64_t next_uid() { return ++uid_; }
    uint64_t undeliverable() const { return undeliverable_; }

private:
    void forward_on(Packet&& pkt);
    void arrived(uint32_t link_id, Packet&& pkt);

    void on_enqueue(const sim::Link& l, const Packet& p, SimTime t) override;
    void on_drop(const sim::Link& l, const Packet& p, SimTime t, bool random) override;
    void on_tx_start(const sim::Link& l, const Packet& p, SimTime s, SimTime e) override;
    void on_deliver(const sim::Link& l, const Packet& p, SimTime t) override;

    sim::Simulator& sim_;
    const topo::Topology& topo_;
    std::vector<std::unique_ptr<sim::Link>> links_;
    std::vector<std::unique_ptr<LinkController>> controllers_;
    std::unordered_map<FlowKey, Endpoint*> senders_, receivers_;
    std::vector<NetworkObserver*> observers_;
    uint64_t uid_ = 0;
    uint64_t undeliverable_ = 0;
};

} // namespace pdq::net
