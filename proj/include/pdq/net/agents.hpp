#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "pdq/mpdq/interval_set.hpp"
#include "pdq/mpdq/multipath.hpp"
#include "pdq/net/network.hpp"
#include "pdq/protocol/sender.hpp"
#include "pdq/topo/workload.hpp"

namespace pdq::net {

struct AgentConfig {
    Protocol protocol = Protocol::pdq;
    bool early_termination = true;
    double aging_alpha = 0.0;
    double rto_rtts = 3.0;
    double shift_period_rtts = 2.0;
    uint32_t max_term_retries = 50;
    protocol::SenderConfig sender;
};

/// Sender side of one flow. A flow with several subflows stripes its bytes over several paths.
class FlowAgent : public Endpoint {
public:
    struct SubflowPath {
        std::shared_ptr<const sim::Route> route;
        SimTime nominal_rtt;
        double max_rate = 1e9;
        mpdq::IntervalSet bytes;
    };

    FlowAgent(Network& net, const topo::FlowSpec& spec, std::vector<SubflowPath> paths, AgentConfig cfg,
              SimTime random_criticality = {});

    /// Schedules the flow's start.
    void install();
    void receive(Packet&& pkt) override;

    const FlowOutcome& outcome() const { return outcome_; }
    bool finished() const { return done_; }
    size_t subflow_count() const { return subs_.size(); }
    const protocol::SenderFlowState& subflow_state(size_t i) const { return subs_.at(i).st; }

private:
    enum class Phase { idle, syn_sent, established, closing, closed };

    struct Outstanding {
        uint64_t offset = 0;
        uint32_t len = 0;
        SimTime sent_at;
    };

    struct Subflow {
        uint16_t id = 0;
        std::shared_ptr<const sim::Route> route;
        protocol::SenderFlowState st;
        mpdq::IntervalSet unsent;
        std::map<uint64_t, Outstanding> outstanding;
        Phase phase = Phase::idle;
        uint64_t next_seq = 1;
        uint64_t pace_token = 0;
        bool pacing = false;
        uint64_t probe_token = 0;
        bool probing = false;
        uint64_t ctrl_token = 0; // SYN / TERM retransmission
        uint32_t term_tries = 0;
        SimTime last_request;
        bool requested = false;
        std::optional<SimTime> last_send;
        SimTime next_pace;
        uint32_t last_size = 0;
    };

    void start();
    void send_syn(Subflow& s);
    void send_term(Subflow& s);
    void close_subflow(Subflow& s);
    void schedule_pacing(Subflow& s, SimTime at);
    void pace(Subflow& s, uint64_t token);
    SimTime next_send(const Subflow& s) const;
    void schedule_probe(Subflow& s, SimTime delay);
    /// Slow senders also probe so that a tiny rate cannot hide a pause for long.
    void maybe_refresh_probe(Subflow& s);
    bool pacing_is_slow(const Subflow& s) const;
    void probe(Subflow& s, uint64_t token);
    void apply_feedback(Subflow& s, const Packet& ack);
    void on_data_ack(Subflow& s, const Packet& ack);
    void retransmit_timeout(Subflow& s, uint64_t seq, SimTime sent_at);
    bool check_termination();
    void terminate(protocol::TerminationReason why);
    void complete();
    void maybe_finish_subflow(Subflow& s);
    void shift_tick();
    void refresh_state(Subflow& s);

    Packet make_packet(Subflow& s, PacketKind kind);
    SimTime rto(const Subflow& s) const { return sim::scale(s.st.rtt, cfg_.rto_rtts); }

    Network& net_;
    topo::FlowSpec spec_;
    AgentConfig cfg_;
    std::vector<Subflow> subs_;
    mpdq::IntervalSet acked_;
    uint64_t sent_high_ = 0;
    FlowOutcome outcome_;
    bool done_ = false;
    bool stopped_ = false; // completed or terminated; only TERMs remain
};

/// Receiver side: acknowledges every packet and reassembles bytes across subflows.
class ReceiverAgent : public Endpoint {
public:
    ReceiverAgent(Network& net, double max_rate) : net_(net), max_rate_(max_rate) {}
    void receive(Packet&& pkt) override;
    uint64_t delivered_payload() const { return delivered_.total(); }
    /// Payload received including duplicates.
    uint64_t raw_payload() const { return raw_; }

private:
    Network& net_;
    double max_rate_;
    mpdq::IntervalSet delivered_;
    uint64_t raw_ = 0;
};

} // namespace pdq::net
