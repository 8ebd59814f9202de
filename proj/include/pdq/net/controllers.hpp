#pragma once

#include <memory>

#include "pdq/baselines/d3.hpp"
#include "pdq/baselines/rcp.hpp"
#include "pdq/net/network.hpp"
#include "pdq/protocol/switch_state.hpp"

namespace pdq::net {

/// Runs Algorithms 1 and 3 on one link and drives its rate controller every 2 rtt_avg.
class PdqController : public LinkController {
public:
    PdqController(Network& net, uint32_t link, protocol::SwitchConfig cfg);

    void on_forward(Packet& pkt, SimTime now) override;
    void on_reverse(Packet& pkt, SimTime now) override;

    protocol::SwitchLinkState& state() { return state_; }
    const protocol::SwitchLinkState& state() const { return state_; }
    uint64_t sortedness_violations() const { return unsorted_; }

private:
    void ensure_epoch();
    void epoch();

    Network& net_;
    uint32_t link_;
    protocol::SwitchLinkState state_;
    bool epoch_armed_ = false;
    uint64_t unsorted_ = 0;
};

struct BaselineConfig {
    SimTime nominal_rtt = sim::microseconds(150);
    double alpha = 0.1;
    double beta = 1.0;
};

/// Shared epoch bookkeeping for the baselines: measures input rate once per rtt.
class BaselineEpoch {
public:
    BaselineEpoch(Network& net, uint32_t link, BaselineConfig cfg, baselines::CapacityAdapter& adapter);
    void touch();
    void observe_rtt(SimTime rtt);
    SimTime rtt() const { return rtt_; }

private:
    void epoch();

    Network& net_;
    uint32_t link_;
    BaselineConfig cfg_;
    baselines::CapacityAdapter& adapter_;
    SimTime rtt_;
    bool armed_ = false;
    uint64_t last_injected_ = 0;
    SimTime last_at_;
};

class RcpController : public LinkController {
public:
    RcpController(Network& net, uint32_t link, BaselineConfig cfg);
    void on_forward(Packet& pkt, SimTime now) override;
    void on_reverse(Packet& pkt, SimTime now) override;
    baselines::RcpLinkState& state() { return state_; }

private:
    baselines::RcpLinkState state_;
    BaselineEpoch epoch_;
};

class D3Controller : public LinkController {
public:
    D3Controller(Network& net, uint32_t link, BaselineConfig cfg);
    void on_forward(Packet& pkt, SimTime now) override;
    void on_reverse(Packet& pkt, SimTime now) override;
    baselines::D3LinkState& state() { return state_; }

private:
    baselines::D3LinkState state_;
    BaselineEpoch epoch_;
};

} // namespace pdq::net
