#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "pdq/protocol/criticality.hpp"
#include "pdq/protocol/header.hpp"

namespace pdq::protocol {

using FlowKey = uint64_t;

/// How many entries a link keeps before it stops admitting less critical flows.
enum class ListCapacityMode {
    two_kappa, // max(2, 2 * sending count)
    kappa,     // max(1, sending count)
    unbounded, // hard cap only
};

struct SwitchConfig {
    double r_pdq = 1e9;
    double early_start_k = 2.0; // 0 disables Early Start
    double probing_x = 0.2;
    bool suppressed_probing = true;
    bool dampening = true;
    double dampening_rtts = 1.0;
    ListCapacityMode capacity_mode = ListCapacityMode::unbounded;
    size_t hard_cap = 1000;
    bool rate_controller = true;
    /// Leftover capacity below a flow paused here is withheld from less critical flows.
    bool criticality_ordered_leftover = true;
    SimTime nominal_rtt = sim::microseconds(150);
    double rtt_gain = 0.125;
};

struct SwitchFlowEntry {
    FlowKey flow = 0;
    double rate = 0.0;
    SwitchId pauseby = no_switch;
    std::optional<SimTime> deadline;
    SimTime expected_tx_time;
    SimTime rtt;
    uint64_t arrival_seq = 0;
    SimTime paused_since;
    bool dampened = false; // last held back by dampening rather than by capacity

    FlowSummary summary() const { return {deadline, expected_tx_time, flow}; }
};

enum class DataDecision {
    removed,      // paused by another switch
    rcp_fallback, // outside the stored list, RCP share applied
    accepted,
    paused,
    dampened,
};

struct SwitchDiagnostics {
    uint64_t malformed_headers = 0;
    uint64_t evictions = 0;
    uint64_t fallback_grants = 0;
    uint64_t dampened = 0;
};

class SwitchLinkState {
public:
    SwitchLinkState(SwitchId id, SwitchConfig cfg);

    SwitchId id() const { return id_; }
    const SwitchConfig& config() const { return cfg_; }
    const std::vector<SwitchFlowEntry>& flows() const { return list_; }
    std::optional<size_t> index_of(FlowKey f) const;
    const SwitchFlowEntry* find(FlowKey f) const;

    DataDecision on_data(SchedulingHeader& h, FlowKey flow, SimTime now);
    /// Bandwidth left for list position j at time `now`.
    double availbw(size_t j, SimTime now) const;
    void on_ack(SchedulingHeader& h, FlowKey flow);
    void on_term(FlowKey flow);

    /// C := max(0, r_PDQ - q_bits / (2 rtt_avg)).
    double rate_controller_epoch(uint64_t queue_bytes);
    /// Leftover capacity split over flows that fell outside the list.
    double rcp_fallback_rate() const;

    size_t capacity() const;
    size_t sending_count() const;
    double rate_ctrl_c() const { return c_; }
    void set_rate_ctrl_c(double c) { c_ = c; }
    SimTime rtt_avg() const { return rtt_avg_; }
    SimTime dampen_until() const { return dampen_until_; }
    const SwitchDiagnostics& diagnostics() const { return diag_; }
    size_t fallback_flow_count() const { return fallback_.size(); }

    bool is_sorted() const;

private:
    void remove(FlowKey flow);
    size_t reposition(size_t idx);
    void pause(SchedulingHeader& h, SwitchFlowEntry* e, SimTime now);

    SwitchId id_;
    SwitchConfig cfg_;
    std::vector<SwitchFlowEntry> list_;
    std::set<FlowKey> fallback_;
    double c_;
    SimTime rtt_avg_;
    SimTime dampen_until_;
    FlowKey dampened_flow_ = 0;
    bool has_dampened_flow_ = false;
    uint64_t next_arrival_ = 0;
    SwitchDiagnostics diag_;
};

} // namespace pdq::protocol
