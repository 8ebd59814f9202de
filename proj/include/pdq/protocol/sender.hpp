#pragma once

#include <cstdint>
#include <optional>

#include "pdq/protocol/header.hpp"

namespace pdq::protocol {

enum class CriticalityMode { exact_size, estimated_size, random };

struct SenderFlowState {
    uint64_t flow_id = 0;
    uint64_t size = 0;
    uint64_t remaining = 0; // unsent payload bytes, including pending retransmissions
    uint64_t sent = 0;      // payload bytes sent at least once
    double max_rate = 1e9;
    double rate = 0.0;
    SwitchId pauseby = no_switch;
    std::optional<SimTime> deadline;
    SimTime expected_tx_time;
    double inter_probe = 0.0; // 0 means unset
    SimTime rtt;
    CriticalityMode mode = CriticalityMode::exact_size;
    SimTime random_criticality; // fixed draw for random mode
    SimTime start;
    double aging_alpha = 0.0;
};

struct SenderConfig {
    double rtt_gain = 0.125;
};

/// Expected transmission time on the wire for `payload` bytes at `max_rate`.
SimTime expected_tx_time_for(uint64_t payload, double max_rate);

SenderFlowState make_sender_state(uint64_t flow_id, uint64_t size, double max_rate,
                                  std::optional<SimTime> deadline, SimTime nominal_rtt, SimTime start,
                                  CriticalityMode mode = CriticalityMode::exact_size);

/// Recomputes T_S from the remaining bytes under the flow's criticality mode.
void refresh_expected_tx_time(SenderFlowState& s);

/// Header attached on departure. R_H is always the maximal rate.
SchedulingHeader sender_header(const SenderFlowState& s, SimTime now);

enum class PacingAction { send_data, arm_probe };

struct AckOutcome {
    PacingAction action = PacingAction::arm_probe;
    SimTime probe_delay; // valid for arm_probe
};

/// `rtt_sample` is the measured round trip of the acknowledged packet, if any.
AckOutcome sender_on_ack(SenderFlowState& s, const SchedulingHeader& h, std::optional<SimTime> rtt_sample,
                         const SenderConfig& cfg = {});

/// Interval between probes while paused: max(1, I_S) round trips.
SimTime probe_interval(const SenderFlowState& s);

enum class TerminationReason { none, deadline_passed, insufficient_time, paused_near_deadline };

TerminationReason sender_check_early_termination(const SenderFlowState& s, SimTime now);

SchedulingHeader receiver_on_data(const SchedulingHeader& h, double receiver_max_rate);

/// T / 2^(alpha * wait / 100 ms).
SimTime aging_adjust(SimTime expected_tx_time, SimTime waiting_time, double alpha);

constexpr uint64_t estimation_step_bytes = 50'000;

/// Estimated flow size used in estimated-size mode: sent bytes floored to 50 KB steps.
uint64_t criticality_from_sent_bytes(uint64_t sent);

} // namespace pdq::protocol
