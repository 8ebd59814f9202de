#include "pdq/protocol/sender.hpp"

#include <algorithm>
#include <cmath>

namespace pdq::protocol {

SimTime expected_tx_time_for(uint64_t payload, double max_rate)
{
    if (max_rate <= 0) return SimTime::max();
    return sim::seconds_f(static_cast<double>(payload) * 8.0 / max_rate);
}

SenderFlowState make_sender_state(uint64_t flow_id, uint64_t size, double max_rate,
                                  std::optional<SimTime> deadline, SimTime nominal_rtt, SimTime start,
                                  CriticalityMode mode)
{
    SenderFlowState s;
    s.flow_id = flow_id;
    s.size = size;
    s.remaining = size;
    s.max_rate = max_rate;
    s.deadline = deadline;
    s.rtt = nominal_rtt;
    s.start = start;
    s.mode = mode;
    refresh_expected_tx_time(s);
    return s;
}

uint64_t criticality_from_sent_bytes(uint64_t sent)
{
    return sent / estimation_step_bytes * estimation_step_bytes;
}

void refresh_expected_tx_time(SenderFlowState& s)
{
    switch (s.mode) {
    case CriticalityMode::exact_size:
        s.expected_tx_time = expected_tx_time_for(s.remaining, s.max_rate);
        break;
    case CriticalityMode::estimated_size:
        s.expected_tx_time = expected_tx_time_for(criticality_from_sent_bytes(s.sent), s.max_rate);
        break;
    case CriticalityMode::random:
        s.expected_tx_time = s.random_criticality;
        break;
    }
}

SchedulingHeader sender_header(const SenderFlowState& s, SimTime now)
{
    SchedulingHeader h;
    h.rate = s.max_rate;
    h.pauseby = s.pauseby;
    h.deadline = s.deadline;
    h.expected_tx_time = s.expected_tx_time;
    if (s.aging_alpha > 0) h.expected_tx_time = aging_adjust(s.expected_tx_time, now - s.start, s.aging_alpha);
    h.inter_probe = 1.0;
    h.rtt = s.rtt;
    return h;
}

AckOutcome sender_on_ack(SenderFlowState& s, const SchedulingHeader& h, std::optional<SimTime> rtt_sample,
                         const SenderConfig& cfg)
{
    s.rate = std::min(std::max(h.rate, 0.0), s.max_rate);
    s.pauseby = h.pauseby;
    if (s.pauseby != no_switch) s.rate = 0;
    s.inter_probe = h.inter_probe;
    if (rtt_sample && rtt_sample->ns() > 0) {
        const double est = static_cast<double>(s.rtt.ns());
        const double sample = static_cast<double>(rtt_sample->ns());
        s.rtt = sim::nanoseconds(std::llround(est + cfg.rtt_gain * (sample - est)));
    }
    refresh_expected_tx_time(s);
    if (s.rate > 0) return {PacingAction::send_data, {}};
    return {PacingAction::arm_probe, probe_interval(s)};
}

SimTime probe_interval(const SenderFlowState& s)
{
    return sim::scale(s.rtt, std::max(1.0, s.inter_probe));
}

TerminationReason sender_check_early_termination(const SenderFlowState& s, SimTime now)
{
    if (!s.deadline) return TerminationReason::none;
    const SimTime d = *s.deadline;
    if (now > d) return TerminationReason::deadline_passed;
    if (now + s.expected_tx_time > d) return TerminationReason::insufficient_time;
    if (s.rate <= 0 && now + s.rtt > d) return TerminationReason::paused_near_deadline;
    return TerminationReason::none;
}

SchedulingHeader receiver_on_data(const SchedulingHeader& h, double receiver_max_rate)
{
    SchedulingHeader out = h;
    out.rate = std::min(h.rate, receiver_max_rate);
    return out;
}

SimTime aging_adjust(SimTime expected_tx_time, SimTime waiting_time, double alpha)
{
    if (alpha <= 0 || waiting_time.ns() <= 0) return expected_tx_time;
    const double factor = std::exp2(alpha * (waiting_time / sim::milliseconds(100)));
    return sim::scale(expected_tx_time, 1.0 / factor);
}

} // namespace pdq::protocol
