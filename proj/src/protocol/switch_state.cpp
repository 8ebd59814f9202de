#include "pdq/protocol/switch_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdq::protocol {

SwitchLinkState::SwitchLinkState(SwitchId id, SwitchConfig cfg)
    : id_(id), cfg_(cfg), c_(cfg.r_pdq), rtt_avg_(cfg.nominal_rtt)
{
}

std::optional<size_t> SwitchLinkState::index_of(FlowKey f) const
{
    for (size_t i = 0; i < list_.size(); ++i)
        if (list_[i].flow == f) return i;
    return std::nullopt;
}

const SwitchFlowEntry* SwitchLinkState::find(FlowKey f) const
{
    auto i = index_of(f);
    return i ? &list_[*i] : nullptr;
}

size_t SwitchLinkState::sending_count() const
{
    return static_cast<size_t>(std::count_if(list_.begin(), list_.end(), [](const auto& e) { return e.rate > 0; }));
}

size_t SwitchLinkState::capacity() const
{
    switch (cfg_.capacity_mode) {
    case ListCapacityMode::two_kappa: return std::min(cfg_.hard_cap, std::max<size_t>(2, 2 * sending_count()));
    case ListCapacityMode::kappa: return std::min(cfg_.hard_cap, std::max<size_t>(1, sending_count()));
    case ListCapacityMode::unbounded: return cfg_.hard_cap;
    }
    return cfg_.hard_cap;
}

void SwitchLinkState::remove(FlowKey flow)
{
    if (auto i = index_of(flow)) list_.erase(list_.begin() + static_cast<std::ptrdiff_t>(*i));
    fallback_.erase(flow);
}

size_t SwitchLinkState::reposition(size_t idx)
{
    SwitchFlowEntry e = list_[idx];
    list_.erase(list_.begin() + static_cast<std::ptrdiff_t>(idx));
    const FlowSummary key = e.summary();
    auto it = std::lower_bound(list_.begin(), list_.end(), key,
                               [](const SwitchFlowEntry& a, const FlowSummary& k) { return more_critical(a.summary(), k); });
    const size_t at = static_cast<size_t>(it - list_.begin());
    list_.insert(it, e);
    return at;
}

void SwitchLinkState::pause(SchedulingHeader& h, SwitchFlowEntry* e, SimTime now)
{
    h.pauseby = id_;
    if (e) {
        if (e->pauseby != id_) e->paused_since = now;
        e->pauseby = id_;
    }
}

DataDecision SwitchLinkState::on_data(SchedulingHeader& h, FlowKey flow, SimTime now)
{
    if (h.rate < 0 || std::isnan(h.rate)) {
        ++diag_.malformed_headers;
        h.rate = 0;
        auto i = index_of(flow);
        pause(h, i ? &list_[*i] : nullptr, now);
        return DataDecision::paused;
    }
    if (h.pauseby != no_switch && h.pauseby != id_) {
        remove(flow);
        return DataDecision::removed;
    }

    auto idx = index_of(flow);
    if (!idx) {
        const FlowSummary incoming{h.deadline, h.expected_tx_time, flow};
        const bool room = list_.size() < capacity();
        if (room || (!list_.empty() && more_critical(incoming, list_.back().summary()))) {
            SwitchFlowEntry e;
            e.flow = flow;
            e.rate = 0;
            e.pauseby = id_; // not sending until the reverse path confirms
            e.deadline = h.deadline;
            e.expected_tx_time = h.expected_tx_time;
            e.rtt = h.rtt;
            e.arrival_seq = next_arrival_++;
            e.paused_since = now;
            list_.push_back(e);
            idx = reposition(list_.size() - 1);
            fallback_.erase(flow);
            while (list_.size() > capacity()) {
                if (list_.back().flow == flow) break;
                list_.pop_back();
                ++diag_.evictions;
            }
            idx = index_of(flow);
            if (!idx) {
                pause(h, nullptr, now);
                return DataDecision::paused;
            }
        } else if (list_.size() >= cfg_.hard_cap) {
            fallback_.insert(flow);
            ++diag_.fallback_grants;
            h.rate = std::min(h.rate, rcp_fallback_rate());
            if (h.rate <= 0) {
                h.rate = 0;
                h.pauseby = id_;
            } else {
                h.pauseby = no_switch;
            }
            return DataDecision::rcp_fallback;
        } else {
            pause(h, nullptr, now);
            return DataDecision::paused;
        }
    }

    SwitchFlowEntry& cur = list_[*idx];
    cur.deadline = h.deadline;
    cur.expected_tx_time = h.expected_tx_time;
    cur.rtt = h.rtt;
    const size_t i = reposition(*idx);
    SwitchFlowEntry& e = list_[i];

    const double w = std::min(availbw(i, now), h.rate);
    if (w > 0) {
        const bool non_sending = e.pauseby != no_switch;
        if (cfg_.dampening && non_sending && now < dampen_until_ && has_dampened_flow_ && dampened_flow_ != flow) {
            ++diag_.dampened;
            pause(h, &e, now);
            e.dampened = true;
            return DataDecision::dampened;
        }
        h.pauseby = no_switch;
        h.rate = w;
        e.dampened = false;
        if (non_sending) {
            dampen_until_ = now + sim::scale(rtt_avg_, cfg_.dampening_rtts);
            dampened_flow_ = flow;
            has_dampened_flow_ = true;
        }
        return DataDecision::accepted;
    }
    pause(h, &e, now);
    e.dampened = false;
    return DataDecision::paused;
}

double SwitchLinkState::availbw(size_t j, SimTime now) const
{
    const bool window_open = has_dampened_flow_ && now < dampen_until_;
    const double k = cfg_.early_start_k;
    double x = 0;
    double a = 0;
    for (size_t i = 0; i < j && i < list_.size(); ++i) {
        const auto& e = list_[i];
        const double ratio = e.rtt.ns() > 0 ? e.expected_tx_time / e.rtt : std::numeric_limits<double>::infinity();
        // only a flow that is currently sending can be nearly completed
        const bool sending = e.pauseby == no_switch || !cfg_.criticality_ordered_leftover;
        if (sending && ratio < k && x < k) {
            x += ratio;
        } else {
            // a more critical flow this switch is holding back gets the leftover first,
            // unless dampening keeps it out anyway
            if (cfg_.criticality_ordered_leftover && e.pauseby == id_ && !(e.dampened && window_open)) return 0;
            a += e.rate;
        }
        if (a >= c_) return 0;
    }
    return c_ - a;
}

void SwitchLinkState::on_ack(SchedulingHeader& h, FlowKey flow)
{
    if (h.rtt.ns() > 0) {
        const double est = static_cast<double>(rtt_avg_.ns());
        rtt_avg_ = sim::nanoseconds(std::llround(est + cfg_.rtt_gain * (static_cast<double>(h.rtt.ns()) - est)));
    }
    if (h.pauseby != no_switch && h.pauseby != id_) remove(flow);
    if (h.pauseby != no_switch) {
        h.rate = 0;
        // the flow that opened the dampening window did not start after all
        if (has_dampened_flow_ && dampened_flow_ == flow) has_dampened_flow_ = false;
    }
    if (auto i = index_of(flow)) {
        auto& e = list_[*i];
        e.pauseby = h.pauseby;
        if (cfg_.suppressed_probing) h.inter_probe = std::max(h.inter_probe, cfg_.probing_x * static_cast<double>(*i));
        e.rate = h.rate;
    } else if (h.pauseby == id_ && cfg_.suppressed_probing) {
        // Unlisted flows wait behind everything stored here.
        h.inter_probe = std::max(h.inter_probe, cfg_.probing_x * static_cast<double>(list_.size()));
    }
}

void SwitchLinkState::on_term(FlowKey flow)
{
    remove(flow);
    if (has_dampened_flow_ && dampened_flow_ == flow) has_dampened_flow_ = false;
}

double SwitchLinkState::rate_controller_epoch(uint64_t queue_bytes)
{
    if (!cfg_.rate_controller) {
        c_ = cfg_.r_pdq;
        return c_;
    }
    const double q_bits = static_cast<double>(queue_bytes) * 8.0;
    const double two_rtt = 2.0 * rtt_avg_.seconds();
    c_ = std::max(0.0, cfg_.r_pdq - (two_rtt > 0 ? q_bits / two_rtt : 0.0));
    return c_;
}

double SwitchLinkState::rcp_fallback_rate() const
{
    double used = 0;
    for (const auto& e : list_) used += e.rate;
    const double leftover = c_ - used;
    if (leftover <= 0 || fallback_.empty()) return leftover > 0 ? leftover : 0.0;
    return leftover / static_cast<double>(fallback_.size());
}

bool SwitchLinkState::is_sorted() const
{
    for (size_t i = 1; i < list_.size(); ++i)
        if (!more_critical(list_[i - 1].summary(), list_[i].summary())) return false;
    return true;
}

} // namespace pdq::protocol
