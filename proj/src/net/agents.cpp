#include "pdq/net/agents.hpp"

#include <algorithm>
#include <cmath>

namespace pdq::net {

using protocol::TerminationReason;

FlowAgent::FlowAgent(Network& net, const topo::FlowSpec& spec, std::vector<SubflowPath> paths, AgentConfig cfg,
                     SimTime random_criticality)
    : net_(net), spec_(spec), cfg_(cfg)
{
    outcome_.flow_id = spec.id;
    outcome_.src = spec.src;
    outcome_.dst = spec.dst;
    outcome_.size = spec.size;
    outcome_.start = spec.start;
    outcome_.deadline = spec.deadline;
    outcome_.subflows = static_cast<uint32_t>(paths.size());
    for (size_t i = 0; i < paths.size(); ++i) {
        Subflow s;
        s.id = static_cast<uint16_t>(i);
        s.route = paths[i].route;
        s.unsent = paths[i].bytes;
        s.st = protocol::make_sender_state(sim::make_flow_key(spec.id, s.id), s.unsent.total(), paths[i].max_rate,
                                           spec.deadline, paths[i].nominal_rtt, spec.start, spec.mode);
        s.st.random_criticality = random_criticality;
        s.st.aging_alpha = cfg.aging_alpha;
        protocol::refresh_expected_tx_time(s.st);
        subs_.push_back(std::move(s));
        net_.register_sender(sim::make_flow_key(spec.id, static_cast<uint16_t>(i)), this);
    }
}

void FlowAgent::install()
{
    net_.sim().schedule(spec_.start, sim::EventKind::scenario_hook, spec_.src, [this] { start(); });
}

void FlowAgent::start()
{
    for (auto* o : net_.observers()) o->on_flow_started(spec_.id, net_.sim().now());
    if (check_termination()) return;
    for (auto& s : subs_) send_syn(s);
    if (spec_.deadline && cfg_.protocol != Protocol::rcp && cfg_.early_termination) {
        net_.sim().schedule(*spec_.deadline + sim::nanoseconds(1), sim::EventKind::timer, spec_.src,
                            [this] { check_termination(); });
    }
    if (subs_.size() > 1)
        net_.sim().schedule_in(sim::scale(subs_[0].st.rtt, cfg_.shift_period_rtts), sim::EventKind::timer, spec_.src,
                               [this] { shift_tick(); });
}

Packet FlowAgent::make_packet(Subflow& s, PacketKind kind)
{
    Packet p;
    p.kind = kind;
    p.flow_id = spec_.id;
    p.subflow_id = s.id;
    p.size = protocol::control_packet_bytes;
    p.send_time = net_.sim().now();
    p.has_header = true;
    p.header = protocol::sender_header(s.st, net_.sim().now());
    p.route = s.route;
    p.reverse = false;
    if (cfg_.protocol == Protocol::d3 && kind != PacketKind::term) {
        const SimTime now = net_.sim().now();
        const bool due = !s.requested || now - s.last_request >= s.st.rtt || kind != PacketKind::data;
        if (due) {
            p.rate_request = true;
            s.requested = true;
            s.last_request = now;
            if (spec_.deadline) {
                const double wire = static_cast<double>(s.unsent.total()) * protocol::mss_bytes / protocol::data_payload_bytes;
                const double left = (*spec_.deadline - now).seconds();
                p.demand = left > 0 ? wire * 8.0 / left : s.st.max_rate * 1e6;
            }
        }
    }
    return p;
}

void FlowAgent::send_syn(Subflow& s)
{
    s.phase = Phase::syn_sent;
    refresh_state(s);
    net_.send(make_packet(s, PacketKind::syn));
    const uint64_t token = ++s.ctrl_token;
    const uint16_t id = s.id;
    net_.sim().schedule_in(rto(s), sim::EventKind::timer, spec_.src, [this, id, token] {
        auto& sf = subs_[id];
        if (sf.ctrl_token == token && sf.phase == Phase::syn_sent && !stopped_) send_syn(sf);
    });
}

void FlowAgent::send_term(Subflow& s)
{
    s.phase = Phase::closing;
    ++s.pace_token;
    ++s.probe_token;
    s.pacing = s.probing = false;
    Packet p = make_packet(s, PacketKind::term);
    p.has_header = false;
    net_.send(std::move(p));
    ++s.term_tries;
    const uint64_t token = ++s.ctrl_token;
    const uint16_t id = s.id;
    net_.sim().schedule_in(rto(s), sim::EventKind::timer, spec_.src, [this, id, token] {
        auto& sf = subs_[id];
        if (sf.ctrl_token != token || sf.phase != Phase::closing) return;
        if (sf.term_tries < cfg_.max_term_retries)
            send_term(sf);
        else
            close_subflow(sf);
    });
}

void FlowAgent::close_subflow(Subflow& s)
{
    s.phase = Phase::closed;
    ++s.ctrl_token;
    ++s.pace_token;
    ++s.probe_token;
    s.pacing = s.probing = false;
}

void FlowAgent::refresh_state(Subflow& s)
{
    s.st.remaining = s.unsent.total();
    s.st.sent = sent_high_;
    protocol::refresh_expected_tx_time(s.st);
}

void FlowAgent::schedule_pacing(Subflow& s, SimTime at)
{
    s.pacing = true;
    s.next_pace = std::max(at, net_.sim().now());
    const uint64_t token = ++s.pace_token;
    const uint16_t id = s.id;
    net_.sim().schedule(std::max(at, net_.sim().now()), sim::EventKind::timer, spec_.src,
                        [this, id, token] { pace(subs_[id], token); });
}

void FlowAgent::pace(Subflow& s, uint64_t token)
{
    if (token != s.pace_token) return;
    s.pacing = false;
    if (stopped_ || s.phase != Phase::established || s.st.rate <= 0) return;
    if (check_termination()) return;
    if (s.unsent.empty()) {
        maybe_finish_subflow(s);
        return;
    }
    refresh_state(s);
    Packet p = make_packet(s, PacketKind::data);
    const auto chunk = s.unsent.pop_front(protocol::data_payload_bytes);
    const SimTime now = net_.sim().now();
    p.byte_offset = chunk->first;
    p.payload = static_cast<uint32_t>(chunk->second - chunk->first);
    p.size = p.payload + protocol::control_packet_bytes;
    p.seq = s.next_seq++;
    s.outstanding[p.seq] = {p.byte_offset, p.payload, now};
    sent_high_ = std::max(sent_high_, chunk->second);
    if (!outcome_.first_data) outcome_.first_data = now;

    const uint64_t seq = p.seq;
    const uint32_t size = p.size;
    net_.send(std::move(p));
    const uint16_t id = s.id;
    net_.sim().schedule_in(rto(s), sim::EventKind::timer, spec_.src,
                           [this, id, seq, now] { retransmit_timeout(subs_[id], seq, now); });
    s.st.remaining = s.unsent.total();
    s.last_send = now;
    s.last_size = size;
    schedule_pacing(s, next_send(s));
    maybe_refresh_probe(s);
}

SimTime FlowAgent::next_send(const Subflow& s) const
{
    const SimTime now = net_.sim().now();
    if (!s.last_send || s.st.rate <= 0) return now;
    return std::max(now, *s.last_send + sim::seconds_f(s.last_size * 8.0 / s.st.rate));
}

bool FlowAgent::pacing_is_slow(const Subflow& s) const
{
    return s.pacing && s.next_pace - net_.sim().now() > s.st.rtt;
}

void FlowAgent::maybe_refresh_probe(Subflow& s)
{
    if (!s.probing && pacing_is_slow(s)) schedule_probe(s, protocol::probe_interval(s.st));
}

void FlowAgent::schedule_probe(Subflow& s, SimTime delay)
{
    s.probing = true;
    const uint64_t token = ++s.probe_token;
    const uint16_t id = s.id;
    net_.sim().schedule_in(delay, sim::EventKind::probe_timer, spec_.src, [this, id, token] { probe(subs_[id], token); });
}

void FlowAgent::probe(Subflow& s, uint64_t token)
{
    if (token != s.probe_token) return;
    s.probing = false;
    if (stopped_ || s.phase != Phase::established) return;
    if (s.st.rate > 0 && !pacing_is_slow(s)) return;
    if (check_termination()) return;
    if (subs_.size() > 1 && s.unsent.empty() && s.outstanding.empty()) {
        maybe_finish_subflow(s);
        return;
    }
    refresh_state(s);
    net_.send(make_packet(s, PacketKind::probe));
    ++outcome_.probes;
    for (auto* o : net_.observers()) o->on_probe_sent(sim::make_flow_key(spec_.id, s.id), net_.sim().now());
    schedule_probe(s, protocol::probe_interval(s.st));
}

void FlowAgent::receive(Packet&& ack)
{
    if (ack.subflow_id >= subs_.size()) return;
    Subflow& s = subs_[ack.subflow_id];
    if (s.phase == Phase::closed) return;
    switch (ack.echo_kind) {
    case PacketKind::syn:
        if (s.phase != Phase::syn_sent) return;
        s.phase = Phase::established;
        ++s.ctrl_token;
        apply_feedback(s, ack);
        break;
    case PacketKind::data:
        on_data_ack(s, ack);
        if (!stopped_) apply_feedback(s, ack);
        break;
    case PacketKind::probe:
        apply_feedback(s, ack);
        break;
    case PacketKind::term:
        if (s.phase == Phase::closing) close_subflow(s);
        return;
    default:
        return;
    }
    if (!stopped_) check_termination();
}

void FlowAgent::apply_feedback(Subflow& s, const Packet& ack)
{
    if (stopped_ || s.phase != Phase::established || !ack.has_header) return;
    const SimTime now = net_.sim().now();
    protocol::SchedulingHeader h = ack.header;
    if (cfg_.protocol == Protocol::d3 && !ack.rate_request) {
        h.rate = s.st.rate;
        h.pauseby = s.st.pauseby;
    }
    const double old_rate = s.st.rate;
    const auto old_pause = s.st.pauseby;
    refresh_state(s);
    const auto res = protocol::sender_on_ack(s.st, h, now - ack.echo_send_time, cfg_.sender);
    if (s.st.rate != old_rate || s.st.pauseby != old_pause)
        for (auto* o : net_.observers()) o->on_rate_change(sim::make_flow_key(spec_.id, s.id), now, s.st.rate, s.st.pauseby);

    if (res.action == protocol::PacingAction::send_data) {
        if (s.probing) {
            ++s.probe_token;
            s.probing = false;
        }
        if (!s.pacing) {
            if (!s.unsent.empty()) schedule_pacing(s, next_send(s));
            else maybe_finish_subflow(s);
        } else if (s.st.rate > old_rate) {
            schedule_pacing(s, next_send(s));
        }
        maybe_refresh_probe(s);
    } else {
        if (s.pacing) {
            ++s.pace_token;
            s.pacing = false;
        }
        if (!s.probing) schedule_probe(s, res.probe_delay);
    }
}

void FlowAgent::on_data_ack(Subflow& s, const Packet& ack)
{
    s.outstanding.erase(ack.seq);
    if (ack.echo_len == 0) return;
    const uint64_t lo = ack.byte_offset, hi = ack.byte_offset + ack.echo_len;
    acked_.add(lo, hi);
    for (auto& other : subs_) other.unsent.remove(lo, hi);
    outcome_.payload_acked = acked_.total();
    if (!stopped_ && acked_.total() >= spec_.size) {
        complete();
        return;
    }
    if (!stopped_) maybe_finish_subflow(s);
}

void FlowAgent::retransmit_timeout(Subflow& s, uint64_t seq, SimTime sent_at)
{
    if (stopped_) return;
    auto it = s.outstanding.find(seq);
    if (it == s.outstanding.end() || it->second.sent_at != sent_at) return;
    mpdq::IntervalSet lost(it->second.offset, it->second.offset + it->second.len);
    for (const auto& [a, b] : acked_.ranges()) {
        if (b <= it->second.offset || a >= it->second.offset + it->second.len) continue;
        lost.remove(a, b);
    }
    s.outstanding.erase(it);
    s.unsent.merge(lost);
    ++outcome_.retransmits;
    if (s.phase == Phase::established && s.st.rate > 0 && !s.pacing) schedule_pacing(s, next_send(s));
}

void FlowAgent::maybe_finish_subflow(Subflow& s)
{
    if (stopped_ || s.phase != Phase::established) return;
    if (!s.unsent.empty() || !s.outstanding.empty() || subs_.size() == 1) return;
    if (s.st.rate > 0) {
        std::vector<mpdq::SubflowLoad> loads;
        for (auto& o : subs_) {
            const bool active = o.phase == Phase::established || o.phase == Phase::syn_sent;
            loads.push_back({&o == &s || (o.phase == Phase::established && o.st.rate > 0), active, &o.unsent});
        }
        mpdq::shift_load(loads);
        if (!s.unsent.empty()) {
            if (!s.pacing) schedule_pacing(s, next_send(s));
            return;
        }
    }
    send_term(s);
}

void FlowAgent::shift_tick()
{
    if (stopped_) return;
    std::vector<mpdq::SubflowLoad> loads;
    for (auto& o : subs_) {
        const bool active = o.phase == Phase::established || o.phase == Phase::syn_sent;
        loads.push_back({o.phase == Phase::established && o.st.rate > 0, active, &o.unsent});
    }
    const auto emptied = mpdq::shift_load(loads);
    for (auto& o : subs_)
        if (o.phase == Phase::established && o.st.rate > 0 && !o.pacing && !o.unsent.empty())
            schedule_pacing(o, next_send(o));
    for (size_t i : emptied) maybe_finish_subflow(subs_[i]);
    net_.sim().schedule_in(sim::scale(subs_[0].st.rtt, cfg_.shift_period_rtts), sim::EventKind::timer, spec_.src,
                           [this] { shift_tick(); });
}

bool FlowAgent::check_termination()
{
    if (stopped_) return true;
    if (!spec_.deadline || !cfg_.early_termination) return false;
    const SimTime now = net_.sim().now();
    TerminationReason why = TerminationReason::none;
    if (cfg_.protocol == Protocol::pdq) {
        protocol::SenderFlowState agg = subs_[0].st;
        if (subs_.size() == 1) {
            refresh_state(subs_[0]);
            agg = subs_[0].st;
        } else {
            uint64_t unsent = 0;
            double rate = 0, max_rate = 0;
            for (auto& s : subs_) {
                unsent += s.unsent.total();
                rate += s.st.rate;
                max_rate += s.st.max_rate;
                agg.rtt = std::min(agg.rtt, s.st.rtt);
            }
            agg.rate = rate;
            agg.expected_tx_time = protocol::expected_tx_time_for(unsent, max_rate);
        }
        if (!outcome_.first_data && subs_[0].phase == Phase::idle) agg.rate = 1; // not started yet
        why = protocol::sender_check_early_termination(agg, now);
    } else if (cfg_.protocol == Protocol::d3) {
        const SimTime d = *spec_.deadline;
        uint64_t unsent = 0;
        double max_rate = 0;
        for (auto& s : subs_) {
            unsent += s.unsent.total();
            max_rate += s.st.max_rate;
        }
        if (now > d) {
            why = TerminationReason::deadline_passed;
        } else {
            const double wire = static_cast<double>(unsent) * protocol::mss_bytes / protocol::data_payload_bytes;
            const double left = (d - now).seconds();
            if (unsent > 0 && (left <= 0 || wire * 8.0 / left > max_rate)) why = TerminationReason::insufficient_time;
        }
    }
    if (why == TerminationReason::none) return false;
    terminate(why);
    return true;
}

void FlowAgent::terminate(TerminationReason why)
{
    stopped_ = true;
    done_ = true;
    outcome_.terminated = true;
    outcome_.reason = why;
    for (auto* o : net_.observers()) o->on_flow_done(outcome_, net_.sim().now());
    for (auto& s : subs_) {
        if (s.phase == Phase::established || s.phase == Phase::syn_sent) {
            if (s.st.rate != 0)
                for (auto* o : net_.observers()) o->on_rate_change(sim::make_flow_key(spec_.id, s.id), net_.sim().now(), 0, s.st.pauseby);
            s.st.rate = 0;
            send_term(s);
        } else if (s.phase == Phase::idle) {
            close_subflow(s);
        }
    }
}

void FlowAgent::complete()
{
    stopped_ = true;
    done_ = true;
    outcome_.completion = net_.sim().now();
    for (auto* o : net_.observers()) o->on_flow_done(outcome_, net_.sim().now());
    for (auto& s : subs_) {
        if (s.st.rate != 0)
            for (auto* o : net_.observers()) o->on_rate_change(sim::make_flow_key(spec_.id, s.id), net_.sim().now(), 0, s.st.pauseby);
        s.st.rate = 0;
        if (s.phase == Phase::established || s.phase == Phase::syn_sent)
            send_term(s);
        else if (s.phase == Phase::idle)
            close_subflow(s);
    }
}

void ReceiverAgent::receive(Packet&& pkt)
{
    if (pkt.kind == PacketKind::data && pkt.payload > 0) {
        delivered_.add(pkt.byte_offset, pkt.byte_offset + pkt.payload);
        raw_ += pkt.payload;
    }
    Packet a;
    a.kind = pkt.kind == PacketKind::syn ? PacketKind::syn_ack : PacketKind::ack;
    a.flow_id = pkt.flow_id;
    a.subflow_id = pkt.subflow_id;
    a.size = protocol::control_packet_bytes;
    a.seq = pkt.seq;
    a.byte_offset = pkt.byte_offset;
    a.echo_len = pkt.payload;
    a.echo_kind = pkt.kind;
    a.echo_send_time = pkt.send_time;
    a.send_time = net_.sim().now();
    a.has_header = pkt.has_header;
    if (pkt.has_header) a.header = protocol::receiver_on_data(pkt.header, max_rate_);
    a.rate_request = pkt.rate_request;
    a.route = pkt.route;
    a.reverse = true;
    net_.send(std::move(a));
}

} // namespace pdq::net
