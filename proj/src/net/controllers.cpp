#include "pdq/net/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace pdq::net {

namespace {
bool carries_request(PacketKind k)
{
    return k == PacketKind::syn || k == PacketKind::data || k == PacketKind::probe;
}
bool carries_feedback(const Packet& p)
{
    return (p.kind == PacketKind::ack || p.kind == PacketKind::syn_ack) && p.echo_kind != PacketKind::term;
}
} // namespace

PdqController::PdqController(Network& net, uint32_t link, protocol::SwitchConfig cfg)
    : net_(net), link_(link), state_(static_cast<protocol::SwitchId>(link), cfg)
{
}

void PdqController::on_forward(Packet& pkt, SimTime now)
{
    if (pkt.kind == PacketKind::term) {
        state_.on_term(pkt.flow_key());
        return;
    }
    if (!carries_request(pkt.kind) || !pkt.has_header) return;
    const auto d = state_.on_data(pkt.header, pkt.flow_key(), now);
    if (!state_.is_sorted()) ++unsorted_;
    for (auto* o : net_.observers()) o->on_switch_data(link_, pkt.flow_key(), d, now);
    ensure_epoch();
}

void PdqController::on_reverse(Packet& pkt, SimTime)
{
    if (!carries_feedback(pkt) || !pkt.has_header) return;
    state_.on_ack(pkt.header, pkt.flow_key());
    if (!state_.is_sorted()) ++unsorted_;
}

void PdqController::ensure_epoch()
{
    if (epoch_armed_) return;
    epoch_armed_ = true;
    state_.rate_controller_epoch(net_.link(link_).queue_bytes());
    net_.sim().schedule_in(sim::scale(state_.rtt_avg(), 2.0), sim::EventKind::rate_controller_epoch, link_,
                           [this] { epoch(); });
}

void PdqController::epoch()
{
    const auto& l = net_.link(link_);
    state_.rate_controller_epoch(l.queue_bytes());
    if (state_.flows().empty() && l.queue_bytes() == 0 && state_.fallback_flow_count() == 0) {
        epoch_armed_ = false;
        return;
    }
    net_.sim().schedule_in(sim::scale(state_.rtt_avg(), 2.0), sim::EventKind::rate_controller_epoch, link_,
                           [this] { epoch(); });
}

BaselineEpoch::BaselineEpoch(Network& net, uint32_t link, BaselineConfig cfg, baselines::CapacityAdapter& adapter)
    : net_(net), link_(link), cfg_(cfg), adapter_(adapter), rtt_(cfg.nominal_rtt)
{
    adapter_.alpha = cfg.alpha;
    adapter_.beta = cfg.beta;
}

void BaselineEpoch::observe_rtt(SimTime rtt)
{
    if (rtt.ns() <= 0) return;
    const double est = static_cast<double>(rtt_.ns());
    rtt_ = sim::nanoseconds(std::llround(est + 0.125 * (static_cast<double>(rtt.ns()) - est)));
}

void BaselineEpoch::touch()
{
    if (armed_) return;
    armed_ = true;
    last_injected_ = net_.link(link_).bytes_injected();
    last_at_ = net_.sim().now();
    net_.sim().schedule_in(rtt_, sim::EventKind::rate_controller_epoch, link_, [this] { epoch(); });
}

void BaselineEpoch::epoch()
{
    const auto& l = net_.link(link_);
    const SimTime now = net_.sim().now();
    const double span = (now - last_at_).seconds();
    const double y = span > 0 ? static_cast<double>(l.bytes_injected() - last_injected_) * 8.0 / span : 0.0;
    last_injected_ = l.bytes_injected();
    last_at_ = now;
    adapter_.update(y, l.queue_bytes(), rtt_);
    if (y == 0 && l.queue_bytes() == 0) {
        armed_ = false;
        adapter_.effective = adapter_.link_capacity;
        return;
    }
    net_.sim().schedule_in(rtt_, sim::EventKind::rate_controller_epoch, link_, [this] { epoch(); });
}

RcpController::RcpController(Network& net, uint32_t link, BaselineConfig cfg)
    : state_(net.link(link).rate()), epoch_(net, link, cfg, state_.adapter())
{
}

void RcpController::on_forward(Packet& pkt, SimTime)
{
    if (pkt.kind == PacketKind::term) {
        state_.remove_flow(pkt.flow_key());
        return;
    }
    if (!carries_request(pkt.kind) || !pkt.has_header) return;
    pkt.header.rate = state_.allocate(pkt.flow_key(), pkt.header.rate);
    epoch_.touch();
}

void RcpController::on_reverse(Packet& pkt, SimTime)
{
    if (carries_feedback(pkt) && pkt.has_header) epoch_.observe_rtt(pkt.header.rtt);
}

D3Controller::D3Controller(Network& net, uint32_t link, BaselineConfig cfg)
    : state_(net.link(link).rate()), epoch_(net, link, cfg, state_.adapter())
{
}

void D3Controller::on_forward(Packet& pkt, SimTime)
{
    if (pkt.kind == PacketKind::term) {
        state_.release(pkt.flow_key());
        return;
    }
    if (!carries_request(pkt.kind) || !pkt.has_header || !pkt.rate_request) return;
    const double g = state_.request(pkt.flow_key(), pkt.demand);
    pkt.header.rate = std::min(pkt.header.rate, g);
    epoch_.touch();
}

void D3Controller::on_reverse(Packet& pkt, SimTime)
{
    if (carries_feedback(pkt) && pkt.has_header) epoch_.observe_rtt(pkt.header.rtt);
}

} // namespace pdq::net
