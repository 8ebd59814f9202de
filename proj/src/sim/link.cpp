#include "pdq/sim/link.hpp"

namespace pdq::sim {

std::string_view to_string(PacketKind k)
{
    switch (k) {
    case PacketKind::syn: return "SYN";
    case PacketKind::syn_ack: return "SYN-ACK";
    case PacketKind::data: return "DATA";
    case PacketKind::ack: return "ACK";
    case PacketKind::probe: return "PROBE";
    case PacketKind::term: return "TERM";
    }
    return "?";
}

Link::Link(uint32_t id, uint32_t src, uint32_t dst, LinkParams params)
    : id_(id), src_(src), dst_(dst), params_(params)
{
}

uint64_t Link::bytes_in_flight() const
{
    return queued_bytes_ + (in_service_ ? in_service_->size : 0) + propagating_bytes_;
}

EnqueueResult Link::enqueue(Simulator& sim, Packet pkt)
{
    injected_ += pkt.size;
    const SimTime now = sim.now();
    if (loss_ > 0 && loss_rng_ && loss_rng_->bernoulli(loss_)) {
        ++drops_;
        ++random_drops_;
        dropped_bytes_ += pkt.size;
        if (observer_) observer_->on_drop(*this, pkt, now, true);
        return EnqueueResult::dropped;
    }
    const uint64_t occupancy = queued_bytes_ + (in_service_ ? in_service_->size : 0);
    if (occupancy + pkt.size > params_.queue_capacity) {
        ++drops_;
        dropped_bytes_ += pkt.size;
        if (observer_) observer_->on_drop(*this, pkt, now, false);
        return EnqueueResult::dropped;
    }
    queued_bytes_ += pkt.size;
    if (pkt.kind == PacketKind::data) ++queued_data_;
    queue_.push_back(std::move(pkt));
    if (observer_) observer_->on_enqueue(*this, queue_.back(), now);
    if (!in_service_) start_transmission(sim);
    return EnqueueResult::enqueued;
}

void Link::start_transmission(Simulator& sim)
{
    in_service_ = std::move(queue_.front());
    queue_.pop_front();
    queued_bytes_ -= in_service_->size;
    if (in_service_->kind == PacketKind::data) --queued_data_;
    const SimTime end = sim.now() + transmission_time(in_service_->size, static_cast<uint64_t>(params_.rate_bps));
    if (observer_) observer_->on_tx_start(*this, *in_service_, sim.now(), end);
    sim.schedule(end, EventKind::link_tx_done, id_, [this, &sim] { transmission_done(sim); });
}

void Link::transmission_done(Simulator& sim)
{
    Packet pkt = std::move(*in_service_);
    in_service_.reset();
    transmitted_ += pkt.size;
    propagating_bytes_ += pkt.size;
    const SimTime arrive = sim.now() + params_.propagation_delay + params_.processing_delay;
    sim.schedule(arrive, EventKind::packet_arrival, dst_, [this, p = std::move(pkt), &sim]() mutable {
        propagating_bytes_ -= p.size;
        delivered_ += p.size;
        if (observer_) observer_->on_deliver(*this, p, sim.now());
        if (delivery_) delivery_(std::move(p));
    });
    if (!queue_.empty()) start_transmission(sim);
}

} // namespace pdq::sim
