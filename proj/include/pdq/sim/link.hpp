#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>

#include "pdq/sim/packet.hpp"
#include "pdq/sim/rng.hpp"
#include "pdq/sim/simulator.hpp"

namespace pdq::sim {

struct LinkParams {
    double rate_bps = 1e9;
    SimTime propagation_delay = nanoseconds(100);
    SimTime processing_delay = microseconds(25);
    uint64_t queue_capacity = 4'000'000; // bytes, includes the packet in service
};

class Link;

/// Optional hooks; all default to no-ops.
class LinkObserver {
public:
    virtual ~LinkObserver() = default;
    virtual void on_enqueue(const Link&, const Packet&, SimTime) {}
    virtual void on_drop(const Link&, const Packet&, SimTime, bool /*random_loss*/) {}
    virtual void on_tx_start(const Link&, const Packet&, SimTime /*start*/, SimTime /*end*/) {}
    virtual void on_deliver(const Link&, const Packet&, SimTime) {}
};

enum class EnqueueResult { enqueued, dropped };

class Link {
public:
    using Delivery = std::function<void(Packet&&)>;

    Link(uint32_t id, uint32_t src, uint32_t dst, LinkParams params);

    uint32_t id() const { return id_; }
    uint32_t src() const { return src_; }
    uint32_t dst() const { return dst_; }
    const LinkParams& params() const { return params_; }
    double rate() const { return params_.rate_bps; }

    void set_delivery(Delivery d) { delivery_ = std::move(d); }
    void set_observer(LinkObserver* o) { observer_ = o; }
    /// Uniform random drop applied at enqueue.
    void set_loss(double probability, Rng* rng) { loss_ = probability; loss_rng_ = rng; }
    double loss() const { return loss_; }

    EnqueueResult enqueue(Simulator& sim, Packet pkt);

    /// Bytes waiting behind the transmitter.
    uint64_t queue_bytes() const { return queued_bytes_; }
    uint32_t queue_packets() const { return static_cast<uint32_t>(queue_.size()); }
    uint32_t queue_data_packets() const { return queued_data_; }
    bool busy() const { return in_service_.has_value(); }

    uint64_t bytes_injected() const { return injected_; }
    uint64_t bytes_delivered() const { return delivered_; }
    uint64_t bytes_dropped() const { return dropped_bytes_; }
    uint64_t bytes_in_flight() const;
    uint64_t drop_count() const { return drops_; }
    uint64_t random_drop_count() const { return random_drops_; }
    uint64_t bytes_transmitted() const { return transmitted_; }

private:
    void start_transmission(Simulator& sim);
    void transmission_done(Simulator& sim);

    uint32_t id_, src_, dst_;
    LinkParams params_;
    Delivery delivery_;
    LinkObserver* observer_ = nullptr;
    double loss_ = 0.0;
    Rng* loss_rng_ = nullptr;

    std::deque<Packet> queue_;
    std::optional<Packet> in_service_;
    uint64_t queued_bytes_ = 0;
    uint32_t queued_data_ = 0;
    uint64_t propagating_bytes_ = 0;

    uint64_t injected_ = 0, delivered_ = 0, dropped_bytes_ = 0, transmitted_ = 0;
    uint64_t drops_ = 0, random_drops_ = 0;
};

} // namespace pdq::sim
