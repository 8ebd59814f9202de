#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pdq/sim/time.hpp"

namespace pdq::sim {

enum class EventKind : uint8_t {
    packet_arrival,
    timer,
    rate_controller_epoch,
    probe_timer,
    scenario_hook,
    link_tx_done,
};

struct Event {
    SimTime fire_at;
    uint64_t sequence = 0;
    uint32_t target = 0;
    EventKind kind = EventKind::timer;
    std::function<void()> action;
};

/// Thrown when a run exceeds its event ceiling.
class LivelockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Simulator {
public:
    Simulator() = default;
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    SimTime now() const { return now_; }

    /// Aborts the process when `at` lies before the current clock.
    uint64_t schedule(SimTime at, EventKind kind, uint32_t target, std::function<void()> action);
    uint64_t schedule_in(SimTime delay, EventKind kind, uint32_t target, std::function<void()> action) {
        return schedule(now_ + delay, kind, target, std::move(action));
    }

    /// Processes every event with fire_at <= until, or until stop() is called.
    void run(SimTime until = SimTime::max());
    void stop() { stopped_ = true; }
    bool stopped() const { return stopped_; }

    size_t pending() const { return queue_.size(); }
    uint64_t processed() const { return processed_; }

    void set_event_ceiling(uint64_t ceiling) { ceiling_ = ceiling; }
    uint64_t event_ceiling() const { return ceiling_; }

    /// Called before each event's action runs.
    void set_trace(std::function<void(const Event&)> trace) { trace_ = std::move(trace); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_;
    uint64_t next_sequence_ = 0;
    uint64_t processed_ = 0;
    uint64_t ceiling_ = 2'000'000'000ULL;
    bool stopped_ = false;
    std::function<void(const Event&)> trace_;
};

} // namespace pdq::sim
