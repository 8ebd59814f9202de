#include "pdq/sim/simulator.hpp"

#include <cstdio>
#include <cstdlib>

namespace pdq::sim {

uint64_t Simulator::schedule(SimTime at, EventKind kind, uint32_t target, std::function<void()> action)
{
    if (at < now_) {
        std::fprintf(stderr, "pdqsim: event scheduled in the past (at=%lld ns, now=%lld ns, kind=%d)\n",
                     static_cast<long long>(at.ns()), static_cast<long long>(now_.ns()),
                     static_cast<int>(kind));
        std::abort();
    }
    const uint64_t seq = next_sequence_++;
    queue_.push(Event{at, seq, target, kind, std::move(action)});
    return seq;
}

void Simulator::run(SimTime until)
{
    stopped_ = false;
    while (!queue_.empty() && !stopped_) {
        if (queue_.top().fire_at > until) break;
        // top() is const; the action is moved out before pop.
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        now_ = ev.fire_at;
        if (++processed_ > ceiling_)
            throw LivelockError("event ceiling exceeded at " + to_string(now_));
        if (trace_) trace_(ev);
        if (ev.action) ev.action();
    }
    if (!stopped_ && until != SimTime::max() && now_ < until)
        now_ = until;
}

} // namespace pdq::sim
