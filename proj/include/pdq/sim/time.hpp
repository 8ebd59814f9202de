#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace pdq::sim {

/// Integer nanoseconds since simulation start. Doubles as a duration type.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ns(int64_t ns) { return SimTime{ns}; }
    static constexpr SimTime zero() { return SimTime{0}; }
    static constexpr SimTime max() { return SimTime{std::numeric_limits<int64_t>::max()}; }

    constexpr int64_t ns() const { return ns_; }
    constexpr double us() const { return static_cast<double>(ns_) / 1e3; }
    constexpr double ms() const { return static_cast<double>(ns_) / 1e6; }
    constexpr double seconds() const { return static_cast<double>(ns_) / 1e9; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime& operator+=(SimTime o) { ns_ += o.ns_; return *this; }
    constexpr SimTime& operator-=(SimTime o) { ns_ -= o.ns_; return *this; }
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ns_ + b.ns_}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ns_ - b.ns_}; }
    friend constexpr SimTime operator*(SimTime a, int64_t k) { return SimTime{a.ns_ * k}; }
    friend constexpr SimTime operator*(int64_t k, SimTime a) { return SimTime{a.ns_ * k}; }
    friend constexpr double operator/(SimTime a, SimTime b) {
        return static_cast<double>(a.ns_) / static_cast<double>(b.ns_);
    }

private:
    constexpr explicit SimTime(int64_t ns) : ns_(ns) {}
    int64_t ns_ = 0;
};

constexpr SimTime nanoseconds(int64_t v) { return SimTime::from_ns(v); }
constexpr SimTime microseconds(int64_t v) { return SimTime::from_ns(v * 1'000); }
constexpr SimTime milliseconds(int64_t v) { return SimTime::from_ns(v * 1'000'000); }

inline SimTime seconds_f(double s) { return SimTime::from_ns(std::llround(s * 1e9)); }
inline SimTime microseconds_f(double us) { return SimTime::from_ns(std::llround(us * 1e3)); }
inline SimTime milliseconds_f(double ms) { return SimTime::from_ns(std::llround(ms * 1e6)); }

/// Scales a duration by a real factor, rounding to the nearest nanosecond.
inline SimTime scale(SimTime t, double factor) {
    return SimTime::from_ns(std::llround(static_cast<double>(t.ns()) * factor));
}

/// Time to serialize `bytes` onto a link of `rate_bps`, rounded up to whole ns.
constexpr SimTime transmission_time(uint64_t bytes, uint64_t rate_bps) {
    const uint64_t bits = bytes * 8;
    return SimTime::from_ns(static_cast<int64_t>((bits * 1'000'000'000ULL + rate_bps - 1) / rate_bps));
}

inline std::string to_string(SimTime t) { return std::to_string(t.ns()) + "ns"; }

} // namespace pdq::sim
