#include "pdq/protocol/header.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace pdq::protocol {

namespace {

void put32(WireHeader& w, size_t at, uint32_t v)
{
    w[at] = static_cast<uint8_t>(v >> 24);
    w[at + 1] = static_cast<uint8_t>(v >> 16);
    w[at + 2] = static_cast<uint8_t>(v >> 8);
    w[at + 3] = static_cast<uint8_t>(v);
}

uint32_t get32(const WireHeader& w, size_t at)
{
    return (uint32_t{w[at]} << 24) | (uint32_t{w[at + 1]} << 16) | (uint32_t{w[at + 2]} << 8) | w[at + 3];
}

uint32_t clamp32(double v)
{
    if (!(v > 0)) return 0;
    if (v >= 4294967295.0) return std::numeric_limits<uint32_t>::max();
    return static_cast<uint32_t>(std::llround(v));
}

constexpr uint32_t no_deadline_word = 0xFFFFFFFFu;

void put_common(WireHeader& w, const SchedulingHeader& h)
{
    put32(w, 0, clamp32(h.rate / 1e3));
    put32(w, 4, static_cast<uint32_t>(h.pauseby + 1));
}

void get_common(const WireHeader& w, SchedulingHeader& h)
{
    h.rate = static_cast<double>(get32(w, 0)) * 1e3;
    h.pauseby = static_cast<SwitchId>(get32(w, 4)) - 1;
}

} // namespace

WireHeader encode_forward(const SchedulingHeader& h)
{
    WireHeader w{};
    put_common(w, h);
    put32(w, 8, h.deadline ? std::min(clamp32(h.deadline->us()), no_deadline_word - 1) : no_deadline_word);
    put32(w, 12, clamp32(static_cast<double>(h.expected_tx_time.ns()) / 100.0));
    return w;
}

SchedulingHeader decode_forward(const WireHeader& w)
{
    SchedulingHeader h;
    get_common(w, h);
    const uint32_t d = get32(w, 8);
    if (d != no_deadline_word) h.deadline = sim::microseconds(d);
    h.expected_tx_time = sim::nanoseconds(int64_t{get32(w, 12)} * 100);
    return h;
}

WireHeader encode_reverse(const SchedulingHeader& h)
{
    WireHeader w{};
    put_common(w, h);
    put32(w, 8, std::bit_cast<uint32_t>(static_cast<float>(h.inter_probe)));
    put32(w, 12, clamp32(static_cast<double>(h.rtt.ns())));
    return w;
}

SchedulingHeader decode_reverse(const WireHeader& w)
{
    SchedulingHeader h;
    get_common(w, h);
    h.inter_probe = static_cast<double>(std::bit_cast<float>(get32(w, 8)));
    h.rtt = sim::nanoseconds(get32(w, 12));
    return h;
}

} // namespace pdq::protocol
