#include <doctest.h>

#include "pdq/protocol/header.hpp"

using namespace pdq;
using namespace pdq::protocol;

TEST_CASE("header sizes")
{
    CHECK(scheduling_header_bytes == 16);
    CHECK(data_payload_bytes == 1444);
    CHECK(control_packet_bytes == 56);
}

TEST_CASE("forward header round trip")
{
    SchedulingHeader h;
    h.rate = 7.5e8;
    h.pauseby = 23;
    h.deadline = sim::microseconds(12'345);
    h.expected_tx_time = sim::microseconds(800);
    const auto d = decode_forward(encode_forward(h));
    CHECK(d.rate == doctest::Approx(7.5e8));
    CHECK(d.pauseby == 23);
    REQUIRE(d.deadline);
    CHECK(*d.deadline == sim::microseconds(12'345));
    CHECK(d.expected_tx_time == sim::microseconds(800));
}

TEST_CASE("forward header without deadline or pause")
{
    SchedulingHeader h;
    h.rate = 1e9;
    const auto d = decode_forward(encode_forward(h));
    CHECK_FALSE(d.deadline);
    CHECK(d.pauseby == no_switch);
    CHECK_FALSE(d.paused());
}

TEST_CASE("reverse header carries inter-probe and rtt")
{
    SchedulingHeader h;
    h.rate = 0;
    h.pauseby = 4;
    h.inter_probe = 1.4;
    h.rtt = sim::microseconds(251);
    const auto d = decode_reverse(encode_reverse(h));
    CHECK(d.pauseby == 4);
    CHECK(d.inter_probe == doctest::Approx(1.4));
    CHECK(d.rtt == sim::microseconds(251));
    CHECK(d.paused());
}
