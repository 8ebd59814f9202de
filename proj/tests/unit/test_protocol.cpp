#include <doctest.h>

#include "pdq/protocol/criticality.hpp"
#include "pdq/protocol/header.hpp"
#include "pdq/protocol/sender.hpp"

using namespace pdq;
using namespace pdq::protocol;
using sim::microseconds;
using sim::milliseconds;

TEST_CASE("criticality: deadline, then expected time, then id")
{
    const FlowSummary early{milliseconds(5), milliseconds(9), 9};
    const FlowSummary late{milliseconds(6), microseconds(1), 1};
    const FlowSummary none_small{std::nullopt, microseconds(1), 0};
    const FlowSummary none_big{std::nullopt, milliseconds(1), 0};
    const FlowSummary none_big_id{std::nullopt, milliseconds(1), 5};
    CHECK(more_critical(early, late));
    CHECK(more_critical(late, none_small));
    CHECK(more_critical(none_small, none_big));
    CHECK(more_critical(none_big, none_big_id));
    CHECK_FALSE(more_critical(none_big, none_big));
}

TEST_CASE("expected transmission time is remaining over maximal rate")
{
    CHECK(expected_tx_time_for(1'000'000, 1e9) == milliseconds(8));
    const auto s = make_sender_state(1, 125'000, 1e9, std::nullopt, microseconds(250), {});
    CHECK(s.expected_tx_time == milliseconds(1));
    const auto h = sender_header(s, {});
    CHECK(h.rate == 1e9);
    CHECK(h.pauseby == no_switch);
    CHECK(h.rtt == microseconds(250));
}

TEST_CASE("paused ack arms a probe after max(1, I) round trips")
{
    auto s = make_sender_state(1, 100'000, 1e9, std::nullopt, microseconds(200), {});
    SchedulingHeader h;
    h.rate = 0;
    h.pauseby = 3;
    h.inter_probe = 0.6;
    auto r = sender_on_ack(s, h, std::nullopt);
    CHECK(r.action == PacingAction::arm_probe);
    CHECK(r.probe_delay == microseconds(200));
    h.inter_probe = 2.5;
    r = sender_on_ack(s, h, std::nullopt);
    CHECK(r.probe_delay == microseconds(500));
}

TEST_CASE("accepted ack sets the rate and smooths rtt")
{
    auto s = make_sender_state(1, 100'000, 1e9, std::nullopt, microseconds(200), {});
    SchedulingHeader h;
    h.rate = 4e8;
    const auto r = sender_on_ack(s, h, microseconds(280));
    CHECK(r.action == PacingAction::send_data);
    CHECK(s.rate == 4e8);
    CHECK(s.rtt == microseconds(210)); // 200 + (280 - 200) / 8
    h.rate = 5e9;
    sender_on_ack(s, h, std::nullopt);
    CHECK(s.rate == 1e9);
}

TEST_CASE("early termination")
{
    auto s = make_sender_state(1, 125'000, 1e9, milliseconds(3), microseconds(250), {});
    s.rate = 1e9;
    CHECK(sender_check_early_termination(s, milliseconds(1)) == TerminationReason::none);
    CHECK(sender_check_early_termination(s, microseconds(2500)) == TerminationReason::insufficient_time);
    CHECK(sender_check_early_termination(s, microseconds(3001)) == TerminationReason::deadline_passed);
    s.remaining = 1000;
    refresh_expected_tx_time(s);
    s.rate = 0;
    CHECK(sender_check_early_termination(s, microseconds(2900)) == TerminationReason::paused_near_deadline);
    auto free = make_sender_state(2, 1, 1e9, std::nullopt, microseconds(250), {});
    CHECK(sender_check_early_termination(free, milliseconds(100)) == TerminationReason::none);
}

TEST_CASE("receiver caps the rate at its own line rate")
{
    SchedulingHeader h;
    h.rate = 1e9;
    CHECK(receiver_on_data(h, 5e8).rate == 5e8);
    CHECK(receiver_on_data(h, 2e9).rate == 1e9);
}

TEST_CASE("aging halves T every 100 ms at alpha 1")
{
    CHECK(aging_adjust(milliseconds(8), milliseconds(100), 1.0) == milliseconds(4));
    CHECK(aging_adjust(milliseconds(8), milliseconds(200), 1.0) == milliseconds(2));
    CHECK(aging_adjust(milliseconds(8), milliseconds(200), 0.0) == milliseconds(8));
}

TEST_CASE("size estimation advances in 50 KB steps")
{
    CHECK(criticality_from_sent_bytes(0) == 0);
    CHECK(criticality_from_sent_bytes(49'999) == 0);
    CHECK(criticality_from_sent_bytes(50'000) == 50'000);
    CHECK(criticality_from_sent_bytes(123'456) == 100'000);
    auto s = make_sender_state(1, 1'000'000, 1e9, std::nullopt, microseconds(250), {}, CriticalityMode::estimated_size);
    s.sent = 120'000;
    refresh_expected_tx_time(s);
    CHECK(s.expected_tx_time == expected_tx_time_for(100'000, 1e9));
}

TEST_CASE("probe overhead arithmetic for one paused flow")
{
    // 40 bytes every 150 us on 1 Gbps: 320 ns of wire time per 150 us
    const auto wire = sim::transmission_time(base_header_bytes, 1'000'000'000);
    CHECK(wire == sim::nanoseconds(320));
    const double share = wire / microseconds(150);
    CHECK(share == doctest::Approx(0.0021333).epsilon(1e-4));
    // the printed 2.13% is this share expressed per mille
    CHECK(share * 1000 == doctest::Approx(2.1333).epsilon(1e-4));
    CHECK(share * 100 == doctest::Approx(0.2133).epsilon(1e-3));
}
