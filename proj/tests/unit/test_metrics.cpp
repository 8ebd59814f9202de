#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "pdq/metrics/report.hpp"

using namespace pdq;
using namespace pdq::metrics;
namespace fs = std::filesystem;

namespace {

MetricsReport sample()
{
    MetricsReport r;
    r.end_time = sim::milliseconds(5);
    r.events = 1234;
    FlowRecord a;
    a.id = 0;
    a.src = 1;
    a.dst = 2;
    a.size = 20'000;
    a.completion = sim::microseconds(400);
    a.probes = 3;
    FlowRecord b;
    b.id = 1;
    b.src = 3;
    b.dst = 2;
    b.size = 50'000;
    b.start = sim::microseconds(10);
    b.deadline = sim::milliseconds(3);
    b.terminated = true;
    b.reason = "insufficient_time";
    r.flows = {a, b};
    r.links = {{0, 1, 4, 1e9, 21'000, 0, 0}, {1, 4, 1, 1e9, 800, 1, 1}};
    r.bins = {{0, 0, 50'000.0}, {0, 3, 100'000.0}};
    r.queues = {{sim::microseconds(100), 0, 3000, 2, 2}};
    return r;
}

} // namespace

TEST_CASE("report round trip through a directory")
{
    const auto r = sample();
    const auto dir = fs::temp_directory_path() / "pdq_report_roundtrip";
    fs::remove_all(dir);
    write_report(r, dir);
    for (auto name : {"flows.csv", "links.csv", "links_timeseries.csv", "queues.csv", "summary.txt"})
        CHECK(fs::exists(dir / name));
    const auto back = read_report(dir);
    CHECK(back.flows == r.flows);
    CHECK(back.links == r.links);
    CHECK(back.bins == r.bins);
    CHECK(back.queues == r.queues);
    CHECK(back.end_time == r.end_time);
    fs::remove_all(dir);
}

TEST_CASE("utilization per bin and per window")
{
    const auto r = sample();
    CHECK(r.utilization(0, 0) == doctest::Approx(0.5));
    CHECK(r.utilization(0, 3) == doctest::Approx(1.0));
    CHECK(r.utilization(0, 1) == 0);
    CHECK(r.utilization(0, sim::SimTime{}, sim::microseconds(400)) == doctest::Approx(1.5 / 4));
    CHECK(r.max_queue_data_packets(0) == 2);
    CHECK(r.max_queue_data_packets(1) == 0);
}

TEST_CASE("summary counts")
{
    const auto s = sample().summary();
    CHECK(s.flows == 2);
    CHECK(s.completed == 1);
    CHECK(s.terminated == 1);
    CHECK(s.deadline_flows == 1);
    CHECK(s.deadlines_met == 0);
    REQUIRE(s.application_throughput);
    CHECK(*s.application_throughput == 0);
    CHECK(s.mean_fct_ms == doctest::Approx(0.4));
    CHECK(s.probes == 3);
    CHECK(s.random_drops == 1);
}

TEST_CASE("flows csv layout")
{
    std::ostringstream os;
    write_flows_csv(sample(), os);
    std::istringstream is(os.str());
    std::string header, first, second;
    std::getline(is, header);
    std::getline(is, first);
    std::getline(is, second);
    CHECK(header == "flow_id,src,dst,size_bytes,subflows,start_ns,deadline_ns,completion_ns,fct_ns,deadline_met,"
                    "terminated,reason,payload_acked,probes,retransmits");
    CHECK(first.rfind("0,1,2,20000,1,0,,400000,400000,1,0,,", 0) == 0);
    CHECK(second.find("insufficient_time") != std::string::npos);
}

TEST_CASE("doubles print in shortest round-trip form")
{
    for (double v : {0.1, 1e9, 1.0 / 3, 2.5e-7, 123456.789}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(1e9) == "1e+09");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("missing report directory is an error")
{
    CHECK_THROWS_AS(read_report(fs::temp_directory_path() / "pdq_no_such_report"), IoError);
}
