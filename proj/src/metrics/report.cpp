#include "pdq/metrics/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace pdq::metrics {

std::optional<SimTime> FlowRecord::fct() const
{
    if (!completion) return std::nullopt;
    return *completion - start;
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double MetricsReport::utilization(uint32_t link, uint64_t bin) const
{
    auto it = std::lower_bound(bins.begin(), bins.end(), std::pair{link, bin}, [](const LinkBin& b, const auto& key) {
        return std::pair{b.link, b.bin} < key;
    });
    if (it == bins.end() || it->link != link || it->bin != bin) return 0.0;
    const double rate = link < links.size() ? links[link].rate : 1e9;
    return it->bits / (rate * bin_width.seconds());
}

double MetricsReport::utilization(uint32_t link, SimTime from, SimTime to) const
{
    if (to <= from) return 0.0;
    const double rate = link < links.size() ? links[link].rate : 1e9;
    double bits = 0;
    for (const auto& b : bins) {
        if (b.link != link) continue;
        const SimTime lo = bin_width * static_cast<int64_t>(b.bin);
        const SimTime hi = lo + bin_width;
        const SimTime a = std::max(lo, from), z = std::min(hi, to);
        if (z <= a) continue;
        bits += b.bits * ((z - a) / bin_width);
    }
    return bits / (rate * (to - from).seconds());
}

uint32_t MetricsReport::max_queue_data_packets(uint32_t link, SimTime from, SimTime to) const
{
    uint32_t m = 0;
    for (const auto& q : queues)
        if (q.link == link && q.t >= from && q.t <= to) m = std::max(m, q.data_packets);
    return m;
}

Summary MetricsReport::summary() const
{
    Summary s;
    s.flows = flows.size();
    std::vector<double> fcts;
    for (const auto& f : flows) {
        if (auto t = f.fct()) fcts.push_back(t->ms());
        if (f.terminated) ++s.terminated;
        if (f.deadline) {
            ++s.deadline_flows;
            if (f.deadline_met()) ++s.deadlines_met;
        }
        s.probes += f.probes;
        s.retransmits += f.retransmits;
    }
    s.completed = fcts.size();
    if (!fcts.empty()) {
        double sum = 0;
        for (double v : fcts) sum += v;
        s.mean_fct_ms = sum / static_cast<double>(fcts.size());
        std::sort(fcts.begin(), fcts.end());
        const size_t n = fcts.size();
        s.median_fct_ms = n % 2 ? fcts[n / 2] : (fcts[n / 2 - 1] + fcts[n / 2]) / 2;
        // nearest-rank percentile
        size_t rank = static_cast<size_t>(std::ceil(0.99 * static_cast<double>(n)));
        s.p99_fct_ms = fcts[std::max<size_t>(rank, 1) - 1];
    }
    if (s.deadline_flows)
        s.application_throughput = static_cast<double>(s.deadlines_met) / static_cast<double>(s.deadline_flows);
    for (const auto& l : links) {
        s.drops += l.drops;
        s.random_drops += l.random_drops;
    }
    return s;
}

namespace {

std::string opt_ns(const std::optional<SimTime>& t) { return t ? std::to_string(t->ns()) : std::string(); }

std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot open " + p.string() + " for writing");
    return os;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    if (!is) throw IoError("cannot open " + p.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

uint64_t to_u64(const std::string& s, const std::filesystem::path& p)
{
    uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError(p.string() + ": bad integer '" + s + "'");
    return v;
}

int64_t to_i64(const std::string& s, const std::filesystem::path& p)
{
    int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError(p.string() + ": bad integer '" + s + "'");
    return v;
}

double to_double(const std::string& s, const std::filesystem::path& p)
{
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError(p.string() + ": bad number '" + s + "'");
    return v;
}

std::optional<SimTime> opt_time(const std::string& s, const std::filesystem::path& p)
{
    if (s.empty()) return std::nullopt;
    return SimTime::from_ns(to_i64(s, p));
}

void need(const std::vector<std::string>& row, size_t n, const std::filesystem::path& p)
{
    if (row.size() != n) throw IoError(p.string() + ": expected " + std::to_string(n) + " columns");
}

} // namespace

void write_flows_csv(const MetricsReport& r, std::ostream& os)
{
    os << "flow_id,src,dst,size_bytes,subflows,start_ns,deadline_ns,completion_ns,fct_ns,deadline_met,terminated,"
          "reason,payload_acked,probes,retransmits\n";
    for (const auto& f : r.flows) {
        const auto fct = f.fct();
        os << f.id << ',' << f.src << ',' << f.dst << ',' << f.size << ',' << f.subflows << ',' << f.start.ns() << ','
           << opt_ns(f.deadline) << ',' << opt_ns(f.completion) << ',' << opt_ns(fct) << ','
           << (f.deadline_met() ? 1 : 0) << ',' << (f.terminated ? 1 : 0) << ',' << f.reason << ',' << f.payload_acked
           << ',' << f.probes << ',' << f.retransmits << '\n';
    }
}

void write_links_csv(const MetricsReport& r, std::ostream& os)
{
    os << "link,src,dst,rate_bps,bytes_delivered,drops,random_drops\n";
    for (const auto& l : r.links)
        os << l.id << ',' << l.src << ',' << l.dst << ',' << format_double(l.rate) << ',' << l.bytes_delivered << ','
           << l.drops << ',' << l.random_drops << '\n';
}

void write_timeseries_csv(const MetricsReport& r, std::ostream& os)
{
    os << "link,bin_start_ns,bin_ns,bits,utilization\n";
    for (const auto& b : r.bins)
        os << b.link << ',' << (r.bin_width * static_cast<int64_t>(b.bin)).ns() << ',' << r.bin_width.ns() << ','
           << format_double(b.bits) << ',' << format_double(r.utilization(b.link, b.bin)) << '\n';
}

void write_queues_csv(const MetricsReport& r, std::ostream& os)
{
    os << "time_ns,link,bytes,packets,data_packets\n";
    for (const auto& q : r.queues)
        os << q.t.ns() << ',' << q.link << ',' << q.bytes << ',' << q.packets << ',' << q.data_packets << '\n';
}

void write_summary(const MetricsReport& r, std::ostream& os)
{
    const Summary s = r.summary();
    os << "end_time_ns=" << r.end_time.ns() << '\n';
    os << "bin_ns=" << r.bin_width.ns() << '\n';
    os << "events=" << r.events << '\n';
    os << "flows=" << s.flows << '\n';
    os << "completed=" << s.completed << '\n';
    os << "terminated=" << s.terminated << '\n';
    os << "deadline_flows=" << s.deadline_flows << '\n';
    os << "deadlines_met=" << s.deadlines_met << '\n';
    os << "application_throughput="
       << (s.application_throughput ? format_double(*s.application_throughput) : std::string("na")) << '\n';
    os << "mean_fct_ms=" << format_double(s.mean_fct_ms) << '\n';
    os << "median_fct_ms=" << format_double(s.median_fct_ms) << '\n';
    os << "p99_fct_ms=" << format_double(s.p99_fct_ms) << '\n';
    os << "drops=" << s.drops << '\n';
    os << "random_drops=" << s.random_drops << '\n';
    os << "probes=" << s.probes << '\n';
    os << "retransmits=" << s.retransmits << '\n';
}

void write_report(const MetricsReport& r, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    auto write = [&](const char* name, auto fn) {
        auto os = open_out(dir / name);
        fn(r, os);
        os.flush();
        if (!os) throw IoError("write failed: " + (dir / name).string());
    };
    write("flows.csv", [](const MetricsReport& m, std::ostream& o) { write_flows_csv(m, o); });
    write("links.csv", [](const MetricsReport& m, std::ostream& o) { write_links_csv(m, o); });
    write("links_timeseries.csv", [](const MetricsReport& m, std::ostream& o) { write_timeseries_csv(m, o); });
    write("queues.csv", [](const MetricsReport& m, std::ostream& o) { write_queues_csv(m, o); });
    write("summary.txt", [](const MetricsReport& m, std::ostream& o) { write_summary(m, o); });
}

MetricsReport read_report(const std::filesystem::path& dir)
{
    MetricsReport r;
    {
        const auto p = dir / "summary.txt";
        std::ifstream is(p);
        if (!is) throw IoError("cannot open " + p.string());
        std::map<std::string, std::string> kv;
        std::string line;
        while (std::getline(is, line)) {
            auto eq = line.find('=');
            if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        r.end_time = SimTime::from_ns(to_i64(kv["end_time_ns"], p));
        r.bin_width = SimTime::from_ns(to_i64(kv["bin_ns"], p));
        r.events = to_u64(kv["events"], p);
    }
    {
        const auto p = dir / "flows.csv";
        for (const auto& row : read_csv(p)) {
            need(row, 15, p);
            FlowRecord f;
            f.id = static_cast<uint32_t>(to_u64(row[0], p));
            f.src = static_cast<uint32_t>(to_u64(row[1], p));
            f.dst = static_cast<uint32_t>(to_u64(row[2], p));
            f.size = to_u64(row[3], p);
            f.subflows = static_cast<uint32_t>(to_u64(row[4], p));
            f.start = SimTime::from_ns(to_i64(row[5], p));
            f.deadline = opt_time(row[6], p);
            f.completion = opt_time(row[7], p);
            f.terminated = row[10] == "1";
            f.reason = row[11];
            f.payload_acked = to_u64(row[12], p);
            f.probes = to_u64(row[13], p);
            f.retransmits = to_u64(row[14], p);
            r.flows.push_back(std::move(f));
        }
    }
    {
        const auto p = dir / "links.csv";
        for (const auto& row : read_csv(p)) {
            need(row, 7, p);
            LinkRecord l;
            l.id = static_cast<uint32_t>(to_u64(row[0], p));
            l.src = static_cast<uint32_t>(to_u64(row[1], p));
            l.dst = static_cast<uint32_t>(to_u64(row[2], p));
            l.rate = to_double(row[3], p);
            l.bytes_delivered = to_u64(row[4], p);
            l.drops = to_u64(row[5], p);
            l.random_drops = to_u64(row[6], p);
            r.links.push_back(l);
        }
    }
    {
        const auto p = dir / "links_timeseries.csv";
        for (const auto& row : read_csv(p)) {
            need(row, 5, p);
            LinkBin b;
            b.link = static_cast<uint32_t>(to_u64(row[0], p));
            b.bin = static_cast<uint64_t>(to_i64(row[1], p) / r.bin_width.ns());
            b.bits = to_double(row[3], p);
            r.bins.push_back(b);
        }
    }
    {
        const auto p = dir / "queues.csv";
        for (const auto& row : read_csv(p)) {
            need(row, 5, p);
            QueueSample q;
            q.t = SimTime::from_ns(to_i64(row[0], p));
            q.link = static_cast<uint32_t>(to_u64(row[1], p));
            q.bytes = to_u64(row[2], p);
            q.packets = static_cast<uint32_t>(to_u64(row[3], p));
            q.data_packets = static_cast<uint32_t>(to_u64(row[4], p));
            r.queues.push_back(q);
        }
    }
    return r;
}

} // namespace pdq::metrics
