#include "pdq/scenario/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "pdq/metrics/report.hpp"

namespace pdq::scenario {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto z = s.find_last_not_of(" \t\r");
    return s.substr(a, z - a + 1);
}

std::string lower(std::string s)
{
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_double(const std::string& v)
{
    double d = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), d);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(d))
        throw std::invalid_argument("expected a number, got '" + v + "'");
    return d;
}

uint64_t parse_u64(const std::string& v)
{
    uint64_t u = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), u);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    return u;
}

uint32_t parse_u32(const std::string& v)
{
    const uint64_t u = parse_u64(v);
    if (u > UINT32_MAX) throw std::invalid_argument("value too large: " + v);
    return static_cast<uint32_t>(u);
}

bool parse_bool(const std::string& v)
{
    const auto l = lower(v);
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    throw std::invalid_argument("expected true/false, got '" + v + "'");
}

double positive(double d)
{
    if (!(d > 0)) throw std::invalid_argument("must be positive");
    return d;
}

double non_negative(double d)
{
    if (d < 0) throw std::invalid_argument("must not be negative");
    return d;
}

SimTime time_in(double v, double unit_ns) { return SimTime::from_ns(std::llround(v * unit_ns)); }
std::string time_out(SimTime t, double unit_ns) { return metrics::format_double(static_cast<double>(t.ns()) / unit_ns); }
std::string b(bool v) { return v ? "true" : "false"; }
std::string d(double v) { return metrics::format_double(v); }
std::string u(uint64_t v) { return std::to_string(v); }

template <class E>
E parse_enum(const std::string& v, std::initializer_list<std::pair<const char*, E>> names)
{
    std::string options;
    for (const auto& [n, e] : names) {
        if (lower(v) == n) return e;
        options += options.empty() ? n : std::string("|") + n;
    }
    throw std::invalid_argument("unknown value '" + v + "' (expected " + options + ")");
}

template <class E>
std::string enum_name(E e, std::initializer_list<std::pair<const char*, E>> names)
{
    for (const auto& [n, x] : names)
        if (x == e) return n;
    return "?";
}

const std::initializer_list<std::pair<const char*, net::Protocol>> protocol_names = {
    {"pdq", net::Protocol::pdq}, {"rcp", net::Protocol::rcp}, {"d3", net::Protocol::d3}};
const std::initializer_list<std::pair<const char*, TopologyKind>> topology_names = {
    {"single_bottleneck", TopologyKind::single_bottleneck}, {"tree", TopologyKind::tree},
    {"fat_tree", TopologyKind::fat_tree}, {"parallel_paths", TopologyKind::parallel_paths},
    {"chain", TopologyKind::chain}};
const std::initializer_list<std::pair<const char*, WorkloadKind>> workload_names = {
    {"scenario1", WorkloadKind::scenario1},     {"scenario2", WorkloadKind::scenario2},
    {"aggregation", WorkloadKind::aggregation}, {"stride", WorkloadKind::stride},
    {"staggered", WorkloadKind::staggered},     {"permutation", WorkloadKind::permutation}};
const std::initializer_list<std::pair<const char*, protocol::CriticalityMode>> criticality_names = {
    {"exact", protocol::CriticalityMode::exact_size},
    {"estimated", protocol::CriticalityMode::estimated_size},
    {"random", protocol::CriticalityMode::random}};
const std::initializer_list<std::pair<const char*, protocol::ListCapacityMode>> capacity_names = {
    {"unbounded", protocol::ListCapacityMode::unbounded},
    {"kappa", protocol::ListCapacityMode::kappa},
    {"two_kappa", protocol::ListCapacityMode::two_kappa}};
const std::initializer_list<std::pair<const char*, LossScope>> scope_names = {{"bottleneck", LossScope::bottleneck},
                                                                              {"all", LossScope::all}};

struct Key {
    const char* name;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<Key>& keys()
{
    using C = ScenarioConfig;
    using S = const std::string&;
    static const std::vector<Key> table = {
        {"scenario.name", [](C& c, S v) { c.name = v; }, [](const C& c) { return c.name; }},
        {"scenario.protocol", [](C& c, S v) { c.protocol = parse_enum(v, protocol_names); },
         [](const C& c) { return enum_name(c.protocol, protocol_names); }},
        {"scenario.seed", [](C& c, S v) { c.seed = parse_u64(v); }, [](const C& c) { return u(c.seed); }},
        {"scenario.duration_ms", [](C& c, S v) { c.duration = time_in(positive(parse_double(v)), 1e6); },
         [](const C& c) { return time_out(c.duration, 1e6); }},
        {"scenario.loss_rate",
         [](C& c, S v) {
             const double p = parse_double(v);
             if (p < 0 || p >= 1) throw std::invalid_argument("must lie in [0, 1)");
             c.loss_rate = p;
         },
         [](const C& c) { return d(c.loss_rate); }},
        {"scenario.loss_scope", [](C& c, S v) { c.loss_scope = parse_enum(v, scope_names); },
         [](const C& c) { return enum_name(c.loss_scope, scope_names); }},
        {"scenario.nominal_rtt_us", [](C& c, S v) { c.nominal_rtt = time_in(non_negative(parse_double(v)), 1e3); },
         [](const C& c) { return time_out(c.nominal_rtt, 1e3); }},
        {"scenario.event_ceiling", [](C& c, S v) { c.event_ceiling = parse_u64(v); },
         [](const C& c) { return u(c.event_ceiling); }},

        {"topology.kind", [](C& c, S v) { c.topology.kind = parse_enum(v, topology_names); },
         [](const C& c) { return enum_name(c.topology.kind, topology_names); }},
        {"topology.senders", [](C& c, S v) { c.topology.senders = parse_u32(v); },
         [](const C& c) { return u(c.topology.senders); }},
        {"topology.k",
         [](C& c, S v) {
             c.topology.k = parse_u32(v);
             if (c.topology.k < 2 || c.topology.k % 2) throw std::invalid_argument("must be even and >= 2");
         },
         [](const C& c) { return u(c.topology.k); }},
        {"topology.paths",
         [](C& c, S v) {
             c.topology.paths = parse_u32(v);
             if (c.topology.paths == 0) throw std::invalid_argument("must be positive");
         },
         [](const C& c) { return u(c.topology.paths); }},
        {"topology.switches",
         [](C& c, S v) {
             c.topology.switches = parse_u32(v);
             if (c.topology.switches == 0) throw std::invalid_argument("must be positive");
         },
         [](const C& c) { return u(c.topology.switches); }},
        {"topology.hosts_per_switch",
         [](C& c, S v) {
             c.topology.hosts_per_switch = parse_u32(v);
             if (c.topology.hosts_per_switch == 0) throw std::invalid_argument("must be positive");
         },
         [](const C& c) { return u(c.topology.hosts_per_switch); }},
        {"topology.rate_gbps", [](C& c, S v) { c.topology.link.rate_bps = positive(parse_double(v)) * 1e9; },
         [](const C& c) { return d(c.topology.link.rate_bps / 1e9); }},
        {"topology.propagation_us",
         [](C& c, S v) { c.topology.link.propagation_delay = time_in(non_negative(parse_double(v)), 1e3); },
         [](const C& c) { return time_out(c.topology.link.propagation_delay, 1e3); }},
        {"topology.processing_us",
         [](C& c, S v) { c.topology.link.processing_delay = time_in(non_negative(parse_double(v)), 1e3); },
         [](const C& c) { return time_out(c.topology.link.processing_delay, 1e3); }},
        {"topology.queue_bytes",
         [](C& c, S v) {
             c.topology.link.queue_capacity = parse_u64(v);
             if (c.topology.link.queue_capacity < protocol::mss_bytes)
                 throw std::invalid_argument("must hold at least one full packet");
         },
         [](const C& c) { return u(c.topology.link.queue_capacity); }},

        {"workload.kind", [](C& c, S v) { c.workload.kind = parse_enum(v, workload_names); },
         [](const C& c) { return enum_name(c.workload.kind, workload_names); }},
        {"workload.flows",
         [](C& c, S v) {
             c.workload.flows = parse_u32(v);
             if (c.workload.flows == 0) throw std::invalid_argument("must be positive");
         },
         [](const C& c) { return u(c.workload.flows); }},
        {"workload.stride", [](C& c, S v) { c.workload.stride = parse_u32(v); },
         [](const C& c) { return u(c.workload.stride); }},
        {"workload.staggered_p",
         [](C& c, S v) {
             const double p = parse_double(v);
             if (p < 0 || p > 1) throw std::invalid_argument("must lie in [0, 1]");
             c.workload.staggered_p = p;
         },
         [](const C& c) { return d(c.workload.staggered_p); }},
        {"workload.flows_per_host",
         [](C& c, S v) {
             c.workload.flows_per_host = parse_u32(v);
             if (c.workload.flows_per_host == 0) throw std::invalid_argument("must be positive");
         },
         [](const C& c) { return u(c.workload.flows_per_host); }},
        {"workload.aggregator",
         [](C& c, S v) {
             if (lower(v) == "auto")
                 c.workload.aggregator.reset();
             else
                 c.workload.aggregator = parse_u32(v);
         },
         [](const C& c) { return c.workload.aggregator ? u(*c.workload.aggregator) : std::string("auto"); }},
        {"workload.deadlines", [](C& c, S v) { c.workload.deadlines = parse_bool(v); },
         [](const C& c) { return b(c.workload.deadlines); }},
        {"workload.mean_size_bytes",
         [](C& c, S v) { c.workload.mean_size = static_cast<uint64_t>(positive(static_cast<double>(parse_u64(v)))); },
         [](const C& c) { return u(c.workload.mean_size); }},
        {"workload.min_size_bytes",
         [](C& c, S v) { c.workload.min_size = static_cast<uint64_t>(positive(static_cast<double>(parse_u64(v)))); },
         [](const C& c) { return u(c.workload.min_size); }},
        {"workload.deadline_size_lo_bytes",
         [](C& c, S v) {
             c.workload.deadline_size_lo = static_cast<uint64_t>(positive(static_cast<double>(parse_u64(v))));
         },
         [](const C& c) { return u(c.workload.deadline_size_lo); }},
        {"workload.deadline_size_hi_bytes",
         [](C& c, S v) {
             c.workload.deadline_size_hi = static_cast<uint64_t>(positive(static_cast<double>(parse_u64(v))));
         },
         [](const C& c) { return u(c.workload.deadline_size_hi); }},
        {"workload.deadline_mean_ms",
         [](C& c, S v) { c.workload.deadline_mean = time_in(positive(parse_double(v)), 1e6); },
         [](const C& c) { return time_out(c.workload.deadline_mean, 1e6); }},
        {"workload.deadline_floor_ms",
         [](C& c, S v) { c.workload.deadline_floor = time_in(non_negative(parse_double(v)), 1e6); },
         [](const C& c) { return time_out(c.workload.deadline_floor, 1e6); }},
        {"workload.start_ms", [](C& c, S v) { c.workload.start = time_in(non_negative(parse_double(v)), 1e6); },
         [](const C& c) { return time_out(c.workload.start, 1e6); }},
        {"workload.criticality", [](C& c, S v) { c.workload.criticality = parse_enum(v, criticality_names); },
         [](const C& c) { return enum_name(c.workload.criticality, criticality_names); }},
        {"workload.short_flows", [](C& c, S v) { c.workload.short_flows = parse_u32(v); },
         [](const C& c) { return u(c.workload.short_flows); }},
        {"workload.long_size_bytes",
         [](C& c, S v) { c.workload.long_size = static_cast<uint64_t>(positive(static_cast<double>(parse_u64(v)))); },
         [](const C& c) { return u(c.workload.long_size); }},
        {"workload.burst_ms", [](C& c, S v) { c.workload.burst_at = time_in(non_negative(parse_double(v)), 1e6); },
         [](const C& c) { return time_out(c.workload.burst_at, 1e6); }},

        {"pdq.early_start_k", [](C& c, S v) { c.pdq.early_start_k = non_negative(parse_double(v)); },
         [](const C& c) { return d(c.pdq.early_start_k); }},
        {"pdq.probing_x", [](C& c, S v) { c.pdq.probing_x = non_negative(parse_double(v)); },
         [](const C& c) { return d(c.pdq.probing_x); }},
        {"pdq.suppressed_probing", [](C& c, S v) { c.pdq.suppressed_probing = parse_bool(v); },
         [](const C& c) { return b(c.pdq.suppressed_probing); }},
        {"pdq.dampening", [](C& c, S v) { c.pdq.dampening = parse_bool(v); },
         [](const C& c) { return b(c.pdq.dampening); }},
        {"pdq.dampening_rtts", [](C& c, S v) { c.pdq.dampening_rtts = non_negative(parse_double(v)); },
         [](const C& c) { return d(c.pdq.dampening_rtts); }},
        {"pdq.capacity_mode", [](C& c, S v) { c.pdq.capacity_mode = parse_enum(v, capacity_names); },
         [](const C& c) { return enum_name(c.pdq.capacity_mode, capacity_names); }},
        {"pdq.hard_cap",
         [](C& c, S v) {
             c.pdq.hard_cap = parse_u64(v);
             if (c.pdq.hard_cap == 0) throw std::invalid_argument("must be positive");
         },
         [](const C& c) { return u(c.pdq.hard_cap); }},
        {"pdq.rate_controller", [](C& c, S v) { c.pdq.rate_controller = parse_bool(v); },
         [](const C& c) { return b(c.pdq.rate_controller); }},
        {"pdq.early_termination", [](C& c, S v) { c.early_termination = parse_bool(v); },
         [](const C& c) { return b(c.early_termination); }},
        {"pdq.aging_alpha", [](C& c, S v) { c.aging_alpha = non_negative(parse_double(v)); },
         [](const C& c) { return d(c.aging_alpha); }},
        {"pdq.rto_rtts", [](C& c, S v) { c.rto_rtts = positive(parse_double(v)); },
         [](const C& c) { return d(c.rto_rtts); }},

        {"baseline.alpha", [](C& c, S v) { c.baseline_alpha = non_negative(parse_double(v)); },
         [](const C& c) { return d(c.baseline_alpha); }},
        {"baseline.beta", [](C& c, S v) { c.baseline_beta = non_negative(parse_double(v)); },
         [](const C& c) { return d(c.baseline_beta); }},

        {"multipath.subflows",
         [](C& c, S v) {
             c.subflows = parse_u32(v);
             if (c.subflows == 0 || c.subflows > 255) throw std::invalid_argument("must lie in [1, 255]");
         },
         [](const C& c) { return u(c.subflows); }},
        {"multipath.shift_period_rtts", [](C& c, S v) { c.shift_period_rtts = positive(parse_double(v)); },
         [](const C& c) { return d(c.shift_period_rtts); }},

        {"output.bin_us", [](C& c, S v) { c.bin_width = time_in(positive(parse_double(v)), 1e3); },
         [](const C& c) { return time_out(c.bin_width, 1e3); }},
        {"output.queues", [](C& c, S v) { c.sample_queues = parse_bool(v); },
         [](const C& c) { return b(c.sample_queues); }},
    };
    return table;
}

} // namespace

std::string to_string(net::Protocol p) { return enum_name(p, protocol_names); }

RawConfig parse_ini(std::istream& is, const std::string& source)
{
    RawConfig raw;
    std::string line, section;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const std::string where = source + ":" + std::to_string(n);
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError(where, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(where, "missing key");
        if (section.empty()) throw ConfigError(where, "key '" + key + "' outside any section");
        const std::string full = section + "." + key;
        if (raw.entries.count(full)) throw ConfigError(where, "duplicate key '" + full + "'");
        raw.entries[full] = {trim(line.substr(eq + 1)), where};
    }
    return raw;
}

RawConfig parse_ini_file(const std::filesystem::path& p)
{
    std::ifstream is(p);
    if (!is) throw ConfigError({}, "cannot open " + p.string());
    return parse_ini(is, p.string());
}

void apply_override(RawConfig& raw, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    const std::string key = lower(trim(assignment.substr(0, eq)));
    if (eq == std::string::npos || key.find('.') == std::string::npos)
        throw ConfigError("--set " + assignment, "expected section.key=value");
    raw.entries[key] = {trim(assignment.substr(eq + 1)), "--set " + key};
}

ScenarioConfig from_raw(const RawConfig& raw)
{
    ScenarioConfig c;
    for (const auto& [name, entry] : raw.entries) {
        const Key* k = nullptr;
        for (const auto& cand : keys())
            if (name == cand.name) k = &cand;
        if (!k) throw ConfigError(entry.where, "unknown key '" + name + "'");
        try {
            k->set(c, entry.value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(entry.where, name + ": " + e.what());
        }
    }
    auto where = [&](const char* key) {
        auto it = raw.entries.find(key);
        return it == raw.entries.end() ? std::string() : it->second.where;
    };
    const auto& w = c.workload;
    if (w.kind == WorkloadKind::scenario1 || w.kind == WorkloadKind::scenario2) {
        if (c.topology.kind != TopologyKind::single_bottleneck)
            throw ConfigError(where("workload.kind"), "scenario workloads need topology.kind = single_bottleneck");
        const uint32_t need = w.kind == WorkloadKind::scenario1 ? w.flows : w.short_flows + 1;
        if (c.topology.senders && c.topology.senders < need)
            throw ConfigError(where("topology.senders"), "workload needs " + std::to_string(need) + " senders");
    }
    if (w.deadline_size_lo > w.deadline_size_hi)
        throw ConfigError(where("workload.deadline_size_lo_bytes"), "deadline_size_lo_bytes exceeds deadline_size_hi_bytes");
    if (w.min_size > w.mean_size)
        throw ConfigError(where("workload.min_size_bytes"), "min_size_bytes exceeds mean_size_bytes");
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& p, const std::vector<std::string>& overrides)
{
    RawConfig raw = parse_ini_file(p);
    for (const auto& o : overrides) apply_override(raw, o);
    return from_raw(raw);
}

std::string to_ini(const ScenarioConfig& c)
{
    std::ostringstream os;
    std::string section;
    for (const auto& k : keys()) {
        const std::string name = k.name;
        const auto dot = name.find('.');
        if (name.substr(0, dot) != section) {
            if (!section.empty()) os << '\n';
            section = name.substr(0, dot);
            os << '[' << section << "]\n";
        }
        os << name.substr(dot + 1) << " = " << k.get(c) << '\n';
    }
    return os.str();
}

} // namespace pdq::scenario
