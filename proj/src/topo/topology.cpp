#include "pdq/topo/topology.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "pdq/protocol/header.hpp"

namespace pdq::topo {

uint32_t Topology::add_node(NodeKind kind, std::string name)
{
    const auto id = static_cast<uint32_t>(nodes_.size());
    if (name.empty()) name = (kind == NodeKind::host ? "h" : "s") + std::to_string(id);
    nodes_.push_back({id, kind, std::move(name)});
    out_.emplace_back();
    path_cache_.clear();
    return id;
}

std::pair<uint32_t, uint32_t> Topology::add_duplex(uint32_t a, uint32_t b, const LinkParams& params)
{
    if (a >= nodes_.size() || b >= nodes_.size() || a == b) throw TopologyError("bad link endpoints");
    const auto fwd = static_cast<uint32_t>(links_.size());
    links_.push_back({fwd, a, b, params});
    links_.push_back({fwd + 1, b, a, params});
    out_[a].push_back(fwd);
    out_[b].push_back(fwd + 1);
    path_cache_.clear();
    return {fwd, fwd + 1};
}

std::vector<uint32_t> Topology::hosts() const
{
    std::vector<uint32_t> h;
    for (const auto& n : nodes_)
        if (n.kind == NodeKind::host) h.push_back(n.id);
    return h;
}

size_t Topology::switch_count() const
{
    return static_cast<size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                             [](const Node& n) { return n.kind == NodeKind::switch_node; }));
}

const std::vector<Path>& Topology::paths(uint32_t src, uint32_t dst) const
{
    auto key = std::make_pair(src, dst);
    if (auto it = path_cache_.find(key); it != path_cache_.end()) return it->second;

    const size_t n = nodes_.size();
    constexpr uint32_t inf = std::numeric_limits<uint32_t>::max();
    // Distance to dst over links whose intermediate endpoints are switches.
    std::vector<uint32_t> dist(n, inf);
    dist[dst] = 0;
    std::deque<uint32_t> q{dst};
    while (!q.empty()) {
        const uint32_t v = q.front();
        q.pop_front();
        if (v != dst && nodes_[v].kind == NodeKind::host) continue;
        for (uint32_t l : out_[v]) {
            const uint32_t u = links_[l].dst; // reverse edge: u -> v exists as l ^ 1
            if (dist[u] == inf) {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    std::vector<Path> result;
    if (src < n && dist[src] != inf && src != dst) {
        Path cur;
        std::function<void(uint32_t)> walk = [&](uint32_t v) {
            if (v == dst) {
                result.push_back(cur);
                return;
            }
            if (v != src && nodes_[v].kind == NodeKind::host) return;
            std::vector<uint32_t> next;
            for (uint32_t l : out_[v])
                if (dist[links_[l].dst] != inf && dist[links_[l].dst] + 1 == dist[v]) next.push_back(l);
            std::sort(next.begin(), next.end(), [&](uint32_t a, uint32_t b) {
                return std::tie(links_[a].dst, a) < std::tie(links_[b].dst, b);
            });
            for (uint32_t l : next) {
                cur.push_back(l);
                walk(links_[l].dst);
                cur.pop_back();
            }
        };
        walk(src);
    }
    return path_cache_.emplace(key, std::move(result)).first->second;
}

sim::SimTime Topology::path_rtt(const Path& p, uint32_t data_bytes, uint32_t ack_bytes) const
{
    sim::SimTime t;
    for (uint32_t l : p) {
        const auto& lp = links_[l].params;
        const auto& rp = links_[reverse(l)].params;
        t += sim::transmission_time(data_bytes, static_cast<uint64_t>(lp.rate_bps)) + lp.propagation_delay +
             lp.processing_delay;
        t += sim::transmission_time(ack_bytes, static_cast<uint64_t>(rp.rate_bps)) + rp.propagation_delay +
             rp.processing_delay;
    }
    return t;
}

double Topology::path_capacity(const Path& p) const
{
    double c = std::numeric_limits<double>::infinity();
    for (uint32_t l : p) c = std::min(c, links_[l].params.rate_bps);
    return c;
}

double Topology::nic_rate(uint32_t host) const
{
    if (out_.at(host).empty()) return 0;
    return links_[out_[host].front()].params.rate_bps;
}

Topology build_single_bottleneck(uint32_t n_senders, const LinkParams& params)
{
    if (n_senders == 0) throw TopologyError("single bottleneck needs at least one sender");
    Topology t;
    for (uint32_t i = 0; i < n_senders; ++i) t.add_node(NodeKind::host);
    const uint32_t rx = t.add_node(NodeKind::host, "receiver");
    const uint32_t sw = t.add_node(NodeKind::switch_node, "switch");
    for (uint32_t i = 0; i < n_senders; ++i) t.add_duplex(i, sw, params);
    t.add_duplex(sw, rx, params);
    t.describe = "single_bottleneck(" + std::to_string(n_senders) + ")";
    return t;
}

Topology build_single_rooted_tree(const LinkParams& params)
{
    Topology t;
    for (uint32_t i = 0; i < 12; ++i) t.add_node(NodeKind::host, "server" + std::to_string(i));
    std::vector<uint32_t> tor;
    for (uint32_t r = 0; r < 4; ++r) tor.push_back(t.add_node(NodeKind::switch_node, "tor" + std::to_string(r)));
    const uint32_t root = t.add_node(NodeKind::switch_node, "root");
    for (uint32_t i = 0; i < 12; ++i) t.add_duplex(i, tor[i / 3], params);
    for (uint32_t r = 0; r < 4; ++r) t.add_duplex(tor[r], root, params);
    t.describe = "single_rooted_tree";
    return t;
}

Topology build_fat_tree(uint32_t k, const LinkParams& params)
{
    if (k < 2 || k % 2 != 0) throw TopologyError("fat-tree k must be even and >= 2");
    Topology t;
    const uint32_t half = k / 2;
    const uint32_t n_hosts = k * k * k / 4;
    for (uint32_t i = 0; i < n_hosts; ++i) t.add_node(NodeKind::host);
    std::vector<uint32_t> edge, agg, core;
    for (uint32_t p = 0; p < k; ++p)
        for (uint32_t i = 0; i < half; ++i) edge.push_back(t.add_node(NodeKind::switch_node, "edge" + std::to_string(p * half + i)));
    for (uint32_t p = 0; p < k; ++p)
        for (uint32_t i = 0; i < half; ++i) agg.push_back(t.add_node(NodeKind::switch_node, "agg" + std::to_string(p * half + i)));
    for (uint32_t i = 0; i < half * half; ++i) core.push_back(t.add_node(NodeKind::switch_node, "core" + std::to_string(i)));
    for (uint32_t h = 0; h < n_hosts; ++h) t.add_duplex(h, edge[h / half], params);
    for (uint32_t p = 0; p < k; ++p)
        for (uint32_t e = 0; e < half; ++e)
            for (uint32_t a = 0; a < half; ++a) t.add_duplex(edge[p * half + e], agg[p * half + a], params);
    for (uint32_t p = 0; p < k; ++p)
        for (uint32_t a = 0; a < half; ++a)
            for (uint32_t c = 0; c < half; ++c) t.add_duplex(agg[p * half + a], core[a * half + c], params);
    t.describe = "fat_tree(" + std::to_string(k) + ")";
    return t;
}

Topology build_parallel_paths(uint32_t n_paths, const LinkParams& params)
{
    if (n_paths == 0) throw TopologyError("parallel paths needs n >= 1");
    Topology t;
    const uint32_t a = t.add_node(NodeKind::host, "src");
    const uint32_t b = t.add_node(NodeKind::host, "dst");
    for (uint32_t i = 0; i < n_paths; ++i) {
        const uint32_t s = t.add_node(NodeKind::switch_node);
        t.add_duplex(a, s, params);
        t.add_duplex(s, b, params);
    }
    t.describe = "parallel_paths(" + std::to_string(n_paths) + ")";
    return t;
}

Topology build_chain(uint32_t n_switches, uint32_t hosts_per_switch, const LinkParams& params)
{
    if (n_switches == 0 || hosts_per_switch == 0) throw TopologyError("chain needs switches and hosts");
    Topology t;
    for (uint32_t i = 0; i < n_switches * hosts_per_switch; ++i) t.add_node(NodeKind::host);
    std::vector<uint32_t> sw;
    for (uint32_t s = 0; s < n_switches; ++s) sw.push_back(t.add_node(NodeKind::switch_node));
    for (uint32_t i = 0; i < n_switches * hosts_per_switch; ++i) t.add_duplex(i, sw[i / hosts_per_switch], params);
    for (uint32_t s = 0; s + 1 < n_switches; ++s) t.add_duplex(sw[s], sw[s + 1], params);
    t.describe = "chain(" + std::to_string(n_switches) + "x" + std::to_string(hosts_per_switch) + ")";
    return t;
}

uint32_t rack_of(const Topology& t, uint32_t host)
{
    for (const auto& l : t.links())
        if (l.src == host) return l.dst;
    throw TopologyError("host has no links");
}

} // namespace pdq::topo
