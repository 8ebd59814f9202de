#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdq/sim/link.hpp"

namespace pdq::topo {

using sim::LinkParams;
using Path = std::vector<uint32_t>; // link ids, source to destination

enum class NodeKind { host, switch_node };

struct Node {
    uint32_t id = 0;
    NodeKind kind = NodeKind::host;
    std::string name;
};

struct TopoLink {
    uint32_t id = 0;
    uint32_t src = 0;
    uint32_t dst = 0;
    LinkParams params;
};

class TopologyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Topology {
public:
    uint32_t add_node(NodeKind kind, std::string name = {});
    /// Adds a link pair; the reverse of link `id` is always `id ^ 1`.
    std::pair<uint32_t, uint32_t> add_duplex(uint32_t a, uint32_t b, const LinkParams& params);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<TopoLink>& links() const { return links_; }
    const Node& node(uint32_t id) const { return nodes_.at(id); }
    const TopoLink& link(uint32_t id) const { return links_.at(id); }
    static constexpr uint32_t reverse(uint32_t link) { return link ^ 1u; }

    std::vector<uint32_t> hosts() const;
    size_t switch_count() const;

    /// All equal-length shortest paths, never transiting a host, in deterministic order.
    const std::vector<Path>& paths(uint32_t src, uint32_t dst) const;

    /// Round-trip time of a path for a data packet forward and a control packet back.
    sim::SimTime path_rtt(const Path& p, uint32_t data_bytes, uint32_t ack_bytes) const;
    double path_capacity(const Path& p) const;
    /// Outgoing line rate of a host (first attached link).
    double nic_rate(uint32_t host) const;

    std::string describe;

private:
    std::vector<Node> nodes_;
    std::vector<TopoLink> links_;
    std::vector<std::vector<uint32_t>> out_; // node -> outgoing link ids
    mutable std::map<std::pair<uint32_t, uint32_t>, std::vector<Path>> path_cache_;
};

/// n senders -> one switch -> one receiver. Senders are nodes 0..n-1, receiver n, switch n+1.
Topology build_single_bottleneck(uint32_t n_senders, const LinkParams& params = {});

/// Root switch, 4 top-of-rack switches, 3 servers per rack (17 nodes). Hosts are nodes 0..11.
Topology build_single_rooted_tree(const LinkParams& params = {});

/// k-ary fat-tree: k^3/4 hosts (nodes 0..), 5k^2/4 switches.
Topology build_fat_tree(uint32_t k, const LinkParams& params = {});

/// Two hosts (0 and 1) joined by n disjoint single-switch paths; each host has n NICs.
Topology build_parallel_paths(uint32_t n_paths, const LinkParams& params = {});

/// Line of switches, each with `hosts_per_switch` hosts; hosts first in node order.
Topology build_chain(uint32_t n_switches, uint32_t hosts_per_switch, const LinkParams& params = {});

/// Rack (first-hop switch) of a host.
uint32_t rack_of(const Topology& t, uint32_t host);

} // namespace pdq::topo
