#include "pdq/net/network.hpp"

namespace pdq::net {

Network::Network(sim::Simulator& sim, const topo::Topology& topo) : sim_(sim), topo_(topo)
{
    for (const auto& tl : topo.links()) {
        auto l = std::make_unique<sim::Link>(tl.id, tl.src, tl.dst, tl.params);
        const uint32_t id = tl.id;
        l->set_delivery([this, id](Packet&& p) { arrived(id, std::move(p)); });
        l->set_observer(this);
        links_.push_back(std::move(l));
    }
    controllers_.resize(links_.size());
}

void Network::set_controller(uint32_t link, std::unique_ptr<LinkController> c)
{
    controllers_.at(link) = std::move(c);
}

void Network::send(Packet pkt)
{
    if (!pkt.route || pkt.route->empty()) {
        ++undeliverable_;
        return;
    }
    if (pkt.uid == 0) pkt.uid = next_uid();
    for (auto* o : observers_) o->on_packet_sent(pkt, sim_.now());
    if (!pkt.reverse) {
        pkt.hop = 0;
        forward_on(std::move(pkt));
    } else {
        pkt.hop = static_cast<int32_t>(pkt.route->size()) - 1;
        const uint32_t l = topo::Topology::reverse((*pkt.route)[static_cast<size_t>(pkt.hop)]);
        links_[l]->enqueue(sim_, std::move(pkt));
    }
}

void Network::forward_on(Packet&& pkt)
{
    const uint32_t l = (*pkt.route)[static_cast<size_t>(pkt.hop)];
    if (auto& c = controllers_[l]) c->on_forward(pkt, sim_.now());
    links_[l]->enqueue(sim_, std::move(pkt));
}

void Network::arrived(uint32_t, Packet&& pkt)
{
    const auto& route = *pkt.route;
    if (!pkt.reverse) {
        ++pkt.hop;
        if (pkt.hop >= static_cast<int32_t>(route.size())) {
            auto it = receivers_.find(pkt.flow_key());
            if (it == receivers_.end()) {
                ++undeliverable_;
                return;
            }
            it->second->receive(std::move(pkt));
            return;
        }
        forward_on(std::move(pkt));
        return;
    }
    const uint32_t fwd = route[static_cast<size_t>(pkt.hop)];
    if (auto& c = controllers_[fwd]) c->on_reverse(pkt, sim_.now());
    --pkt.hop;
    if (pkt.hop < 0) {
        auto it = senders_.find(pkt.flow_key());
        if (it == senders_.end()) {
            ++undeliverable_;
            return;
        }
        it->second->receive(std::move(pkt));
        return;
    }
    const uint32_t l = topo::Topology::reverse(route[static_cast<size_t>(pkt.hop)]);
    links_[l]->enqueue(sim_, std::move(pkt));
}

void Network::on_enqueue(const sim::Link& l, const Packet& p, SimTime t)
{
    for (auto* o : observers_) o->on_enqueue(l, p, t);
}

void Network::on_drop(const sim::Link& l, const Packet& p, SimTime t, bool random)
{
    for (auto* o : observers_) o->on_drop(l, p, t, random);
}

void Network::on_tx_start(const sim::Link& l, const Packet& p, SimTime s, SimTime e)
{
    for (auto* o : observers_) o->on_tx_start(l, p, s, e);
}

void Network::on_deliver(const sim::Link& l, const Packet& p, SimTime t)
{
    for (auto* o : observers_) o->on_deliver(l, p, t);
}

} // namespace pdq::net
