#include "pdq/baselines/d3.hpp"

#include <algorithm>

namespace pdq::baselines {

double D3LinkState::fair_share() const
{
    if (table_.empty()) return 0;
    return std::max(0.0, (adapter_.effective - demand_) / static_cast<double>(table_.size()));
}

double D3LinkState::request(uint64_t flow, double req)
{
    req = std::max(0.0, req);
    auto& e = table_[flow];
    reserved_ -= e.grant;
    demand_ -= e.demand;
    e.demand = req;
    demand_ += req;
    const double left = std::max(0.0, adapter_.effective - reserved_);
    double grant;
    if (left >= req)
        grant = std::min(left, req + fair_share());
    else
        grant = left;
    e.grant = grant;
    reserved_ += grant;
    return grant;
}

void D3LinkState::release(uint64_t flow)
{
    auto it = table_.find(flow);
    if (it == table_.end()) return;
    reserved_ -= it->second.grant;
    demand_ -= it->second.demand;
    table_.erase(it);
    if (table_.empty()) {
        reserved_ = 0;
        demand_ = 0;
    }
}

double D3LinkState::grant_of(uint64_t flow) const
{
    auto it = table_.find(flow);
    return it == table_.end() ? 0.0 : it->second.grant;
}

} // namespace pdq::baselines
