#include "pdq/protocol/criticality.hpp"

namespace pdq::protocol {

std::strong_ordering compare_criticality(const FlowSummary& a, const FlowSummary& b)
{
    if (a.deadline && b.deadline) {
        if (auto c = *a.deadline <=> *b.deadline; c != 0) return c;
    } else if (a.deadline) {
        return std::strong_ordering::less;
    } else if (b.deadline) {
        return std::strong_ordering::greater;
    }
    if (auto c = a.expected_tx_time <=> b.expected_tx_time; c != 0) return c;
    return a.flow_id <=> b.flow_id;
}

} // namespace pdq::protocol
