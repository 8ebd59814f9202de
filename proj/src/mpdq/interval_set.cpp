#include "pdq/mpdq/interval_set.hpp"

#include <algorithm>

namespace pdq::mpdq {

void IntervalSet::add(uint64_t start, uint64_t end)
{
    if (start >= end) return;
    auto it = ranges_.upper_bound(start);
    if (it != ranges_.begin()) {
        auto prev = std::prev(it);
        if (prev->second >= start) it = prev;
    }
    while (it != ranges_.end() && it->first <= end) {
        start = std::min(start, it->first);
        end = std::max(end, it->second);
        total_ -= it->second - it->first;
        it = ranges_.erase(it);
    }
    ranges_.emplace(start, end);
    total_ += end - start;
}

void IntervalSet::remove(uint64_t start, uint64_t end)
{
    if (start >= end) return;
    auto it = ranges_.upper_bound(start);
    if (it != ranges_.begin()) --it;
    while (it != ranges_.end() && it->first < end) {
        const uint64_t s = it->first, e = it->second;
        if (e <= start) {
            ++it;
            continue;
        }
        total_ -= e - s;
        it = ranges_.erase(it);
        if (s < start) {
            ranges_.emplace(s, start);
            total_ += start - s;
        }
        if (e > end) {
            ranges_.emplace(end, e);
            total_ += e - end;
            break;
        }
    }
}

void IntervalSet::merge(const IntervalSet& other)
{
    for (const auto& [s, e] : other.ranges_) add(s, e);
}

bool IntervalSet::covers(uint64_t start, uint64_t end) const
{
    if (start >= end) return true;
    auto it = ranges_.upper_bound(start);
    if (it == ranges_.begin()) return false;
    --it;
    return it->first <= start && it->second >= end;
}

std::optional<std::pair<uint64_t, uint64_t>> IntervalSet::pop_front(uint64_t max_len)
{
    if (ranges_.empty() || max_len == 0) return std::nullopt;
    auto it = ranges_.begin();
    const uint64_t s = it->first;
    const uint64_t e = std::min(it->second, s + max_len);
    remove(s, e);
    return std::make_pair(s, e);
}

} // namespace pdq::mpdq
