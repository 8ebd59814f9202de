#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace pdq::mpdq {

/// Disjoint half-open byte ranges [start, end), merged on insert.
class IntervalSet {
public:
    IntervalSet() = default;
    IntervalSet(uint64_t start, uint64_t end) { add(start, end); }

    void add(uint64_t start, uint64_t end);
    void remove(uint64_t start, uint64_t end);
    void merge(const IntervalSet& other);
    void clear() { ranges_.clear(); total_ = 0; }

    bool empty() const { return ranges_.empty(); }
    uint64_t total() const { return total_; }
    bool covers(uint64_t start, uint64_t end) const;
    bool contains(uint64_t byte) const { return covers(byte, byte + 1); }

    /// Removes and returns up to `max_len` bytes from the lowest range.
    std::optional<std::pair<uint64_t, uint64_t>> pop_front(uint64_t max_len);

    std::vector<std::pair<uint64_t, uint64_t>> ranges() const { return {ranges_.begin(), ranges_.end()}; }
    bool operator==(const IntervalSet& o) const { return ranges_ == o.ranges_; }

private:
    std::map<uint64_t, uint64_t> ranges_; // start -> end
    uint64_t total_ = 0;
};

} // namespace pdq::mpdq
