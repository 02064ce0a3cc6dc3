#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "oscint/errors.hpp"

namespace oscint {

/// Closed interval of integer scale indices. Sentinel endpoints encode an
/// unbounded side; lo > hi encodes the empty interval.
struct IntegerInterval {
    std::int64_t lo = 1;
    std::int64_t hi = 0;

    static constexpr std::int64_t neg_inf = std::numeric_limits<std::int64_t>::min();
    static constexpr std::int64_t pos_inf = std::numeric_limits<std::int64_t>::max();

    IntegerInterval() = default;
    IntegerInterval(std::int64_t l, std::int64_t h) : lo(l), hi(h) {}

    static IntegerInterval empty() { return {1, 0}; }
    static IntegerInterval whole() { return {neg_inf, pos_inf}; }

    bool is_empty() const { return lo > hi; }
    bool bounded() const { return !is_empty() && lo != neg_inf && hi != pos_inf; }

    bool contains(std::int64_t l) const { return !is_empty() && l >= lo && l <= hi; }

    std::uint64_t cardinality() const {
        if (is_empty()) return 0;
        if (!bounded()) throw EmptyWindow("cardinality of an unbounded interval");
        return static_cast<std::uint64_t>(hi - lo + 1);
    }

    IntegerInterval intersect(const IntegerInterval& o) const {
        if (is_empty() || o.is_empty()) return empty();
        IntegerInterval r{std::max(lo, o.lo), std::min(hi, o.hi)};
        return r.lo > r.hi ? empty() : r;
    }

    bool operator==(const IntegerInterval& o) const {
        if (is_empty() && o.is_empty()) return true;
        return lo == o.lo && hi == o.hi;
    }
};

/// Merge possibly-overlapping intervals into a sorted disjoint list.
inline std::vector<IntegerInterval> merge_intervals(std::vector<IntegerInterval> xs) {
    std::vector<IntegerInterval> out;
    xs.erase(std::remove_if(xs.begin(), xs.end(), [](const IntegerInterval& v) { return v.is_empty(); }),
             xs.end());
    std::sort(xs.begin(), xs.end(), [](const IntegerInterval& a, const IntegerInterval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    for (const auto& v : xs) {
        if (!out.empty() && v.lo <= (out.back().hi == IntegerInterval::pos_inf ? out.back().hi
                                                                               : out.back().hi + 1)) {
            out.back().hi = std::max(out.back().hi, v.hi);
        } else {
            out.push_back(v);
        }
    }
    return out;
}

/// Complement of a disjoint sorted list inside a bounded window.
inline std::vector<IntegerInterval> complement_in(const std::vector<IntegerInterval>& xs,
                                                  const IntegerInterval& window) {
    if (window.is_empty()) throw EmptyWindow();
    if (!window.bounded()) throw EmptyWindow("complement requires a bounded window");
    std::vector<IntegerInterval> out;
    std::int64_t cursor = window.lo;
    for (const auto& v : xs) {
        auto c = v.intersect(window);
        if (c.is_empty()) continue;
        if (c.lo > cursor) out.push_back({cursor, c.lo - 1});
        cursor = (c.hi == IntegerInterval::pos_inf) ? window.hi + 1 : c.hi + 1;
        if (cursor > window.hi) break;
    }
    if (cursor <= window.hi) out.push_back({cursor, window.hi});
    return out;
}

}
