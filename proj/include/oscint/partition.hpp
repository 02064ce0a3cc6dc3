#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "oscint/interval.hpp"

namespace oscint {

// Smooth dyadic partition of unity in the log-scale variable u = n*log2|t|
// (so u = log_lambda|t| with lambda = 2^{1/n}). Built from the standard
// exp(-1/x) mollifier; everything here is a plain function of u, the caller
// supplies the frame's n.

/// exp(-1/x) extended by 0 for x <= 0.
inline double smooth_s(double x) {
    if (!(x > 0.0)) return 0.0;
    return std::exp(-1.0 / x);
}

/// Smooth nonincreasing step: 1 on (-inf, 0], 0 on [1, inf), value 1/2 at 1/2.
inline double smooth_step(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    double a = smooth_s(x);
    double b = smooth_s(1.0 - x);
    return b / (a + b);
}

/// Base bump psi_0(u) = step(u-1) - step(u), supported in u in (0, 2),
/// equal to 1 at u = 1. The shifts psi_0(u - l) over integer l sum to 1.
inline double bump0(double u) {
    if (u <= 0.0 || u >= 2.0) return 0.0;
    return smooth_step(u - 1.0) - smooth_step(u);
}

/// Bump attached to scale l.
inline double bump_at_scale(double u, std::int64_t l) {
    return bump0(u - static_cast<double>(l));
}

/// Sum of the bumps over l in [lo, hi]; telescopes to a two-step window,
/// supported in (lo, hi+2) and identically 1 on [lo+1, hi+1].
inline double window_bump(double u, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) return 0.0;
    return smooth_step(u - static_cast<double>(hi) - 1.0) -
           smooth_step(u - static_cast<double>(lo));
}

inline double window_bump(double u, const IntegerInterval& iv) {
    if (iv.is_empty()) return 0.0;
    return window_bump(u, iv.lo, iv.hi);
}

/// Log-scale coordinate of t: u = n*log2|t|, -inf at t = 0.
inline double log_scale(double t, int n) {
    if (t == 0.0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * std::log2(std::fabs(t));
}

/// Partition tied to a concrete base (lambda or lambda_j). Only the base is
/// state; the bumps come from the functions above.
struct PartitionOfUnity {
    double base = 2.0;

    double u(double t) const {
        if (t == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log2(std::fabs(t)) / std::log2(base);
    }
};

/// psi_l(t) in [0,1]; 0 at t = 0 by convention.
inline double bump(const PartitionOfUnity& pou, std::int64_t l, double t) {
    return bump_at_scale(pou.u(t), l);
}

}
