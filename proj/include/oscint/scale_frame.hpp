#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "oscint/dyadic_compare.hpp"
#include "oscint/errors.hpp"
#include "oscint/fewnomial.hpp"

namespace oscint {

/// Dyadic bookkeeping for a phase. The global scale unit is lambda = 2^{1/n};
/// annulus l holds |t| ~ lambda^l. Each monomial also gets its own unit
/// lambda_j = 2^{1/alpha_j} with coefficient index B_j and the rational
/// offset gamma_j = B_j / alpha_j that marks where |a_j t^{alpha_j}| ~ 1.
struct ScaleFrame {
    Fewnomial q;
    double lambda = 0.0;                 // 2^{1/n}
    std::vector<std::int64_t> b;         // lambda^{b_j} <= |a_j| < lambda^{b_j+1}
    std::vector<double> lambda_j;        // 2^{1/alpha_j}
    std::vector<std::int64_t> B;         // lambda_j^{-B_j} <= |a_j| < lambda_j^{-B_j+1}
    std::vector<double> gamma;           // B_j / alpha_j

    int d() const { return q.d(); }
    int n() const { return q.n(); }
};

namespace detail {

/// Largest integer k with exp2(k / den) <= |a| under floating evaluation.
/// Starts from the exact floor of den*log2|a| and nudges so the bracketing
/// holds verbatim in double arithmetic (ties at representable powers of two
/// evaluate exactly, so at most one step is ever needed).
inline std::int64_t float_bracketed_floor(double a, unsigned den) {
    std::int64_t k = exact::floor_log2_pow(a, den);
    double mag = std::fabs(a);
    auto le = [&](std::int64_t kk) {
        return std::exp2(static_cast<double>(kk) / static_cast<double>(den)) <= mag;
    };
    while (!le(k)) --k;
    while (le(k + 1)) ++k;
    return k;
}

}

inline ScaleFrame scale_frame(const Fewnomial& q) {
    if (q.d() == 0) throw DegeneratePhase("scale_frame requires d >= 1");
    ScaleFrame f;
    f.q = q;
    unsigned n = static_cast<unsigned>(q.n());
    f.lambda = std::exp2(1.0 / static_cast<double>(n));
    f.b.resize(q.d());
    f.lambda_j.resize(q.d());
    f.B.resize(q.d());
    f.gamma.resize(q.d());
    for (int j = 0; j < q.d(); ++j) {
        unsigned a = static_cast<unsigned>(q.exponents[j]);
        f.b[j] = detail::float_bracketed_floor(q.coeffs[j], n);
        f.lambda_j[j] = std::exp2(1.0 / static_cast<double>(a));
        f.B[j] = -detail::float_bracketed_floor(q.coeffs[j], a);
        f.gamma[j] = static_cast<double>(f.B[j]) / static_cast<double>(a);
    }
    return f;
}

}
