#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oscint/errors.hpp"

namespace oscint {

/// Sparse phase polynomial Q(t) = sum_j a_j t^{alpha_j} with strictly
/// increasing integer exponents alpha_j >= 2. The linear term is excluded by
/// construction: it acts as a frequency shift of the multiplier and is
/// absorbed into xi. d == 0 (no monomials) is a valid calibration phase.
struct Fewnomial {
    std::vector<double> coeffs;
    std::vector<int> exponents;

    int d() const { return static_cast<int>(coeffs.size()); }
    /// Degree of the top monomial; 0 for the empty phase.
    int n() const { return exponents.empty() ? 0 : exponents.back(); }
};

inline Fewnomial make_fewnomial(std::vector<double> coeffs, std::vector<int> exponents) {
    if (coeffs.size() != exponents.size())
        throw std::invalid_argument("coeffs and exponents must have equal length");
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (exponents[j] == 1) throw LinearTermPresent();
        if (exponents[j] < 1) throw NonIncreasingExponents("exponents must be positive integers");
        if (j > 0 && exponents[j] <= exponents[j - 1]) throw NonIncreasingExponents();
        if (coeffs[j] == 0.0 || !std::isfinite(coeffs[j])) throw ZeroCoefficient();
    }
    return Fewnomial{std::move(coeffs), std::move(exponents)};
}

/// Integer power with exponentiation by squaring; relative error grows only
/// logarithmically in the exponent.
inline double pow_int(double t, int k) {
    if (k == 0) return 1.0;
    bool inv = k < 0;
    unsigned e = static_cast<unsigned>(inv ? -static_cast<long>(k) : k);
    double base = t, acc = 1.0;
    while (e) {
        if (e & 1u) acc *= base;
        base *= base;
        e >>= 1;
    }
    return inv ? 1.0 / acc : acc;
}

/// Derivative of given order of Q at t. order 0 evaluates Q itself. Throws
/// Overflow if any term or the result leaves the finite double range.
inline double eval_phase(const Fewnomial& q, double t, int order = 0) {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    double acc = 0.0;
    for (int j = 0; j < q.d(); ++j) {
        int a = q.exponents[j];
        if (a < order) continue;
        double fall = 1.0;
        for (int m = 0; m < order; ++m) fall *= static_cast<double>(a - m);
        double term = q.coeffs[j] * fall * pow_int(t, a - order);
        if (!std::isfinite(term)) throw Overflow();
        acc += term;
    }
    if (!std::isfinite(acc)) throw Overflow();
    return acc;
}

/// Sum of |a_j| |t|^{alpha_j - order} * falling factorial: a rigorous upper
/// bound for |Q^(order)| on [-|t|, |t|] that is monotone in |t|.
inline double eval_abs_bound(const Fewnomial& q, double t, int order = 0) {
    double acc = 0.0;
    double at = std::fabs(t);
    for (int j = 0; j < q.d(); ++j) {
        int a = q.exponents[j];
        if (a < order) continue;
        double fall = 1.0;
        for (int m = 0; m < order; ++m) fall *= static_cast<double>(a - m);
        acc += std::fabs(q.coeffs[j]) * fall * pow_int(at, a - order);
    }
    return acc;
}

/// (Q(t) - Q(-t)) / (2t) = sum over odd exponents of a_j t^{alpha_j - 1};
/// stable for arbitrarily small t. The odd part drives the symmetrized
/// principal-value bracket near the origin.
inline double odd_part_over_t(const Fewnomial& q, double t) {
    double acc = 0.0;
    for (int j = 0; j < q.d(); ++j)
        if (q.exponents[j] & 1) acc += q.coeffs[j] * pow_int(t, q.exponents[j] - 1);
    return acc;
}

inline bool has_odd_term(const Fewnomial& q) {
    for (int e : q.exponents)
        if (e & 1) return true;
    return false;
}

/// Q_r(t) = Q(rt): coefficients a_j r^{alpha_j}. Used by the multiplier
/// scaling identity m_{Q_r}(xi) = m_Q(xi / r) for r > 0.
inline Fewnomial dilate(const Fewnomial& q, double r) {
    Fewnomial out = q;
    for (int j = 0; j < q.d(); ++j) {
        out.coeffs[j] = q.coeffs[j] * pow_int(r, q.exponents[j]);
        if (out.coeffs[j] == 0.0 || !std::isfinite(out.coeffs[j]))
            throw Overflow("dilation underflowed or overflowed a coefficient");
    }
    return out;
}

inline Fewnomial negate(const Fewnomial& q) {
    Fewnomial out = q;
    for (auto& c : out.coeffs) c = -c;
    return out;
}

}
