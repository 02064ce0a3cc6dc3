#pragma once

#include <gmp.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace oscint::exact {

// Scale-index arithmetic works with quantities of the form |w a|^n 2^k where
// a is a double, w a small positive integer weight, and k an integer. Doubles
// are dyadic rationals, so such comparisons are decidable exactly. A floating
// fast path certifies the sign when the log2 gap is far from zero; genuine
// ties and near-ties fall through to GMP integers.

struct Mpz {
    mpz_t z;
    Mpz() { mpz_init(z); }
    ~Mpz() { mpz_clear(z); }
    Mpz(const Mpz&) = delete;
    Mpz& operator=(const Mpz&) = delete;
};

/// Decompose |a| = m * 2^e with m a 53-bit integer. Requires a nonzero finite.
inline void dyadic_parts(double a, std::int64_t& m, std::int64_t& e) {
    int ex = 0;
    double fr = std::frexp(std::fabs(a), &ex);
    m = static_cast<std::int64_t>(std::ldexp(fr, 53));
    e = static_cast<std::int64_t>(ex) - 53;
}

/// floor(n * log2|a|), exact.
inline std::int64_t floor_log2_pow(double a, unsigned n) {
    if (a == 0.0 || !std::isfinite(a)) throw std::invalid_argument("floor_log2_pow: bad value");
    std::int64_t m = 0, e = 0;
    dyadic_parts(a, m, e);
    Mpz p;
    mpz_set_si(p.z, m);
    mpz_pow_ui(p.z, p.z, n);
    std::int64_t bits = static_cast<std::int64_t>(mpz_sizeinbase(p.z, 2)) - 1;
    return static_cast<std::int64_t>(n) * e + bits;
}

/// Exact sign of |w1 a1|^n 2^{alpha1 l}  -  |w2 a2|^n 2^{alpha2 l + n s}.
/// s is the log2 slack (e.g. +Gamma or -Gamma). Returns -1, 0, +1.
inline int compare_weighted_dyadic(double a1, std::uint64_t w1, int alpha1,
                                   double a2, std::uint64_t w2, int alpha2,
                                   std::int64_t l, std::int64_t s, unsigned n) {
    // fast path: certified double evaluation of the log2 gap (logs taken
    // separately so w * |a| cannot overflow)
    double g = static_cast<double>(n) * (std::log2(std::fabs(a1)) + std::log2(static_cast<double>(w1)) -
                                         std::log2(std::fabs(a2)) - std::log2(static_cast<double>(w2))) +
               static_cast<double>(alpha1 - alpha2) * static_cast<double>(l) -
               static_cast<double>(n) * static_cast<double>(s);
    // log2 of a double is accurate to ~1 ulp; the linear terms are exact for
    // |alpha l| < 2^53. A gap above 1e-6 bits is far outside the rounding
    // error of the expression for any n <= 10^6.
    if (std::fabs(g) > 1e-6 && std::fabs(static_cast<double>(alpha1 - alpha2) * static_cast<double>(l)) < 9e15)
        return g > 0 ? 1 : -1;

    std::int64_t m1 = 0, e1 = 0, m2 = 0, e2 = 0;
    dyadic_parts(a1, m1, e1);
    dyadic_parts(a2, m2, e2);

    Mpz x, y, t;
    mpz_set_si(x.z, m1);
    mpz_pow_ui(x.z, x.z, n);
    mpz_set_ui(t.z, static_cast<unsigned long>(w1));
    mpz_pow_ui(t.z, t.z, n);
    mpz_mul(x.z, x.z, t.z);

    mpz_set_si(y.z, m2);
    mpz_pow_ui(y.z, y.z, n);
    mpz_set_ui(t.z, static_cast<unsigned long>(w2));
    mpz_pow_ui(t.z, t.z, n);
    mpz_mul(y.z, y.z, t.z);

    std::int64_t dn = static_cast<std::int64_t>(n);
    std::int64_t dexp = (dn * e1 + static_cast<std::int64_t>(alpha1) * l) -
                        (dn * e2 + static_cast<std::int64_t>(alpha2) * l + dn * s);
    // the mantissa parts differ by at most ~n*(53 + 64) bits, so after the
    // fast path the exponent gap is small; guard anyway
    if (dexp > (1 << 24) || dexp < -(1 << 24))
        return dexp > 0 ? 1 : -1;
    if (dexp >= 0)
        mpz_mul_2exp(x.z, x.z, static_cast<mp_bitcnt_t>(dexp));
    else
        mpz_mul_2exp(y.z, y.z, static_cast<mp_bitcnt_t>(-dexp));
    int c = mpz_cmp(x.z, y.z);
    return c > 0 ? 1 : (c < 0 ? -1 : 0);
}

}
