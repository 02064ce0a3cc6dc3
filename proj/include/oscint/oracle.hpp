#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "oscint/errors.hpp"
#include "oscint/fewnomial.hpp"

namespace oscint {

// Brute-force reference for the principal-value multiplier. Written to share
// no code path with the adaptive engine: phases go through std::pow, the
// integrand uses the midpoint-phase form 2i e^{i mu} sin(delta/2)/t, the
// truncation point comes from a plain-arithmetic predicate, and the
// integration is uniform trapezoid doubling with a Simpson/Richardson
// extrapolation. Intended for moderate degree and coefficient spread.

namespace oracledetail {

inline std::complex<double> integrand(const Fewnomial& q, double xi, double t) {
    double mu = 0.0;   // even part of Q(t)
    double w = 0.0;    // odd part of Q(t) divided by t
    for (int j = 0; j < q.d(); ++j) {
        double a = q.coeffs[j];
        int al = q.exponents[j];
        if (al % 2 == 0)
            mu += a * std::pow(t, al);
        else
            w += a * std::pow(t, al - 1);
    }
    double s = w - xi;        // (delta/2)/t
    double dh = s * t;        // delta/2
    double sinc = dh == 0.0 ? 1.0 : std::sin(dh) / dh;
    double f = s * sinc;      // sin(delta/2)/t, continuous at 0
    // 2i e^{i mu} f
    return {-2.0 * f * std::sin(mu), 2.0 * f * std::cos(mu)};
}

/// Truncation point with analytic tail bound <= tol/2 (both branches): the
/// top derivative term must dominate with margin 4 in both the first- and
/// second-weight sums, giving a monotone t*phi' and a one-step parts bound.
inline double truncation_point(const Fewnomial& q, double xi, double tol) {
    double axi = std::fabs(xi);
    if (q.d() == 0) {
        if (axi == 0.0) return 4.0;
        double T = 8.0 / (axi * tol * 0.5);
        return T < 4.0 ? 4.0 : T;
    }
    int n = q.n();
    double an = std::fabs(q.coeffs[q.d() - 1]);
    for (double T = 4.0; T <= 1e120; T *= 2.0) {
        double top = n * an * std::pow(T, n);
        double rest1 = axi * T, rest2 = axi * T;
        for (int j = 0; j + 1 < q.d(); ++j) {
            double m = std::fabs(q.coeffs[j]) * std::pow(T, q.exponents[j]);
            rest1 += q.exponents[j] * m;
            rest2 += q.exponents[j] * q.exponents[j] * m / n;
        }
        if (rest1 <= 0.25 * top && rest2 <= 0.25 * n * top && 6.0 / top <= 0.5 * tol &&
            std::isfinite(top))
            return T;
    }
    throw ToleranceNotMet(1.0, "oracle could not certify a truncation point");
}

}

struct OracleSample {
    std::complex<double> value;
    double abs_err_estimate = 0.0;
    bool converged = false;
};

inline OracleSample pv_multiplier_oracle_sample(const Fewnomial& q, double xi, double tol) {
    if (!(tol > 1e-12 && tol < 1e-1)) throw std::invalid_argument("oracle tol out of range");
    if (xi == 0.0 && !has_odd_term(q)) return {{0.0, 0.0}, 0.0, true};  // odd integrand

    double T = oracledetail::truncation_point(q, xi, tol);

    // anti-aliasing floor: enough nodes that every oscillation is resolved
    double phase_scale = std::fabs(xi) * T;
    for (int j = 0; j < q.d(); ++j)
        phase_scale += std::fabs(q.coeffs[j]) * std::pow(T, q.exponents[j]);
    const std::int64_t cap = std::int64_t{1} << 27;
    double nmin_d = 8.0 * phase_scale;
    std::int64_t nmin = 4096;
    while (nmin < cap && static_cast<double>(nmin) < nmin_d) nmin *= 2;

    std::complex<double> f0 = oracledetail::integrand(q, xi, 0.0);
    std::complex<double> fT = oracledetail::integrand(q, xi, T);
    std::complex<double> trap = 0.5 * T * (f0 + fT);
    std::complex<double> simp_prev{0.0, 0.0}, simp{0.0, 0.0};
    int consecutive = 0;
    for (std::int64_t nseg = 2;; nseg *= 2) {
        double h = T / static_cast<double>(nseg);
        std::complex<double> acc{0.0, 0.0}, comp{0.0, 0.0};
        for (std::int64_t k = 1; k < nseg; k += 2) {
            std::complex<double> y = oracledetail::integrand(q, xi, h * static_cast<double>(k)) - comp;
            std::complex<double> s = acc + y;
            comp = (s - acc) - y;
            acc = s;
        }
        std::complex<double> trap_prev = trap;
        trap = 0.5 * trap_prev + h * acc;
        simp_prev = simp;
        simp = (4.0 * trap - trap_prev) / 3.0;
        if (nseg >= 4) {
            double diff = std::abs(simp - simp_prev);
            if (nseg >= nmin && diff < 0.5 * tol) {
                if (++consecutive >= 2)
                    return {(16.0 * simp - simp_prev) / 15.0, diff + 0.5 * tol, true};
            } else {
                consecutive = 0;
            }
        }
        if (nseg >= cap) {
            // node budget exhausted: hand back the best extrapolation with an
            // honest estimate (doubling difference plus the analytic tail)
            double diff = std::abs(simp - simp_prev);
            return {(16.0 * simp - simp_prev) / 15.0, diff + 0.5 * tol, false};
        }
    }
}

inline std::complex<double> pv_multiplier_oracle(const Fewnomial& q, double xi, double tol) {
    OracleSample s = pv_multiplier_oracle_sample(q, xi, tol);
    if (!s.converged)
        throw ToleranceNotMet(s.abs_err_estimate, "oracle grid doubling did not converge");
    return s.value;
}

}
