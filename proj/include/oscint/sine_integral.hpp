#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace oscint {

// Si(x) = int_0^x sin(t)/t dt. Power series for small |x|, otherwise the
// continued fraction for the exponential integral E1(ix) evaluated with
// modified Lentz; Si(x) = pi/2 + Im E1(ix) for x > 0.

namespace detail {

inline double si_series(double x) {
    double x2 = x * x;
    double p = x;       // x^{2k+1} / (2k+1)!
    double sum = x;     // k = 0 term
    for (int k = 0; k < 60; ++k) {
        p *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        double term = p / (2.0 * k + 3.0);
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

inline double si_continued_fraction(double x) {
    using C = std::complex<double>;
    const C z(0.0, x);
    const C one(1.0, 0.0);
    const double tiny = 1e-300;

    C f(tiny, 0.0);
    C C_(tiny, 0.0), D_(0.0, 0.0);
    for (int j = 1; j <= 200; ++j) {
        double a = j == 1 ? 1.0 : static_cast<double>(j / 2);
        C b = (j % 2 == 1) ? z : one;
        D_ = b + a * D_;
        if (std::abs(D_) < tiny) D_ = C(tiny, 0.0);
        C_ = b + a / C_;
        if (std::abs(C_) < tiny) C_ = C(tiny, 0.0);
        D_ = one / D_;
        C delta = C_ * D_;
        f *= delta;
        if (std::abs(delta - one) < 1e-16) break;
    }
    C e1 = C(std::cos(x), -std::sin(x)) * f;  // e^{-ix} * K(ix)
    return 1.5707963267948966 + e1.imag();
}

}

inline double sine_integral(double x) {
    if (std::isnan(x)) return x;
    double ax = std::fabs(x);
    double s;
    if (ax <= 4.5)
        s = detail::si_series(ax);
    else if (std::isinf(ax))
        s = 1.5707963267948966;
    else
        s = detail::si_continued_fraction(ax);
    return std::copysign(s, x);
}

}
