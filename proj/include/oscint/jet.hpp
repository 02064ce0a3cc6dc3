#pragma once

#include <cmath>

namespace oscint {

/// Truncated Taylor expansion at a point: c[k] is the k-th Taylor
/// coefficient f^{(k)}/k!. Order is the highest retained index. Only the
/// three operations the repeated-integration-by-parts ladder needs.
struct Jet {
    static constexpr int capacity = 36;
    double c[capacity] = {};
    int order = 0;

    double value() const { return c[0]; }
};

/// Jet of 1/t at t (t != 0): coefficients (-1)^k / t^{k+1}.
inline Jet jet_recip_t(double t, int order) {
    Jet j;
    j.order = order;
    double p = 1.0 / t;
    for (int k = 0; k <= order; ++k) {
        j.c[k] = p;
        p = -p / t;
    }
    return j;
}

/// Quotient of jets, truncated to min(order(u), order(v)).
inline Jet jet_div(const Jet& u, const Jet& v) {
    Jet w;
    w.order = u.order < v.order ? u.order : v.order;
    for (int k = 0; k <= w.order; ++k) {
        double s = u.c[k];
        for (int i = 0; i < k; ++i) s -= w.c[i] * v.c[k - i];
        w.c[k] = s / v.c[0];
    }
    return w;
}

/// d/dt of a jet; drops one order.
inline Jet jet_derivative(const Jet& u) {
    Jet w;
    w.order = u.order > 0 ? u.order - 1 : 0;
    for (int k = 0; k <= w.order; ++k) w.c[k] = (k + 1.0) * u.c[k + 1];
    if (u.order == 0) w.c[0] = 0.0;
    return w;
}

}
