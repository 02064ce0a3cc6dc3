#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <queue>
#include <vector>

#include "oscint/decomposition.hpp"
#include "oscint/errors.hpp"
#include "oscint/fewnomial.hpp"
#include "oscint/partition.hpp"
#include "oscint/quadrature.hpp"
#include "oscint/scale_frame.hpp"

namespace oscint {

// Windowed per-scale multiplier pieces: the symmetrized integrand weighted by
// the bump at scale ceil(gamma_{j1}) + l' (in base lambda_{j1}) times the
// component cutoff (in base lambda), integrated over the support.

/// Joined cutoff Phi over a good component: sum of the pou's bumps across the
/// component's scales. 1 strictly inside, 0 far outside, smooth in between.
inline double component_cutoff(const PartitionOfUnity& pou, const GoodComponent& comp, double t) {
    return window_bump(pou.u(t), comp.lo, comp.hi);
}

struct PieceSample {
    std::complex<double> value{0.0, 0.0};
    double abs_err_estimate = 0.0;
    bool certified = false;
    int segments = 0;
};

namespace piecedetail {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    std::int64_t qd = a / b, r = a % b;
    return qd + (r > 0 ? 1 : 0);
}

struct Setup {
    int alpha = 2;
    std::int64_t s = 0;  // bump index in base lambda_{j1}
    double lo = 1.0, hi = 1.0;
    bool empty = true;
};

inline Setup setup(const ScaleFrame& f, const GoodComponent& comp, std::int64_t lp) {
    Setup ps;
    int i1 = comp.j1 - 1;
    ps.alpha = f.q.exponents[i1];
    ps.s = ceil_div(f.B[i1], ps.alpha) + lp;
    std::int64_t al = ps.alpha, n = f.n();
    // bump support (s, s+2)/alpha and cutoff support (lo, hi+2)/n in log2 t;
    // exact integer cross-multiplication decides emptiness
    if (ps.s * n >= (comp.hi + 2) * al || comp.lo * al >= (ps.s + 2) * n) return ps;
    double lo2 = std::max(static_cast<double>(ps.s) / ps.alpha,
                          static_cast<double>(comp.lo) / static_cast<double>(n));
    double hi2 = std::min(static_cast<double>(ps.s + 2) / ps.alpha,
                          static_cast<double>(comp.hi + 2) / static_cast<double>(n));
    ps.lo = std::exp2(lo2);
    ps.hi = std::exp2(hi2);
    ps.empty = !(ps.lo < ps.hi);
    return ps;
}

struct WItem {
    double a = 0.0, b = 0.0;
    std::complex<double> value{0.0, 0.0};
    double err = 0.0;
    int depth = 0;
};

struct WItemWorse {
    bool operator()(const WItem& x, const WItem& y) const {
        if (x.err != y.err) return x.err < y.err;
        return x.a > y.a;
    }
};

class PieceEngine {
  public:
    PieceEngine(const ScaleFrame& f, const GoodComponent& comp, const Setup& ps, double xi)
        : q_(f.q), comp_(comp), ps_(ps), xi_(xi), n_(f.n()) {}

    PieceSample run(double tol) {
        PieceSample out;
        std::priority_queue<WItem, std::vector<WItem>, WItemWorse> pq;
        double live = 0.0;
        int alive = 0;
        double ratio = std::pow(ps_.hi / ps_.lo, 0.125);
        double a = ps_.lo;
        for (int k = 0; k < 8; ++k) {
            double b = k == 7 ? ps_.hi : a * ratio;
            WItem it = evaluate(a, b, 0);
            live += it.err;
            pq.push(it);
            ++alive;
            a = b;
        }
        const double target = 0.9 * tol;
        std::vector<WItem> frozen;
        double parked = 0.0;  // err stuck on unsplittable segments
        while (live + parked > target && live > 0.1 * parked && !pq.empty() &&
               alive < 200000) {
            WItem top = pq.top();
            pq.pop();
            double mid = top.a * std::sqrt(top.b / top.a);
            bool splittable = top.depth < 48 && mid > top.a && mid < top.b &&
                              (top.b - top.a) > std::ldexp(top.a, -34);
            if (!splittable || top.err == 0.0) {
                frozen.push_back(top);
                live -= top.err;
                parked += top.err;
                continue;
            }
            WItem c1 = evaluate(top.a, mid, top.depth + 1);
            WItem c2 = evaluate(mid, top.b, top.depth + 1);
            live += c1.err + c2.err - top.err;
            pq.push(c1);
            pq.push(c2);
            ++alive;
        }
        while (!pq.empty()) {
            frozen.push_back(pq.top());
            pq.pop();
        }
        std::sort(frozen.begin(), frozen.end(),
                  [](const WItem& x, const WItem& y) { return x.a < y.a; });
        std::complex<double> sum{0.0, 0.0}, comp{0.0, 0.0};
        double err = pvdetail::kRoundoff * 8.0;
        for (const WItem& it : frozen) {
            std::complex<double> y = it.value - comp;
            std::complex<double> s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            err += it.err;
        }
        err += pvdetail::kRoundoff * pvdetail::phase_size(q_, xi_, ps_.hi) *
               std::log(ps_.hi / ps_.lo);
        out.value = sum;
        out.abs_err_estimate = err;
        out.certified = err <= tol;
        out.segments = static_cast<int>(frozen.size());
        return out;
    }

  private:
    const Fewnomial& q_;
    const GoodComponent& comp_;
    Setup ps_;
    double xi_;
    int n_;

    double weight(double t) const {
        double l2 = std::log2(t);
        return bump0(ps_.alpha * l2 - static_cast<double>(ps_.s)) *
               window_bump(n_ * l2, comp_.lo, comp_.hi);
    }

    WItem evaluate(double a, double b, int depth) const {
        using pvdetail::kWG;
        using pvdetail::kWK;
        using pvdetail::kXK;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto wf = [&](double t) { return weight(t) * pvdetail::bracket_integrand(q_, xi_, t); };
        std::complex<double> fc = wf(mid);
        std::complex<double> accK = kWK[7] * fc, accG = kWG[3] * fc;
        double mass = kWK[7] * std::abs(fc);
        for (int i = 0; i < 7; ++i) {
            std::complex<double> f1 = wf(mid - half * kXK[i]);
            std::complex<double> f2 = wf(mid + half * kXK[i]);
            accK += kWK[i] * (f1 + f2);
            mass += kWK[i] * (std::abs(f1) + std::abs(f2));
            if (i % 2 == 1) accG += kWG[(i - 1) / 2] * (f1 + f2);
        }
        double err = std::abs(half * (accK - accG));
        double maxd = 0.0;
        for (double sgn : {1.0, -1.0}) {
            maxd = std::max(maxd, std::fabs(pvdetail::branch_phase(q_, xi_, sgn, a, 1)));
            maxd = std::max(maxd, std::fabs(pvdetail::branch_phase(q_, xi_, sgn, b, 1)));
            maxd = std::max(maxd, std::fabs(pvdetail::branch_phase(q_, xi_, sgn, mid, 1)));
        }
        if ((b - a) * maxd > 8.0) err = std::max(err, 0.3 * half * mass);
        return {a, b, half * accK, err, depth};
    }
};

}

/// Non-throwing piece evaluation; empty support gives an exact zero.
inline PieceSample piece_multiplier_sample(const Fewnomial& q, const GoodComponent& comp,
                                           std::int64_t l_prime, double xi, double tol) {
    validate_pv_args(xi, tol);
    if (l_prime < 0) throw std::invalid_argument("piece offset l' must be >= 0");
    ScaleFrame f = scale_frame(q);
    if (comp.j1 < 1 || comp.j1 > f.d()) throw IndexOutOfRange();
    piecedetail::Setup ps = piecedetail::setup(f, comp, l_prime);
    if (ps.empty) {
        PieceSample z;
        z.certified = true;
        return z;
    }
    return piecedetail::PieceEngine(f, comp, ps, xi).run(tol);
}

inline std::complex<double> piece_multiplier(const Fewnomial& q, const GoodComponent& comp,
                                             std::int64_t l_prime, double xi, double tol) {
    PieceSample s = piece_multiplier_sample(q, comp, l_prime, xi, tol);
    if (!s.certified) throw ToleranceNotMet(s.abs_err_estimate);
    return s.value;
}

/// min over l in l_range and over the rescaled bump support of
/// lambda_{j1}^{2(gamma+l)} |Q''(lambda_{j1}^{gamma+l} tau)| / 2^{l-2}.
inline double curvature_chain_min_ratio(const Fewnomial& q, const GoodComponent& comp,
                                        const IntegerInterval& l_range, int samples = 33) {
    if (l_range.is_empty() || !l_range.bounded()) throw EmptyWindow("need a bounded l range");
    ScaleFrame f = scale_frame(q);
    int i1 = comp.j1 - 1;
    int alpha = f.q.exponents[i1];
    double gamma = static_cast<double>(f.B[i1]) / alpha;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::int64_t l = l_range.lo; l <= l_range.hi; ++l) {
        double scale = std::exp2((gamma + static_cast<double>(l)) / alpha);
        double denom = std::exp2(static_cast<double>(l) - 2.0);
        for (int k = 0; k < samples; ++k) {
            // tau spans the bump support [1, lambda_{j1}^2]
            double tau = std::exp2(2.0 * (k + 0.5) / (samples * static_cast<double>(alpha)));
            for (double sgn : {1.0, -1.0}) {
                double qpp = std::fabs(eval_phase(q, sgn * scale * tau, 2));
                min_ratio = std::min(min_ratio, scale * scale * qpp / denom);
            }
        }
    }
    return min_ratio;
}

struct DecayFit {
    double C_hat = 0.0;
    double delta_hat = 0.0;
    double residual = 0.0;
    IntegerInterval l_range;
    double second_deriv_min_ratio = std::numeric_limits<double>::infinity();
    int points_used = 0;
};

/// Frequencies likely to maximize a piece at offset l': the two branch
/// stationary values at the bump center plus spread variants and 0.
inline std::vector<double> stationary_xi_grid(const Fewnomial& q, const GoodComponent& comp,
                                              std::int64_t l_prime) {
    ScaleFrame f = scale_frame(q);
    piecedetail::Setup ps = piecedetail::setup(f, comp, l_prime);
    double t_mid = std::exp2(static_cast<double>(ps.s + 1) / ps.alpha);
    double x1 = eval_phase(q, t_mid, 1);
    double x2 = eval_phase(q, -t_mid, 1);
    return {0.0, x1, x2, 0.5 * x1, 2.0 * x1, 0.5 * x2, 2.0 * x2};
}

/// Envelope of |piece| near a branch-resonant frequency xb. The two branch
/// contributions beat against each other in xi with period pi/t_mid, so a
/// single sample races the interference: for odd dominant exponents both
/// branches resonate at the same xi and the raw magnitude swings through deep
/// fades as l' advances. Sampling |p|^2 at three points a third of a beat
/// apart turns this into a 3-point DFT: mean plus first-harmonic amplitude
/// equals (|A|+|B|)^2 exactly for a two-wave pattern. Reports the max of the
/// demodulated envelope and the raw samples; unusable unless all three
/// samples certify.
inline PieceSample piece_envelope_sample(const Fewnomial& q, const GoodComponent& comp,
                                         std::int64_t l_prime, double xb, double t_mid,
                                         double tol) {
    const double step = pvdetail::kPi / (3.0 * t_mid);
    double m[3];
    PieceSample out;
    out.certified = true;
    for (int k = 0; k < 3; ++k) {
        PieceSample s = piece_multiplier_sample(q, comp, l_prime, xb + k * step, tol);
        if (!s.certified) {
            out.certified = false;
            return out;
        }
        double a = std::abs(s.value);
        m[k] = a * a;
        if (a > std::abs(out.value)) {
            out.value = s.value;
            out.abs_err_estimate = s.abs_err_estimate;
        }
        out.segments += s.segments;
    }
    double mean = (m[0] + m[1] + m[2]) / 3.0;
    double re = m[0] - 0.5 * (m[1] + m[2]);
    double im = 0.8660254037844386 * (m[1] - m[2]);  // sqrt(3)/2
    double amp = (2.0 / 3.0) * std::hypot(re, im);
    double env = std::sqrt(std::max(mean + amp, 0.0));
    if (env > std::abs(out.value)) out.value *= env / std::abs(out.value);
    return out;
}

/// Least-squares decay exponent of s(l') = max_xi |piece| against l':
/// log2 s = log2 C - delta l'. With no explicit grid the per-l' sup is the
/// demodulated envelope at the two branch-resonant frequencies plus xi = 0.
/// Samples that fail certification or drop to quadrature noise are excluded;
/// fewer than 5 usable points is an error.
inline DecayFit decay_fit(const Fewnomial& q, const GoodComponent& comp,
                          const std::vector<double>& xi_grid, const IntegerInterval& l_range,
                          double tol) {
    if (l_range.is_empty() || !l_range.bounded()) throw EmptyWindow("need a bounded l range");
    if (l_range.lo < 0) throw std::invalid_argument("piece offsets must be >= 0");
    ScaleFrame f = scale_frame(q);
    std::vector<double> xs, ys;
    for (std::int64_t lp = l_range.lo; lp <= l_range.hi; ++lp) {
        double best = 0.0;
        bool any = false;
        if (xi_grid.empty()) {
            PieceSample z = piece_multiplier_sample(q, comp, lp, 0.0, tol);
            if (z.certified) {
                any = true;
                best = std::abs(z.value);
            }
            piecedetail::Setup ps = piecedetail::setup(f, comp, lp);
            double t_mid = std::exp2(static_cast<double>(ps.s + 1) / ps.alpha);
            double x1 = eval_phase(q, t_mid, 1);
            double x2 = eval_phase(q, -t_mid, 1);
            int branches = x2 == x1 ? 1 : 2;  // odd top exponent: one shared resonance
            for (int b = 0; b < branches; ++b) {
                PieceSample s = piece_envelope_sample(q, comp, lp, b == 0 ? x1 : x2, t_mid, tol);
                if (!s.certified) continue;
                any = true;
                best = std::max(best, std::abs(s.value));
            }
        } else {
            for (double xi : xi_grid) {
                PieceSample s = piece_multiplier_sample(q, comp, lp, xi, tol);
                if (!s.certified) continue;
                any = true;
                best = std::max(best, std::abs(s.value));
            }
        }
        if (any && best > 32.0 * tol) {
            xs.push_back(static_cast<double>(lp));
            ys.push_back(std::log2(best));
        }
    }
    if (xs.size() < 5) throw InsufficientPoints();

    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (icept + slope * xs[i]);
        rss += r * r;
    }

    DecayFit out;
    out.delta_hat = -slope;
    out.C_hat = std::exp2(icept);
    out.residual = std::sqrt(rss / n);
    out.l_range = l_range;
    out.points_used = static_cast<int>(xs.size());
    out.second_deriv_min_ratio = curvature_chain_min_ratio(q, comp, l_range);
    return out;
}

}
