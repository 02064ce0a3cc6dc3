#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/fewnomial.hpp"
#include "oscint/interval.hpp"
#include "oscint/jet.hpp"
#include "oscint/parallel.hpp"
#include "oscint/sine_integral.hpp"

namespace oscint {

/// One certified evaluation of the multiplier
///   m(xi) = p.v. int e^{i(Q(t) - t xi)} dt/t.
struct MultiplierSample {
    double xi = 0.0;
    std::complex<double> value{0.0, 0.0};
    double abs_err_estimate = 0.0;
    int pieces_used = 0;
    bool certified = false;
    // diagnostic ceiling |value| > pi + 2 ln 2 + err; flagged, never asserted
    bool above_sanity_ceiling = false;
};

namespace pvdetail {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kRoundoff = 2e-16;   // per-unit roundoff coefficient in error model
constexpr int kMaxDepth = 48;
constexpr int kMaxSegments = 400000;
constexpr int kJetOrder = 32;
constexpr int kLadderMax = 30;

// 7-15 Gauss-Kronrod nodes and weights on [-1,1]; xk[7] = 0 is the center,
// Gauss points are xk[1], xk[3], xk[5], xk[7].
constexpr double kXK[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Branch phase of the symmetrized integrand: phi_s(t) = Q(s t) - s xi t for
/// s = +1 (the t > 0 branch) and s = -1 (the reflected branch). Derivative of
/// requested order in t.
inline double branch_phase(const Fewnomial& q, double xi, double sgn, double t, int order) {
    double base = eval_phase(q, sgn * t, order);
    if (sgn < 0.0 && (order % 2) == 1) base = -base;
    if (order == 0) base -= sgn * xi * t;
    if (order == 1) base -= sgn * xi;
    return base;
}

/// Crude upper bound for |phase| near t, used only to model floating roundoff.
inline double phase_size(const Fewnomial& q, double xi, double t) {
    return eval_abs_bound(q, std::fabs(t)) + std::fabs(xi) * std::fabs(t);
}

/// Upper bound for |r(t)| = |delta(t)/t|, nondecreasing in t.
inline double r_bound(const Fewnomial& q, double xi, double t) {
    double s = 0.0;
    for (int j = 0; j < q.d(); ++j)
        if (q.exponents[j] % 2 == 1)
            s += std::fabs(q.coeffs[j]) * pow_int(t, q.exponents[j] - 1);
    return 2.0 * (s + std::fabs(xi));
}

/// Symmetrized integrand G(t) = [e^{i phi_+} - e^{i phi_-}]/t written as
/// e^{i phi_-} (e^{i delta} - 1)/t with delta = phi_+ - phi_- = 2(Q_odd - t xi),
/// which is stable for small delta.
inline std::complex<double> bracket_integrand(const Fewnomial& q, double xi, double t) {
    double r = 2.0 * (odd_part_over_t(q, t) - xi);
    double delta = r * t;
    double h = 0.5 * delta;
    double sh = std::sin(h);
    double sch = h == 0.0 ? 1.0 : sh / h;
    double scd = delta == 0.0 ? 1.0 : std::sin(delta) / delta;
    double phi2 = branch_phase(q, xi, -1.0, t, 0);
    std::complex<double> e2(std::cos(phi2), std::sin(phi2));
    return e2 * std::complex<double>(-sh * sch * r, scd * r);
}

struct Item {
    double a = 0.0, b = 0.0;
    std::complex<double> value{0.0, 0.0};
    double err = 0.0;
    double ro = 0.0;  // roundoff model share, irreducible by splitting
    int depth = 0;
};

struct ItemWorse {
    bool operator()(const Item& x, const Item& y) const {
        if (x.err != y.err) return x.err < y.err;
        return x.a > y.a;  // deterministic tie-break
    }
};

struct GkOut {
    std::complex<double> val{0.0, 0.0};
    double err = 0.0;
    double mass = 0.0;
};

struct IbpOut {
    std::complex<double> val{0.0, 0.0};
    double err = 0.0;
    double ro = 0.0;
};

/// Exponent-domination predicate at t = 2^u for a list of log2-sized terms:
/// the term with the largest exponent must exceed twice the sum of the rest.
struct LogTerm {
    double mag;  // log2 |coefficient|
    int exp;
};

inline bool top_dominates(const std::vector<LogTerm>& terms, std::size_t top, double u) {
    double lt = terms[top].mag + terms[top].exp * u;
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i == top) continue;
        s += std::exp2(terms[i].mag + terms[i].exp * u - lt);
        if (!(s <= 0.5)) return false;
    }
    return true;
}

class PvEngine {
  public:
    PvEngine(const Fewnomial& q, double xi, double tol)
        : q_(q), xi_(xi), tol_(tol), n_(q.d() > 0 ? q.n() : 1) {}

    MultiplierSample run() {
        MultiplierSample out;
        out.xi = xi_;
        if (q_.d() == 0 && xi_ == 0.0) {
            out.certified = true;  // integrand vanishes identically
            return out;
        }

        bool tail_valid = choose_truncation();
        double T = std::exp2(static_cast<double>(u_));
        double eps = std::exp2(static_cast<double>(e_));

        // analytic inner interval [0, eps]: exact sine-integral part plus a
        // rigorous bound on the remaining Q-dependent bracket
        double sgn_xi = xi_ > 0.0 ? 1.0 : (xi_ < 0.0 ? -1.0 : 0.0);
        std::complex<double> inner(0.0, -2.0 * sgn_xi * sine_integral(std::fabs(xi_) * eps));
        double e_inner = inner_bound(eps);
        double ro_total = kRoundoff * 8.0;

        // one-step integration-by-parts tails from T per branch
        std::complex<double> tails(0.0, 0.0);
        double e_tail = 0.0;
        for (double sgn : {1.0, -1.0}) {
            double ph = branch_phase(q_, xi_, sgn, T, 0);
            double dph = branch_phase(q_, xi_, sgn, T, 1);
            std::complex<double> v(0.0, 0.0);
            double err;
            if (tail_valid && dph != 0.0 && T * std::fabs(dph) > 1.0) {
                // boundary term -e^{i phi}/(i phi' t) = i e^{i phi}/(phi' t)
                std::complex<double> eph(std::cos(ph), std::sin(ph));
                v = std::complex<double>(0.0, 1.0) * eph / (dph * T);
                err = 1.0 / (T * std::fabs(dph));
                ro_total += kRoundoff * phase_size(q_, xi_, T) * std::abs(v);
            } else {
                err = 1.0;  // could not certify the tail at any feasible T
            }
            tails += sgn * v;
            e_tail += err;
        }

        // oscillatory middle [eps, T] over dyadic blocks
        std::complex<double> middle(0.0, 0.0);
        double e_skip = 0.0, e_live = 0.0;
        int alive = 0;
        if (e_ < u_) {
            std::int64_t L0 = static_cast<std::int64_t>(n_) * e_;
            std::int64_t L1 = static_cast<std::int64_t>(n_) * u_;
            double nblocks = static_cast<double>(L1 - L0);
            double skip_each = 0.1 * (0.45 * tol_) / nblocks;
            double lnlambda = 0.6931471805599453 / static_cast<double>(n_);

            std::priority_queue<Item, std::vector<Item>, ItemWorse> pq;
            std::vector<Item> frozen;
            double ro_init = 0.0;
            for (std::int64_t l = L0; l < L1; ++l) {
                double A = std::exp2(static_cast<double>(l) / n_);
                double B = std::exp2(static_cast<double>(l + 1) / n_);
                double small = r_bound(q_, xi_, B) * B * lnlambda;
                if (small <= skip_each) {
                    e_skip += small;
                    continue;
                }
                Item it = evaluate(A, B, 0);
                e_live += it.err;
                ro_init += it.ro;
                pq.push(it);
                ++alive;
            }

            // splitting cannot reduce the roundoff share or revive a failed
            // tail, so do not pay for refinement when those already sink the
            // certificate
            bool refinable = tail_valid && e_skip + ro_init + e_inner + e_tail <= tol_;
            double target = std::max(0.45 * tol_ - e_skip, 0.2 * tol_);
            // err parked on unsplittable segments; once it dominates, further
            // splitting of the rest is wasted work
            double e_frozen = 0.0;
            while (refinable && e_live + e_frozen > target && e_live > 0.1 * e_frozen &&
                   !pq.empty() && alive < kMaxSegments) {
                Item top = pq.top();
                pq.pop();
                double mid = top.a * std::sqrt(top.b / top.a);
                bool splittable = top.depth < kMaxDepth && mid > top.a && mid < top.b &&
                                  (top.b - top.a) > std::ldexp(top.a, -34);
                if (!splittable || top.err == 0.0) {
                    frozen.push_back(top);
                    e_live -= top.err;
                    e_frozen += top.err;
                    continue;
                }
                Item c1 = evaluate(top.a, mid, top.depth + 1);
                Item c2 = evaluate(mid, top.b, top.depth + 1);
                e_live += c1.err + c2.err - top.err;
                pq.push(c1);
                pq.push(c2);
                ++alive;
            }

#ifdef OSCINT_PROBE_STATS
            g_probe_stats.fin_live = e_live;
            g_probe_stats.fin_frozen = e_frozen;
            g_probe_stats.fin_skip = e_skip;
            g_probe_stats.exit_reason = !refinable                    ? 5
                                        : e_live + e_frozen <= target ? 1
                                        : e_live <= 0.1 * e_frozen    ? 2
                                        : pq.empty()                  ? 3
                                                                      : 4;
#endif
            while (!pq.empty()) {
                frozen.push_back(pq.top());
                pq.pop();
            }
            std::sort(frozen.begin(), frozen.end(),
                      [](const Item& x, const Item& y) { return x.a < y.a; });
            e_live = 0.0;
            std::complex<double> comp(0.0, 0.0);  // Kahan compensation
            for (const Item& it : frozen) {
                std::complex<double> y = it.value - comp;
                std::complex<double> s = middle + y;
                comp = (s - middle) - y;
                middle = s;
                e_live += it.err;
                ro_total += it.ro;
            }
            alive = static_cast<int>(frozen.size());
        }

        out.value = inner + middle + tails;
        out.abs_err_estimate = e_inner + e_tail + e_skip + e_live + ro_total;
        out.pieces_used = alive + 2;
        out.certified = tail_valid && out.abs_err_estimate <= tol_;
        out.above_sanity_ceiling =
            std::abs(out.value) > kPi + 2.0 * 0.6931471805599453 + out.abs_err_estimate;
        return out;
    }

    /// Dyadic scale window [n log2 eps, n log2 T] the engine would use.
    IntegerInterval window() {
        choose_truncation();
        return {static_cast<std::int64_t>(n_) * e_, static_cast<std::int64_t>(n_) * u_};
    }

  private:
    const Fewnomial& q_;
    double xi_;
    double tol_;
    int n_;
    int u_ = 1;   // T = 2^u
    int e_ = 0;   // eps = 2^e

    /// Rigorous bound for the inner bracket remainder on [0, eps]:
    /// 2 sum_j |a_j| eps^{alpha_j} / alpha_j.
    double inner_bound(double eps) const {
        double s = 0.0;
        for (int j = 0; j < q_.d(); ++j)
            s += std::fabs(q_.coeffs[j]) * pow_int(eps, q_.exponents[j]) / q_.exponents[j];
        return 2.0 * s;
    }

    /// Pick T = 2^u so that beyond T, for both branches, phi' keeps one sign,
    /// t phi' is monotone, and the one-step tail bound is below tol/8; then
    /// pick eps = 2^e (e <= u) so the inner bound is below tol/4. Returns
    /// whether the tail conditions were actually met (they can fail only at
    /// absurd inputs, e.g. subnormal xi with d = 0).
    bool choose_truncation() {
        std::vector<LogTerm> c1, c2;
        for (int j = 0; j < q_.d(); ++j) {
            double la = std::log2(std::fabs(q_.coeffs[j]));
            double al = static_cast<double>(q_.exponents[j]);
            c1.push_back({la + std::log2(al), q_.exponents[j] - 1});
            c2.push_back({la + 2.0 * std::log2(al), q_.exponents[j] - 1});
        }
        if (xi_ != 0.0) {
            c1.push_back({std::log2(std::fabs(xi_)), 0});
            c2.push_back({std::log2(std::fabs(xi_)), 0});
        }
        if (c1.empty()) {  // Q identically 0 at xi = 0; nothing to truncate
            u_ = 0;
            e_ = 0;
            return true;
        }
        std::size_t top = 0;
        for (std::size_t i = 1; i < c1.size(); ++i)
            if (c1[i].exp > c1[top].exp) top = i;
        double need = std::log2(8.0 / tol_);

        bool ok = false;
        for (u_ = 1; u_ <= 1020; ++u_) {
            double uu = static_cast<double>(u_);
            if (!top_dominates(c1, top, uu)) continue;
            if (!top_dominates(c2, top, uu)) continue;
            if (c1[top].mag + (c1[top].exp + 1) * uu - 1.0 < need) continue;
            ok = true;
            break;
        }
        if (!ok) u_ = 1020;

        e_ = u_;
        while (e_ > -1070 && inner_bound(std::exp2(static_cast<double>(e_))) > 0.25 * tol_) --e_;
        return ok;
    }

    GkOut gk(double a, double b) const {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        GkOut o;
        std::complex<double> fc = bracket_integrand(q_, xi_, mid);
        std::complex<double> accK = kWK[7] * fc;
        std::complex<double> accG = kWG[3] * fc;
        o.mass = kWK[7] * std::abs(fc);
        for (int i = 0; i < 7; ++i) {
            std::complex<double> f1 = bracket_integrand(q_, xi_, mid - half * kXK[i]);
            std::complex<double> f2 = bracket_integrand(q_, xi_, mid + half * kXK[i]);
            accK += kWK[i] * (f1 + f2);
            o.mass += kWK[i] * (std::abs(f1) + std::abs(f2));
            if (i % 2 == 1) accG += kWG[(i - 1) / 2] * (f1 + f2);
        }
        o.val = half * accK;
        o.err = std::abs(half * accK - half * accG);
        o.mass *= half;
        return o;
    }

    /// Repeated integration by parts of int_a^b e^{i phi}/t dt for one branch.
    /// Real jets v_{m+1} = (v_m/phi')' give boundary terms
    /// i^{m-1} [e^{i phi} v_m/phi']_a^b; the ladder is truncated where the
    /// sampled remainder bound width*1.5*max|v_k| is smallest.
    IbpOut ibp_branch(double a, double b, double sgn) const {
        const double pts[3] = {a, a * std::sqrt(b / a), b};
        Jet v[3], dphi[3];
        double eph_re[3], eph_im[3];
        for (int p = 0; p < 3; ++p) {
            double x = pts[p];
            // jets live in the local variable s = (t-x)/x; 1/t = (1/x) sum (-s)^k
            Jet rv;
            rv.order = kJetOrder;
            for (int k = 0; k <= kJetOrder; ++k) rv.c[k] = (k % 2 ? -1.0 : 1.0) / x;
            v[p] = rv;
            Jet dj;
            dj.order = kJetOrder;
            // phi'(x(1+s)) expanded in s: sum_j A_j alpha_j x^{alpha_j-1} C(alpha_j-1,k)
            for (int j = 0; j < q_.d(); ++j) {
                int al = q_.exponents[j];
                double A = q_.coeffs[j];
                if (sgn < 0.0 && al % 2 == 1) A = -A;  // phi as a polynomial in t
                double lead = A * al * pow_int(x, al - 1);
                double binom = 1.0;
                for (int k = 0; k <= std::min(kJetOrder, al - 1); ++k) {
                    dj.c[k] += lead * binom;
                    binom *= static_cast<double>(al - 1 - k) / static_cast<double>(k + 1);
                }
            }
            dj.c[0] -= sgn * xi_;
            dphi[p] = dj;
            double ph = branch_phase(q_, xi_, sgn, x, 0);
            eph_re[p] = std::cos(ph);
            eph_im[p] = std::sin(ph);
        }
        // jets are in s = (t-x)/x; each t-derivative divides by x
        const double inv_x[3] = {1.0 / pts[0], 1.0 / pts[1], 1.0 / pts[2]};

        std::complex<double> sum(0.0, 0.0), best_val(0.0, 0.0);
        double best_err = 1.5 * (b - a) * std::max(std::fabs(v[0].value()), std::fabs(v[2].value()));
        double S[3] = {0.0, 0.0, 0.0};
        double ro = 0.0;
        std::complex<double> ipow(1.0 / std::complex<double>(0.0, 1.0));  // i^{m-1}, m = 0
        for (int m = 0; m < kLadderMax && v[0].order >= 1; ++m) {
            Jet w[3];
            for (int p = 0; p < 3; ++p) w[p] = jet_div(v[p], dphi[p]);
            std::complex<double> tb(eph_re[2] * w[2].value(), eph_im[2] * w[2].value());
            std::complex<double> ta(eph_re[0] * w[0].value(), eph_im[0] * w[0].value());
            sum += ipow * (tb - ta);
            S[0] += std::fabs(w[0].value());
            S[2] += std::fabs(w[2].value());
            ipow *= std::complex<double>(0.0, 1.0);
            double vmax = 0.0;
            for (int p = 0; p < 3; ++p) {
                Jet nv = jet_derivative(w[p]);
                for (int k = 0; k <= nv.order; ++k) nv.c[k] *= inv_x[p];
                v[p] = nv;
                vmax = std::max(vmax, std::fabs(nv.value()));
            }
            double rem = 1.5 * (b - a) * vmax;
            if (rem < best_err) {
                best_err = rem;
                best_val = sum;
            } else if (m >= 2 && rem > 4.0 * best_err) {
                break;  // asymptotic ladder started diverging
            }
        }
        ro = kRoundoff * (phase_size(q_, xi_, a) * S[0] + phase_size(q_, xi_, b) * S[2]);
        return {best_val, best_err, ro};
    }

    GkOut gk_branch(double a, double b, double sgn) const {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto f = [&](double t) {
            double ph = branch_phase(q_, xi_, sgn, t, 0);
            return std::complex<double>(std::cos(ph), std::sin(ph)) / t;
        };
        GkOut o;
        std::complex<double> fc = f(mid);
        std::complex<double> accK = kWK[7] * fc;
        std::complex<double> accG = kWG[3] * fc;
        o.mass = kWK[7] * std::abs(fc);
        for (int i = 0; i < 7; ++i) {
            std::complex<double> f1 = f(mid - half * kXK[i]);
            std::complex<double> f2 = f(mid + half * kXK[i]);
            accK += kWK[i] * (f1 + f2);
            o.mass += kWK[i] * (std::abs(f1) + std::abs(f2));
            if (i % 2 == 1) accG += kWG[(i - 1) / 2] * (f1 + f2);
        }
        o.val = half * accK;
        o.err = std::abs(half * accK - half * accG);
        o.mass *= half;
        return o;
    }

    Item evaluate(double a, double b, int depth) const {
        // presample first and second phase derivatives of both branches on a
        // geometric grid; the branches behave independently (one can sit on a
        // stationary shoulder while the other spins fast), so the diagnostics
        // are kept per branch and each branch picks its own integration route
        bool unisign[2] = {true, true}, ladder_ok[2] = {true, true}, ibp_ok[2];
        double maxd[2], vdc[2];
        double ratio = std::pow(b / a, 0.125);
        for (int s = 0; s < 2; ++s) {
            double sgn = s == 0 ? 1.0 : -1.0;
            double first = 0.0, firstpp = 0.0;
            double pmin = std::numeric_limits<double>::infinity();
            double zmin = std::numeric_limits<double>::infinity();
            double ppmax = 0.0;
            double m2 = std::numeric_limits<double>::infinity();
            maxd[s] = 0.0;
            double t = a;
            for (int k = 0; k <= 8; ++k) {
                double x = k == 8 ? b : t;
                double dp = branch_phase(q_, xi_, sgn, x, 1);
                double pp = branch_phase(q_, xi_, sgn, x, 2);
                maxd[s] = std::max(maxd[s], std::fabs(dp));
                pmin = std::min(pmin, std::fabs(dp));
                zmin = std::min(zmin, std::fabs(x * dp));
                ppmax = std::max(ppmax, std::fabs(pp));
                m2 = std::min(m2, std::fabs(pp));
                if (k == 0) {
                    first = dp;
                    firstpp = pp;
                } else {
                    if (dp * first <= 0.0) unisign[s] = false;
                    if (pp * firstpp <= 0.0) m2 = 0.0;
                }
                t *= ratio;
            }
            // the ladder gains a factor ~ phi''/phi'^2 per rung; near a
            // stationary shoulder that ratio reaches 1 and the expansion stalls
            if (ppmax > 0.25 * pmin * pmin) ladder_ok[s] = false;
            vdc[s] = m2 <= 0.0 ? std::numeric_limits<double>::infinity()
                               : 8.0 / (a * std::sqrt(m2));
            ibp_ok[s] = (b - a) * maxd[s] > 6.0 && unisign[s] && ladder_ok[s] &&
                        zmin >= 4.0 * n_ + 48.0;
        }

        if (ibp_ok[0] && ibp_ok[1]) {
            IbpOut i1 = ibp_branch(a, b, 1.0);
            IbpOut i2 = ibp_branch(a, b, -1.0);
            OSCINT_NOTE(0, a, i1.err + i2.err);
            OSCINT_ITEM(a, b, i1.err + i2.err, 0);
            return {a, b, i1.val - i2.val, i1.err + i2.err, i1.ro + i2.ro, depth};
        }

        if (ibp_ok[0] != ibp_ok[1]) {
            // one branch ladders away; quadrature only has to resolve the
            // other at its own oscillation scale, not the joint worst case
            int slow = ibp_ok[0] ? 1 : 0;
            double ssgn = slow == 0 ? 1.0 : -1.0;
            IbpOut fast = ibp_branch(a, b, -ssgn);
            GkOut g = gk_branch(a, b, ssgn);
            std::complex<double> v = g.val;
            double err = g.err;
            double ro = kRoundoff * g.mass * (2.0 + phase_size(q_, xi_, b));
            if ((b - a) * maxd[slow] > 8.0) {
                err = std::max(err, 0.3 * g.mass);
                if (vdc[slow] < err) {
                    v = {0.0, 0.0};
                    err = vdc[slow];
                    ro = 0.0;
                }
            }
            std::complex<double> val = slow == 0 ? v - fast.val : fast.val - v;
            OSCINT_NOTE(3, a, err + fast.err);
            OSCINT_ITEM(a, b, err + fast.err, 6);
            return {a, b, val, err + fast.err, ro + fast.ro, depth};
        }

        int gate = !unisign[0] || !unisign[1] ? 2 : !ladder_ok[0] || !ladder_ok[1] ? 3 : 1;
        (void)gate;
        double V = (b - a) * std::max(maxd[0], maxd[1]);
        GkOut g = gk(a, b);
        double err = g.err;
        if (V > 8.0) {
            err = std::max(err, 0.3 * g.mass);
            // curvature certificate: when phi'' keeps one sign on the segment,
            // each branch of int e^{i phi}/t is bounded by 8/(a sqrt(min|phi''|))
            // whatever phi' does. This is what certifies segments whose
            // oscillation is too fast for quadrature to resolve (stationary
            // points of enormous phases, where splitting hits the width floor).
            double vsum = vdc[0] + vdc[1];
            if (vsum < err) {
                OSCINT_NOTE(1, a, vsum);
                OSCINT_ITEM(a, b, vsum, 5);
                return {a, b, {0.0, 0.0}, vsum, 0.0, depth};
            }
        }
        // float error of each integrand sample scales with the phase argument
        // fed to sin/cos, so the accumulated rounding rides on the mass
        double ro = kRoundoff * g.mass * (2.0 + phase_size(q_, xi_, b));
        OSCINT_NOTE(2, a, err);
        OSCINT_ITEM(a, b, err, gate);
        return {a, b, g.val, err, ro, depth};
    }
};

}  // namespace pvdetail

inline void validate_pv_args(double xi, double tol) {
    if (!std::isfinite(xi)) throw std::invalid_argument("xi must be finite");
    if (!(tol > 1e-12 && tol < 1e-2))
        throw std::invalid_argument("tol must lie in (1e-12, 1e-2)");
}

/// Non-throwing evaluation: result carries certified = false when the error
/// estimate could not be brought under tol.
inline MultiplierSample pv_multiplier_sample(const Fewnomial& q, double xi, double tol) {
    validate_pv_args(xi, tol);
    return pvdetail::PvEngine(q, xi, tol).run();
}

inline MultiplierSample pv_multiplier(const Fewnomial& q, double xi, double tol) {
    MultiplierSample s = pv_multiplier_sample(q, xi, tol);
    if (!s.certified) throw ToleranceNotMet(s.abs_err_estimate);
    return s;
}

/// Scale window [n log2 eps, n log2 T] used by the engine at frequency xi;
/// decomposition windows and experiments clamp to it.
inline IntegerInterval working_window(const Fewnomial& q, double tol, double xi = 0.0) {
    validate_pv_args(xi, tol);
    return pvdetail::PvEngine(q, xi, tol).window();
}

/// Dyadic frequency grid xi = +-2^{k/4}, k in [-K, K], plus 0. K = 0 requests
/// the automatic choice 2^{K/4} >= 4 max|Q'| over the working window; the
/// automatic grid keeps quarter-octave steps out to 2^24 and then walks whole
/// octaves, since past every stationary frequency of the low scales the
/// multiplier only drifts toward its asymptote.
struct GridSpec {
    int k_quarter = 0;
    bool include_zero = true;
};

inline std::vector<double> make_xi_grid(const Fewnomial& q, const GridSpec& spec, double tol) {
    int K = spec.k_quarter;
    int core = K;
    if (K <= 0) {
        double maxqp = 0.0;
        if (q.d() > 0) {
            double T = std::exp2(static_cast<double>(working_window(q, tol).hi) / q.n());
            for (int j = 0; j < q.d(); ++j)
                maxqp += std::fabs(q.coeffs[j]) * q.exponents[j] * pow_int(T, q.exponents[j] - 1);
        }
        K = maxqp > 0.0 ? static_cast<int>(std::ceil(4.0 * std::log2(4.0 * maxqp))) : 16;
        K = std::clamp(K, 16, 600);
        core = std::min(K, 96);
    }
    std::vector<int> ks;
    for (int k = -K; k <= core; ++k) ks.push_back(k);
    for (int k = core + 4 - (core % 4 + 4) % 4; k <= K; k += 4)
        if (k > core) ks.push_back(k);
    std::vector<double> grid;
    grid.reserve(2 * ks.size() + 1);
    for (auto it = ks.rbegin(); it != ks.rend(); ++it)
        grid.push_back(-std::exp2(static_cast<double>(*it) / 4.0));
    if (spec.include_zero) grid.push_back(0.0);
    for (int k : ks) grid.push_back(std::exp2(static_cast<double>(k) / 4.0));
    return grid;
}

struct SupResult {
    double sup = 0.0;
    double argmax_xi = 0.0;
    double certified_fraction = 1.0;
    double asymptote_gap = 0.0;  // |m - (-i pi sgn xi)| at the grid extremes
    std::vector<MultiplierSample> samples;
};

/// Sup of |m(xi)| over a frequency grid. Uncertified samples are kept in the
/// output but excluded from the sup; certified_fraction reports coverage.
inline SupResult multiplier_sup(const Fewnomial& q, const GridSpec& spec, double tol,
                                int threads = 0) {
    std::vector<double> grid = make_xi_grid(q, spec, tol);
    if (grid.empty()) throw EmptyWindow("frequency grid is empty");
    SupResult out;
    out.samples = parallel_map(
        grid, [&](double xi) { return pv_multiplier_sample(q, xi, tol); }, threads);
    std::size_t ncert = 0;
    for (const MultiplierSample& s : out.samples) {
        if (!s.certified) continue;
        ++ncert;
        double a = std::abs(s.value);
        if (a > out.sup) {
            out.sup = a;
            out.argmax_xi = s.xi;
        }
    }
    out.certified_fraction =
        out.samples.empty() ? 0.0 : static_cast<double>(ncert) / out.samples.size();
    const MultiplierSample& lo = out.samples.front();
    const MultiplierSample& hi = out.samples.back();
    auto hilbert_gap = [](const MultiplierSample& s) {
        double sg = s.xi > 0.0 ? 1.0 : -1.0;
        return std::abs(s.value - std::complex<double>(0.0, -pvdetail::kPi * sg));
    };
    out.asymptote_gap = std::max(hilbert_gap(lo), hilbert_gap(hi));
    return out;
}

}
