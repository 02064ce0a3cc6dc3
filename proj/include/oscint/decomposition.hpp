#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "oscint/dyadic_compare.hpp"
#include "oscint/errors.hpp"
#include "oscint/interval.hpp"
#include "oscint/scale_frame.hpp"

namespace oscint {

// A scale l is "bad" for a pair of monomials when their sizes (level 0) or
// curvature weights (level 1) stay within a factor 2^Gamma of each other on
// the annulus |t| ~ lambda^l. Ties sit inside the closed inequality and are
// classified bad. All membership decisions are exact.

namespace detail {

inline std::uint64_t curvature_weight(int alpha) {
    return static_cast<std::uint64_t>(alpha) * static_cast<std::uint64_t>(alpha - 1);
}

struct PairTerm {
    double a;
    std::uint64_t w;
    int alpha;
};

inline PairTerm pair_term(const ScaleFrame& f, int j /*1-based*/, int level) {
    int i = j - 1;
    return PairTerm{f.q.coeffs[i],
                    level == 0 ? 1ULL : curvature_weight(f.q.exponents[i]),
                    f.q.exponents[i]};
}

/// Membership of l in the bad set of a pair at slack Gamma, exact.
inline bool bad_at(const PairTerm& p1, const PairTerm& p2, std::int64_t l, int gamma, unsigned n) {
    int le = exact::compare_weighted_dyadic(p1.a, p1.w, p1.alpha, p2.a, p2.w, p2.alpha, l, gamma, n);
    if (le > 0) return false;
    int ge = exact::compare_weighted_dyadic(p1.a, p1.w, p1.alpha, p2.a, p2.w, p2.alpha, l, -gamma, n);
    return ge >= 0;
}

/// First integer where a monotone (false -> true) predicate flips.
template <class Pred>
std::int64_t monotone_first_true(Pred&& pred, std::int64_t hint) {
    std::int64_t lo = hint, hi = hint, step = 1;
    while (!pred(hi)) {
        lo = hi + 1;
        hi += step;
        step *= 2;
        if (step > (std::int64_t{1} << 48)) throw Error("bad-set boundary search diverged");
    }
    while (pred(lo - 1)) {
        hi = lo - 1;
        lo -= step;
        step *= 2;
        if (step > (std::int64_t{1} << 48)) throw Error("bad-set boundary search diverged");
    }
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (pred(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

inline IntegerInterval bad_interval(const ScaleFrame& f, int gamma, int j1, int j2, int level) {
    if (gamma < 1) throw std::invalid_argument("gamma must be a positive integer");
    if (j1 < 1 || j1 > f.d() || j2 < 1 || j2 > f.d()) throw IndexOutOfRange();
    if (j1 == j2) throw IndexOutOfRange("bad sets need two distinct monomials");
    if (j1 > j2) std::swap(j1, j2);  // the defining inequality is symmetric
    PairTerm p1 = pair_term(f, j1, level);
    PairTerm p2 = pair_term(f, j2, level);
    unsigned n = static_cast<unsigned>(f.n());

    // log2 gap g(l) = n*log2|w1 a1 / w2 a2| + (alpha1 - alpha2) l is strictly
    // decreasing in l (alpha1 < alpha2). Bad means -n*Gamma <= g(l) <= n*Gamma.
    double c = static_cast<double>(n) *
               (std::log2(std::fabs(p1.a) * static_cast<double>(p1.w)) -
                std::log2(std::fabs(p2.a) * static_cast<double>(p2.w)));
    double slope = static_cast<double>(p1.alpha - p2.alpha);
    double gn = static_cast<double>(n) * gamma;

    auto upper_ok = [&](std::int64_t l) {  // g(l) <= n*Gamma, true for large l
        return exact::compare_weighted_dyadic(p1.a, p1.w, p1.alpha, p2.a, p2.w, p2.alpha, l, gamma, n) <= 0;
    };
    auto below_lower = [&](std::int64_t l) {  // g(l) < -n*Gamma, true for large l
        return exact::compare_weighted_dyadic(p1.a, p1.w, p1.alpha, p2.a, p2.w, p2.alpha, l, -gamma, n) < 0;
    };
    std::int64_t lo = monotone_first_true(upper_ok, static_cast<std::int64_t>(std::floor((gn - c) / slope)));
    std::int64_t hi = monotone_first_true(below_lower, static_cast<std::int64_t>(std::floor((-gn - c) / slope))) - 1;
    if (lo > hi) return IntegerInterval::empty();
    return {lo, hi};
}

/// log2 of the (weighted) monomial size at scale l; reporting only.
inline double monomial_log2(const ScaleFrame& f, int j /*1-based*/, std::int64_t l, int level) {
    PairTerm p = pair_term(f, j, level);
    return std::log2(std::fabs(p.a)) + std::log2(static_cast<double>(p.w)) +
           static_cast<double>(p.alpha) * static_cast<double>(l) / static_cast<double>(f.n());
}

/// Exact argmax of the (weighted) monomial size at scale l, 1-based.
inline int argmax_monomial(const ScaleFrame& f, std::int64_t l, int level) {
    int best = 1;
    PairTerm pb = pair_term(f, 1, level);
    unsigned n = static_cast<unsigned>(f.n());
    for (int j = 2; j <= f.d(); ++j) {
        PairTerm pj = pair_term(f, j, level);
        if (exact::compare_weighted_dyadic(pj.a, pj.w, pj.alpha, pb.a, pb.w, pb.alpha, l, 0, n) > 0) {
            best = j;
            pb = pj;
        }
    }
    return best;
}

}

inline IntegerInterval bad_set_0(const ScaleFrame& f, int gamma, int j1, int j2) {
    return detail::bad_interval(f, gamma, j1, j2, 0);
}

inline IntegerInterval bad_set_1(const ScaleFrame& f, int gamma, int j1, int j2) {
    return detail::bad_interval(f, gamma, j1, j2, 1);
}

struct BadPair {
    int j1;  // 1-based, j1 < j2
    int j2;
    IntegerInterval scales;
};

struct BadSets {
    int gamma = 0;
    std::vector<BadPair> level0;
    std::vector<BadPair> level1;
};

inline BadSets all_bad_sets(const ScaleFrame& f, int gamma) {
    BadSets out;
    out.gamma = gamma;
    for (int j1 = 1; j1 <= f.d(); ++j1)
        for (int j2 = j1 + 1; j2 <= f.d(); ++j2) {
            out.level0.push_back({j1, j2, bad_set_0(f, gamma, j1, j2)});
            out.level1.push_back({j1, j2, bad_set_1(f, gamma, j1, j2)});
        }
    return out;
}

/// Maximal run of good scales. j1 dominates the phase size, j2 the curvature,
/// each by more than a factor 2^Gamma throughout. margin is the smallest
/// dominance ratio observed over the component (infinite when d == 1).
struct GoodComponent {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    int j1 = 1;
    int j2 = 1;
    double margin = std::numeric_limits<double>::infinity();
    double margin_log2 = std::numeric_limits<double>::infinity();
};

inline std::vector<GoodComponent> good_components(const ScaleFrame& f, int gamma,
                                                  const IntegerInterval& window,
                                                  bool include_level1 = true) {
    if (window.is_empty()) throw EmptyWindow();
    if (!window.bounded()) throw EmptyWindow("good_components requires a bounded window");
    if (gamma < 1) throw std::invalid_argument("gamma must be a positive integer");

    std::vector<IntegerInterval> bad;
    for (int j1 = 1; j1 <= f.d(); ++j1)
        for (int j2 = j1 + 1; j2 <= f.d(); ++j2) {
            bad.push_back(bad_set_0(f, gamma, j1, j2));
            if (include_level1) bad.push_back(bad_set_1(f, gamma, j1, j2));
        }
    auto runs = complement_in(merge_intervals(std::move(bad)), window);

    std::vector<GoodComponent> out;
    out.reserve(runs.size());
    for (const auto& r : runs) {
        GoodComponent c;
        c.lo = r.lo;
        c.hi = r.hi;
        c.j1 = detail::argmax_monomial(f, r.lo, 0);
        c.j2 = include_level1 ? detail::argmax_monomial(f, r.lo, 1) : c.j1;
        // the dominant index cannot change inside a run: a change would force
        // a crossing, and crossings sit inside a bad set
        if (detail::argmax_monomial(f, r.hi, 0) != c.j1 ||
            (include_level1 && detail::argmax_monomial(f, r.hi, 1) != c.j2))
            throw Error("dominant monomial changed inside a good component");
        if (f.d() > 1) {
            double m = std::numeric_limits<double>::infinity();
            for (std::int64_t l : {r.lo, r.hi}) {
                for (int j = 1; j <= f.d(); ++j) {
                    if (j != c.j1)
                        m = std::min(m, detail::monomial_log2(f, c.j1, l, 0) -
                                            detail::monomial_log2(f, j, l, 0));
                    if (include_level1 && j != c.j2)
                        m = std::min(m, detail::monomial_log2(f, c.j2, l, 1) -
                                            detail::monomial_log2(f, j, l, 1));
                }
            }
            c.margin_log2 = m;
            c.margin = std::exp2(std::min(m, 1020.0));
        }
        out.push_back(c);
    }
    return out;
}

/// Numerical check of the two pointwise domination inequalities on a
/// component: |Q(t)| <= 2 |a_{j1} t^{alpha_{j1}}| and
/// |Q''(t)| >= (1/2) alpha_{j2}(alpha_{j2}-1) |a_{j2} t^{alpha_{j2}-2}|
/// for t in [lambda^{l-2}, lambda^{l+1}], both signs of t. The same data with
/// j1 in place of j2 in the curvature bound is recorded for reference but not
/// asserted.
struct DominationReport {
    bool pass = false;
    double worst_upper = 0.0;       // max of |Q| / (2 |a_j1 t^a1|), pass needs <= 1
    double worst_lower = 0.0;       // min of |Q''| / (w_j2 |a_j2 t^{a2-2}| / 2), pass needs >= 1
    double worst_lower_j1_form = 0.0;  // min of |Q''| / |a_j1 t^{a1-2}|, reference only
    std::int64_t scales_checked = 0;
};

inline DominationReport verify_domination(const ScaleFrame& f, const GoodComponent& c,
                                          int samples_per_scale = 9) {
    if (samples_per_scale < 3) throw std::invalid_argument("need at least 3 samples per scale");
    DominationReport rep;
    rep.worst_upper = 0.0;
    rep.worst_lower = std::numeric_limits<double>::infinity();
    rep.worst_lower_j1_form = std::numeric_limits<double>::infinity();

    const double n = static_cast<double>(f.n());
    const int i1 = c.j1 - 1, i2 = c.j2 - 1;
    const double a1 = f.q.coeffs[i1], a2 = f.q.coeffs[i2];
    const int e1 = f.q.exponents[i1], e2 = f.q.exponents[i2];
    const double w2 = static_cast<double>(detail::curvature_weight(e2));

    // cap the number of scales visited so giant components stay cheap; always
    // include both endpoints
    const std::int64_t span = c.hi - c.lo;
    const std::int64_t max_scales = 256;
    const std::int64_t stride = span >= max_scales ? (span + max_scales - 1) / max_scales : 1;

    // every monomial sampled below has log2 magnitude within
    // max_j |log2 a_j| + |l| + 2, since alpha_j/n <= 1 and |u| <= |l| + 2
    double maxla = 0.0;
    for (double a : f.q.coeffs) maxla = std::max(maxla, std::fabs(std::log2(std::fabs(a))));

    for (std::int64_t l = c.lo;; l += stride) {
        if (l > c.hi) l = c.hi;
        if (std::fabs(static_cast<double>(l)) + 2.0 + maxla < 980.0) {
            for (int k = 0; k < samples_per_scale; ++k) {
                double u = static_cast<double>(l) - 2.0 +
                           3.0 * static_cast<double>(k) / static_cast<double>(samples_per_scale - 1);
                double t = std::exp2(u / n);
                for (double sgn : {1.0, -1.0}) {
                    double tt = sgn * t;
                    double qv = std::fabs(eval_phase(f.q, tt, 0));
                    double qpp = std::fabs(eval_phase(f.q, tt, 2));
                    double m1 = std::fabs(a1) * pow_int(t, e1);
                    double m2 = std::fabs(a2) * pow_int(t, e2 - 2);
                    double m1c = std::fabs(a1) * pow_int(t, e1 - 2);
                    rep.worst_upper = std::max(rep.worst_upper, qv / (2.0 * m1));
                    rep.worst_lower = std::min(rep.worst_lower, qpp / (0.5 * w2 * m2));
                    rep.worst_lower_j1_form = std::min(rep.worst_lower_j1_form, qpp / m1c);
                }
            }
            ++rep.scales_checked;
        }
        if (l == c.hi) break;
    }
    rep.pass = rep.scales_checked > 0 && rep.worst_upper <= 1.0 && rep.worst_lower >= 1.0;
    return rep;
}

/// Smallest slack in [1, gamma_max] whose good components all pass the
/// domination check over the window, if any.
inline std::optional<int> min_passing_gamma(const ScaleFrame& f, const IntegerInterval& window,
                                            int gamma_max = 12, int samples_per_scale = 9) {
    for (int g = 1; g <= gamma_max; ++g) {
        bool all = true;
        for (const auto& c : good_components(f, g, window)) {
            if (!verify_domination(f, c, samples_per_scale).pass) {
                all = false;
                break;
            }
        }
        if (all) return g;
    }
    return std::nullopt;
}

/// Split an interval of scales into consecutive blocks of exactly `size`
/// indices plus at most one shorter trailing block.
inline std::vector<IntegerInterval> partition_into_scale_blocks(const IntegerInterval& iv, int size) {
    if (size < 1) throw std::invalid_argument("block size must be positive");
    if (iv.is_empty()) return {};
    if (!iv.bounded()) throw EmptyWindow("blocking requires a bounded interval");
    std::vector<IntegerInterval> out;
    for (std::int64_t lo = iv.lo; lo <= iv.hi; lo += size)
        out.push_back({lo, std::min(iv.hi, lo + size - 1)});
    return out;
}

}
