#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oscint/decomposition.hpp"
#include "oscint/errors.hpp"
#include "oscint/fewnomial.hpp"
#include "oscint/parallel.hpp"
#include "oscint/quadrature.hpp"
#include "oscint/rng.hpp"
#include "oscint/scale_frame.hpp"
#include "oscint/stats.hpp"

namespace oscint {

// Ensemble studies. Every draw is a pure function of (master seed, group
// index, draw index) through derive_seed, so sweeps reproduce exactly under
// any thread count. Headline statistics only ever see records whose every
// grid point certified.

struct SweepRecord {
    std::uint64_t seed = 0;  // per-draw derived seed, enough to replay the draw
    int d = 0;
    std::vector<int> exponents;
    double coeff_decades = 0.0;
    double sup = 0.0;
    double argmax_xi = 0.0;
    double certified_fraction = 1.0;
    double wall_time = 0.0;
};

struct GroupSummary {
    double key = 0.0;  // group coordinate (n or d)
    std::int64_t count = 0;  // certified records only
    double max_sup = 0.0;
    double median_sup = 0.0;
};

struct GrowthSummary {
    std::string group_by;  // "n" or "d"
    std::vector<GroupSummary> groups;
    bool slope_defined = false;
    double slope = 0.0;  // group max_sup against log2(key)
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double ci_half_width = 0.0;
    bool tau_defined = false;
    double tau = 0.0;  // per-record rank correlation of sup with log key
    double tau_p_value = 1.0;
    std::optional<double> c_hat;  // exploratory log-log-log fit, logd scan only
    bool exploratory = false;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    GrowthSummary summary;
};

namespace expdetail {

constexpr std::uint64_t kStreamExponents = 0x45d0;
constexpr std::uint64_t kStreamCoeffs = 0xc0ef;
constexpr std::uint64_t kStreamStats = 0x57a7;

inline std::vector<double> sample_signed_coeffs(Rng& rng, int d, double decades) {
    std::vector<double> c(static_cast<std::size_t>(d));
    for (auto& v : c) {
        double mag = rng.log_uniform_magnitude(decades);
        v = rng.coin() ? mag : -mag;
    }
    return c;
}

struct GroupedDraw {
    std::size_t group = 0;
    std::size_t draw = 0;
};

inline std::vector<GroupedDraw> cross(std::size_t groups, std::size_t draws) {
    std::vector<GroupedDraw> out;
    out.reserve(groups * draws);
    for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t k = 0; k < draws; ++k) out.push_back({g, k});
    return out;
}

inline SweepRecord timed_sup_record(const Fewnomial& q, std::uint64_t draw_seed,
                                    double decades, const GridSpec& grid, double tol) {
    auto t0 = std::chrono::steady_clock::now();
    SupResult sr = multiplier_sup(q, grid, tol, 1);
    auto t1 = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.seed = draw_seed;
    rec.d = q.d();
    rec.exponents = q.exponents;
    rec.coeff_decades = decades;
    rec.sup = sr.sup;
    rec.argmax_xi = sr.argmax_xi;
    rec.certified_fraction = sr.certified_fraction;
    rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
    return rec;
}

/// Group records by key, keep certified ones, and fit the shared summary
/// statistics (bootstrap slope CI of group max vs log2 key, per-record
/// rank correlation with log key).
inline GrowthSummary summarize(const std::vector<SweepRecord>& records,
                               const std::vector<double>& keys, std::string group_by,
                               std::uint64_t seed) {
    if (records.size() != keys.size()) throw InvalidDimensions();
    GrowthSummary out;
    out.group_by = std::move(group_by);

    std::map<double, std::vector<double>> by_key;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].certified_fraction == 1.0) by_key[keys[i]].push_back(records[i].sup);

    std::vector<double> gx;
    std::vector<std::vector<double>> gd;
    for (auto& [key, sups] : by_key) {
        GroupSummary g;
        g.key = key;
        g.count = static_cast<std::int64_t>(sups.size());
        g.max_sup = *std::max_element(sups.begin(), sups.end());
        g.median_sup = median(sups);
        out.groups.push_back(g);
        if (g.count >= 20) {
            gx.push_back(std::log2(key));
            gd.push_back(sups);
        }
    }

    if (gx.size() >= 2) {
        SlopeCi ci = bootstrap_group_max_slope_ci(gx, gd, 1000,
                                                  derive_seed(seed, kStreamStats, 1));
        out.slope_defined = true;
        out.slope = ci.slope;
        out.ci_lo = ci.lo;
        out.ci_hi = ci.hi;
        out.ci_half_width = 0.5 * (ci.hi - ci.lo);
    }

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].certified_fraction != 1.0) continue;
        xs.push_back(std::log(keys[i]));
        ys.push_back(records[i].sup);
    }
    bool key_varies = !xs.empty() &&
                      *std::max_element(xs.begin(), xs.end()) >
                          *std::min_element(xs.begin(), xs.end());
    if (xs.size() >= 10 && key_varies) {
        KendallTest kt = kendall_test_positive(xs, ys, 2000, derive_seed(seed, kStreamStats, 2));
        out.tau_defined = true;
        out.tau = kt.tau;
        out.tau_p_value = kt.p_value;
    }
    return out;
}

}

/// Random phase with d distinct exponents from {2..max_exp}, signs fair and
/// log10 magnitudes uniform over the given number of decades.
inline Fewnomial sample_fewnomial(std::uint64_t seed, int d, int max_exp, double coeff_decades) {
    if (d < 1 || max_exp < d + 1) throw InvalidDimensions();
    if (!(coeff_decades > 0.0)) throw InvalidDimensions();
    Rng erng(derive_seed(seed, expdetail::kStreamExponents));
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(max_exp - 1));
    for (int a = 2; a <= max_exp; ++a) pool.push_back(a);
    for (int i = 0; i < d; ++i) {
        std::size_t j = static_cast<std::size_t>(i) +
                        erng.below(pool.size() - static_cast<std::size_t>(i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    std::vector<int> exps(pool.begin(), pool.begin() + d);
    std::sort(exps.begin(), exps.end());
    Rng crng(derive_seed(seed, expdetail::kStreamCoeffs));
    return make_fewnomial(expdetail::sample_signed_coeffs(crng, d, coeff_decades), std::move(exps));
}

/// Fixed-d sweep across exponent sets: does the sup care about the top degree?
inline SweepResult uniformity_sweep(int d, const std::vector<std::vector<int>>& exponent_sets,
                                    int draws, double coeff_decades, const GridSpec& grid,
                                    double tol, std::uint64_t seed = 1, int threads = 0) {
    if (exponent_sets.empty()) throw InvalidDimensions();
    for (const auto& set : exponent_sets)
        if (static_cast<int>(set.size()) != d) throw InvalidDimensions();
    if (draws < 1) throw InsufficientPoints();
    if (!(coeff_decades > 0.0)) throw InvalidDimensions();

    auto jobs = expdetail::cross(exponent_sets.size(), static_cast<std::size_t>(draws));
    auto records = parallel_map(jobs, [&](const expdetail::GroupedDraw& job) {
        std::uint64_t ds = derive_seed(seed, job.group, job.draw);
        Rng crng(derive_seed(ds, expdetail::kStreamCoeffs));
        Fewnomial q = make_fewnomial(
            expdetail::sample_signed_coeffs(crng, d, coeff_decades), exponent_sets[job.group]);
        return expdetail::timed_sup_record(q, ds, coeff_decades, grid, tol);
    }, threads);

    std::vector<double> keys(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        keys[i] = static_cast<double>(records[i].exponents.back());

    SweepResult out;
    out.summary = expdetail::summarize(records, keys, "n", seed);
    out.records = std::move(records);
    std::sort(out.records.begin(), out.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.seed < b.seed; });
    return out;
}

/// Full polynomials (all exponents 2..n) probed at xi = 0: the ensemble where
/// the classical sup grows like log n once every monomial is present.
inline SweepResult parissis_growth(const std::vector<int>& n_values, int draws, double tol,
                                   double coeff_decades = 2.0, std::uint64_t seed = 1,
                                   int threads = 0) {
    if (n_values.empty()) throw InvalidDimensions();
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < 2) throw InvalidDimensions();
        if (i > 0 && n_values[i] <= n_values[i - 1]) throw InvalidDimensions();
    }
    if (draws < 1) throw InsufficientPoints();

    auto jobs = expdetail::cross(n_values.size(), static_cast<std::size_t>(draws));
    auto records = parallel_map(jobs, [&](const expdetail::GroupedDraw& job) {
        int n = n_values[job.group];
        std::vector<int> exps;
        for (int a = 2; a <= n; ++a) exps.push_back(a);
        std::uint64_t ds = derive_seed(seed, job.group, job.draw);
        Rng crng(derive_seed(ds, expdetail::kStreamCoeffs));
        int dn = static_cast<int>(exps.size());
        Fewnomial q = make_fewnomial(expdetail::sample_signed_coeffs(crng, dn, coeff_decades),
                                     std::move(exps));

        auto t0 = std::chrono::steady_clock::now();
        MultiplierSample ms = pv_multiplier_sample(q, 0.0, tol);
        auto t1 = std::chrono::steady_clock::now();
        SweepRecord rec;
        rec.seed = ds;
        rec.d = q.d();
        rec.exponents = q.exponents;
        rec.coeff_decades = coeff_decades;
        rec.sup = std::abs(ms.value);
        rec.argmax_xi = 0.0;
        rec.certified_fraction = ms.certified ? 1.0 : 0.0;
        rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
        return rec;
    }, threads);

    std::vector<double> keys(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        keys[i] = static_cast<double>(records[i].exponents.back());

    SweepResult out;
    out.summary = expdetail::summarize(records, keys, "n", seed);
    out.records = std::move(records);
    std::sort(out.records.begin(), out.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.seed < b.seed; });
    return out;
}

/// Exploratory: how does the ensemble max grow with the number of monomials?
inline SweepResult logd_scan(const std::vector<int>& d_values, int max_exp, int draws,
                             const GridSpec& grid, double tol, double coeff_decades = 2.0,
                             std::uint64_t seed = 1, int threads = 0) {
    if (d_values.empty()) throw InvalidDimensions();
    for (int d : d_values)
        if (d < 1 || max_exp < d + 1) throw InvalidDimensions();
    if (draws < 1) throw InsufficientPoints();

    auto jobs = expdetail::cross(d_values.size(), static_cast<std::size_t>(draws));
    auto records = parallel_map(jobs, [&](const expdetail::GroupedDraw& job) {
        std::uint64_t ds = derive_seed(seed, job.group, job.draw);
        Fewnomial q = sample_fewnomial(ds, d_values[job.group], max_exp, coeff_decades);
        return expdetail::timed_sup_record(q, ds, coeff_decades, grid, tol);
    }, threads);

    std::vector<double> keys(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        keys[i] = static_cast<double>(records[i].d);

    SweepResult out;
    out.summary = expdetail::summarize(records, keys, "d", seed);
    out.summary.exploratory = true;

    // c in max_sup ~ a (log d)^c needs at least two groups beyond d = 1
    std::vector<double> xs, ys;
    for (const GroupSummary& g : out.summary.groups) {
        if (g.key < 2.0 || g.max_sup <= 0.0) continue;
        xs.push_back(std::log(std::log(g.key)));
        ys.push_back(std::log(g.max_sup));
    }
    if (xs.size() >= 2 && xs.front() != xs.back()) out.summary.c_hat = lin_fit(xs, ys).slope;

    out.records = std::move(records);
    std::sort(out.records.begin(), out.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) { return a.seed < b.seed; });
    return out;
}

// Structural property battery for the scale decomposition.

struct InstanceCheck {
    bool set_equality = true;
    bool connectedness = true;
    bool cardinality = true;
    bool component_count = true;
    bool domination = true;

    bool pass() const {
        return set_equality && connectedness && cardinality && component_count && domination;
    }
};

struct PropertyCounts {
    std::int64_t checked = 0;
    std::int64_t failed = 0;
};

struct FailingInstance {
    std::uint64_t seed = 0;
    Fewnomial q;
    int gamma = 0;
    std::string property;
};

struct PropertyReport {
    std::int64_t instances = 0;
    std::vector<int> gammas;
    PropertyCounts set_equality, connectedness, cardinality, component_count, domination;
    std::vector<FailingInstance> failures;  // capped at 32, enough to replay

    bool pass() const {
        return set_equality.failed == 0 && connectedness.failed == 0 && cardinality.failed == 0 &&
               component_count.failed == 0 && domination.failed == 0;
    }
};

/// Brute-force bad set of one pair: walk every scale in a ring around the
/// engine's answer and apply the defining inequality pointwise.
inline IntegerInterval bruteforce_bad_set(const ScaleFrame& f, int gamma, int j1, int j2,
                                          int level, std::int64_t scan_lo, std::int64_t scan_hi) {
    detail::PairTerm p1 = detail::pair_term(f, std::min(j1, j2), level);
    detail::PairTerm p2 = detail::pair_term(f, std::max(j1, j2), level);
    unsigned n = static_cast<unsigned>(f.n());
    std::int64_t lo = 0, hi = -1;
    bool open = false;
    for (std::int64_t l = scan_lo; l <= scan_hi; ++l) {
        if (detail::bad_at(p1, p2, l, gamma, n)) {
            if (!open) {
                lo = l;
                open = true;
            } else if (l != hi + 1) {
                return IntegerInterval::whole();  // disconnected: poison value
            }
            hi = l;
        }
    }
    if (!open) return IntegerInterval::empty();
    return {lo, hi};
}

/// One instance through the whole battery at one slack.
inline InstanceCheck check_instance(const Fewnomial& q, int gamma) {
    InstanceCheck out;
    ScaleFrame f = scale_frame(q);
    const std::int64_t n = f.n();
    std::int64_t hull_lo = IntegerInterval::pos_inf, hull_hi = IntegerInterval::neg_inf;

    for (int level : {0, 1}) {
        for (int j1 = 1; j1 <= f.d(); ++j1) {
            for (int j2 = j1 + 1; j2 <= f.d(); ++j2) {
                IntegerInterval found = detail::bad_interval(f, gamma, j1, j2, level);
                std::int64_t pad = 40 + 4 * n * gamma;
                std::int64_t center = found.is_empty()
                                          ? 0
                                          : found.lo + (found.hi - found.lo) / 2;
                std::int64_t scan_lo = (found.is_empty() ? center : found.lo) - pad;
                std::int64_t scan_hi = (found.is_empty() ? center : found.hi) + pad;
                IntegerInterval brute =
                    bruteforce_bad_set(f, gamma, j1, j2, level, scan_lo, scan_hi);
                if (brute == IntegerInterval::whole()) {
                    out.connectedness = false;
                } else if (!(brute == found)) {
                    out.set_equality = false;
                }
                if (!found.is_empty()) {
                    if (static_cast<std::int64_t>(found.cardinality()) > 4 * n * gamma)
                        out.cardinality = false;
                    hull_lo = std::min(hull_lo, found.lo);
                    hull_hi = std::max(hull_hi, found.hi);
                }
            }
        }
    }

    IntegerInterval window = hull_lo > hull_hi
                                 ? IntegerInterval{-10 * n, 10 * n}
                                 : IntegerInterval{hull_lo - 10 * n, hull_hi + 10 * n};
    std::int64_t d = f.d();
    auto level0 = good_components(f, gamma, window, false);
    auto both = good_components(f, gamma, window, true);
    if (static_cast<std::int64_t>(level0.size()) > d * d) out.component_count = false;
    if (static_cast<std::int64_t>(both.size()) > d * d * d * d) out.component_count = false;

    // domination runs at the provable slack for this d, not the scan slack
    int gdom = 6;
    while ((std::int64_t{1} << (gdom - 6)) < d) ++gdom;
    for (const GoodComponent& c : good_components(f, gdom, window, true)) {
        if (!verify_domination(f, c).pass) {
            out.domination = false;
            break;
        }
    }
    return out;
}

inline PropertyReport structure_suite(int instances, std::uint64_t seed,
                                      const std::vector<int>& gamma_list, int threads = 0) {
    if (instances < 1) throw InsufficientPoints();
    if (gamma_list.empty()) throw InvalidDimensions();
    PropertyReport rep;
    rep.instances = instances;
    rep.gammas = gamma_list;

    std::vector<std::uint64_t> idx(static_cast<std::size_t>(instances));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    struct Row {
        std::uint64_t seed;
        Fewnomial q;
        std::vector<InstanceCheck> checks;
    };
    auto rows = parallel_map(idx, [&](std::uint64_t i) {
        Row row;
        row.seed = derive_seed(seed, 0x5717, i);
        Rng prng(derive_seed(row.seed, 0x9e0));
        int d = 1 + static_cast<int>(prng.below(4));
        int max_exp = d + 1 + static_cast<int>(prng.below(11));
        double decades = prng.uniform(0.5, 12.0);
        row.q = sample_fewnomial(row.seed, d, max_exp, decades);
        for (int g : gamma_list) row.checks.push_back(check_instance(row.q, g));
        return row;
    }, threads);

    auto tally = [&rep](PropertyCounts& c, bool ok, const Row& row, int gamma, const char* name) {
        ++c.checked;
        if (!ok) {
            ++c.failed;
            if (rep.failures.size() < 32) rep.failures.push_back({row.seed, row.q, gamma, name});
        }
    };
    for (const Row& row : rows) {
        for (std::size_t k = 0; k < gamma_list.size(); ++k) {
            const InstanceCheck& ic = row.checks[k];
            int g = gamma_list[k];
            tally(rep.set_equality, ic.set_equality, row, g, "set_equality");
            tally(rep.connectedness, ic.connectedness, row, g, "connectedness");
            tally(rep.cardinality, ic.cardinality, row, g, "cardinality");
            tally(rep.component_count, ic.component_count, row, g, "component_count");
            tally(rep.domination, ic.domination, row, g, "domination");
        }
    }
    return rep;
}

}
