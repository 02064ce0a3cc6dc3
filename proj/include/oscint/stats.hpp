#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "oscint/errors.hpp"
#include "oscint/rng.hpp"

namespace oscint {

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    int n = 0;
};

inline LinFit lin_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidDimensions();
    if (xs.size() < 2) throw InsufficientPoints();
    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw InsufficientPoints();
    LinFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (f.intercept + f.slope * xs[i]);
        rss += r * r;
    }
    f.rms_residual = std::sqrt(rss / n);
    f.n = static_cast<int>(xs.size());
    return f;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw InsufficientPoints();
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    if (v.size() % 2 == 1) return v[m];
    return 0.5 * (v[m - 1] + v[m]);
}

struct SlopeCi {
    double slope = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int groups_used = 0;
};

/// Bootstrap CI for the slope of (per-group max of draws) against the group
/// coordinate. Draws are resampled with replacement within each group; the
/// CI is the 2.5/97.5 percentile of the resampled slopes. Monotone transforms
/// of the draws commute with the max, so pass log-scaled draws for log fits.
inline SlopeCi bootstrap_group_max_slope_ci(const std::vector<double>& group_x,
                                            const std::vector<std::vector<double>>& group_draws,
                                            int resamples = 1000, std::uint64_t seed = 1) {
    if (group_x.size() != group_draws.size()) throw InvalidDimensions();
    std::vector<double> xs;
    std::vector<const std::vector<double>*> ds;
    for (std::size_t g = 0; g < group_x.size(); ++g) {
        if (group_draws[g].empty()) continue;
        xs.push_back(group_x[g]);
        ds.push_back(&group_draws[g]);
    }
    if (xs.size() < 2 || resamples < 1) throw InsufficientPoints();

    std::vector<double> ys(xs.size());
    for (std::size_t g = 0; g < ds.size(); ++g)
        ys[g] = *std::max_element(ds[g]->begin(), ds[g]->end());

    SlopeCi out;
    out.slope = lin_fit(xs, ys).slope;
    out.groups_used = static_cast<int>(xs.size());

    std::vector<double> slopes;
    slopes.reserve(resamples);
    std::vector<double> ry(xs.size());
    for (int r = 0; r < resamples; ++r) {
        Rng rng(derive_seed(seed, 0xb007'57a9, static_cast<std::uint64_t>(r)));
        for (std::size_t g = 0; g < ds.size(); ++g) {
            const std::vector<double>& d = *ds[g];
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < d.size(); ++k) m = std::max(m, d[rng.below(d.size())]);
            ry[g] = m;
        }
        slopes.push_back(lin_fit(xs, ry).slope);
    }
    std::sort(slopes.begin(), slopes.end());
    auto pct = [&](double p) {
        double idx = p * (static_cast<double>(slopes.size()) - 1.0);
        std::size_t i0 = static_cast<std::size_t>(idx);
        std::size_t i1 = std::min(i0 + 1, slopes.size() - 1);
        double w = idx - static_cast<double>(i0);
        return (1.0 - w) * slopes[i0] + w * slopes[i1];
    };
    out.lo = pct(0.025);
    out.hi = pct(0.975);
    return out;
}

/// Kendall tau-b (tie-corrected rank correlation).
inline double kendall_tau_b(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidDimensions();
    std::size_t n = xs.size();
    if (n < 2) throw InsufficientPoints();
    double conc = 0.0, disc = 0.0, tx = 0.0, ty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
            if (dx == 0.0 && dy == 0.0) {
                tx += 1.0;
                ty += 1.0;
            } else if (dx == 0.0) {
                tx += 1.0;
            } else if (dy == 0.0) {
                ty += 1.0;
            } else if (dx * dy > 0.0) {
                conc += 1.0;
            } else {
                disc += 1.0;
            }
        }
    }
    double n0 = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
    double denom = std::sqrt((n0 - tx) * (n0 - ty));
    if (denom == 0.0) throw InsufficientPoints();
    return (conc - disc) / denom;
}

struct KendallTest {
    double tau = 0.0;
    double p_value = 1.0;
    int n = 0;
};

/// One-sided permutation test for positive association: y is shuffled and the
/// p-value is the add-one-smoothed fraction of permuted taus at least as large
/// as the observed one.
inline KendallTest kendall_test_positive(const std::vector<double>& xs,
                                         const std::vector<double>& ys, int permutations = 2000,
                                         std::uint64_t seed = 1) {
    KendallTest out;
    out.tau = kendall_tau_b(xs, ys);
    out.n = static_cast<int>(xs.size());
    if (permutations < 1) throw InsufficientPoints();
    std::vector<double> py = ys;
    int at_least = 0;
    for (int p = 0; p < permutations; ++p) {
        Rng rng(derive_seed(seed, 0x7a0b'51de, static_cast<std::uint64_t>(p)));
        for (std::size_t i = py.size(); i > 1; --i) std::swap(py[i - 1], py[rng.below(i)]);
        if (kendall_tau_b(xs, py) >= out.tau) ++at_least;
    }
    out.p_value = (1.0 + at_least) / (1.0 + permutations);
    return out;
}

}
