#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oscint/stats.hpp"

using namespace oscint;

TEST_CASE("line fit recovers exact lines") {
    LinFit f = lin_fit({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
    CHECK(f.slope == Catch::Approx(2.0));
    CHECK(f.intercept == Catch::Approx(1.0));
    CHECK(f.rms_residual == Catch::Approx(0.0).margin(1e-12));
    CHECK(f.n == 4);

    CHECK_THROWS_AS(lin_fit({1.0}, {1.0, 2.0}), InvalidDimensions);
    CHECK_THROWS_AS(lin_fit({1.0}, {1.0}), InsufficientPoints);
    CHECK_THROWS_AS(lin_fit({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), InsufficientPoints);
}

TEST_CASE("median of odd and even lists") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(median({7.0}) == 7.0);
    CHECK_THROWS_AS(median({}), InsufficientPoints);
}

TEST_CASE("bootstrap slope of constant groups is zero") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<std::vector<double>> draws(4, std::vector<double>(20, 5.0));
    SlopeCi ci = bootstrap_group_max_slope_ci(x, draws);
    CHECK(ci.slope == Catch::Approx(0.0).margin(1e-12));
    CHECK(ci.lo == Catch::Approx(0.0).margin(1e-12));
    CHECK(ci.hi == Catch::Approx(0.0).margin(1e-12));
    CHECK(ci.groups_used == 4);
}

TEST_CASE("bootstrap detects a clean trend") {
    Rng rng(9);
    std::vector<double> x;
    std::vector<std::vector<double>> draws;
    for (int g = 0; g < 5; ++g) {
        x.push_back(static_cast<double>(g));
        std::vector<double> d;
        for (int k = 0; k < 30; ++k) d.push_back(2.0 * g + rng.uniform(0.0, 0.1));
        draws.push_back(d);
    }
    SlopeCi ci = bootstrap_group_max_slope_ci(x, draws, 1000, 4);
    CHECK(ci.slope == Catch::Approx(2.0).margin(0.1));
    CHECK(ci.lo > 1.5);
    CHECK(ci.hi < 2.5);

    // deterministic for a fixed seed
    SlopeCi again = bootstrap_group_max_slope_ci(x, draws, 1000, 4);
    CHECK(again.lo == ci.lo);
    CHECK(again.hi == ci.hi);

    CHECK_THROWS_AS(bootstrap_group_max_slope_ci({1.0}, {{1.0}}), InsufficientPoints);
    CHECK_THROWS_AS(bootstrap_group_max_slope_ci({1.0, 2.0}, {{1.0}}), InvalidDimensions);
}

TEST_CASE("empty groups are skipped in the bootstrap") {
    std::vector<double> x = {1.0, 2.0, 3.0};
    std::vector<std::vector<double>> draws = {{1.0, 1.1}, {}, {3.0, 2.9}};
    SlopeCi ci = bootstrap_group_max_slope_ci(x, draws);
    CHECK(ci.groups_used == 2);
    CHECK(ci.slope == Catch::Approx((3.0 - 1.1) / 2.0));
}

TEST_CASE("kendall tau with ties") {
    // pairs: (1,1),(2,2),(3,3),(3,4): one tie in x, rest concordant
    double tau = kendall_tau_b({1.0, 2.0, 3.0, 3.0}, {1.0, 2.0, 3.0, 4.0});
    // 5 concordant, 0 discordant, 1 x-tie: tau = 5 / sqrt(5*6)
    CHECK(tau == Catch::Approx(5.0 / std::sqrt(30.0)));

    CHECK(kendall_tau_b({1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}) == Catch::Approx(-1.0));
    CHECK_THROWS_AS(kendall_tau_b({1.0, 1.0}, {1.0, 2.0}), InsufficientPoints);
    CHECK_THROWS_AS(kendall_tau_b({1.0}, {1.0, 2.0}), InvalidDimensions);
}

TEST_CASE("permutation test flags a monotone relation") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 24; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(static_cast<double>(i));
    }
    KendallTest t = kendall_test_positive(xs, ys, 2000, 1);
    CHECK(t.tau == Catch::Approx(1.0));
    CHECK(t.p_value < 0.01);
    CHECK(t.n == 24);

    KendallTest again = kendall_test_positive(xs, ys, 2000, 1);
    CHECK(again.p_value == t.p_value);

    // reversing the trend makes the one-sided p-value large
    std::vector<double> rev(ys.rbegin(), ys.rend());
    KendallTest bad = kendall_test_positive(xs, rev, 500, 1);
    CHECK(bad.p_value > 0.5);
}
