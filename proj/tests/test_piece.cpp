#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oscint/piece.hpp"

using namespace oscint;

namespace {
GoodComponent solo_component(const Fewnomial& q, std::int64_t lo, std::int64_t hi) {
    auto comps = good_components(scale_frame(q), 1, {lo, hi});
    REQUIRE(comps.size() == 1);
    return comps[0];
}
}

TEST_CASE("component cutoff is the window bump in component scale") {
    PartitionOfUnity pou{2.0};
    GoodComponent c;
    c.lo = 3;
    c.hi = 6;
    CHECK(component_cutoff(pou, c, std::exp2(3.0)) == 0.0);
    CHECK(component_cutoff(pou, c, std::exp2(4.0)) == 1.0);
    CHECK(component_cutoff(pou, c, std::exp2(7.0)) == 1.0);
    CHECK(component_cutoff(pou, c, std::exp2(8.0)) == 0.0);
    CHECK(component_cutoff(pou, c, 0.0) == 0.0);
    CHECK(component_cutoff(pou, c, -std::exp2(4.0)) == 1.0);  // even in t
}

TEST_CASE("piece argument checks") {
    Fewnomial q = make_fewnomial({1.0, 1.0}, {2, 4});
    auto comps = good_components(scale_frame(q), 2, {-50, 50});
    REQUIRE(comps.size() == 2);
    CHECK_THROWS_AS(piece_multiplier_sample(q, comps[1], -1, 0.0, 1e-6),
                    std::invalid_argument);
    GoodComponent broken = comps[1];
    broken.j1 = 5;
    CHECK_THROWS_AS(piece_multiplier_sample(q, broken, 0, 0.0, 1e-6), IndexOutOfRange);
}

TEST_CASE("pieces outside the component support vanish exactly") {
    // component [5, 50] of t^2 + t^4 lives at t ~ 2^{5/4} and above; small
    // offsets of the j1-anchored bump land below the window
    Fewnomial q = make_fewnomial({1.0, 1.0}, {2, 4});
    auto comps = good_components(scale_frame(q), 2, {-50, 50});
    REQUIRE(comps.size() == 2);
    const GoodComponent& c = comps[1];
    for (std::int64_t lp = 0; lp <= 3; ++lp) {
        PieceSample s = piece_multiplier_sample(q, c, lp, 1.0, 1e-6);
        CHECK(s.certified);
        CHECK(s.value == std::complex<double>(0.0, 0.0));
        CHECK(s.segments == 0);
    }
}

TEST_CASE("pieces are uniformly bounded") {
    // a smooth cutoff of 1/t over two octaves integrates to at most 2 ln 2
    Fewnomial q = make_fewnomial({1.0}, {2});
    GoodComponent c = solo_component(q, -40, 40);
    double bound = 2.0 * std::log(2.0) + 1e-3;
    for (std::int64_t lp : {0, 3, 8}) {
        for (double xi : {0.0, 0.7, -19.0}) {
            PieceSample s = piece_multiplier_sample(q, c, lp, xi, 1e-6);
            REQUIRE(s.certified);
            CHECK(std::abs(s.value) <= bound);
        }
    }
}

TEST_CASE("curvature chain ratio for a pure parabola") {
    // lambda^{2(gamma+l)} |Q''| / 2^{l-2} = 2 / 2^{-2} = 8, all scales
    Fewnomial q = make_fewnomial({1.0}, {2});
    GoodComponent c = solo_component(q, -40, 40);
    CHECK(curvature_chain_min_ratio(q, c, {0, 16}) == Catch::Approx(8.0));
    CHECK_THROWS_AS(curvature_chain_min_ratio(q, c, IntegerInterval::empty()), EmptyWindow);
}

TEST_CASE("parabola pieces decay at the square-root rate") {
    Fewnomial q = make_fewnomial({1.0}, {2});
    GoodComponent c = solo_component(q, -40, 40);
    DecayFit fit = decay_fit(q, c, {}, {4, 16}, 1e-6);
    CHECK(fit.points_used >= 10);
    CHECK(fit.delta_hat > 0.4);
    CHECK(fit.delta_hat < 0.6);
    CHECK(fit.residual <= 0.5);
    CHECK(fit.second_deriv_min_ratio == Catch::Approx(8.0));
    CHECK(fit.C_hat > 0.0);
}

TEST_CASE("an even phase at zero frequency has no usable decay points") {
    // every piece of t^2 vanishes at xi = 0 by antisymmetry, so a fit
    // restricted to that single frequency cannot proceed
    Fewnomial q = make_fewnomial({1.0}, {2});
    GoodComponent c = solo_component(q, -40, 40);
    CHECK_THROWS_AS(decay_fit(q, c, {0.0}, {4, 16}, 1e-6), InsufficientPoints);
    CHECK_THROWS_AS(decay_fit(q, c, {}, {-2, 16}, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(decay_fit(q, c, {}, IntegerInterval::whole(), 1e-6), EmptyWindow);
}
