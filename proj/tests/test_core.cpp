#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oscint/dyadic_compare.hpp"
#include "oscint/fewnomial.hpp"
#include "oscint/interval.hpp"
#include "oscint/partition.hpp"
#include "oscint/rng.hpp"
#include "oscint/scale_frame.hpp"
#include "oscint/sine_integral.hpp"

using namespace oscint;

TEST_CASE("make_fewnomial validates its input") {
    CHECK_THROWS_AS(make_fewnomial({1.0, 2.0}, {2}), std::invalid_argument);
    CHECK_THROWS_AS(make_fewnomial({1.0}, {1}), LinearTermPresent);
    CHECK_THROWS_AS(make_fewnomial({1.0}, {0}), NonIncreasingExponents);
    CHECK_THROWS_AS(make_fewnomial({1.0, 1.0}, {3, 2}), NonIncreasingExponents);
    CHECK_THROWS_AS(make_fewnomial({1.0, 1.0}, {2, 2}), NonIncreasingExponents);
    CHECK_THROWS_AS(make_fewnomial({0.0}, {2}), ZeroCoefficient);
    CHECK_THROWS_AS(make_fewnomial({std::nan("")}, {2}), ZeroCoefficient);
    Fewnomial empty = make_fewnomial({}, {});
    CHECK(empty.d() == 0);
    Fewnomial q = make_fewnomial({1.0, -2.5}, {2, 7});
    CHECK(q.d() == 2);
    CHECK(q.n() == 7);
}

TEST_CASE("pow_int matches exponentiation") {
    CHECK(pow_int(2.0, 10) == 1024.0);
    CHECK(pow_int(-3.0, 3) == -27.0);
    CHECK(pow_int(5.0, 0) == 1.0);
    CHECK(pow_int(2.0, -2) == 0.25);
    CHECK(pow_int(10.0, 17) == 1e17);
}

TEST_CASE("eval_phase derivatives of t^2 + t^3") {
    Fewnomial q = make_fewnomial({1.0, 1.0}, {2, 3});
    CHECK(eval_phase(q, 2.0) == 12.0);
    CHECK(eval_phase(q, 2.0, 1) == 16.0);
    CHECK(eval_phase(q, 2.0, 2) == 14.0);
    CHECK(eval_phase(q, -1.0) == 0.0);

    Fewnomial m = make_fewnomial({1.0}, {5});
    CHECK(eval_phase(m, 2.0, 3) == 240.0);  // 5*4*3 * 2^2
    CHECK(eval_phase(m, 2.0, 6) == 0.0);    // differentiated away

    CHECK(eval_abs_bound(q, 2.0) == 12.0);
    CHECK(eval_abs_bound(q, 2.0, 1) == 16.0);
}

TEST_CASE("eval_phase flags overflow") {
    Fewnomial q = make_fewnomial({1.0}, {100});
    CHECK_THROWS_AS(eval_phase(q, 1e20), Overflow);
}

TEST_CASE("odd part and parity helpers") {
    Fewnomial q = make_fewnomial({1.0, 1.0}, {2, 3});
    CHECK(odd_part_over_t(q, 2.0) == 4.0);  // t^3 / t at t=2
    CHECK(has_odd_term(q));
    Fewnomial even = make_fewnomial({0.3, -1.8}, {2, 50});
    CHECK(odd_part_over_t(even, 2.0) == 0.0);
    CHECK_FALSE(has_odd_term(even));
}

TEST_CASE("dilate rescales the argument") {
    Fewnomial q = make_fewnomial({0.7, -1.3}, {2, 5});
    for (double r : {0.125, 3.0}) {
        Fewnomial qr = dilate(q, r);
        for (double t : {0.5, 1.0, 2.0}) {
            CHECK(eval_phase(qr, t) ==
                  Catch::Approx(eval_phase(q, r * t)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(dilate(q, 1e200), Overflow);
}

TEST_CASE("negate flips the sign of the phase") {
    Fewnomial q = make_fewnomial({1.0, 1.0}, {2, 3});
    Fewnomial m = negate(q);
    for (double t : {0.3, 1.7}) CHECK(eval_phase(m, t) == -eval_phase(q, t));
}

TEST_CASE("floor_log2_pow is exact") {
    CHECK(exact::floor_log2_pow(3.0, 2) == 3);
    CHECK(exact::floor_log2_pow(0.5, 3) == -3);
    CHECK(exact::floor_log2_pow(1024.0, 5) == 50);
    CHECK(exact::floor_log2_pow(1.0, 7) == 0);
    CHECK(exact::floor_log2_pow(-4.0, 1) == 2);
}

TEST_CASE("float_bracketed_floor brackets hold in double arithmetic") {
    Rng rng(derive_seed(42, 1));
    for (int i = 0; i < 2000; ++i) {
        double a = rng.log_uniform_magnitude(12.0) * (rng.coin() ? 1.0 : -1.0);
        unsigned den = 1 + static_cast<unsigned>(rng.below(12));
        std::int64_t k = detail::float_bracketed_floor(a, den);
        double mag = std::fabs(a);
        REQUIRE(std::exp2(static_cast<double>(k) / den) <= mag);
        REQUIRE(std::exp2(static_cast<double>(k + 1) / den) > mag);
    }
}

TEST_CASE("compare_weighted_dyadic settles exact ties") {
    // |1*1|^4 * 2^{2l} vs |1*1|^4 * 2^{4l + 4s}
    CHECK(exact::compare_weighted_dyadic(1.0, 1, 2, 1.0, 1, 4, 0, 0, 4) == 0);
    // |2|^4 2^{2l} = 2^{4+2l} vs 2^{4l}: equal at l=2
    CHECK(exact::compare_weighted_dyadic(2.0, 1, 2, 1.0, 1, 4, 2, 0, 4) == 0);
    CHECK(exact::compare_weighted_dyadic(2.0, 1, 2, 1.0, 1, 4, 1, 0, 4) > 0);
    CHECK(exact::compare_weighted_dyadic(2.0, 1, 2, 1.0, 1, 4, 3, 0, 4) < 0);
    // weights and the s-shift enter the second term
    CHECK(exact::compare_weighted_dyadic(1.0, 2, 2, 1.0, 1, 2, 0, 1, 2) == 0);
    // near-tie off by one ulp resolves exactly
    double up = std::nextafter(1.0, 2.0);
    CHECK(exact::compare_weighted_dyadic(up, 1, 2, 1.0, 1, 2, 5, 0, 3) > 0);
    CHECK(exact::compare_weighted_dyadic(1.0, 1, 2, up, 1, 2, 5, 0, 3) < 0);
}

TEST_CASE("scale frame of simple phases") {
    Fewnomial q = make_fewnomial({2.0}, {2});
    ScaleFrame f = scale_frame(q);
    CHECK(f.n() == 2);
    CHECK(f.lambda == Catch::Approx(std::sqrt(2.0)));
    CHECK(f.b[0] == 2);
    CHECK(f.B[0] == -2);
    CHECK(f.gamma[0] == Catch::Approx(-1.0));

    Fewnomial p = make_fewnomial({-0.3}, {2});
    ScaleFrame g = scale_frame(p);
    CHECK(g.b[0] == -4);
    CHECK(g.B[0] == 4);
    CHECK(g.gamma[0] == Catch::Approx(2.0));

    CHECK_THROWS_AS(scale_frame(make_fewnomial({}, {})), DegeneratePhase);
}

TEST_CASE("integer intervals") {
    IntegerInterval e = IntegerInterval::empty();
    CHECK(e.is_empty());
    CHECK(e.cardinality() == 0);
    IntegerInterval a{-3, 4};
    CHECK(a.cardinality() == 8);
    CHECK(a.contains(0));
    CHECK_FALSE(a.contains(5));
    CHECK(a.intersect({2, 9}) == IntegerInterval{2, 4});
    CHECK(a.intersect({5, 9}).is_empty());
    CHECK_THROWS_AS(IntegerInterval::whole().cardinality(), EmptyWindow);

    auto merged = merge_intervals({{5, 9}, {-2, 1}, {2, 3}, IntegerInterval::empty()});
    REQUIRE(merged.size() == 2);
    CHECK(merged[0] == IntegerInterval{-2, 3});
    CHECK(merged[1] == IntegerInterval{5, 9});

    auto comp = complement_in({{-1, 2}, {6, 7}}, {-5, 10});
    REQUIRE(comp.size() == 3);
    CHECK(comp[0] == IntegerInterval{-5, -2});
    CHECK(comp[1] == IntegerInterval{3, 5});
    CHECK(comp[2] == IntegerInterval{8, 10});
    CHECK_THROWS_AS(complement_in({}, IntegerInterval::whole()), EmptyWindow);
}

TEST_CASE("partition of unity in log scale") {
    CHECK(smooth_step(0.0) == 1.0);
    CHECK(smooth_step(1.0) == 0.0);
    CHECK(smooth_step(0.5) == Catch::Approx(0.5));
    CHECK(bump0(0.0) == 0.0);
    CHECK(bump0(2.0) == 0.0);
    CHECK(bump0(1.0) == Catch::Approx(1.0));

    // shifted bumps sum to one
    for (double u : {-2.3, 0.0, 3.7}) {
        double s = 0.0;
        for (std::int64_t l = -8; l <= 8; ++l) s += bump_at_scale(u, l);
        CHECK(s == Catch::Approx(1.0).margin(1e-12));
    }

    PartitionOfUnity pou{std::exp2(0.25)};
    double t = 3.7;
    double s = 0.0;
    for (std::int64_t l = -40; l <= 40; ++l) s += bump(pou, l, t);
    CHECK(s == Catch::Approx(1.0).margin(1e-12));
    CHECK(bump(pou, 0, 0.0) == 0.0);

    // window: support (lo, hi+2), plateau [lo+1, hi+1]
    CHECK(window_bump(3.0, 3, 6) == 0.0);
    CHECK(window_bump(4.0, 3, 6) == 1.0);
    CHECK(window_bump(7.0, 3, 6) == 1.0);
    CHECK(window_bump(8.0, 3, 6) == 0.0);
    CHECK(window_bump(3.5, 3, 6) > 0.0);
    CHECK(window_bump(0.0, IntegerInterval::empty()) == 0.0);
}

TEST_CASE("sine integral against reference values") {
    struct Ref { double x, si; };
    // high-precision reference values for Si(x)
    const Ref refs[] = {
        {0.25, 0.2491335703197571641},
        {0.5, 0.49310741804306668916},
        {1.0, 0.94608307036718301494},
        {2.0, 1.6054129768026948486},
        {4.0, 1.7582031389490530581},
        {4.5, 1.6541404143792439835},
        {10.0, 1.6583475942188740493},
        {50.0, 1.5516170724859358947},
        {1000.0, 1.5702331219687712181},
        {1e6, 1.5707953900431190815},
    };
    for (const Ref& r : refs) {
        CHECK(sine_integral(r.x) == Catch::Approx(r.si).epsilon(4e-15));
        CHECK(sine_integral(-r.x) == Catch::Approx(-r.si).epsilon(4e-15));
    }
    CHECK(sine_integral(0.0) == 0.0);
    CHECK(sine_integral(std::numeric_limits<double>::infinity()) ==
          Catch::Approx(1.5707963267948966));
}

TEST_CASE("rng streams are deterministic and in range") {
    Rng a(derive_seed(7, 3, 1));
    Rng b(derive_seed(7, 3, 1));
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    Rng c(derive_seed(7, 3, 2));
    CHECK(c.next_u64() != Rng(derive_seed(7, 3, 1)).next_u64());

    Rng r(123);
    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(r.below(17) < 17);
        int k = r.uniform_int(-3, 5);
        REQUIRE(k >= -3);
        REQUIRE(k <= 5);
        double m = r.log_uniform_magnitude(6.0);
        REQUIRE(m >= 1e-3);
        REQUIRE(m <= 1e3);
    }
}
