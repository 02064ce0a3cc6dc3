#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oscint/decomposition.hpp"

using namespace oscint;

namespace {
ScaleFrame frame24() { return scale_frame(make_fewnomial({1.0, 1.0}, {2, 4})); }
}

TEST_CASE("bad scales of t^2 + t^4") {
    ScaleFrame f = frame24();

    // level 0: |t^2| and |t^4| sit within 2^2 of each other iff |l| <= 4,
    // with exact ties at the boundary counted as bad
    IntegerInterval b0 = bad_set_0(f, 2, 1, 2);
    CHECK(b0 == IntegerInterval{-4, 4});
    CHECK(b0.cardinality() == 9);

    // level 1: weights 2 and 12 shift the crossing off centre
    IntegerInterval b1 = bad_set_1(f, 2, 1, 2);
    CHECK(b1 == IntegerInterval{-9, -2});
    CHECK(b1.cardinality() == 8);

    BadSets all = all_bad_sets(f, 2);
    CHECK(all.level0.size() == 1);
    CHECK(all.level1.size() == 1);
    CHECK(all.level0[0].j1 == 1);
    CHECK(all.level0[0].j2 == 2);
    CHECK(all.level0[0].scales == b0);
    CHECK(all.level1[0].scales == b1);
}

TEST_CASE("bad scales of a large coefficient") {
    ScaleFrame f = scale_frame(make_fewnomial({std::exp2(40.0), 1.0}, {2, 4}));
    CHECK(bad_set_0(f, 1, 1, 2) == IntegerInterval{78, 82});
}

TEST_CASE("pair count grows as d choose 2") {
    ScaleFrame f = scale_frame(make_fewnomial({1.0, -2.0, 0.5, 3.0}, {2, 5, 9, 14}));
    BadSets all = all_bad_sets(f, 1);
    CHECK(all.level0.size() == 6);
    CHECK(all.level1.size() == 6);
}

TEST_CASE("good components of t^2 + t^4") {
    ScaleFrame f = frame24();
    auto comps = good_components(f, 2, {-50, 50});
    REQUIRE(comps.size() == 2);

    CHECK(comps[0].lo == -50);
    CHECK(comps[0].hi == -10);
    CHECK(comps[0].j1 == 1);
    CHECK(comps[0].j2 == 1);
    CHECK(comps[0].margin_log2 > 0.0);

    CHECK(comps[1].lo == 5);
    CHECK(comps[1].hi == 50);
    CHECK(comps[1].j1 == 2);
    CHECK(comps[1].j2 == 2);
    CHECK(comps[1].margin > 1.0);

    CHECK_THROWS_AS(good_components(f, 0, {-50, 50}), std::invalid_argument);
    CHECK_THROWS_AS(good_components(f, 2, IntegerInterval::empty()), EmptyWindow);
    CHECK_THROWS_AS(good_components(f, 2, IntegerInterval::whole()), EmptyWindow);
}

TEST_CASE("single monomial is good everywhere") {
    ScaleFrame f = scale_frame(make_fewnomial({-0.7}, {3}));
    auto comps = good_components(f, 3, {-200, 200});
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].lo == -200);
    CHECK(comps[0].hi == 200);
    CHECK(std::isinf(comps[0].margin));

    DominationReport rep = verify_domination(f, comps[0]);
    CHECK(rep.pass);
    CHECK(rep.worst_upper == Catch::Approx(0.5));
    CHECK(rep.worst_lower == Catch::Approx(2.0));
}

TEST_CASE("domination holds on a clean component") {
    ScaleFrame f = frame24();
    auto comps = good_components(f, 2, {-50, 50});
    REQUIRE(comps.size() == 2);
    for (const auto& c : comps) {
        DominationReport rep = verify_domination(f, c);
        CHECK(rep.pass);
        CHECK(rep.scales_checked > 0);
        CHECK(rep.worst_upper <= 1.0);
        CHECK(rep.worst_lower >= 1.0);
    }
}

TEST_CASE("near-cancelling pair still admits a slack") {
    ScaleFrame f = scale_frame(make_fewnomial({1.0, -1.0 + 1e-9}, {2, 4}));
    auto g = min_passing_gamma(f, {-60, 60});
    REQUIRE(g.has_value());
    CHECK(*g >= 1);
    CHECK(*g <= 12);
    for (const auto& c : good_components(f, *g, {-60, 60}))
        CHECK(verify_domination(f, c).pass);
}

TEST_CASE("huge components are sampled with a stride") {
    ScaleFrame f = scale_frame(make_fewnomial({1.0}, {2}));
    auto comps = good_components(f, 1, {-100000, 100000});
    REQUIRE(comps.size() == 1);
    DominationReport rep = verify_domination(f, comps[0]);
    CHECK(rep.pass);
    CHECK(rep.scales_checked <= 300);
}

TEST_CASE("scale blocks partition an interval") {
    auto blocks = partition_into_scale_blocks({0, 9}, 4);
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0] == IntegerInterval{0, 3});
    CHECK(blocks[1] == IntegerInterval{4, 7});
    CHECK(blocks[2] == IntegerInterval{8, 9});
    CHECK(partition_into_scale_blocks(IntegerInterval::empty(), 4).empty());
    CHECK_THROWS_AS(partition_into_scale_blocks({0, 9}, 0), std::invalid_argument);
}
