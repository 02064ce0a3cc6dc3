#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "oscint/experiments.hpp"

using namespace oscint;
using Catch::Approx;

namespace {

// compares everything except wall_time, the one nondeterministic field
void require_same_records(const std::vector<SweepRecord>& a, const std::vector<SweepRecord>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].seed == b[i].seed);
        REQUIRE(a[i].d == b[i].d);
        REQUIRE(a[i].exponents == b[i].exponents);
        REQUIRE(a[i].sup == b[i].sup);
        REQUIRE(a[i].argmax_xi == b[i].argmax_xi);
        REQUIRE(a[i].certified_fraction == b[i].certified_fraction);
    }
}

SweepRecord certified_record(double key_as_sup) {
    SweepRecord r;
    r.sup = key_as_sup;
    r.certified_fraction = 1.0;
    return r;
}

}

TEST_CASE("sample_fewnomial is deterministic and respects its ranges") {
    Fewnomial a = sample_fewnomial(42, 3, 9, 4.0);
    Fewnomial b = sample_fewnomial(42, 3, 9, 4.0);
    REQUIRE(a.exponents == b.exponents);
    REQUIRE(a.coeffs == b.coeffs);

    for (std::uint64_t s = 0; s < 200; ++s) {
        Fewnomial q = sample_fewnomial(s, 3, 9, 4.0);
        REQUIRE(q.d() == 3);
        REQUIRE(std::is_sorted(q.exponents.begin(), q.exponents.end()));
        REQUIRE(q.exponents.front() >= 2);
        REQUIRE(q.exponents.back() <= 9);
        REQUIRE(std::adjacent_find(q.exponents.begin(), q.exponents.end()) == q.exponents.end());
        for (double c : q.coeffs) {
            REQUIRE(std::abs(c) >= 1e-2);
            REQUIRE(std::abs(c) <= 1e2);
        }
    }

    CHECK_THROWS_AS(sample_fewnomial(1, 0, 9, 2.0), InvalidDimensions);
    CHECK_THROWS_AS(sample_fewnomial(1, 3, 3, 2.0), InvalidDimensions);
    CHECK_THROWS_AS(sample_fewnomial(1, 2, 9, 0.0), InvalidDimensions);
}

TEST_CASE("sample_fewnomial eventually visits every exponent pair") {
    std::set<std::pair<int, int>> seen;
    for (std::uint64_t s = 0; s < 3000; ++s) {
        Fewnomial q = sample_fewnomial(s, 2, 10, 2.0);
        seen.insert({q.exponents[0], q.exponents[1]});
    }
    REQUIRE(seen.size() == 36);  // C(9,2) pairs from {2..10}
}

TEST_CASE("summarize keeps certified records and gates the statistics") {
    std::vector<SweepRecord> recs;
    std::vector<double> keys;
    Rng rng(5);
    for (double key : {4.0, 16.0}) {
        for (int i = 0; i < 25; ++i) {
            // sup tracks log2(key) with a little noise
            recs.push_back(certified_record(std::log2(key) + rng.uniform(0.0, 0.05)));
            keys.push_back(key);
        }
    }
    // uncertified outlier must not affect anything
    SweepRecord junk = certified_record(1e9);
    junk.certified_fraction = 0.5;
    recs.push_back(junk);
    keys.push_back(16.0);

    GrowthSummary s = expdetail::summarize(recs, keys, "n", 3);
    REQUIRE(s.group_by == "n");
    REQUIRE(s.groups.size() == 2);
    REQUIRE(s.groups[0].key == 4.0);
    REQUIRE(s.groups[0].count == 25);
    REQUIRE(s.groups[1].count == 25);
    REQUIRE(s.groups[1].max_sup < 4.1);
    REQUIRE(s.groups[0].median_sup == Approx(2.0).margin(0.06));
    REQUIRE(s.slope_defined);
    REQUIRE(s.slope == Approx(1.0).margin(0.05));
    REQUIRE(s.ci_half_width == Approx(0.5 * (s.ci_hi - s.ci_lo)));
    REQUIRE(s.tau_defined);
    // two tied x-groups of 25: tau-b tops out at 625/sqrt(625*1225) ~ 0.714
    REQUIRE(s.tau > 0.5);
    REQUIRE(s.tau_p_value < 0.01);

    // below the 20-per-group floor the slope is not reported
    std::vector<SweepRecord> few(recs.begin(), recs.begin() + 12);
    std::vector<double> fkeys(keys.begin(), keys.begin() + 12);
    GrowthSummary s2 = expdetail::summarize(few, fkeys, "n", 3);
    REQUIRE_FALSE(s2.slope_defined);
    REQUIRE_FALSE(s2.tau_defined);  // single key, no variation

    CHECK_THROWS_AS(expdetail::summarize(recs, fkeys, "n", 3), InvalidDimensions);
}

TEST_CASE("uniformity sweep produces certified reproducible records") {
    std::vector<std::vector<int>> sets = {{2, 3}, {2, 5}};
    GridSpec grid{16, true};
    SweepResult r1 = uniformity_sweep(2, sets, 3, 2.0, grid, 1e-5, 9, 1);

    REQUIRE(r1.records.size() == 6);
    REQUIRE(std::is_sorted(r1.records.begin(), r1.records.end(),
                           [](const SweepRecord& a, const SweepRecord& b) {
                               return a.seed < b.seed;
                           }));
    for (const SweepRecord& rec : r1.records) {
        REQUIRE(rec.d == 2);
        bool known = rec.exponents == sets[0] || rec.exponents == sets[1];
        REQUIRE(known);
        REQUIRE(rec.certified_fraction == 1.0);
        REQUIRE(rec.sup > 0.0);
        REQUIRE(rec.wall_time > 0.0);
    }
    REQUIRE(r1.summary.group_by == "n");
    REQUIRE(r1.summary.groups.size() == 2);
    REQUIRE(r1.summary.groups[0].key == 3.0);
    REQUIRE(r1.summary.groups[1].key == 5.0);
    REQUIRE(r1.summary.groups[0].count == 3);
    REQUIRE_FALSE(r1.summary.slope_defined);  // 3 per group is below the floor
    REQUIRE_FALSE(r1.summary.exploratory);

    SweepResult r2 = uniformity_sweep(2, sets, 3, 2.0, grid, 1e-5, 9, 1);
    require_same_records(r1.records, r2.records);

    // thread count must not leak into the results
    SweepResult r3 = uniformity_sweep(2, sets, 3, 2.0, grid, 1e-5, 9, 2);
    require_same_records(r1.records, r3.records);

    CHECK_THROWS_AS(uniformity_sweep(2, {}, 3, 2.0, grid, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(uniformity_sweep(3, sets, 3, 2.0, grid, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(uniformity_sweep(2, sets, 0, 2.0, grid, 1e-5), InsufficientPoints);
    CHECK_THROWS_AS(uniformity_sweep(2, sets, 3, 0.0, grid, 1e-5), InvalidDimensions);
}

TEST_CASE("parissis_growth probes full polynomials at the origin") {
    SweepResult r = parissis_growth({3, 4}, 2, 1e-5, 2.0, 17, 1);
    REQUIRE(r.records.size() == 4);
    for (const SweepRecord& rec : r.records) {
        std::vector<int> full;
        for (int a = 2; a <= rec.exponents.back(); ++a) full.push_back(a);
        REQUIRE(rec.exponents == full);
        REQUIRE(rec.argmax_xi == 0.0);
        REQUIRE(rec.certified_fraction == 1.0);
        REQUIRE(rec.sup >= 0.0);
    }
    REQUIRE(r.summary.groups.size() == 2);
    REQUIRE(r.summary.groups[0].key == 3.0);
    REQUIRE(r.summary.groups[1].key == 4.0);

    SweepResult again = parissis_growth({3, 4}, 2, 1e-5, 2.0, 17, 1);
    require_same_records(r.records, again.records);

    CHECK_THROWS_AS(parissis_growth({}, 2, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(parissis_growth({4, 3}, 2, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(parissis_growth({1, 3}, 2, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(parissis_growth({3, 4}, 0, 1e-5), InsufficientPoints);
}

TEST_CASE("logd_scan groups by monomial count and fits c only past d=1") {
    GridSpec grid{16, true};
    SweepResult r = logd_scan({1, 2}, 6, 2, grid, 1e-5, 2.0, 23, 1);
    REQUIRE(r.records.size() == 4);
    REQUIRE(r.summary.group_by == "d");
    REQUIRE(r.summary.exploratory);
    REQUIRE_FALSE(r.summary.c_hat.has_value());  // only one group beyond d=1

    SweepResult r2 = logd_scan({2, 3}, 6, 1, grid, 1e-5, 2.0, 23, 1);
    REQUIRE(r2.summary.c_hat.has_value());

    CHECK_THROWS_AS(logd_scan({}, 6, 2, grid, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(logd_scan({2, 6}, 6, 2, grid, 1e-5), InvalidDimensions);
    CHECK_THROWS_AS(logd_scan({1, 2}, 6, 0, grid, 1e-5), InsufficientPoints);
}

TEST_CASE("check_instance accepts hand-picked well-behaved phases") {
    InstanceCheck a = check_instance(make_fewnomial({1.0, 1.0}, {2, 4}), 2);
    REQUIRE(a.pass());

    // coefficients whose scale brackets tie exactly
    InstanceCheck b = check_instance(make_fewnomial({std::ldexp(1.0, 40), 1.0}, {2, 4}), 1);
    REQUIRE(b.pass());

    InstanceCheck c = check_instance(make_fewnomial({-0.7}, {3}), 4);
    REQUIRE(c.pass());
}

TEST_CASE("structure_suite tallies every property over random instances") {
    PropertyReport rep = structure_suite(12, 7, {1, 2}, 1);
    REQUIRE(rep.instances == 12);
    REQUIRE(rep.gammas == std::vector<int>{1, 2});
    REQUIRE(rep.set_equality.checked == 24);
    REQUIRE(rep.connectedness.checked == 24);
    REQUIRE(rep.cardinality.checked == 24);
    REQUIRE(rep.component_count.checked == 24);
    REQUIRE(rep.domination.checked == 24);
    REQUIRE(rep.pass());
    REQUIRE(rep.failures.empty());

    PropertyReport again = structure_suite(12, 7, {1, 2}, 1);
    REQUIRE(again.set_equality.failed == rep.set_equality.failed);
    REQUIRE(again.domination.checked == rep.domination.checked);

    CHECK_THROWS_AS(structure_suite(0, 7, {1}), InsufficientPoints);
    CHECK_THROWS_AS(structure_suite(5, 7, {}), InvalidDimensions);
}
