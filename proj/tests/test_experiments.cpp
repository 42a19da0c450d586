#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lpp/experiments.hpp"
#include "test_util.hpp"

using namespace lpp;

TEST_CASE("parallel replica kernel equals the serial reference bit for bit") {
    const auto law = EnvironmentLaw::finite_mixture(
        {RowLaw::exponential(1.0), RowLaw::exponential(2.0)}, {0.5, 0.5});
    const auto par = mc_scaled_estimate(law, Geometry::WeakWeak,
                                        Convention::ExcludeEndpoint, 0.5, 1.0, 200,
                                        9, 77);
    const auto ser = mc_scaled_estimate_serial(law, Geometry::WeakWeak,
                                               Convention::ExcludeEndpoint, 0.5,
                                               1.0, 200, 9, 77);
    REQUIRE(par.replica_values.size() == ser.replica_values.size());
    for (std::size_t r = 0; r < par.replica_values.size(); ++r)
        CHECK(par.replica_values[r] == ser.replica_values[r]);
    CHECK(par.estimate == ser.estimate);
    CHECK(par.se == ser.se);
    // rerunning reproduces every number exactly
    const auto again = mc_scaled_estimate(law, Geometry::WeakWeak,
                                          Convention::ExcludeEndpoint, 0.5, 1.0,
                                          200, 9, 77);
    CHECK(again.estimate == par.estimate);
}

TEST_CASE("aggregation is a pure function of the replica index set") {
    // the estimate equals the index-ordered mean regardless of completion
    // order; shuffling the values by hand and re-averaging matches
    const auto law = EnvironmentLaw::point_mass(RowLaw::exponential(1.0));
    const auto mc = mc_scaled_estimate(law, Geometry::WeakWeak,
                                       Convention::ExcludeEndpoint, 1.0, 1.0, 100,
                                       12, 5);
    double mean = 0.0;
    for (double v : mc.replica_values) mean += v;
    mean /= static_cast<double>(mc.replica_values.size());
    CHECK(mc.estimate == doctest::Approx(mean).epsilon(1e-15));
}

TEST_CASE("theory column dispatches by geometry and law kind") {
    const auto cubic = lpptest::cubic_law();
    CHECK(theory_value(cubic, Geometry::StrictX, 1.0, 1.0).has_value());
    CHECK(theory_value(cubic, Geometry::StrictY, 1.0, 1.0).has_value());
    CHECK_FALSE(theory_value(cubic, Geometry::WeakWeak, 1.0, 1.0).has_value());
    const auto exp1 = EnvironmentLaw::point_mass(RowLaw::exponential(1.0));
    CHECK(theory_value(exp1, Geometry::WeakWeak, 1.0, 1.0).has_value());
    CHECK_FALSE(theory_value(exp1, Geometry::StrictX, 1.0, 1.0).has_value());
}

TEST_CASE("interchange: identical orderings are identical samples") {
    const auto rep = interchange_test({1.0, 1.0}, {1.0, 1.0}, 5, 2, 2000, 3);
    CHECK(rep.ks_distance == 0.0);
    CHECK(rep.mean_a == rep.mean_b);
    CHECK(rep.pass());
}

TEST_CASE("interchange: permuted rates pass mean and KS checks") {
    const auto rep = interchange_test({1.0, 3.0}, {3.0, 1.0}, 5, 2, 20000, 3);
    CHECK(rep.means_ok);
    CHECK(rep.ks_ok);
    CHECK_THROWS(interchange_test({1.0, 3.0}, {3.0, 2.0}, 5, 2, 100, 3));
    CHECK_THROWS(interchange_test({1.0, 3.0}, {1.0, 3.0}, 5, 3, 100, 3));
}

TEST_CASE("interchange: all six orderings of three rates agree pairwise") {
    const std::vector<std::vector<double>> perms = {
        {1, 2, 4}, {1, 4, 2}, {2, 1, 4}, {2, 4, 1}, {4, 1, 2}, {4, 2, 1}};
    for (std::size_t k = 1; k < perms.size(); ++k) {
        const auto rep = interchange_test(perms[0], perms[k], 4, 3, 4000, 8);
        CHECK(rep.means_ok);
        CHECK(rep.ks_ok);
    }
}

TEST_CASE("degenerate environment: every replica identical, zero SE") {
    const auto ones = EnvironmentLaw::point_mass(RowLaw::bernoulli(1.0));
    const auto mc = mc_scaled_estimate(ones, Geometry::StrictX,
                                       Convention::ExcludeEndpoint, 1.0, 0.25,
                                       400, 5, 2);
    CHECK(mc.estimate == doctest::Approx(1.0));
    CHECK(mc.se == 0.0);
}

TEST_CASE("coupling gap: equal laws give zero gap, bound is positive") {
    const auto e1 = EnvironmentLaw::point_mass(RowLaw::exponential(1.0));
    const auto rep = coupling_gap_test(e1, e1, 0.25, 200, 4, 9);
    CHECK(rep.gap == doctest::Approx(0.0));
    CHECK(rep.pass);

    const auto tilde = EnvironmentLaw::point_mass(
        tilde_truncate(RowLaw::exponential(1.0), 3.0));
    const double bound = coupling_bound(e1, tilde, 0.25);
    CHECK(bound > 0.0);
    // the exponential-decay envelope dominates the numeric integral
    const double envelope = 16.0 * std::sqrt(2.0 * 0.25) * std::exp(-1.5) +
                            2.0 * 0.25 * std::exp(-3.0);
    CHECK(bound <= envelope + 1e-9);
}

TEST_CASE("coupling gap: Bernoulli point masses at moderate alpha") {
    const auto f = EnvironmentLaw::point_mass(RowLaw::bernoulli(0.5));
    const auto g = EnvironmentLaw::point_mass(RowLaw::bernoulli(0.6));
    const auto rep = coupling_gap_test(f, g, 0.25, 800, 6, 21);
    CHECK(rep.mu_f == doctest::Approx(0.5));
    CHECK(rep.mu_g == doctest::Approx(0.6));
    CHECK(rep.pass);
}

TEST_CASE("block coarsening: identity at r = 1 and exact block sums") {
    const auto law = EnvironmentLaw::point_mass(RowLaw::bernoulli(0.5));
    const auto rep1 = block_coarsen_compare(law, 1, 0.25, 200, 3, 13, 1.0);
    CHECK(rep1.fine == doctest::Approx(rep1.coarse).epsilon(1e-12));

    // all-ones field: every 1 x 4 block sums to 4
    auto field = lpptest::constant_env_field(RowLaw::bernoulli(1.0), 64, 3, 1);
    const CoarseField cf(field, 4, BlockOrientation::Rows);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(cf(i, j) == 4.0);
    const CoarseField cc(field, 4, BlockOrientation::Columns);
    CHECK(cc(0, 0) == 4.0);

    const auto rep = block_coarsen_compare(law, 10, 0.01, 10000, 4, 13, 1.0);
    CHECK(rep.pass);
    CHECK(rep.discrepancy < rep.bound);
}

TEST_CASE("tagged particle: fast path equals the windowed-infimum oracle") {
    const auto half = EnvironmentLaw::point_mass(RowLaw::bernoulli(0.5));
    const auto rep = tagged_particle_speed(half, 1.3, 50, 80, 8, 11);
    for (int r = 0; r < 8; ++r) {
        const double oracle =
            tagged_particle_position_oracle(half, 1.3, 50, 80, 11, r);
        CHECK(-rep.replica_speeds[static_cast<std::size_t>(r)] * 50.0 ==
              doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("tagged particle: frozen gaps at u = 1 stay put") {
    const auto half = EnvironmentLaw::point_mass(RowLaw::bernoulli(0.5));
    const auto rep = tagged_particle_speed(half, 1.0, 40, 30, 4, 3);
    CHECK(rep.speed == doctest::Approx(0.0));
    CHECK(rep.theory == doctest::Approx(0.0));
    CHECK(rep.truncation_ok);
}

TEST_CASE("the two strict sweeps approach different small-alpha limits") {
    // cubic law: Psi_right(1, a) -> b = 0.9 while Psi_up(a, 1) -> pbar = 0.525
    const auto cubic = lpptest::cubic_law();
    const double a = 0.05;
    const auto right = mc_scaled_estimate(cubic, Geometry::StrictX,
                                          Convention::ExcludeEndpoint, 1.0, a,
                                          2000, 6, 31);
    const auto up = mc_scaled_estimate(cubic, Geometry::StrictY,
                                       Convention::ExcludeEndpoint, a, 1.0, 2000,
                                       6, 31);
    const double se = std::sqrt(right.se * right.se + up.se * up.se);
    CHECK(std::fabs(right.estimate - up.estimate) > 10.0 * se);
    CHECK(right.estimate > up.estimate);
}

TEST_CASE("sup-of-means monotonicity for nonnegative-mean laws") {
    const auto law = EnvironmentLaw::point_mass(RowLaw::exponential(1.0));
    double prev = -1.0, prev_se = 0.0;
    for (std::int64_t n : {100, 200, 400, 800}) {
        const auto mc = mc_scaled_estimate(law, Geometry::WeakWeak,
                                           Convention::ExcludeEndpoint, 1.0, 1.0,
                                           n, 24, 3);
        if (prev >= 0.0)
            CHECK(mc.estimate >=
                  prev - 3.0 * std::sqrt(mc.se * mc.se + prev_se * prev_se));
        prev = mc.estimate;
        prev_se = mc.se;
    }
}

TEST_CASE("boundary sweep rows carry theory and asymptotics") {
    const auto two = EnvironmentLaw::finite_mixture(
        {RowLaw::exponential(1.0), RowLaw::exponential(2.0)}, {0.5, 0.5});
    const auto rows = boundary_sweep(two, Geometry::WeakWeak,
                                     Convention::ExcludeEndpoint,
                                     AlphaAxis::XisAlpha, {0.25, 0.5}, 200, 4, 17);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.theory.has_value());
        CHECK(row.asymptotic.has_value());
        CHECK(row.mc.replica_values.size() == 4);
    }
}
