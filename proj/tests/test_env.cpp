#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpp/envlaw.hpp"
#include "lpp/quadrature.hpp"
#include "lpp/rowlaw.hpp"
#include "test_util.hpp"

using namespace lpp;

TEST_CASE("quantile follows the sup convention at atoms") {
    const RowLaw bern = RowLaw::bernoulli(0.5);
    CHECK(bern.quantile(0.3) == 0.0);
    CHECK(bern.quantile(0.5) == 0.0);  // F(0) = 0.5 >= u
    CHECK(bern.quantile(0.7) == 1.0);

    const RowLaw expo = RowLaw::exponential(2.0);
    CHECK(expo.quantile(1.0 - std::exp(-1.0)) == doctest::Approx(0.5).epsilon(1e-12));

    const RowLaw fm = extremal_two_point(2.0);
    CHECK(fm.quantile(0.4) == -2.0);
    CHECK(fm.mean() == 0.0);
    CHECK(fm.variance() == doctest::Approx(4.0));

    CHECK_THROWS(bern.quantile(0.0));
    CHECK_THROWS(bern.quantile(1.0));
}

TEST_CASE("quantile is nondecreasing in u for every law kind") {
    const RowLaw laws[] = {
        RowLaw::bernoulli(0.3),
        RowLaw::exponential(1.7),
        RowLaw::two_point(-1.0, 2.5, 0.25),
        RowLaw::bounded_table({0.0, 1.0, 1.0, 3.0}, {0.0, 0.4, 0.7, 1.0}),
        tilde_truncate(RowLaw::exponential(1.0), 2.0),
        truncate_m(RowLaw::exponential(0.5), 3.0),
        RowLaw::uniform(0.0, 2.0),
    };
    for (const auto& law : laws) {
        double prev = law.quantile(1e-9);
        for (int k = 1; k <= 400; ++k) {
            const double u = static_cast<double>(k) / 401.0;
            const double q = law.quantile(u);
            CHECK(q >= prev);
            prev = q;
        }
    }
}

TEST_CASE("bounded table reproduces uniform moments and cdf") {
    const RowLaw u02 = RowLaw::uniform(0.0, 2.0);
    CHECK(u02.mean() == doctest::Approx(1.0));
    CHECK(u02.variance() == doctest::Approx(4.0 / 12.0));
    CHECK(u02.cdf(0.5) == doctest::Approx(0.25));
    CHECK(u02.quantile(0.25) == doctest::Approx(0.5));
}

TEST_CASE("tilde truncation keeps the first two moments and the support bound") {
    for (double xi : {0.5, 1.0, 2.0, 5.0}) {
        for (double tau : {1.0, 3.0, 10.0}) {
            const RowLaw base = RowLaw::exponential(xi);
            const RowLaw t = tilde_truncate(base, tau);
            CHECK(std::fabs(t.mean() - 1.0 / xi) < 1e-9);
            CHECK(std::fabs(t.second_moment() - 2.0 / (xi * xi)) < 1e-9);
            CHECK(t.support_hi() <= 2.0 / xi + tau + 1e-12);
            // matches the base below tau
            for (double x : {0.1, 0.5 * tau, 0.99 * tau})
                CHECK(t.cdf(x) == doctest::Approx(base.cdf(x)));
        }
    }
    CHECK_THROWS(tilde_truncate(RowLaw::bernoulli(0.5), 1.0));
    // numeric moment check by direct integration of the survival function
    const RowLaw t = tilde_truncate(RowLaw::exponential(2.0), 1.0);
    const auto mean_quad = integrate(
        [&](double x) { return 1.0 - t.cdf(x); }, 0.0, t.support_hi(), 1e-12, 1e-12);
    CHECK(mean_quad.value == doctest::Approx(0.5).epsilon(1e-9));
    const auto m2_quad = integrate(
        [&](double x) { return 2.0 * x * (1.0 - t.cdf(x)); }, 0.0, t.support_hi(),
        1e-12, 1e-12);
    CHECK(m2_quad.value == doctest::Approx(0.5).epsilon(1e-9));
    // total variation to the base vanishes as tau grows
    const RowLaw far = tilde_truncate(RowLaw::exponential(1.0), 30.0);
    CHECK(std::fabs(far.cdf(30.0 - 1e-9) - RowLaw::exponential(1.0).cdf(30.0 - 1e-9)) <
          1e-12);
}

TEST_CASE("truncate_m clamps mass onto [-M, M]") {
    const RowLaw e = truncate_m(RowLaw::exponential(1.0), 10.0);
    CHECK(e.cdf(10.0) == 1.0);
    CHECK(e.cdf(5.0) == doctest::Approx(RowLaw::exponential(1.0).cdf(5.0)));
    CHECK(truncate_m(RowLaw::bernoulli(0.4), 2.0).kind() == RowLaw::Kind::Bernoulli);
    const RowLaw m1 = truncate_m(RowLaw::exponential(1.0), 1.0);
    CHECK(m1.mean() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS(truncate_m(RowLaw::exponential(1.0), -1.0));
}

TEST_CASE("moments of point masses and mixtures are exact") {
    const auto pm = moments(EnvironmentLaw::point_mass(RowLaw::bernoulli(0.5)));
    CHECK(*pm.mu == 0.5);
    CHECK(*pm.sigma_sq == doctest::Approx(0.25));
    CHECK(*pm.bern_b == 0.5);

    const auto em = moments(EnvironmentLaw::point_mass(RowLaw::exponential(2.0)));
    CHECK(*em.mu_g == doctest::Approx(0.5));
    CHECK(*em.sigma_sq_g == doctest::Approx(0.25));
    CHECK(*em.exp_c == 2.0);

    const auto mix = moments(EnvironmentLaw::finite_mixture(
        {RowLaw::exponential(1.0), RowLaw::exponential(2.0)}, {0.5, 0.5}));
    CHECK(*mix.mu_g == doctest::Approx(0.75));
    CHECK(*mix.sigma_sq_g == doctest::Approx(0.625));
    CHECK(*mix.exp_c == 1.0);
    CHECK(*mix.mu_star == 1.0);

    // point mass moments agree with the single-law moments for every kind
    const RowLaw laws[] = {RowLaw::bernoulli(0.3), RowLaw::exponential(1.5),
                           RowLaw::two_point(-1.0, 2.0, 0.3),
                           RowLaw::uniform(0.0, 1.0),
                           tilde_truncate(RowLaw::exponential(2.0), 3.0)};
    for (const auto& law : laws) {
        const auto m = moments(EnvironmentLaw::point_mass(law));
        CHECK(*m.mu == doctest::Approx(law.mean()).epsilon(1e-12));
        CHECK(*m.sigma_sq == doctest::Approx(law.variance()).epsilon(1e-12));
    }
}

TEST_CASE("cubic Bernoulli-rate law has pbar 0.525 and b 0.9") {
    const auto law = lpptest::cubic_law();
    const auto m = moments(law);
    CHECK(*m.bern_b == doctest::Approx(0.9).epsilon(1e-14));
    // symbolic oracle: density 24(0.9-p)^2 on [0.4, 0.9] integrates p to 0.525
    CHECK(*m.mu == doctest::Approx(0.525).epsilon(1e-10));
    CHECK(*m.mu <= *m.bern_b);
    CHECK(*m.mu >= 0.0);
}

TEST_CASE("exponential-rate law moment inequality mu_G <= 1/c") {
    const auto law = EnvironmentLaw::exponential_rate(
        RateDist::lower_power(1.0, 2.0, 1.5), TailSpec{0.5, std::pow(2.0, -1.5)});
    const auto m = moments(law);
    CHECK(*m.mu_g <= 1.0 / *m.exp_c + 1e-12);
    CHECK_NOTHROW(law.check_tail_consistency());
    // a wrong kappa must fail the consistency check
    const auto bad = EnvironmentLaw::exponential_rate(
        RateDist::lower_power(1.0, 2.0, 1.5), TailSpec{0.5, 10.0});
    CHECK_THROWS(bad.check_tail_consistency());
}

TEST_CASE("realize is reproducible and respects mixture weights") {
    const auto law = EnvironmentLaw::finite_mixture(
        {RowLaw::bernoulli(0.3), RowLaw::bernoulli(0.7)}, {0.5, 0.5});
    const auto env1 = realize(law, 10000, 11, 0);
    const auto env2 = realize(law, 10000, 11, 0);
    int hi = 0;
    for (std::size_t j = 0; j < env1.size(); ++j) {
        CHECK(env1[j].bernoulli_p() == env2[j].bernoulli_p());
        if (env1[j].bernoulli_p() == 0.7) ++hi;
    }
    const double frac = hi / 10000.0;
    CHECK(frac > 0.48);
    CHECK(frac < 0.52);

    const auto pm_env = realize(EnvironmentLaw::point_mass(RowLaw::exponential(1.0)),
                                5, 99, 0);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(pm_env[j].exponential_rate() == 1.0);
}

TEST_CASE("divergent rate functionals come back as the infinite marker") {
    const auto atom = RateDist::atoms({1.0, 2.0}, {0.5, 0.5});
    const auto u_star = atom.expect_edge([](double, double d) { return 1.0 / d; },
                                         RateDist::SingularEdge::Lo, 1.0);
    CHECK(u_star.is_infinite());
    const auto finite = atom.expect([](double xi) { return 1.0 / xi; });
    CHECK(finite.is_finite());
    CHECK(finite.value() == doctest::Approx(0.75));

    // uniform rates on [1,2]: int (xi-1)^-1 dm diverges (log), (xi-1)^-1/2 not
    const auto unif = RateDist::uniform(1.0, 2.0);
    CHECK(unif.expect_edge([](double, double d) { return 1.0 / d; },
                           RateDist::SingularEdge::Lo, 1.0)
              .is_infinite());
    const auto half =
        unif.expect_edge([](double, double d) { return 1.0 / std::sqrt(d); },
                         RateDist::SingularEdge::Lo, 0.5);
    CHECK(half.is_finite());
    CHECK(half.value() == doctest::Approx(2.0).epsilon(1e-9));
}
