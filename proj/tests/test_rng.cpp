#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "lpp/rng.hpp"

using lpp::UniformField;

TEST_CASE("uniform values are deterministic and in the open interval") {
    const UniformField u(42, 7);
    const UniformField u2(42, 7);
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 5; ++j) {
            const double v = u.at(i, j);
            CHECK(v == u2.at(i, j));
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
}

TEST_CASE("distinct streams and seeds decouple") {
    const UniformField a(42, 0), b(42, 1), c(43, 0);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        if (a.at(i, 0) == b.at(i, 0)) ++same_ab;
        if (a.at(i, 0) == c.at(i, 0)) ++same_ac;
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("row of 1e6 draws looks i.i.d. uniform") {
    const UniformField u(2024, 3);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0, lag = 0.0;
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = u.at(i, 0);
        sum += v;
        sumsq += v * v;
        if (i > 0) lag += (v - 0.5) * (prev - 0.5);
        prev = v;
    }
    const double mean = sum / n;
    // 3 sigma / sqrt(n) with sigma^2 = 1/12
    CHECK(mean > 0.5 - 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(mean < 0.5 + 3.0 * std::sqrt(1.0 / 12.0 / n));
    const double var = sumsq / n - mean * mean;
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.01));
    // lag-1 autocorrelation: sd of the estimate is ~ 1/sqrt(n)
    const double rho = lag / n / var;
    CHECK(std::fabs(rho) < 3.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("adjacent lattice sites produce distinct words") {
    const UniformField u(7, 0);
    std::set<std::uint64_t> words;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) words.insert(u.word_at(i, j));
    CHECK(words.size() == 100 * 100);
}
