#include "lpp/suites.hpp"

#include <cmath>
#include <vector>

#include "lpp/passage.hpp"
#include "lpp/rng.hpp"
#include "lpp/shapes.hpp"

namespace lpp::suites {

namespace {

struct Check {
    std::ostream& os;
    bool ok = true;
    void report(const std::string& name, bool pass, const std::string& detail = "") {
        os << (pass ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) os << " (" << detail << ")";
        os << "\n";
        ok = ok && pass;
    }
};

double grid_draw(const UniformField& u, std::int64_t k, int kind) {
    const double v = u.at(k, kind);
    switch (kind) {
        case 0: return v;                      // uniform(0,1)
        case 1: return -std::log1p(-v);        // exponential
        case 2: return v < 0.5 ? 0.0 : 1.0;    // bernoulli
        default: return 2.0 * v - 1.0;         // signed
    }
}

}  // namespace

bool run_oracle_suite(int trials, std::ostream& os) {
    Check chk{os};
    const Geometry geoms[] = {Geometry::WeakWeak, Geometry::StrictX,
                              Geometry::StrictY, Geometry::StrictStrict};
    const Convention convs[] = {Convention::ExcludeEndpoint,
                                Convention::IncludeEndpoint};
    const UniformField meta(20260810, 0);
    std::int64_t counter = 0;
    int failures = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int kind = t % 4;
        const int cols = 2 + static_cast<int>(meta.at(counter++, 9) * 5.0);
        const int rows = 2 + static_cast<int>(meta.at(counter++, 9) * 5.0);
        std::vector<std::vector<double>> grid(static_cast<std::size_t>(cols));
        for (auto& col : grid) {
            col.resize(static_cast<std::size_t>(rows));
            for (auto& w : col) w = grid_draw(meta, counter++, kind);
        }
        for (Geometry g : geoms) {
            std::int64_t m =
                1 + static_cast<std::int64_t>(meta.at(counter++, 9) * (cols - 1));
            std::int64_t n =
                1 + static_cast<std::int64_t>(meta.at(counter++, 9) * (rows - 1));
            for (Convention c : convs) {
                const double dp = grid_last_passage(grid, g, m, n, c);
                const double oracle = brute_force_last_passage(grid, g, m, n, c);
                const double err = std::fabs(dp - oracle);
                worst = std::max(worst, err);
                // integer-valued Bernoulli grids must agree bitwise
                if (kind == 2 ? dp != oracle : err > 1e-12) ++failures;
            }
        }
    }
    chk.report("oracle: DP equals exhaustive enumeration", failures == 0,
               std::to_string(trials) + " grids x 4 geometries x 2 conventions, "
               "worst |diff| = " + std::to_string(worst));
    return chk.ok;
}

bool run_solver_suite(std::ostream& os) {
    Check chk{os};
    // exp_psi vs the closed square-root shape for constant rates
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0}) {
        const auto law = EnvironmentLaw::point_mass(RowLaw::exponential(c));
        for (int i = 1; i <= 10; ++i)
            for (int j = 1; j <= 10; ++j) {
                const double x = 0.2 * i, y = 0.2 * j;
                const double expect =
                    (std::sqrt(x) + std::sqrt(y)) * (std::sqrt(x) + std::sqrt(y)) / c;
                worst = std::max(worst, std::fabs(exp_psi(law, x, y).value - expect));
            }
    }
    chk.report("solver: exp_psi matches (sqrt(x)+sqrt(y))^2/c", worst < 1e-8,
               "worst |diff| = " + std::to_string(worst));

    // residual contract on the cubic-law strict shapes
    const auto cubic =
        EnvironmentLaw::bernoulli_rate(RateDist::upper_power(0.9, 0.5, 3.0));
    double worst_resid = 0.0;
    for (double r : {0.3, 0.9, 1.4, 2.0}) {
        worst_resid = std::max(worst_resid, psi_strict_x(cubic, r, 1.0).residual);
        worst_resid = std::max(worst_resid, psi_strict_y(cubic, r, 1.0).residual);
    }
    chk.report("solver: implicit roots satisfy their equations",
               worst_resid < 1e-10, "worst residual = " + std::to_string(worst_resid));
    return chk.ok;
}

bool run_rng_suite(std::ostream& os) {
    Check chk{os};
    const UniformField u(99, 5);
    const int n = 1000000;
    double sum = 0.0, lag = 0.0, prev = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = u.at(i, 0);
        sum += v;
        sumsq += v * v;
        if (i > 0) lag += (v - 0.5) * (prev - 0.5);
        prev = v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double rho = lag / n / var;
    chk.report("rng: mean within 3 standard errors",
               std::fabs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n),
               "mean = " + std::to_string(mean));
    chk.report("rng: lag-1 autocorrelation within CI",
               std::fabs(rho) < 3.5 / std::sqrt(static_cast<double>(n)),
               "rho = " + std::to_string(rho));
    return chk.ok;
}

bool run_suite(const std::string& name, int trials, std::ostream& os) {
    if (name == "oracle") return run_oracle_suite(trials, os);
    if (name == "solver") return run_solver_suite(os);
    if (name == "rng") return run_rng_suite(os);
    if (name == "all") {
        bool ok = run_oracle_suite(trials, os);
        ok = run_solver_suite(os) && ok;
        ok = run_rng_suite(os) && ok;
        return ok;
    }
    os << "[FAIL] unknown suite '" << name << "'\n";
    return false;
}

}  // namespace lpp::suites
