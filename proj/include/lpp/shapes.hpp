#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpp/envlaw.hpp"
#include "lpp/real.hpp"

namespace lpp {

// Environment expectation functionals used by the shape formulas.  Each
// declares where its integrand blows up so the quadrature can stay open
// there and divergence can be detected exactly.
enum class Functional {
    BernPOverBMinusP,      // E[p/(b-p)]
    BernPQOverZMinusPSq,   // E[p(1-p)/(z-p)^2], z >= b
    Bern1mPOverZMinusPSq,  // E[(1-p)/(z-p)^2],  z >= b
    BernPOver1mP,          // E[p/(1-p)]
    Bern1mPOverP,          // E[(1-p)/p]
    BernPQOverZPlusPSq,    // E[p(1-p)/(z+p)^2], z > 0
    Bern1mPOverZPlusPSq,   // E[(1-p)/(z+p)^2],  z > 0
    BernSpeed,             // E[p u(u-1)/(1-u p)], 1 <= u < 1/b
    ExpInvXiMinusA,        // int (xi-a)^-1 dm, a <= c
    ExpInvSqXiMinusA,      // int (xi-a)^-2 dm, a <= c
    ExpXiOverSqXiMinusA,   // int xi (xi-a)^-2 dm, a <= c
    ExpUStar,              // int c/(xi-c) dm
};

ExtReal expectation(const EnvironmentLaw& law, Functional fn, double parameter = 0.0);

struct ShapeResult {
    double value = 0.0;
    std::string branch;
    std::optional<double> root;  // z0, a0, u0 or t, depending on the formula
    double residual = 0.0;       // relative residual of the defining equation
};

// Strict-weak Bernoulli limit shapes.
ShapeResult psi_strict_x(const EnvironmentLaw& law, double x, double y);
ShapeResult psi_strict_y(const EnvironmentLaw& law, double x, double y);

struct BernoulliBounds {
    double bound1;  // psi_strict_x <= b x + 2 sqrt(pbar(1-b) x y)
    double bound2;  // psi_strict_y <= pbar y + 2 sqrt(pbar(1-pbar) x y)
    double bound3;  // weak-weak   <= pbar y + 4 sqrt(pbar(1-pbar) x y) + b x
    double bound4;  // weak-weak   <= (y + 4 sqrt(x y)) sqrt(pbar) + b x
};
BernoulliBounds bernoulli_bounds(const EnvironmentLaw& law, double x, double y);

// Exponential-model shape machinery: the implicit a(u), its conjugate level
// curve g, and the time constant solved from t g(y/t) = x.
class ExpShape {
  public:
    explicit ExpShape(const EnvironmentLaw& law);

    double c() const { return view_.c; }
    double mu_g() const { return mu_g_; }
    double sigma_g() const { return sigma_g_; }
    ExtReal u_star() const { return u_star_; }

    double a(double u) const;
    double g(double y) const;
    // brute sup-scan of the duality for debugging/cross-checks
    double g_sup_scan(double y, int grid_points = 200) const;

    ShapeResult psi(double x, double y) const;

  private:
    double solve_a_interior(double u) const;  // F(a)=a*I1(a)=u on (0,c)
    ExponentialRateView view_;
    double mu_g_ = 0.0;
    double sigma_g_ = 0.0;
    ExtReal u_star_;
    ExtReal i3_at_c_;  // int xi/(xi-c)^2 dm; a'(u*-) = 1/i3 when finite
};

ShapeResult exp_psi(const EnvironmentLaw& law, double x, double y);

// Tail constants of the nu-regimes (assumption m[c,c+d) ~ kappa d^{nu+1}).
double a_nu_constant(double nu);                        // A_nu
double a_nu2_constant(double nu);                       // A_{nu,2}, nu < 0
double a_nu_series(double nu, int max_terms = 10000);   // partial-sum route
double a_nu2_series(double nu, int max_terms = 10000);
struct TailConstants {
    double a_nu;
    double a_nu2;  // NaN when nu >= 0
    double b0;
    double b;  // NaN when nu >= 0
};
TailConstants tail_constants(double c, const TailSpec& tail);

struct Asymptotic {
    double value;
    std::string branch;
    std::string error_order;
};

// mu + 2 sigma sqrt(alpha): leading expansion of Psi(alpha, 1).
Asymptotic asymptotic_alpha1(const EnvMoments& m, double alpha);

// Regime-dispatched expansion of Psi(1, alpha) for exponential-rate laws.
Asymptotic asymptotic_1alpha(const EnvironmentLaw& law, double alpha);

struct UpperBounds {
    std::optional<double> general;             // mu*(1+a) + 4 sigma* sqrt(a log 1/a)
    std::optional<double> bounded;             // mu* + 2 M sqrt(a)
    std::optional<double> finite_state_sum;    // mu* + 2 sqrt(a) sum_l sigma_l
    std::optional<double> finite_state_best;   // mu* + 2 sigma* sqrt(a)
};
UpperBounds upper_bounds_1alpha(const EnvMoments& m, double alpha,
                                std::optional<double> uniform_bound_m = {},
                                const std::vector<double>& component_stds = {});

}  // namespace lpp
