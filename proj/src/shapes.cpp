#include "lpp/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lpp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Edge = RateDist::SingularEdge;

// bisection on an open interval evaluating midpoints only, so singular
// endpoints are never touched; pred must be monotone (false .. false true .. true)
template <class Pred>
double open_bisect(Pred&& pred, double lo, double hi, int iters = 200) {
    for (int k = 0; k < iters; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * (std::fabs(lo) + std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

BernoulliRateView require_bernoulli(const EnvironmentLaw& law) {
    auto v = as_bernoulli_rate(law);
    if (!v) throw std::invalid_argument("law is not a Bernoulli-rate kind");
    return *v;
}

ExponentialRateView require_exponential(const EnvironmentLaw& law) {
    auto v = as_exponential_rate(law);
    if (!v) throw std::invalid_argument("law is not an exponential-rate kind");
    return *v;
}

// E[p(1-p)/(z-p)^2] written in the distance zeta = z - b >= 0 so that z - p
// = zeta + (b - p) stays exact arbitrarily close to the edge
ExtReal bern_pq_zminus(const RateDist& d, double zeta) {
    return d.expect_edge(
        [zeta](double p, double dist) {
            const double den = zeta + dist;
            return p * (1.0 - p) / (den * den);
        },
        Edge::Hi, zeta == 0.0 ? 2.0 : 0.0);
}

ExtReal bern_1mp_zminus(const RateDist& d, double zeta) {
    return d.expect_edge(
        [zeta](double p, double dist) {
            const double den = zeta + dist;
            return (1.0 - p) / (den * den);
        },
        Edge::Hi, zeta == 0.0 ? 2.0 : 0.0);
}

}  // namespace

ExtReal expectation(const EnvironmentLaw& law, Functional fn, double z) {
    switch (fn) {
        case Functional::BernPOverBMinusP: {
            auto v = require_bernoulli(law);
            return v.dist.expect_edge(
                [](double p, double d) { return p / d; }, Edge::Hi, 1.0);
        }
        case Functional::BernPQOverZMinusPSq: {
            auto v = require_bernoulli(law);
            if (z < v.b) throw std::invalid_argument("E[p(1-p)/(z-p)^2]: need z >= b");
            return bern_pq_zminus(v.dist, z - v.b);
        }
        case Functional::Bern1mPOverZMinusPSq: {
            auto v = require_bernoulli(law);
            if (z < v.b) throw std::invalid_argument("E[(1-p)/(z-p)^2]: need z >= b");
            return bern_1mp_zminus(v.dist, z - v.b);
        }
        case Functional::BernPOver1mP: {
            auto v = require_bernoulli(law);
            const double gap = 1.0 - v.b;  // singular only when b = 1
            return v.dist.expect_edge(
                [gap](double p, double d) { return p / (gap + d); }, Edge::Hi,
                gap == 0.0 ? 1.0 : 0.0);
        }
        case Functional::Bern1mPOverP: {
            auto v = require_bernoulli(law);
            const double lo = v.dist.lo();  // singular only when lo = 0
            return v.dist.expect_edge(
                [lo](double, double d) { return (1.0 - (lo + d)) / (lo + d); },
                Edge::Lo, lo == 0.0 ? 1.0 : 0.0);
        }
        case Functional::BernPQOverZPlusPSq: {
            auto v = require_bernoulli(law);
            if (z < 0.0) throw std::invalid_argument("E[p(1-p)/(z+p)^2]: need z >= 0");
            const double shift = z + v.dist.lo();
            return v.dist.expect_edge(
                [shift](double p, double d) {
                    const double den = shift + d;
                    return p * (1.0 - p) / (den * den);
                },
                Edge::Lo, shift == 0.0 ? 1.0 : 0.0);
        }
        case Functional::Bern1mPOverZPlusPSq: {
            auto v = require_bernoulli(law);
            if (z < 0.0) throw std::invalid_argument("E[(1-p)/(z+p)^2]: need z >= 0");
            const double shift = z + v.dist.lo();
            return v.dist.expect_edge(
                [shift](double p, double d) {
                    const double den = shift + d;
                    return (1.0 - p) / (den * den);
                },
                Edge::Lo, shift == 0.0 ? 2.0 : 0.0);
        }
        case Functional::BernSpeed: {
            auto v = require_bernoulli(law);
            const double u = z;
            if (u < 1.0 || u * v.b > 1.0)
                throw std::invalid_argument("E[pu(u-1)/(1-up)]: need 1 <= u <= 1/b");
            const double gap = 1.0 - u * v.b;  // 1 - up = gap + u(b - p)
            return v.dist.expect_edge(
                [u, gap](double p, double d) {
                    return p * u * (u - 1.0) / (gap + u * d);
                },
                Edge::Hi, gap == 0.0 ? 1.0 : 0.0);
        }
        case Functional::ExpInvXiMinusA: {
            auto v = require_exponential(law);
            if (z > v.c) throw std::invalid_argument("int 1/(xi-a) dm: need a <= c");
            const double delta = v.c - z;  // xi - a = delta + (xi - c)
            return v.dist.expect_edge(
                [delta](double, double d) { return 1.0 / (delta + d); }, Edge::Lo,
                delta == 0.0 ? 1.0 : 0.0);
        }
        case Functional::ExpInvSqXiMinusA: {
            auto v = require_exponential(law);
            if (z > v.c) throw std::invalid_argument("int 1/(xi-a)^2 dm: need a <= c");
            const double delta = v.c - z;
            return v.dist.expect_edge(
                [delta](double, double d) {
                    const double den = delta + d;
                    return 1.0 / (den * den);
                },
                Edge::Lo, delta == 0.0 ? 2.0 : 0.0);
        }
        case Functional::ExpXiOverSqXiMinusA: {
            auto v = require_exponential(law);
            if (z > v.c) throw std::invalid_argument("int xi/(xi-a)^2 dm: need a <= c");
            const double delta = v.c - z;
            return v.dist.expect_edge(
                [delta](double xi, double d) {
                    const double den = delta + d;
                    return xi / (den * den);
                },
                Edge::Lo, delta == 0.0 ? 2.0 : 0.0);
        }
        case Functional::ExpUStar: {
            auto v = require_exponential(law);
            const double c = v.c;
            return v.dist.expect_edge([c](double, double d) { return c / d; },
                                      Edge::Lo, 1.0);
        }
    }
    throw std::logic_error("expectation: bad functional");
}

// ---------------------------------------------------------------------------
// Bernoulli strict-weak shapes

namespace {

// single evaluation with every p in the law capped at `cap` (cap >= b means
// no capping); used both directly and inside the b=1 ladder
ShapeResult psi_strict_x_capped(const BernoulliRateView& v, double x, double y,
                                double cap) {
    const double r = x / y;
    const bool capped = cap < v.b;
    const double b_eff = std::min(v.b, cap);

    // flat threshold E[p/(1-p)] under the cap
    ExtReal thr_low;
    if (capped) {
        thr_low = v.dist.expect([cap](double p) {
            const double q = std::min(p, cap);
            return q / (1.0 - q);
        });
    } else {
        thr_low = expectation(EnvironmentLaw::bernoulli_rate(v.dist),
                              Functional::BernPOver1mP);
    }
    if (thr_low.is_infinite() || r <= thr_low.value())
        return {x, "flat_x", {}, 0.0};

    // E[p(1-p)/(z-p)^2] at z = b_eff + zeta
    auto pq_over = [&](double zeta) -> ExtReal {
        if (capped) {
            return v.dist.expect([cap, b_eff, zeta](double p) {
                const double q = std::min(p, cap);
                const double den = zeta + (b_eff - q);
                return q * (1.0 - q) / (den * den);
            });
        }
        return bern_pq_zminus(v.dist, zeta);
    };
    // capping parks an atom at b_eff, so the case-1 threshold diverges there
    const ExtReal thr_high = capped ? ExtReal::infinite() : pq_over(0.0);
    if (thr_high.is_finite() && r >= thr_high.value()) {
        const ExtReal tail = v.dist.expect_edge(
            [](double p, double d) { return p / d; }, Edge::Hi, 1.0);
        return {b_eff * x + y * (1.0 - b_eff) * tail.value(), "boundary_b", {}, 0.0};
    }
    // interior branch: z0 = b + zeta0 in (b, 1) solving E[p(1-p)/(z0-p)^2] = x/y;
    // the map is strictly decreasing in zeta
    const double zeta0 = open_bisect(
        [&](double zeta) { return pq_over(zeta).value() <= r; }, 0.0, 1.0 - b_eff);
    const double z0 = b_eff + zeta0;
    ExtReal val;
    if (capped) {
        val = v.dist.expect([cap, b_eff, zeta0](double p) {
            const double q = std::min(p, cap);
            const double den = zeta0 + (b_eff - q);
            return (1.0 - q) / (den * den);
        });
    } else {
        val = bern_1mp_zminus(v.dist, zeta0);
    }
    const double resid = std::fabs(pq_over(zeta0).value() - r) / std::max(r, 1e-300);
    return {y * z0 * z0 * val.value() - y, "interior", z0, resid};
}

double aitken(double v1, double v2, double v3) {
    const double d1 = v2 - v1;
    const double d2 = v3 - v2;
    const double den = d2 - d1;
    if (std::fabs(den) < 1e-14 * (std::fabs(d1) + std::fabs(d2)) || den == 0.0)
        return v3;
    return v3 - d2 * d2 / den;
}

}  // namespace

ShapeResult psi_strict_x(const EnvironmentLaw& law, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("psi_strict_x: need x, y > 0");
    const auto v = require_bernoulli(law);
    if (v.b < 1.0) return psi_strict_x_capped(v, x, y, 1.0);
    // b = 1: evaluate on a decreasing-epsilon ladder of capped laws and
    // extrapolate the limit
    const double e0 = 1e-3;
    const double v1 = psi_strict_x_capped(v, x, y, 1.0 - e0).value;
    const double v2 = psi_strict_x_capped(v, x, y, 1.0 - e0 / 2).value;
    const double v3 = psi_strict_x_capped(v, x, y, 1.0 - e0 / 4).value;
    ShapeResult res;
    res.value = aitken(v1, v2, v3);
    res.branch = "b1_ladder";
    res.residual = std::fabs(v3 - v2) / std::max(std::fabs(v3), 1e-300);
    return res;
}

ShapeResult psi_strict_y(const EnvironmentLaw& law, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("psi_strict_y: need x, y > 0");
    const auto v = require_bernoulli(law);
    const double r = x / y;
    const ExtReal thr = expectation(EnvironmentLaw::bernoulli_rate(v.dist),
                                    Functional::Bern1mPOverP);
    if (thr.is_finite() && r >= thr.value()) return {y, "flat_y", {}, 0.0};

    const double lo = v.dist.lo();
    auto pq_over = [&](double z) {
        const double shift = z + lo;
        return v.dist
            .expect_edge(
                [shift](double p, double d) {
                    const double den = shift + d;
                    return p * (1.0 - p) / (den * den);
                },
                Edge::Lo, shift == 0.0 ? 1.0 : 0.0)
            .value();
    };
    // E[p(1-p)/(z+p)^2] decreases from the threshold at z=0 to 0
    double hi = 1.0;
    while (pq_over(hi) > r) hi *= 2.0;
    const double z0 =
        open_bisect([&](double z) { return pq_over(z) <= r; }, 0.0, hi);
    const double val =
        v.dist
            .expect_edge(
                [z0, lo](double p, double d) {
                    const double den = z0 + lo + d;
                    return (1.0 - p) / (den * den);
                },
                Edge::Lo, 0.0)
            .value();
    const double resid = std::fabs(pq_over(z0) - r) / std::max(r, 1e-300);
    return {y - y * z0 * z0 * val, "interior", z0, resid};
}

BernoulliBounds bernoulli_bounds(const EnvironmentLaw& law, double x, double y) {
    const auto v = require_bernoulli(law);
    const double pbar = v.dist.expect([](double p) { return p; }).value();
    const double b = v.b;
    BernoulliBounds out;
    out.bound1 = b * x + 2.0 * std::sqrt(pbar * (1.0 - b) * x * y);
    out.bound2 = pbar * y + 2.0 * std::sqrt(pbar * (1.0 - pbar) * x * y);
    out.bound3 = pbar * y + 4.0 * std::sqrt(pbar * (1.0 - pbar) * x * y) + b * x;
    out.bound4 = (y + 4.0 * std::sqrt(x * y)) * std::sqrt(pbar) + b * x;
    return out;
}

// ---------------------------------------------------------------------------
// exponential shape
//
// All interior solves run in the distance variable delta = c - a, which is
// exact near the critical point; a is reconstructed only for reporting.

namespace {

double exp_i1(const RateDist& d, double delta) {
    return d
        .expect_edge([delta](double, double dist) { return 1.0 / (delta + dist); },
                     Edge::Lo, delta == 0.0 ? 1.0 : 0.0)
        .value_or(std::numeric_limits<double>::infinity());
}

double exp_i3(const RateDist& d, double delta) {
    return d
        .expect_edge(
            [delta](double xi, double dist) {
                const double den = delta + dist;
                return xi / (den * den);
            },
            Edge::Lo, delta == 0.0 ? 2.0 : 0.0)
        .value_or(std::numeric_limits<double>::infinity());
}

}  // namespace

ExpShape::ExpShape(const EnvironmentLaw& law) : view_(require_exponential(law)) {
    mu_g_ = view_.dist.expect([](double xi) { return 1.0 / xi; }).value();
    sigma_g_ =
        std::sqrt(view_.dist.expect([](double xi) { return 1.0 / (xi * xi); }).value());
    const double c = view_.c;
    u_star_ = view_.dist.expect_edge(
        [c](double, double d) { return c / d; }, Edge::Lo, 1.0);
    i3_at_c_ = view_.dist.expect_edge(
        [](double xi, double d) { return xi / (d * d); }, Edge::Lo, 2.0);
}

double ExpShape::solve_a_interior(double u) const {
    // F(a) = a * I1(a) = u is increasing in a; solve in delta = c - a
    const double c = view_.c;
    auto F = [&](double delta) {
        return (c - delta) * exp_i1(view_.dist, delta);
    };
    const double delta = open_bisect([&](double dd) { return F(dd) <= u; }, 0.0, c);
    return c - delta;
}

double ExpShape::a(double u) const {
    if (u <= 0.0) return 0.0;
    if (u_star_.is_finite() && u >= u_star_.value()) return view_.c;
    return solve_a_interior(u);
}

double ExpShape::g(double y) const {
    if (!(y > 0.0)) return view_.c;  // g(0+) = sup a(u) = c
    if (y * mu_g_ >= 1.0) return 0.0;
    if (u_star_.is_finite() && i3_at_c_.is_finite() &&
        y * i3_at_c_.value() <= 1.0)
        return view_.c - y * u_star_.value();
    // interior: delta0 with int xi/(xi-a0)^2 dm = 1/y, then g = a0 - y u0
    // (I3 decreases in delta, so the predicate flips from false to true)
    const double c = view_.c;
    const double delta0 = open_bisect(
        [&](double dd) { return exp_i3(view_.dist, dd) < 1.0 / y; }, 0.0, c);
    const double a0 = c - delta0;
    const double u0 = a0 * exp_i1(view_.dist, delta0);
    return a0 - y * u0;
}

double ExpShape::g_sup_scan(double y, int grid_points) const {
    const double u_hi =
        u_star_.is_finite() ? u_star_.value() : 64.0 / std::max(y, 1e-6);
    double best = 0.0;
    for (int k = 0; k <= grid_points; ++k) {
        const double u = u_hi * static_cast<double>(k) / grid_points;
        best = std::max(best, -y * u + a(u));
    }
    return best;
}

ShapeResult ExpShape::psi(double x, double y) const {
    if (x < 0.0 || !(y > 0.0)) throw std::invalid_argument("exp_psi: bad (x,y)");
    if (x == 0.0) return {y * mu_g_, "axis", {}, 0.0};
    auto phi = [this, y](double t) { return t * g(y / t); };
    const double lo = y * mu_g_;
    double hi = lo + std::max(1.0, 4.0 * x / view_.c);
    while (phi(hi) < x) hi = lo + 2.0 * (hi - lo);
    const double t = open_bisect([&](double tt) { return phi(tt) >= x; }, lo, hi);
    ShapeResult res;
    res.value = t;
    res.root = t;
    res.residual = std::fabs(phi(t) - x) / std::max(x, 1e-300);
    const double yy = y / t;
    if (yy * mu_g_ >= 1.0)
        res.branch = "flat";
    else if (u_star_.is_finite() && i3_at_c_.is_finite() &&
             yy * i3_at_c_.value() <= 1.0)
        res.branch = "linear";
    else
        res.branch = "interior";
    return res;
}

ShapeResult exp_psi(const EnvironmentLaw& law, double x, double y) {
    return ExpShape(law).psi(x, y);
}

// ---------------------------------------------------------------------------
// tail constants and boundary asymptotics

double a_nu_constant(double nu) {
    if (nu < -1.0 || nu >= 1.0)
        throw std::invalid_argument("a_nu_constant: need nu in [-1, 1)");
    // Euler-integral evaluation of sum_k C(nu+1,k) (-1)^k / (k - nu + 1)
    //   = int_0^1 s^-nu (1-s)^(nu+1) ds = Beta(1-nu, nu+2)
    return std::tgamma(1.0 - nu) * std::tgamma(nu + 2.0) / 2.0;
}

double a_nu2_constant(double nu) {
    if (nu < -1.0 || nu >= 0.0)
        throw std::invalid_argument("a_nu2_constant: need nu in [-1, 0)");
    // Beta(-nu, nu+2)
    return std::tgamma(-nu) * std::tgamma(nu + 2.0);
}

namespace {
double binom_series(double nu, double shift, int max_terms) {
    // sum_k C(nu+1, k) (-1)^k / (k + shift), truncated when |term| < 1e-14
    double coef = 1.0;  // C(nu+1, 0)
    double sum = 0.0;
    for (int k = 0;; ++k) {
        const double term = coef / (static_cast<double>(k) + shift);
        sum += term;
        if (std::fabs(term) < 1e-14 || k >= max_terms) break;
        coef *= -(nu + 1.0 - static_cast<double>(k)) / (static_cast<double>(k) + 1.0);
    }
    return sum;
}
}  // namespace

double a_nu_series(double nu, int max_terms) {
    return binom_series(nu, 1.0 - nu, max_terms);
}

double a_nu2_series(double nu, int max_terms) {
    return binom_series(nu, -nu, max_terms);
}

TailConstants tail_constants(double c, const TailSpec& tail) {
    TailConstants t{kNaN, kNaN, kNaN, kNaN};
    const double nu = tail.nu;
    if (nu >= 1.0) return t;
    t.a_nu = a_nu_constant(nu);
    t.b0 = std::pow(2.0 * tail.kappa * c * c * t.a_nu, 1.0 / (1.0 - nu));
    if (nu < 0.0) {
        t.a_nu2 = a_nu2_constant(nu);
        t.b = t.b0 / (c * c) + tail.kappa * std::pow(t.b0, nu) * t.a_nu2;
    }
    return t;
}

Asymptotic asymptotic_alpha1(const EnvMoments& m, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("asymptotic_alpha1: alpha > 0");
    if (!m.mu || !m.sigma_sq)
        throw std::invalid_argument("asymptotic_alpha1: moments lack mu/sigma");
    Asymptotic a;
    a.value = *m.mu + 2.0 * std::sqrt(*m.sigma_sq) * std::sqrt(alpha);
    a.branch = "leading";
    a.error_order = m.exp_c ? "O(alpha)"
                            : "o(sqrt(alpha)); o(alpha^(3/5-eps)) under a "
                              "uniform bound";
    return a;
}

Asymptotic asymptotic_1alpha(const EnvironmentLaw& law, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("asymptotic_1alpha: alpha > 0");
    const auto v = require_exponential(law);
    const double c = v.c;
    const ExtReal i2 = expectation(law, Functional::ExpInvSqXiMinusA, c);
    Asymptotic out;
    if (i2.is_finite()) {
        const double i1 = expectation(law, Functional::ExpInvXiMinusA, c).value();
        out.value = 1.0 / c + alpha * i1;
        out.branch = "case1_linear";
        // the validity window alpha_0 is determined operationally: the
        // linear formula is accepted while it agrees with the full solver
        const double solved = exp_psi(law, 1.0, alpha).value;
        if (std::fabs(solved - out.value) <= 1e-8) {
            out.error_order = "exact (alpha within alpha_0)";
        } else {
            out.error_order = "outside alpha_0 window (solver differs by " +
                              std::to_string(solved - out.value) + ")";
        }
        return out;
    }
    if (!v.tail)
        throw std::invalid_argument(
            "asymptotic_1alpha: law needs a declared (nu,kappa) tail");
    const double nu = v.tail->nu;
    if (nu > 0.0) {
        const double i1 = expectation(law, Functional::ExpInvXiMinusA, c).value();
        out.value = 1.0 / c + alpha * i1;
        out.branch = "nu_pos_linear";
        out.error_order = "o(alpha)";
        return out;
    }
    if (nu == 0.0) {
        out.value = 1.0 / c - v.tail->kappa * alpha * std::log(alpha);
        out.branch = "nu_zero_log";
        out.error_order = "o(alpha log alpha)";
        return out;
    }
    const TailConstants tc = tail_constants(c, *v.tail);
    out.value = 1.0 / c + tc.b * std::pow(alpha, 1.0 / (1.0 - nu));
    out.branch = "nu_neg_power";
    out.error_order = "o(alpha^(1/(1-nu)))";
    return out;
}

UpperBounds upper_bounds_1alpha(const EnvMoments& m, double alpha,
                                std::optional<double> uniform_bound_m,
                                const std::vector<double>& component_stds) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("upper_bounds_1alpha: alpha in (0,1)");
    if (!m.mu_star)
        throw std::invalid_argument("upper_bounds_1alpha: moments lack mu*");
    UpperBounds out;
    const double mu_star = *m.mu_star;
    const double ra = std::sqrt(alpha);
    if (m.sigma_star) {
        out.general = mu_star * (1.0 + alpha) +
                      4.0 * (*m.sigma_star) * std::sqrt(alpha * std::log(1.0 / alpha));
        out.finite_state_best = mu_star + 2.0 * (*m.sigma_star) * ra;
    }
    if (uniform_bound_m) out.bounded = mu_star + 2.0 * (*uniform_bound_m) * ra;
    if (!component_stds.empty()) {
        double s = 0.0;
        for (double sd : component_stds) s += sd;
        out.finite_state_sum = mu_star + 2.0 * s * ra;
    }
    return out;
}

}  // namespace lpp
