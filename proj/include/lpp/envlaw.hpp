#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpp/real.hpp"
#include "lpp/rowlaw.hpp"

namespace lpp {

// Distribution of a scalar environment parameter (Bernoulli success
// probability p, or exponential rate xi).  Continuous families are kept in
// exactly invertible form so quantile transforms stay accurate arbitrarily
// close to the essential extrema.
class RateDist {
  public:
    enum class Kind {
        Atoms,       // finite support
        LowerPower,  // cdf ((x-lo)/width)^beta on [lo, lo+width]
        UpperPower,  // survival ((hi-x)/width)^k on [hi-width, hi]
    };

    static RateDist atoms(std::vector<double> xs, std::vector<double> ws);
    static RateDist lower_power(double lo, double width, double beta);
    static RateDist upper_power(double hi, double width, double k);
    static RateDist uniform(double lo, double hi);  // LowerPower beta=1

    Kind kind() const { return kind_; }
    double lo() const;   // essential infimum of the support
    double hi() const;   // essential supremum of the support
    double cdf(double x) const;
    double quantile(double v) const;        // v in (0,1)
    double upper_quantile(double t) const;  // x with survival(x) = t

    // Local mass exponent at the given support edge: mass within distance d
    // of the edge scales like d^beta.  An atom at the edge reports 0.
    double edge_exponent_lo() const;
    double edge_exponent_hi() const;

    // E[f] for integrands that are bounded on the support.
    ExtReal expect(const std::function<double(double)>& f) const;

    // E[f] where f may blow up at one support edge like dist^-order.
    // Divergence is decided exactly from the edge exponent; otherwise the
    // quantile transform is anchored at that edge and f receives both the
    // point x and its exact distance d to the edge, so integrands of the
    // form h(x)/(shift + d)^s can be evaluated without cancellation
    // arbitrarily close to the edge.
    enum class SingularEdge { Lo, Hi };
    using EdgeIntegrand = std::function<double(double x, double d)>;
    ExtReal expect_edge(const EdgeIntegrand& f, SingularEdge edge,
                        double order) const;

    const std::vector<double>& atom_points() const;
    const std::vector<double>& atom_weights() const;
    double power_width() const;
    double power_exponent() const;

  private:
    RateDist() = default;
    Kind kind_ = Kind::Atoms;
    std::vector<double> xs_, ws_;
    double a_ = 0.0, w_ = 0.0, e_ = 1.0;  // edge, width, exponent
};

// Declared tail behavior of an exponential-rate law at c:
// m[c, c+d) ~ kappa * d^(nu+1).
struct TailSpec {
    double nu = 0.0;
    double kappa = 1.0;
};

struct EnvMoments {
    std::optional<double> mu;          // E of quenched mean
    std::optional<double> sigma_sq;    // E of quenched variance
    std::optional<double> mu_star;     // esssup of quenched mean
    std::optional<double> sigma_star;  // esssup of quenched std
    std::optional<double> bern_b;      // esssup Bernoulli rate
    std::optional<double> exp_c;       // essinf exponential rate
    std::optional<double> mu_g;        // E[1/xi]
    std::optional<double> sigma_sq_g;  // E[1/xi^2]
};

// The law P over row distributions.
class EnvironmentLaw {
  public:
    enum class Kind { PointMass, FiniteMixture, BernoulliRate, ExponentialRate };

    static EnvironmentLaw point_mass(RowLaw row);
    static EnvironmentLaw finite_mixture(std::vector<RowLaw> rows,
                                         std::vector<double> weights);
    static EnvironmentLaw bernoulli_rate(RateDist p_dist);
    static EnvironmentLaw exponential_rate(RateDist xi_dist,
                                           std::optional<TailSpec> tail = {});

    Kind kind() const { return kind_; }
    const RowLaw& row() const;
    const std::vector<RowLaw>& mixture_rows() const;
    const std::vector<double>& mixture_weights() const;
    const RateDist& rate_dist() const;
    const std::optional<TailSpec>& tail() const { return tail_; }

    // Numeric consistency check of a declared (nu, kappa) tail at
    // xi = c + 10^-q, q = 3..6; throws when the declared tail is off.
    void check_tail_consistency() const;

    std::string describe() const;

  private:
    EnvironmentLaw() = default;
    Kind kind_ = Kind::PointMass;
    std::vector<RowLaw> rows_;
    std::vector<double> weights_;
    std::optional<RateDist> dist_;
    std::optional<TailSpec> tail_;
};

// A realized environment: the row laws actually assigned to rows 0..n-1.
struct Environment {
    std::vector<RowLaw> rows;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t size() const { return rows.size(); }
    const RowLaw& operator[](std::size_t j) const { return rows[j]; }
};

EnvMoments moments(const EnvironmentLaw& law);
Environment realize(const EnvironmentLaw& law, std::size_t rows,
                    std::uint64_t seed, std::uint64_t stream = 0);

// Views of a law as a scalar rate family; empty when the law is not of the
// requested family (e.g. a mixture with non-Bernoulli rows).
struct BernoulliRateView {
    RateDist dist;
    double b;  // esssup p
};
struct ExponentialRateView {
    RateDist dist;
    double c;  // essinf xi
    std::optional<TailSpec> tail;
};
std::optional<BernoulliRateView> as_bernoulli_rate(const EnvironmentLaw& law);
std::optional<ExponentialRateView> as_exponential_rate(const EnvironmentLaw& law);

}  // namespace lpp
