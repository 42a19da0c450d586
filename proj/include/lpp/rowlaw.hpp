#pragma once

#include <memory>
#include <string>
#include <vector>

namespace lpp {

// One row's weight distribution F_j.  Immutable after construction; nested
// laws (TruncatedBox) share their base by const pointer.
class RowLaw {
  public:
    enum class Kind {
        Bernoulli,       // P(X=1)=p, P(X=0)=1-p
        Exponential,     // rate xi > 0
        TwoPoint,        // lo with prob 1-p_hi, hi with prob p_hi
        BoundedTable,    // piecewise-linear cdf through knots; repeated
                         // abscissae encode atoms
        TruncatedUpper,  // exponential truncated above tau, two atoms chosen
                         // to preserve the first two moments
        TruncatedBox,    // base with mass outside [-M, M] moved onto +-M
    };

    static RowLaw bernoulli(double p);
    static RowLaw exponential(double rate);
    static RowLaw two_point(double lo, double hi, double p_hi);
    static RowLaw bounded_table(std::vector<double> xs, std::vector<double> cs);
    static RowLaw uniform(double a, double b);  // table with two knots

    Kind kind() const { return kind_; }

    double cdf(double x) const;
    // Generalized inverse F^{-1}(u) = sup{x : F(x) < u}; requires 0 < u < 1.
    double quantile(double u) const;

    double mean() const;
    double second_moment() const;
    double variance() const;

    double support_lo() const;
    double support_hi() const;  // +infinity for Exponential

    // Parameter accessors; each throws unless the kind matches.
    double bernoulli_p() const;
    double exponential_rate() const;
    double two_point_lo() const;
    double two_point_hi() const;
    double two_point_p_hi() const;
    const std::vector<double>& table_xs() const;
    const std::vector<double>& table_cs() const;
    double truncation_tau() const;
    double truncated_rate() const;  // rate of the TruncatedUpper base
    double box_m() const;
    const RowLaw& base() const;

    std::string describe() const;

    friend RowLaw tilde_truncate(const RowLaw& rowlaw, double tau);
    friend RowLaw truncate_m(const RowLaw& rowlaw, double m);

  private:
    RowLaw() = default;

    Kind kind_ = Kind::Bernoulli;
    // Bernoulli: a_=p. Exponential: a_=rate. TwoPoint: a_=lo,b_=hi,c_=p_hi.
    // TruncatedUpper: a_=rate, b_=tau, c_=p_tilde, d_=upper atom u.
    // TruncatedBox: a_=M.
    double a_ = 0.0, b_ = 0.0, c_ = 0.0, d_ = 0.0;
    std::vector<double> xs_, cs_;
    std::shared_ptr<const RowLaw> base_;
};

// Paper transforms on row laws.
RowLaw tilde_truncate(const RowLaw& rowlaw, double tau);
RowLaw truncate_m(const RowLaw& rowlaw, double m);
RowLaw extremal_two_point(double m);

}  // namespace lpp
