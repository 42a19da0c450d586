#include "lpp/rowlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lpp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

RowLaw RowLaw::bernoulli(double p) {
    require(p >= 0.0 && p <= 1.0, "Bernoulli: p must lie in [0,1]");
    RowLaw r;
    r.kind_ = Kind::Bernoulli;
    r.a_ = p;
    return r;
}

RowLaw RowLaw::exponential(double rate) {
    require(rate > 0.0, "Exponential: rate must be positive");
    RowLaw r;
    r.kind_ = Kind::Exponential;
    r.a_ = rate;
    return r;
}

RowLaw RowLaw::two_point(double lo, double hi, double p_hi) {
    require(lo < hi, "TwoPoint: lo must be < hi");
    require(p_hi >= 0.0 && p_hi <= 1.0, "TwoPoint: p_hi must lie in [0,1]");
    RowLaw r;
    r.kind_ = Kind::TwoPoint;
    r.a_ = lo;
    r.b_ = hi;
    r.c_ = p_hi;
    return r;
}

RowLaw RowLaw::bounded_table(std::vector<double> xs, std::vector<double> cs) {
    require(xs.size() == cs.size() && xs.size() >= 2,
            "BoundedTable: need two equal-length knot arrays");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        require(xs[i] >= xs[i - 1], "BoundedTable: support must be sorted");
        require(cs[i] >= cs[i - 1], "BoundedTable: cdf must be nondecreasing");
    }
    require(cs.front() >= 0.0 && cs.back() == 1.0,
            "BoundedTable: cdf must end at 1");
    RowLaw r;
    r.kind_ = Kind::BoundedTable;
    r.xs_ = std::move(xs);
    r.cs_ = std::move(cs);
    return r;
}

RowLaw RowLaw::uniform(double a, double b) {
    require(a < b, "uniform: need a < b");
    return bounded_table({a, b}, {0.0, 1.0});
}

double RowLaw::cdf(double x) const {
    switch (kind_) {
        case Kind::Bernoulli:
            if (x < 0.0) return 0.0;
            if (x < 1.0) return 1.0 - a_;
            return 1.0;
        case Kind::Exponential:
            if (x <= 0.0) return 0.0;
            return -std::expm1(-a_ * x);
        case Kind::TwoPoint:
            if (x < a_) return 0.0;
            if (x < b_) return 1.0 - c_;
            return 1.0;
        case Kind::BoundedTable: {
            if (x < xs_.front()) return 0.0;
            if (x >= xs_.back()) return 1.0;
            double c = cs_.front();
            for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
                if (x < xs_[i]) break;
                if (x >= xs_[i + 1]) {
                    c = cs_[i + 1];
                    continue;
                }
                if (xs_[i + 1] > xs_[i]) {
                    const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
                    c = cs_[i] + t * (cs_[i + 1] - cs_[i]);
                } else {
                    c = cs_[i + 1];
                }
                break;
            }
            return c;
        }
        case Kind::TruncatedUpper: {
            if (x < 0.0) return 0.0;
            if (x < b_) return -std::expm1(-a_ * x);
            if (x < d_) return 1.0 - c_ * std::exp(-a_ * b_);
            return 1.0;
        }
        case Kind::TruncatedBox: {
            if (x < -a_) return 0.0;
            if (x >= a_) return 1.0;
            return base_->cdf(x);
        }
    }
    throw std::logic_error("RowLaw::cdf: bad kind");
}

double RowLaw::quantile(double u) const {
    require(u > 0.0 && u < 1.0, "quantile: u must lie strictly in (0,1)");
    switch (kind_) {
        case Kind::Bernoulli:
            return u > 1.0 - a_ ? 1.0 : 0.0;
        case Kind::Exponential:
            return -std::log1p(-u) / a_;
        case Kind::TwoPoint:
            return u > 1.0 - c_ ? b_ : a_;
        case Kind::BoundedTable: {
            if (u <= cs_.front()) return xs_.front();
            for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
                if (cs_[i] < u && u <= cs_[i + 1]) {
                    if (xs_[i + 1] == xs_[i]) return xs_[i];
                    const double t = (u - cs_[i]) / (cs_[i + 1] - cs_[i]);
                    return xs_[i] + t * (xs_[i + 1] - xs_[i]);
                }
            }
            return xs_.back();
        }
        case Kind::TruncatedUpper: {
            const double surv_tau = std::exp(-a_ * b_);
            if (u < 1.0 - surv_tau) return -std::log1p(-u) / a_;
            if (u <= 1.0 - c_ * surv_tau) return b_;
            return d_;
        }
        case Kind::TruncatedBox:
            return std::clamp(base_->quantile(u), -a_, a_);
    }
    throw std::logic_error("RowLaw::quantile: bad kind");
}

double RowLaw::mean() const {
    switch (kind_) {
        case Kind::Bernoulli:
            return a_;
        case Kind::Exponential:
            return 1.0 / a_;
        case Kind::TwoPoint:
            return a_ * (1.0 - c_) + b_ * c_;
        case Kind::BoundedTable: {
            double m = xs_.front() * cs_.front();
            for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
                const double dm = cs_[i + 1] - cs_[i];
                m += dm * 0.5 * (xs_[i] + xs_[i + 1]);
            }
            return m;
        }
        case Kind::TruncatedUpper:
            // moment-preserving by construction
            return 1.0 / a_;
        case Kind::TruncatedBox: {
            if (base_->kind() == Kind::Exponential) {
                const double xi = base_->exponential_rate();
                return -std::expm1(-xi * a_) / xi;
            }
            throw std::logic_error("TruncatedBox mean: unsupported base");
        }
    }
    throw std::logic_error("RowLaw::mean: bad kind");
}

double RowLaw::second_moment() const {
    switch (kind_) {
        case Kind::Bernoulli:
            return a_;
        case Kind::Exponential:
            return 2.0 / (a_ * a_);
        case Kind::TwoPoint:
            return a_ * a_ * (1.0 - c_) + b_ * b_ * c_;
        case Kind::BoundedTable: {
            double m2 = xs_.front() * xs_.front() * cs_.front();
            for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
                const double dm = cs_[i + 1] - cs_[i];
                const double x0 = xs_[i], x1 = xs_[i + 1];
                m2 += dm * (x0 * x0 + x0 * x1 + x1 * x1) / 3.0;
            }
            return m2;
        }
        case Kind::TruncatedUpper: {
            return 2.0 / (a_ * a_);
        }
        case Kind::TruncatedBox: {
            if (base_->kind() == Kind::Exponential) {
                const double xi = base_->exponential_rate();
                const double e = std::exp(-xi * a_);
                return 2.0 / (xi * xi) - e * (2.0 * a_ / xi + 2.0 / (xi * xi));
            }
            throw std::logic_error("TruncatedBox second moment: unsupported base");
        }
    }
    throw std::logic_error("RowLaw::second_moment: bad kind");
}

double RowLaw::variance() const {
    const double m = mean();
    return second_moment() - m * m;
}

double RowLaw::support_lo() const {
    switch (kind_) {
        case Kind::Bernoulli:
            return 0.0;
        case Kind::Exponential:
            return 0.0;
        case Kind::TwoPoint:
            return a_;
        case Kind::BoundedTable:
            return xs_.front();
        case Kind::TruncatedUpper:
            return 0.0;
        case Kind::TruncatedBox:
            return std::max(-a_, base_->support_lo());
    }
    throw std::logic_error("RowLaw::support_lo: bad kind");
}

double RowLaw::support_hi() const {
    switch (kind_) {
        case Kind::Bernoulli:
            return 1.0;
        case Kind::Exponential:
            return kInf;
        case Kind::TwoPoint:
            return b_;
        case Kind::BoundedTable:
            return xs_.back();
        case Kind::TruncatedUpper:
            return d_;
        case Kind::TruncatedBox:
            return std::min(a_, base_->support_hi());
    }
    throw std::logic_error("RowLaw::support_hi: bad kind");
}

#define LPP_ACCESSOR(NAME, KIND, FIELD)                                \
    double RowLaw::NAME() const {                                      \
        if (kind_ != Kind::KIND)                                       \
            throw std::logic_error("RowLaw::" #NAME ": wrong kind");   \
        return FIELD;                                                  \
    }

LPP_ACCESSOR(bernoulli_p, Bernoulli, a_)
LPP_ACCESSOR(exponential_rate, Exponential, a_)
LPP_ACCESSOR(two_point_lo, TwoPoint, a_)
LPP_ACCESSOR(two_point_hi, TwoPoint, b_)
LPP_ACCESSOR(two_point_p_hi, TwoPoint, c_)
LPP_ACCESSOR(truncation_tau, TruncatedUpper, b_)
LPP_ACCESSOR(truncated_rate, TruncatedUpper, a_)
LPP_ACCESSOR(box_m, TruncatedBox, a_)
#undef LPP_ACCESSOR

const std::vector<double>& RowLaw::table_xs() const {
    if (kind_ != Kind::BoundedTable) throw std::logic_error("table_xs: wrong kind");
    return xs_;
}
const std::vector<double>& RowLaw::table_cs() const {
    if (kind_ != Kind::BoundedTable) throw std::logic_error("table_cs: wrong kind");
    return cs_;
}
const RowLaw& RowLaw::base() const {
    if (!base_) throw std::logic_error("RowLaw::base: no base law");
    return *base_;
}

std::string RowLaw::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Bernoulli:
            os << "Bernoulli(" << a_ << ")";
            break;
        case Kind::Exponential:
            os << "Exponential(rate=" << a_ << ")";
            break;
        case Kind::TwoPoint:
            os << "TwoPoint(" << a_ << "," << b_ << ";p_hi=" << c_ << ")";
            break;
        case Kind::BoundedTable:
            os << "BoundedTable[" << xs_.size() << " knots]";
            break;
        case Kind::TruncatedUpper:
            os << "TildeTruncated(Exponential(rate=" << a_ << "),tau=" << b_ << ")";
            break;
        case Kind::TruncatedBox:
            os << "Boxed(" << base_->describe() << ",M=" << a_ << ")";
            break;
    }
    return os.str();
}

RowLaw tilde_truncate(const RowLaw& rowlaw, double tau) {
    if (rowlaw.kind() != RowLaw::Kind::Exponential)
        throw std::invalid_argument("tilde_truncate: base must be Exponential");
    if (!(tau > 0.0)) throw std::invalid_argument("tilde_truncate: tau must be > 0");
    const double xi = rowlaw.exponential_rate();
    // conditional moments above tau, then the two-atom arrangement that
    // keeps the first two moments of the base law
    const double m = tau + 1.0 / xi;
    const double w = tau * tau + 2.0 * tau / xi + 2.0 / (xi * xi);
    const double p_tilde =
        (m - tau) * (m - tau) / ((m - tau) * (m - tau) + w - m * m);
    const double upper = (w - tau * tau) / (m - tau) - tau;
    RowLaw r;
    r.kind_ = RowLaw::Kind::TruncatedUpper;
    r.a_ = xi;
    r.b_ = tau;
    r.c_ = p_tilde;
    r.d_ = upper;
    return r;
}

RowLaw truncate_m(const RowLaw& rowlaw, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("truncate_m: M must be > 0");
    if (rowlaw.support_lo() >= -m && rowlaw.support_hi() <= m) return rowlaw;
    if (rowlaw.kind() == RowLaw::Kind::BoundedTable) {
        std::vector<double> xs = rowlaw.table_xs();
        std::vector<double> cs = rowlaw.table_cs();
        for (double& x : xs) x = std::clamp(x, -m, m);
        return RowLaw::bounded_table(std::move(xs), std::move(cs));
    }
    if (rowlaw.kind() == RowLaw::Kind::TwoPoint) {
        const double lo = std::clamp(rowlaw.two_point_lo(), -m, m);
        const double hi = std::clamp(rowlaw.two_point_hi(), -m, m);
        if (lo == hi) return RowLaw::two_point(lo, lo + 1.0, 0.0);
        return RowLaw::two_point(lo, hi, rowlaw.two_point_p_hi());
    }
    if (rowlaw.kind() != RowLaw::Kind::Exponential)
        throw std::invalid_argument("truncate_m: unsupported base kind");
    RowLaw r;
    r.kind_ = RowLaw::Kind::TruncatedBox;
    r.a_ = m;
    r.base_ = std::make_shared<RowLaw>(rowlaw);
    return r;
}

RowLaw extremal_two_point(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("extremal_two_point: M must be > 0");
    return RowLaw::two_point(-m, m, 0.5);
}

}  // namespace lpp
