#include "lpp/envlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lpp/quadrature.hpp"
#include "lpp/rng.hpp"

namespace lpp {

namespace {
void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

RateDist RateDist::atoms(std::vector<double> xs, std::vector<double> ws) {
    require(xs.size() == ws.size() && !xs.empty(), "RateDist::atoms: bad arrays");
    double total = 0.0;
    for (double w : ws) {
        require(w >= 0.0, "RateDist::atoms: negative weight");
        total += w;
    }
    require(std::fabs(total - 1.0) <= 1e-12,
            "RateDist::atoms: weights must sum to 1 within 1e-12");
    // sort by support point, keep pairing
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    RateDist d;
    d.kind_ = Kind::Atoms;
    for (std::size_t i : idx) {
        if (ws[i] == 0.0) continue;
        d.xs_.push_back(xs[i]);
        d.ws_.push_back(ws[i]);
    }
    require(!d.xs_.empty(), "RateDist::atoms: all weights zero");
    return d;
}

RateDist RateDist::lower_power(double lo, double width, double beta) {
    require(width > 0.0 && beta > 0.0, "RateDist::lower_power: bad parameters");
    RateDist d;
    d.kind_ = Kind::LowerPower;
    d.a_ = lo;
    d.w_ = width;
    d.e_ = beta;
    return d;
}

RateDist RateDist::upper_power(double hi, double width, double k) {
    require(width > 0.0 && k > 0.0, "RateDist::upper_power: bad parameters");
    RateDist d;
    d.kind_ = Kind::UpperPower;
    d.a_ = hi;
    d.w_ = width;
    d.e_ = k;
    return d;
}

RateDist RateDist::uniform(double lo, double hi) {
    require(lo < hi, "RateDist::uniform: need lo < hi");
    return lower_power(lo, hi - lo, 1.0);
}

double RateDist::lo() const {
    switch (kind_) {
        case Kind::Atoms: return xs_.front();
        case Kind::LowerPower: return a_;
        case Kind::UpperPower: return a_ - w_;
    }
    throw std::logic_error("RateDist::lo");
}

double RateDist::hi() const {
    switch (kind_) {
        case Kind::Atoms: return xs_.back();
        case Kind::LowerPower: return a_ + w_;
        case Kind::UpperPower: return a_;
    }
    throw std::logic_error("RateDist::hi");
}

double RateDist::cdf(double x) const {
    switch (kind_) {
        case Kind::Atoms: {
            double c = 0.0;
            for (std::size_t i = 0; i < xs_.size(); ++i)
                if (xs_[i] <= x) c += ws_[i];
            return c;
        }
        case Kind::LowerPower:
            if (x <= a_) return 0.0;
            if (x >= a_ + w_) return 1.0;
            return std::pow((x - a_) / w_, e_);
        case Kind::UpperPower:
            if (x >= a_) return 1.0;
            if (x <= a_ - w_) return 0.0;
            return 1.0 - std::pow((a_ - x) / w_, e_);
    }
    throw std::logic_error("RateDist::cdf");
}

double RateDist::quantile(double v) const {
    require(v > 0.0 && v < 1.0, "RateDist::quantile: v in (0,1)");
    switch (kind_) {
        case Kind::Atoms: {
            double c = 0.0;
            for (std::size_t i = 0; i < xs_.size(); ++i) {
                c += ws_[i];
                if (v <= c) return xs_[i];
            }
            return xs_.back();
        }
        case Kind::LowerPower:
            return a_ + w_ * std::pow(v, 1.0 / e_);
        case Kind::UpperPower:
            return a_ - w_ * std::pow(1.0 - v, 1.0 / e_);
    }
    throw std::logic_error("RateDist::quantile");
}

double RateDist::upper_quantile(double t) const {
    require(t > 0.0 && t < 1.0, "RateDist::upper_quantile: t in (0,1)");
    switch (kind_) {
        case Kind::Atoms: {
            double s = 0.0;  // survival accumulated from the top
            for (std::size_t i = xs_.size(); i-- > 0;) {
                s += ws_[i];
                if (t <= s) return xs_[i];
            }
            return xs_.front();
        }
        case Kind::LowerPower:
            return a_ + w_ * std::pow(1.0 - t, 1.0 / e_);
        case Kind::UpperPower:
            return a_ - w_ * std::pow(t, 1.0 / e_);
    }
    throw std::logic_error("RateDist::upper_quantile");
}

double RateDist::edge_exponent_lo() const {
    switch (kind_) {
        case Kind::Atoms: return 0.0;
        case Kind::LowerPower: return e_;
        case Kind::UpperPower: return 1.0;
    }
    throw std::logic_error("RateDist::edge_exponent_lo");
}

double RateDist::edge_exponent_hi() const {
    switch (kind_) {
        case Kind::Atoms: return 0.0;
        case Kind::LowerPower: return 1.0;
        case Kind::UpperPower: return e_;
    }
    throw std::logic_error("RateDist::edge_exponent_hi");
}

ExtReal RateDist::expect(const std::function<double(double)>& f) const {
    return expect_edge([&f](double x, double) { return f(x); }, SingularEdge::Lo,
                       0.0);
}

ExtReal RateDist::expect_edge(const EdgeIntegrand& f, SingularEdge edge,
                              double order) const {
    if (kind_ == Kind::Atoms) {
        // the support edge of an atom law is itself an atom, so any genuine
        // edge singularity diverges
        if (order > 0.0) return ExtReal::infinite();
        const double anchor = edge == SingularEdge::Lo ? lo() : hi();
        double s = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i)
            s += ws_[i] * f(xs_[i], std::fabs(xs_[i] - anchor));
        return ExtReal(s);
    }
    const double beta =
        edge == SingularEdge::Lo ? edge_exponent_lo() : edge_exponent_hi();
    if (order > 0.0 && beta <= order) return ExtReal::infinite();

    // Quantile transform anchored at the requested edge: the integration
    // variable is the tail mass at that edge and the distance d to the edge
    // is computed in closed form, exactly even deep in the tail.
    const double width = w_;
    const double inv_e = 1.0 / e_;
    const bool edge_matches_power =
        (kind_ == Kind::LowerPower) == (edge == SingularEdge::Lo);
    auto point = [&](double t, double& d) {
        if (edge_matches_power)
            d = width * std::pow(t, inv_e);
        else
            d = -width * std::expm1(std::log1p(-t) * inv_e);
        return edge == SingularEdge::Lo ? lo() + d : hi() - d;
    };
    auto g = [&](double t) {
        double d = 0.0;
        const double x = point(t, d);
        return f(x, d);
    };
    QuadResult q = integrate(g, 0.0, 1.0, 1e-12, 1e-12);
    if (!q.converged) {
        // one retry with a larger budget before reporting failure
        q = integrate(g, 0.0, 1.0, 1e-12, 1e-12, 40000);
        if (!q.converged)
            throw std::runtime_error("RateDist::expect: quadrature did not converge");
    }
    return ExtReal(q.value);
}

const std::vector<double>& RateDist::atom_points() const {
    if (kind_ != Kind::Atoms) throw std::logic_error("atom_points: wrong kind");
    return xs_;
}
const std::vector<double>& RateDist::atom_weights() const {
    if (kind_ != Kind::Atoms) throw std::logic_error("atom_weights: wrong kind");
    return ws_;
}
double RateDist::power_width() const {
    if (kind_ == Kind::Atoms) throw std::logic_error("power_width: wrong kind");
    return w_;
}
double RateDist::power_exponent() const {
    if (kind_ == Kind::Atoms) throw std::logic_error("power_exponent: wrong kind");
    return e_;
}

EnvironmentLaw EnvironmentLaw::point_mass(RowLaw row) {
    EnvironmentLaw law;
    law.kind_ = Kind::PointMass;
    law.rows_.push_back(std::move(row));
    return law;
}

EnvironmentLaw EnvironmentLaw::finite_mixture(std::vector<RowLaw> rows,
                                              std::vector<double> weights) {
    require(rows.size() == weights.size() && !rows.empty(),
            "finite_mixture: rows/weights mismatch");
    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0, "finite_mixture: negative weight");
        total += w;
    }
    require(std::fabs(total - 1.0) <= 1e-12,
            "finite_mixture: weights must sum to 1 within 1e-12");
    EnvironmentLaw law;
    law.kind_ = Kind::FiniteMixture;
    law.rows_ = std::move(rows);
    law.weights_ = std::move(weights);
    return law;
}

EnvironmentLaw EnvironmentLaw::bernoulli_rate(RateDist p_dist) {
    require(p_dist.lo() >= 0.0 && p_dist.hi() <= 1.0,
            "bernoulli_rate: p support must lie in [0,1]");
    EnvironmentLaw law;
    law.kind_ = Kind::BernoulliRate;
    law.dist_ = std::move(p_dist);
    return law;
}

EnvironmentLaw EnvironmentLaw::exponential_rate(RateDist xi_dist,
                                                std::optional<TailSpec> tail) {
    require(xi_dist.lo() > 0.0, "exponential_rate: rates must be positive");
    if (tail) {
        require(tail->nu >= -1.0 && tail->nu <= 1.0,
                "exponential_rate: tail nu must lie in [-1,1]");
        require(tail->kappa > 0.0, "exponential_rate: tail kappa must be > 0");
    }
    EnvironmentLaw law;
    law.kind_ = Kind::ExponentialRate;
    law.dist_ = std::move(xi_dist);
    law.tail_ = tail;
    return law;
}

const RowLaw& EnvironmentLaw::row() const {
    if (kind_ != Kind::PointMass) throw std::logic_error("row(): wrong kind");
    return rows_.front();
}
const std::vector<RowLaw>& EnvironmentLaw::mixture_rows() const {
    if (kind_ != Kind::FiniteMixture) throw std::logic_error("mixture_rows(): wrong kind");
    return rows_;
}
const std::vector<double>& EnvironmentLaw::mixture_weights() const {
    if (kind_ != Kind::FiniteMixture) throw std::logic_error("mixture_weights(): wrong kind");
    return weights_;
}
const RateDist& EnvironmentLaw::rate_dist() const {
    if (!dist_) throw std::logic_error("rate_dist(): wrong kind");
    return *dist_;
}

void EnvironmentLaw::check_tail_consistency() const {
    if (kind_ != Kind::ExponentialRate || !tail_) return;
    const double c = dist_->lo();
    const double nu = tail_->nu;
    const double kappa = tail_->kappa;
    if (nu == -1.0) {
        // atom of mass kappa at c
        if (dist_->kind() == RateDist::Kind::Atoms) {
            const auto& xs = dist_->atom_points();
            const auto& ws = dist_->atom_weights();
            double at_c = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (xs[i] == c) at_c += ws[i];
            require(std::fabs(at_c - kappa) <= 1e-12,
                    "tail check: nu=-1 requires atom of mass kappa at c");
            return;
        }
        throw std::invalid_argument("tail check: nu=-1 requires an atom at c");
    }
    for (int q = 3; q <= 6; ++q) {
        const double d = std::pow(10.0, -q);
        const double mass = dist_->cdf(c + d) - 0.0;
        const double predicted = kappa * std::pow(d, nu + 1.0);
        if (predicted == 0.0) throw std::logic_error("tail check: zero prediction");
        const double ratio = mass / predicted;
        require(ratio > 0.5 && ratio < 2.0,
                "tail check: declared (nu,kappa) inconsistent with cdf near c");
    }
}

std::string EnvironmentLaw::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::PointMass:
            os << "PointMass[" << rows_.front().describe() << "]";
            break;
        case Kind::FiniteMixture:
            os << "FiniteMixture[" << rows_.size() << " components]";
            break;
        case Kind::BernoulliRate:
            os << "BernoulliRateLaw[b=" << dist_->hi() << "]";
            break;
        case Kind::ExponentialRate:
            os << "ExponentialRateLaw[c=" << dist_->lo() << "]";
            break;
    }
    return os.str();
}

namespace {

// esssup over [lo,hi] of sqrt(p(1-p))
double bernoulli_sigma_star(double lo, double hi) {
    const double p = std::clamp(0.5, lo, hi);
    return std::sqrt(p * (1.0 - p));
}

}  // namespace

EnvMoments moments(const EnvironmentLaw& law) {
    EnvMoments m;
    switch (law.kind()) {
        case EnvironmentLaw::Kind::PointMass: {
            const RowLaw& r = law.row();
            m.mu = r.mean();
            m.sigma_sq = r.variance();
            m.mu_star = r.mean();
            m.sigma_star = std::sqrt(std::max(0.0, r.variance()));
            if (r.kind() == RowLaw::Kind::Bernoulli) m.bern_b = r.bernoulli_p();
            if (r.kind() == RowLaw::Kind::Exponential) {
                const double xi = r.exponential_rate();
                m.exp_c = xi;
                m.mu_g = 1.0 / xi;
                m.sigma_sq_g = 1.0 / (xi * xi);
            }
            break;
        }
        case EnvironmentLaw::Kind::FiniteMixture: {
            const auto& rows = law.mixture_rows();
            const auto& ws = law.mixture_weights();
            double mu = 0.0, var = 0.0, mu_star = -1e308, sig_star = 0.0;
            bool all_bern = true, all_exp = true;
            double b = 0.0, c = 1e308, mu_g = 0.0, s_g = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (ws[i] == 0.0) continue;
                mu += ws[i] * rows[i].mean();
                var += ws[i] * rows[i].variance();
                mu_star = std::max(mu_star, rows[i].mean());
                sig_star = std::max(sig_star, std::sqrt(std::max(0.0, rows[i].variance())));
                if (rows[i].kind() == RowLaw::Kind::Bernoulli)
                    b = std::max(b, rows[i].bernoulli_p());
                else
                    all_bern = false;
                if (rows[i].kind() == RowLaw::Kind::Exponential) {
                    const double xi = rows[i].exponential_rate();
                    c = std::min(c, xi);
                    mu_g += ws[i] / xi;
                    s_g += ws[i] / (xi * xi);
                } else {
                    all_exp = false;
                }
            }
            m.mu = mu;
            m.sigma_sq = var;
            m.mu_star = mu_star;
            m.sigma_star = sig_star;
            if (all_bern) m.bern_b = b;
            if (all_exp) {
                m.exp_c = c;
                m.mu_g = mu_g;
                m.sigma_sq_g = s_g;
            }
            break;
        }
        case EnvironmentLaw::Kind::BernoulliRate: {
            const RateDist& d = law.rate_dist();
            const ExtReal pbar = d.expect([](double p) { return p; });
            const ExtReal pq = d.expect([](double p) { return p * (1.0 - p); });
            m.mu = pbar.value();
            m.sigma_sq = pq.value();
            m.bern_b = d.hi();
            m.mu_star = d.hi();
            m.sigma_star = bernoulli_sigma_star(d.lo(), d.hi());
            break;
        }
        case EnvironmentLaw::Kind::ExponentialRate: {
            const RateDist& d = law.rate_dist();
            const ExtReal mg = d.expect([](double xi) { return 1.0 / xi; });
            const ExtReal sg = d.expect([](double xi) { return 1.0 / (xi * xi); });
            m.mu = mg.value();
            m.sigma_sq = sg.value();
            m.mu_g = mg.value();
            m.sigma_sq_g = sg.value();
            m.exp_c = d.lo();
            m.mu_star = 1.0 / d.lo();
            m.sigma_star = 1.0 / d.lo();
            break;
        }
    }
    return m;
}

Environment realize(const EnvironmentLaw& law, std::size_t rows,
                    std::uint64_t seed, std::uint64_t stream) {
    require(rows >= 1, "realize: need at least one row");
    Environment env;
    env.seed = seed;
    env.stream = stream;
    env.rows.reserve(rows);
    const UniformField uf(seed, stream);
    for (std::size_t j = 0; j < rows; ++j) {
        switch (law.kind()) {
            case EnvironmentLaw::Kind::PointMass:
                env.rows.push_back(law.row());
                break;
            case EnvironmentLaw::Kind::FiniteMixture: {
                const double u = uf.at(static_cast<std::int64_t>(j), 0);
                const auto& ws = law.mixture_weights();
                double c = 0.0;
                std::size_t pick = ws.size() - 1;
                for (std::size_t i = 0; i < ws.size(); ++i) {
                    c += ws[i];
                    if (u <= c) {
                        pick = i;
                        break;
                    }
                }
                env.rows.push_back(law.mixture_rows()[pick]);
                break;
            }
            case EnvironmentLaw::Kind::BernoulliRate: {
                const double u = uf.at(static_cast<std::int64_t>(j), 0);
                env.rows.push_back(RowLaw::bernoulli(law.rate_dist().quantile(u)));
                break;
            }
            case EnvironmentLaw::Kind::ExponentialRate: {
                const double u = uf.at(static_cast<std::int64_t>(j), 0);
                env.rows.push_back(RowLaw::exponential(law.rate_dist().quantile(u)));
                break;
            }
        }
    }
    return env;
}

std::optional<BernoulliRateView> as_bernoulli_rate(const EnvironmentLaw& law) {
    switch (law.kind()) {
        case EnvironmentLaw::Kind::BernoulliRate:
            return BernoulliRateView{law.rate_dist(), law.rate_dist().hi()};
        case EnvironmentLaw::Kind::PointMass: {
            if (law.row().kind() != RowLaw::Kind::Bernoulli) return {};
            const double p = law.row().bernoulli_p();
            return BernoulliRateView{RateDist::atoms({p}, {1.0}), p};
        }
        case EnvironmentLaw::Kind::FiniteMixture: {
            std::vector<double> ps, ws;
            for (std::size_t i = 0; i < law.mixture_rows().size(); ++i) {
                if (law.mixture_rows()[i].kind() != RowLaw::Kind::Bernoulli)
                    return {};
                ps.push_back(law.mixture_rows()[i].bernoulli_p());
                ws.push_back(law.mixture_weights()[i]);
            }
            RateDist d = RateDist::atoms(std::move(ps), std::move(ws));
            const double b = d.hi();
            return BernoulliRateView{std::move(d), b};
        }
        default:
            return {};
    }
}

std::optional<ExponentialRateView> as_exponential_rate(const EnvironmentLaw& law) {
    switch (law.kind()) {
        case EnvironmentLaw::Kind::ExponentialRate:
            return ExponentialRateView{law.rate_dist(), law.rate_dist().lo(),
                                       law.tail()};
        case EnvironmentLaw::Kind::PointMass: {
            if (law.row().kind() != RowLaw::Kind::Exponential) return {};
            const double xi = law.row().exponential_rate();
            return ExponentialRateView{RateDist::atoms({xi}, {1.0}), xi,
                                       TailSpec{-1.0, 1.0}};
        }
        case EnvironmentLaw::Kind::FiniteMixture: {
            std::vector<double> xis, ws;
            for (std::size_t i = 0; i < law.mixture_rows().size(); ++i) {
                if (law.mixture_rows()[i].kind() != RowLaw::Kind::Exponential)
                    return {};
                xis.push_back(law.mixture_rows()[i].exponential_rate());
                ws.push_back(law.mixture_weights()[i]);
            }
            RateDist d = RateDist::atoms(std::move(xis), std::move(ws));
            const double c = d.lo();
            double kappa = 0.0;
            for (std::size_t i = 0; i < d.atom_points().size(); ++i)
                if (d.atom_points()[i] == c) kappa += d.atom_weights()[i];
            return ExponentialRateView{std::move(d), c, TailSpec{-1.0, kappa}};
        }
        default:
            return {};
    }
}

}  // namespace lpp
