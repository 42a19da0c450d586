#include "lpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lpp/quadrature.hpp"

namespace lpp {

namespace {

std::atomic<int> g_max_threads{0};

int effective_threads() {
    const int req = g_max_threads.load();
    if (req > 0) return req;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class F>
void parallel_replicas(int replicas, F&& body) {
#ifdef _OPENMP
    const int nt = std::min(effective_threads(), std::max(1, replicas));
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
    for (int r = 0; r < replicas; ++r) body(r);
}

std::pair<double, double> mean_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

RowLaw draw_row(const EnvironmentLaw& law, double v) {
    switch (law.kind()) {
        case EnvironmentLaw::Kind::PointMass:
            return law.row();
        case EnvironmentLaw::Kind::FiniteMixture: {
            const auto& ws = law.mixture_weights();
            double c = 0.0;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                c += ws[i];
                if (v <= c) return law.mixture_rows()[i];
            }
            return law.mixture_rows().back();
        }
        case EnvironmentLaw::Kind::BernoulliRate:
            return RowLaw::bernoulli(law.rate_dist().quantile(v));
        case EnvironmentLaw::Kind::ExponentialRate:
            return RowLaw::exponential(law.rate_dist().quantile(v));
    }
    throw std::logic_error("draw_row: bad law kind");
}

}  // namespace

int max_worker_threads() { return effective_threads(); }
void set_max_worker_threads(int threads) { g_max_threads.store(threads); }

McEstimate mc_scaled_estimate(const EnvironmentLaw& law, Geometry geometry,
                              Convention convention, double x, double y,
                              std::int64_t n, int replicas, std::uint64_t seed) {
    if (replicas < 1) throw std::invalid_argument("mc: need replicas >= 1");
    const double t0 = now_seconds();
    const auto rows =
        static_cast<std::size_t>(std::floor(y * static_cast<double>(n))) + 1;
    McEstimate out;
    out.replica_values.assign(static_cast<std::size_t>(replicas), 0.0);
    parallel_replicas(replicas, [&](int r) {
        const auto rr = static_cast<std::uint64_t>(r);
        Environment env = realize(law, rows, seed, env_stream(rr));
        WeightField field(std::move(env), UniformField(seed, weight_stream(rr)));
        out.replica_values[static_cast<std::size_t>(r)] =
            scaled_estimate(field, geometry, x, y, n, convention);
    });
    auto [mean, se] = mean_se(out.replica_values);
    out.estimate = mean;
    out.se = se;
    out.wall_seconds = now_seconds() - t0;
    return out;
}

McEstimate mc_scaled_estimate_serial(const EnvironmentLaw& law, Geometry geometry,
                                     Convention convention, double x, double y,
                                     std::int64_t n, int replicas,
                                     std::uint64_t seed) {
    if (replicas < 1) throw std::invalid_argument("mc: need replicas >= 1");
    const double t0 = now_seconds();
    const auto rows =
        static_cast<std::size_t>(std::floor(y * static_cast<double>(n))) + 1;
    McEstimate out;
    out.replica_values.assign(static_cast<std::size_t>(replicas), 0.0);
    for (int r = 0; r < replicas; ++r) {
        const auto rr = static_cast<std::uint64_t>(r);
        Environment env = realize(law, rows, seed, env_stream(rr));
        WeightField field(std::move(env), UniformField(seed, weight_stream(rr)));
        out.replica_values[static_cast<std::size_t>(r)] =
            scaled_estimate(field, geometry, x, y, n, convention);
    }
    auto [mean, se] = mean_se(out.replica_values);
    out.estimate = mean;
    out.se = se;
    out.wall_seconds = now_seconds() - t0;
    return out;
}

std::optional<ShapeResult> theory_value(const EnvironmentLaw& law,
                                        Geometry geometry, double x, double y) {
    try {
        switch (geometry) {
            case Geometry::StrictX:
                if (as_bernoulli_rate(law)) return psi_strict_x(law, x, y);
                return {};
            case Geometry::StrictY:
                if (as_bernoulli_rate(law)) return psi_strict_y(law, x, y);
                return {};
            case Geometry::WeakWeak:
                if (as_exponential_rate(law)) return exp_psi(law, x, y);
                return {};
            default:
                return {};
        }
    } catch (const std::exception&) {
        return {};
    }
}

std::vector<SweepRow> boundary_sweep(const EnvironmentLaw& law, Geometry geometry,
                                     Convention convention, AlphaAxis axis,
                                     const std::vector<double>& alphas,
                                     std::int64_t n, int replicas,
                                     std::uint64_t seed) {
    std::vector<SweepRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        if (!(alpha > 0.0)) throw std::invalid_argument("boundary_sweep: alpha > 0");
        const double x = axis == AlphaAxis::XisAlpha ? alpha : 1.0;
        const double y = axis == AlphaAxis::XisAlpha ? 1.0 : alpha;
        SweepRow row;
        row.alpha = alpha;
        row.mc = mc_scaled_estimate(law, geometry, convention, x, y, n, replicas, seed);
        row.theory = theory_value(law, geometry, x, y);
        if (geometry == Geometry::WeakWeak) {
            try {
                if (axis == AlphaAxis::XisAlpha) {
                    row.asymptotic = asymptotic_alpha1(moments(law), alpha).value;
                } else if (as_exponential_rate(law)) {
                    row.asymptotic = asymptotic_1alpha(law, alpha).value;
                    const auto ub = upper_bounds_1alpha(moments(law), alpha);
                    row.upper_bound = ub.general;
                }
            } catch (const std::exception&) {
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------

InterchangeReport interchange_test(const std::vector<double>& rates_a,
                                   const std::vector<double>& rates_b,
                                   std::int64_t grid_cols, std::int64_t grid_rows,
                                   std::size_t samples, std::uint64_t seed) {
    if (rates_a.size() != rates_b.size() ||
        rates_a.size() != static_cast<std::size_t>(grid_rows))
        throw std::invalid_argument("interchange_test: need one rate per row");
    std::vector<double> sa = rates_a, sb = rates_b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb)
        throw std::invalid_argument("interchange_test: orderings must be permutations");

    auto make_env = [&](const std::vector<double>& rates) {
        Environment env;
        env.seed = seed;
        for (double r : rates) env.rows.push_back(RowLaw::exponential(r));
        return std::make_shared<const Environment>(std::move(env));
    };
    const auto env_a = make_env(rates_a);
    const auto env_b = make_env(rates_b);

    std::vector<double> ta(samples), tb(samples);
    parallel_replicas(static_cast<int>(samples), [&](int s) {
        const UniformField u(seed, static_cast<std::uint64_t>(s));
        const WeightField fa(env_a, u), fb(env_b, u);
        ta[static_cast<std::size_t>(s)] =
            last_passage(fa, Geometry::WeakWeak, grid_cols - 1, grid_rows - 1,
                         Convention::IncludeEndpoint)
                .value;
        tb[static_cast<std::size_t>(s)] =
            last_passage(fb, Geometry::WeakWeak, grid_cols - 1, grid_rows - 1,
                         Convention::IncludeEndpoint)
                .value;
    });

    InterchangeReport rep;
    rep.samples = samples;
    auto [ma, sea] = mean_se(ta);
    auto [mb, seb] = mean_se(tb);
    rep.mean_a = ma;
    rep.mean_b = mb;
    rep.se_a = sea;
    rep.se_b = seb;
    rep.mean_gap = std::fabs(ma - mb);
    rep.mean_gap_limit = 3.0 * std::sqrt(sea * sea + seb * seb);
    rep.means_ok = rep.mean_gap <= rep.mean_gap_limit;

    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    double ks = 0.0;
    std::size_t ia = 0, ib = 0;
    const double inv = 1.0 / static_cast<double>(samples);
    while (ia < samples && ib < samples) {
        const double d1 = ta[ia], d2 = tb[ib];
        if (d1 <= d2) ++ia;
        if (d2 <= d1) ++ib;
        ks = std::max(ks, std::fabs(static_cast<double>(ia) -
                                    static_cast<double>(ib)) *
                              inv);
    }
    rep.ks_distance = ks;
    rep.ks_limit = 1.63 / std::sqrt(static_cast<double>(samples));
    rep.ks_ok = ks < rep.ks_limit;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

// E over the environment law of |F_0(x) - G_0(x)| and its esssup; rows of
// the two laws are coupled through a shared uniform, matching how the
// experiment realizes them.
struct CdfGapStats {
    double mean;
    double sup;
};

CdfGapStats cdf_gap(const EnvironmentLaw& f, const EnvironmentLaw& g, double x) {
    if (f.kind() == EnvironmentLaw::Kind::PointMass &&
        g.kind() == EnvironmentLaw::Kind::PointMass) {
        const double d = std::fabs(f.row().cdf(x) - g.row().cdf(x));
        return {d, d};
    }
    // midpoint grid over the shared environment uniform
    constexpr int kGrid = 512;
    double mean = 0.0, sup = 0.0;
    for (int k = 0; k < kGrid; ++k) {
        const double v = (static_cast<double>(k) + 0.5) / kGrid;
        const double d = std::fabs(draw_row(f, v).cdf(x) - draw_row(g, v).cdf(x));
        mean += d;
        sup = std::max(sup, d);
    }
    return {mean / kGrid, sup};
}

}  // namespace

namespace {

// sup over the environment of max(1-F(x), 1-G(x)); drives the tail cutoff
double survival_sup(const EnvironmentLaw& f, const EnvironmentLaw& g, double x) {
    if (f.kind() == EnvironmentLaw::Kind::PointMass &&
        g.kind() == EnvironmentLaw::Kind::PointMass)
        return std::max(1.0 - f.row().cdf(x), 1.0 - g.row().cdf(x));
    constexpr int kGrid = 64;
    double sup = 0.0;
    for (int k = 0; k < kGrid; ++k) {
        const double v = (static_cast<double>(k) + 0.5) / kGrid;
        sup = std::max(sup, 1.0 - draw_row(f, v).cdf(x));
        sup = std::max(sup, 1.0 - draw_row(g, v).cdf(x));
    }
    return sup;
}

}  // namespace

double coupling_bound(const EnvironmentLaw& law_f, const EnvironmentLaw& law_g,
                      double alpha) {
    // integration range: common support, extended until both tails are dead
    double lo = 0.0, hi = 1.0;
    {
        const RowLaw f0 = draw_row(law_f, 0.5), g0 = draw_row(law_g, 0.5);
        lo = std::min(f0.support_lo(), g0.support_lo());
        hi = std::max(lo + 1.0, 1.0);
    }
    for (int k = 0; k < 300; ++k) {
        if (survival_sup(law_f, law_g, hi) < 1e-16) break;
        hi = lo + 2.0 * (hi - lo);
    }
    // integrate over unit-width segments so narrow cdf differences (atoms,
    // truncation windows) cannot slip between quadrature nodes
    auto segmented = [&](auto&& f) {
        const auto segments =
            std::max<std::int64_t>(32, static_cast<std::int64_t>(hi - lo));
        double total = 0.0;
        for (std::int64_t s = 0; s < segments; ++s) {
            const double a = lo + (hi - lo) * static_cast<double>(s) / segments;
            const double b = lo + (hi - lo) * static_cast<double>(s + 1) / segments;
            const auto q = integrate(f, a, b, 1e-10, 1e-9, 20000);
            if (!q.converged)
                throw std::runtime_error("coupling_bound: integral did not converge");
            total += q.value;
        }
        return total;
    };
    const double i_sqrt = segmented(
        [&](double x) { return std::sqrt(cdf_gap(law_f, law_g, x).mean); });
    const double i_sup =
        segmented([&](double x) { return cdf_gap(law_f, law_g, x).sup; });
    return 8.0 * std::sqrt(alpha) * i_sqrt + alpha * i_sup;
}

CouplingGapReport coupling_gap_test(const EnvironmentLaw& law_f,
                                    const EnvironmentLaw& law_g, double alpha,
                                    std::int64_t n, int replicas,
                                    std::uint64_t seed) {
    if (replicas < 2) throw std::invalid_argument("coupling_gap_test: replicas >= 2");
    const auto rows = static_cast<std::size_t>(n) + 1;
    std::vector<double> vf(static_cast<std::size_t>(replicas));
    std::vector<double> vg(static_cast<std::size_t>(replicas));
    parallel_replicas(replicas, [&](int r) {
        const auto rr = static_cast<std::uint64_t>(r);
        auto ef = std::make_shared<const Environment>(
            realize(law_f, rows, seed, env_stream(rr)));
        auto eg = std::make_shared<const Environment>(
            realize(law_g, rows, seed, env_stream(rr)));
        auto [ff, fg] = coupled_pair(ef, eg, UniformField(seed, weight_stream(rr)));
        vf[static_cast<std::size_t>(r)] =
            scaled_estimate(ff, Geometry::WeakWeak, alpha, 1.0, n,
                            Convention::ExcludeEndpoint);
        vg[static_cast<std::size_t>(r)] =
            scaled_estimate(fg, Geometry::WeakWeak, alpha, 1.0, n,
                            Convention::ExcludeEndpoint);
    });
    std::vector<double> diff(vf.size());
    for (std::size_t i = 0; i < vf.size(); ++i) diff[i] = vf[i] - vg[i];
    auto [mf, sef] = mean_se(vf);
    auto [mg, seg] = mean_se(vg);
    (void)sef;
    (void)seg;
    auto [md, sed] = mean_se(diff);

    CouplingGapReport rep;
    rep.psi_f = mf;
    rep.psi_g = mg;
    rep.mu_f = moments(law_f).mu.value();
    rep.mu_g = moments(law_g).mu.value();
    rep.gap = std::fabs(md - (rep.mu_f - rep.mu_g));
    rep.gap_se = sed;
    rep.bound = coupling_bound(law_f, law_g, alpha);
    rep.pass = rep.gap <= rep.bound + 3.0 * sed;
    return rep;
}

// ---------------------------------------------------------------------------

CoarsenReport block_coarsen_compare(const EnvironmentLaw& law, std::int64_t r,
                                    double alpha, std::int64_t n, int replicas,
                                    std::uint64_t seed, double weight_bound_m,
                                    double slack) {
    if (r < 1) throw std::invalid_argument("block_coarsen_compare: r >= 1");
    const std::int64_t nc = n / r;  // remainder rows are trimmed
    if (nc < 1) throw std::invalid_argument("block_coarsen_compare: n/r >= 1");
    const auto base_rows = static_cast<std::size_t>(r * (nc + 1));
    std::vector<double> fine(static_cast<std::size_t>(replicas));
    std::vector<double> coarse(static_cast<std::size_t>(replicas));
    parallel_replicas(replicas, [&](int rep) {
        const auto rr = static_cast<std::uint64_t>(rep);
        Environment env = realize(law, base_rows, seed, env_stream(rr));
        WeightField field(std::move(env), UniformField(seed, weight_stream(rr)));
        fine[static_cast<std::size_t>(rep)] =
            scaled_estimate(field, Geometry::WeakWeak, alpha, 1.0, n,
                            Convention::ExcludeEndpoint);
        // coarse lattice: T_r(floor(alpha r nc), nc) / (r nc)
        const CoarseField cf(field, r, BlockOrientation::Rows);
        const auto mc = static_cast<std::int64_t>(
            std::floor(alpha * static_cast<double>(r) * static_cast<double>(nc)));
        std::vector<std::vector<double>> grid(static_cast<std::size_t>(mc) + 1);
        for (std::int64_t i = 0; i <= mc; ++i) {
            auto& col = grid[static_cast<std::size_t>(i)];
            col.resize(static_cast<std::size_t>(nc) + 1);
            for (std::int64_t j = 0; j <= nc; ++j)
                col[static_cast<std::size_t>(j)] = cf(i, j);
        }
        coarse[static_cast<std::size_t>(rep)] =
            grid_last_passage(grid, Geometry::WeakWeak, mc, nc,
                              Convention::ExcludeEndpoint) /
            static_cast<double>(r * nc);
    });
    CoarsenReport out;
    out.fine = mean_se(fine).first;
    out.coarse = mean_se(coarse).first;
    out.discrepancy = std::fabs(out.fine - out.coarse);
    out.bound = weight_bound_m * static_cast<double>(r) * std::sqrt(alpha) *
                (1.0 + slack);
    out.pass = out.discrepancy <= out.bound;
    return out;
}

// ---------------------------------------------------------------------------
// tagged particle

namespace {

struct TaggedInstance {
    std::vector<double> p;                  // p_j for rows 1..t
    std::vector<std::int64_t> z;            // z[m] = z_{-m}(0), m = 0..W
    std::vector<std::vector<std::int32_t>> ones;  // per shifted column
    std::int64_t off = 0;                   // column c -> index c + off
};

TaggedInstance build_tagged_instance(const EnvironmentLaw& law, double u,
                                     std::int64_t t, std::int64_t window,
                                     std::uint64_t seed, std::uint64_t replica) {
    if (!(u >= 1.0)) throw std::invalid_argument("tagged particle: need u >= 1");
    TaggedInstance inst;
    Environment env = realize(law, static_cast<std::size_t>(t) + 1, seed,
                              env_stream(replica));
    inst.p.resize(static_cast<std::size_t>(t) + 1);
    for (std::int64_t j = 0; j <= t; ++j) {
        const RowLaw& row = env.rows[static_cast<std::size_t>(j)];
        if (row.kind() != RowLaw::Kind::Bernoulli)
            throw std::invalid_argument("tagged particle: Bernoulli rows required");
        inst.p[static_cast<std::size_t>(j)] = row.bernoulli_p();
    }
    const auto b = *moments(law).bern_b;
    if (!(u < 1.0 / b) && u != 1.0)
        throw std::invalid_argument("tagged particle: need mean gap u < 1/b");

    // geometric(mean u) gaps on {1,2,...}
    const UniformField gap_u(seed, aux_stream(replica));
    inst.z.resize(static_cast<std::size_t>(window) + 1);
    inst.z[0] = 0;
    const double log_q = u > 1.0 ? std::log1p(-1.0 / u) : 0.0;
    for (std::int64_t m = 1; m <= window; ++m) {
        std::int64_t eta = 1;
        if (u > 1.0) {
            const double v = gap_u.at(m, 0);
            eta = static_cast<std::int64_t>(std::ceil(std::log1p(-v) / log_q));
            eta = std::max<std::int64_t>(eta, 1);
        }
        inst.z[static_cast<std::size_t>(m)] =
            inst.z[static_cast<std::size_t>(m - 1)] - eta;
    }
    inst.off = -inst.z[static_cast<std::size_t>(window)];

    const UniformField wu(seed, weight_stream(replica));
    inst.ones.resize(static_cast<std::size_t>(inst.off) + 1);
    for (std::int64_t cc = 0; cc <= inst.off; ++cc) {
        auto& col = inst.ones[static_cast<std::size_t>(cc)];
        for (std::int32_t j = 1; j <= t; ++j) {
            const double uu = wu.at(cc, j);
            if (uu > 1.0 - inst.p[static_cast<std::size_t>(j)]) col.push_back(j);
        }
    }
    return inst;
}

// windowed infimum defining z_0(t), with a per-source chain DP:
// D[k] = minimal last row of a k-chain; pruned once a source cannot beat
// the current best candidate
std::pair<std::int64_t, std::int64_t> tagged_infimum(const TaggedInstance& inst,
                                                     std::int64_t t,
                                                     std::int64_t window,
                                                     bool prune) {
    const std::int32_t row_inf = static_cast<std::int32_t>(t) + 1;
    std::int64_t best = 0;  // source m = 0 contributes z_0(0) + Gamma(0) = 0
    std::int64_t best_m = 0;
    std::vector<std::int32_t> d;
    for (std::int64_t m = 1; m <= window; ++m) {
        const std::int64_t zm = inst.z[static_cast<std::size_t>(m)];
        if (prune && zm + m >= best) continue;
        d.assign(static_cast<std::size_t>(m) + 1, row_inf);
        d[0] = 1;
        std::int64_t reached = 0;
        const std::int64_t c_end = prune ? best - 1 : 0;
        for (std::int64_t c = zm + 1; c <= c_end; ++c) {
            const auto& col = inst.ones[static_cast<std::size_t>(c + inst.off)];
            if (col.empty()) continue;
            const std::int64_t kmax = std::min(reached, m - 1);
            for (std::int64_t k = kmax; k >= 0; --k) {
                const auto dk = d[static_cast<std::size_t>(k)];
                if (dk > t) continue;
                const auto it = std::lower_bound(col.begin(), col.end(), dk);
                if (it != col.end() && *it < d[static_cast<std::size_t>(k) + 1])
                    d[static_cast<std::size_t>(k) + 1] = *it;
            }
            if (reached < m && d[static_cast<std::size_t>(reached) + 1] <= t)
                ++reached;
            if (reached == m) {
                if (c < best) {
                    best = c;
                    best_m = m;
                }
                break;
            }
        }
    }
    return {best, best_m};
}

}  // namespace

double tagged_particle_position_oracle(const EnvironmentLaw& law, double u,
                                       std::int64_t t, std::int64_t window,
                                       std::uint64_t seed, std::uint64_t replica) {
    const TaggedInstance inst = build_tagged_instance(law, u, t, window, seed, replica);
    return static_cast<double>(tagged_infimum(inst, t, window, false).first);
}

TaggedSpeedReport tagged_particle_speed(const EnvironmentLaw& law, double u,
                                        std::int64_t t, std::int64_t window,
                                        int replicas, std::uint64_t seed) {
    if (t < 1 || window < 1 || replicas < 1)
        throw std::invalid_argument("tagged_particle_speed: bad parameters");
    TaggedSpeedReport rep;
    rep.replica_speeds.assign(static_cast<std::size_t>(replicas), 0.0);
    std::vector<int> truncated(static_cast<std::size_t>(replicas), 0);
    // the infimum counts as truncated when its argmin sits within 5% of the
    // window boundary
    const std::int64_t boundary = window - std::max<std::int64_t>(1, window / 20);
    parallel_replicas(replicas, [&](int r) {
        const TaggedInstance inst = build_tagged_instance(
            law, u, t, window, seed, static_cast<std::uint64_t>(r));
        const auto [z0, best_m] = tagged_infimum(inst, t, window, true);
        rep.replica_speeds[static_cast<std::size_t>(r)] =
            -static_cast<double>(z0) / static_cast<double>(t);
        truncated[static_cast<std::size_t>(r)] = best_m >= boundary ? 1 : 0;
    });
    auto [mean, se] = mean_se(rep.replica_speeds);
    rep.speed = mean;
    rep.se = se;
    rep.theory = expectation(law, Functional::BernSpeed, u).value();
    rep.gap = std::fabs(rep.speed - rep.theory);
    rep.within_3se = rep.gap <= 3.0 * rep.se;
    double active = 0.0;
    for (int f : truncated) active += f;
    rep.truncation_activity = active / static_cast<double>(replicas);
    rep.truncation_ok = rep.truncation_activity < 0.01;
    return rep;
}

}  // namespace lpp
