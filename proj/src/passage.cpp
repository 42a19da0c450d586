#include "lpp/passage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpp/passage_impl.hpp"

namespace lpp {

namespace {

using detail::kNegInf;

void check_target(Geometry g, std::int64_t m, std::int64_t n) {
    if (m < 0 || n < 0) throw std::invalid_argument("last_passage: negative target");
    if (g == Geometry::StrictX && m < 1)
        throw std::invalid_argument("strict-x target needs m >= 1");
    if (g == Geometry::StrictY && n < 1)
        throw std::invalid_argument("strict-y target needs n >= 1");
    if (g == Geometry::StrictStrict && (m < 1 || n < 1))
        throw std::invalid_argument("strict-strict target needs m,n >= 1");
}

template <class A>
double exclusive_value(A&& a, Geometry g, std::int64_t m, std::int64_t n) {
    switch (g) {
        case Geometry::WeakWeak:
            return detail::weak_weak_exclusive(a, m, n);
        case Geometry::StrictX:
            return detail::strict_x_exclusive(a, m, n);
        case Geometry::StrictY:
            return detail::strict_y_exclusive(a, m, n);
        case Geometry::StrictStrict:
            return detail::strict_strict_exclusive(a, m, n);
    }
    throw std::logic_error("exclusive_value: bad geometry");
}

struct FieldAccessor {
    const WeightField* field;
    double operator()(std::int64_t i, std::int64_t j) const {
        return (*field)(i, j);
    }
};

struct GridAccessor {
    const std::vector<std::vector<double>>* grid;
    double operator()(std::int64_t i, std::int64_t j) const {
        return (*grid)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
};

}  // namespace

const char* geometry_name(Geometry g) {
    switch (g) {
        case Geometry::WeakWeak: return "weak_weak";
        case Geometry::StrictX: return "strict_x";
        case Geometry::StrictY: return "strict_y";
        case Geometry::StrictStrict: return "strict_strict";
    }
    return "?";
}

const char* convention_name(Convention c) {
    return c == Convention::IncludeEndpoint ? "include" : "exclude";
}

PassageResult last_passage(const WeightField& field, Geometry geometry,
                           std::int64_t m, std::int64_t n, Convention convention) {
    check_target(geometry, m, n);
    if (static_cast<std::size_t>(n) + 1 > field.rows())
        throw std::out_of_range("last_passage: target outside realized environment");
    const FieldAccessor a{&field};
    double v = exclusive_value(a, geometry, m, n);
    if (convention == Convention::IncludeEndpoint) v += a(m, n);
    return PassageResult{v, {m, n}, geometry, convention, {}};
}

double grid_last_passage(const std::vector<std::vector<double>>& grid,
                         Geometry geometry, std::int64_t m, std::int64_t n,
                         Convention convention) {
    check_target(geometry, m, n);
    const GridAccessor a{&grid};
    double v = exclusive_value(a, geometry, m, n);
    if (convention == Convention::IncludeEndpoint) v += a(m, n);
    return v;
}

double last_passage_between(const WeightField& field, LatticePoint from,
                            LatticePoint to, Convention convention) {
    if (to.first < from.first || to.second < from.second)
        throw std::invalid_argument("last_passage_between: unordered endpoints");
    if (static_cast<std::size_t>(to.second) + 1 > field.rows())
        throw std::out_of_range("last_passage_between: target outside environment");
    auto a = [&](std::int64_t p, std::int64_t q) {
        return field(from.first + p, from.second + q);
    };
    double v = detail::weak_weak_exclusive(a, to.first - from.first,
                                           to.second - from.second);
    if (convention == Convention::IncludeEndpoint)
        v += field(to.first, to.second);
    return v;
}

double scaled_estimate(const WeightField& field, Geometry geometry, double x,
                       double y, std::int64_t n, Convention convention) {
    if (n < 1) throw std::invalid_argument("scaled_estimate: n >= 1 required");
    const auto m1 = static_cast<std::int64_t>(std::floor(x * static_cast<double>(n)));
    const auto m2 = static_cast<std::int64_t>(std::floor(y * static_cast<double>(n)));
    return last_passage(field, geometry, m1, m2, convention).value /
           static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// exhaustive oracle

namespace {

struct BruteState {
    const std::vector<std::vector<double>>* grid;
    std::int64_t m, n;
    bool include;
    std::size_t count = 0;
    std::size_t max_paths;
    double best = kNegInf;

    double w(std::int64_t i, std::int64_t j) const {
        return (*grid)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    void finish(double acc) {
        if (++count > max_paths)
            throw std::length_error("brute_force_last_passage: path count overflow");
        best = std::max(best, acc + (include ? w(m, n) : 0.0));
    }
};

void brute_weak(BruteState& st, std::int64_t i, std::int64_t j, double acc) {
    if (i == st.m && j == st.n) {
        st.finish(acc);
        return;
    }
    acc += st.w(i, j);
    if (i < st.m) brute_weak(st, i + 1, j, acc);
    if (j < st.n) brute_weak(st, i, j + 1, acc);
}

void brute_strict_x(BruteState& st, std::int64_t c, std::int64_t ymin, double acc) {
    if (c == st.m) {
        st.finish(acc);
        return;
    }
    for (std::int64_t y = ymin; y <= st.n; ++y)
        brute_strict_x(st, c + 1, y, acc + st.w(c, y));
}

void brute_strict_y(BruteState& st, std::int64_t r, std::int64_t xmin, double acc) {
    if (r == st.n) {
        st.finish(acc);
        return;
    }
    for (std::int64_t x = xmin; x <= st.m; ++x)
        brute_strict_y(st, r + 1, x, acc + st.w(x, r));
}

void brute_strict_strict(BruteState& st, std::int64_t i, std::int64_t j, double acc) {
    acc += st.w(i, j);
    st.finish(acc);  // the chain may jump to the endpoint from here
    for (std::int64_t i2 = i + 1; i2 < st.m; ++i2)
        for (std::int64_t j2 = j + 1; j2 < st.n; ++j2)
            brute_strict_strict(st, i2, j2, acc);
}

}  // namespace

double brute_force_last_passage(const std::vector<std::vector<double>>& grid,
                                Geometry geometry, std::int64_t m,
                                std::int64_t n, Convention convention,
                                std::size_t max_paths) {
    check_target(geometry, m, n);
    BruteState st{&grid, m, n, convention == Convention::IncludeEndpoint, 0,
                  max_paths, kNegInf};
    switch (geometry) {
        case Geometry::WeakWeak:
            brute_weak(st, 0, 0, 0.0);
            break;
        case Geometry::StrictX:
            brute_strict_x(st, 0, 0, 0.0);
            break;
        case Geometry::StrictY:
            brute_strict_y(st, 0, 0, 0.0);
            break;
        case Geometry::StrictStrict:
            brute_strict_strict(st, 0, 0, 0.0);
            break;
    }
    return st.best;
}

// ---------------------------------------------------------------------------
// full-table variant with path reconstruction (small targets only)

namespace {

void check_table_size(std::int64_t m, std::int64_t n) {
    if ((m + 1) * (n + 1) > 4000000)
        throw std::length_error("last_passage_with_path: target too large for full table");
}

}  // namespace

PassageResult last_passage_with_path(const WeightField& field, Geometry geometry,
                                     std::int64_t m, std::int64_t n,
                                     Convention convention) {
    check_target(geometry, m, n);
    check_table_size(m, n);
    const FieldAccessor w{&field};
    std::vector<LatticePoint> path;
    double excl = 0.0;

    const auto cols = static_cast<std::size_t>(m) + 1;
    const auto rows = static_cast<std::size_t>(n) + 1;
    auto idx = [rows](std::int64_t i, std::int64_t j) {
        return static_cast<std::size_t>(i) * rows + static_cast<std::size_t>(j);
    };

    if (geometry == Geometry::WeakWeak) {
        std::vector<double> I(cols * rows);
        for (std::int64_t i = 0; i <= m; ++i)
            for (std::int64_t j = 0; j <= n; ++j) {
                double prev = 0.0;
                if (i > 0 && j > 0)
                    prev = std::max(I[idx(i - 1, j)], I[idx(i, j - 1)]);
                else if (i > 0)
                    prev = I[idx(i - 1, j)];
                else if (j > 0)
                    prev = I[idx(i, j - 1)];
                I[idx(i, j)] = prev + w(i, j);
            }
        // endpoint handling: the exclusive path ends at the better of the
        // two predecessors of (m,n); horizontal wins ties
        std::int64_t si = m, sj = n;
        if (m == 0 && n == 0) {
            excl = 0.0;
        } else {
            if (m > 0 && (n == 0 || I[idx(m - 1, n)] >= I[idx(m, n - 1)])) {
                si = m - 1;
            } else {
                sj = n - 1;
            }
            excl = I[idx(si, sj)];
        }
        if (!(m == 0 && n == 0) || convention == Convention::IncludeEndpoint) {
            std::int64_t i = si, j = sj;
            if (convention == Convention::IncludeEndpoint) {
                i = m;
                j = n;
            }
            while (true) {
                path.push_back({i, j});
                if (i == 0 && j == 0) break;
                if (i > 0 && (j == 0 || I[idx(i - 1, j)] >= I[idx(i, j - 1)]))
                    --i;
                else
                    --j;
            }
            std::reverse(path.begin(), path.end());
        }
    } else if (geometry == Geometry::StrictX || geometry == Geometry::StrictY) {
        const bool transposed = geometry == Geometry::StrictY;
        const std::int64_t M = transposed ? n : m;  // strictly-advancing axis
        const std::int64_t N = transposed ? m : n;  // weak axis bound
        auto ww = [&](std::int64_t c, std::int64_t j) {
            return transposed ? w(j, c) : w(c, j);
        };
        const auto R = static_cast<std::size_t>(N) + 1;
        std::vector<double> V(static_cast<std::size_t>(M) * R, kNegInf);
        auto vx = [R](std::int64_t c, std::int64_t j) {
            return static_cast<std::size_t>(c) * R + static_cast<std::size_t>(j);
        };
        for (std::int64_t c = 0; c < M; ++c)
            for (std::int64_t j = 0; j <= N; ++j) {
                double take = c == 0 ? ww(0, j) : V[vx(c - 1, j)] + ww(c, j);
                double stay = j == 0 ? kNegInf : V[vx(c, j - 1)];
                V[vx(c, j)] = std::max(take, stay);
            }
        excl = V[vx(M - 1, N)];
        // backtrack: prefer taking the point at the current row
        std::int64_t c = M - 1, j = N;
        std::vector<LatticePoint> rev;
        while (c >= 0) {
            const double take =
                c == 0 ? ww(0, j) : V[vx(c - 1, j)] + ww(c, j);
            if (V[vx(c, j)] == take) {
                rev.push_back(transposed ? LatticePoint{j, c} : LatticePoint{c, j});
                --c;
            } else {
                --j;
            }
        }
        std::reverse(rev.begin(), rev.end());
        path = std::move(rev);
        if (convention == Convention::IncludeEndpoint) path.push_back({m, n});
    } else {  // StrictStrict
        std::vector<double> D(cols * rows, kNegInf);
        std::vector<std::int64_t> parent(cols * rows, -1);
        D[idx(0, 0)] = w(0, 0);
        double best = D[idx(0, 0)];
        std::int64_t bi = 0, bj = 0;
        for (std::int64_t i = 1; i < m; ++i)
            for (std::int64_t j = 1; j < n; ++j) {
                double pred = kNegInf;
                std::int64_t from = -1;
                for (std::int64_t i2 = 0; i2 < i; ++i2)
                    for (std::int64_t j2 = 0; j2 < j; ++j2)
                        if (D[idx(i2, j2)] > pred) {
                            pred = D[idx(i2, j2)];
                            from = static_cast<std::int64_t>(idx(i2, j2));
                        }
                if (from < 0) continue;
                D[idx(i, j)] = pred + w(i, j);
                parent[idx(i, j)] = from;
                if (D[idx(i, j)] > best) {
                    best = D[idx(i, j)];
                    bi = i;
                    bj = j;
                }
            }
        excl = best;
        std::int64_t at = static_cast<std::int64_t>(idx(bi, bj));
        while (at >= 0) {
            const auto i = static_cast<std::int64_t>(at) / static_cast<std::int64_t>(rows);
            const auto j = static_cast<std::int64_t>(at) % static_cast<std::int64_t>(rows);
            path.push_back({i, j});
            at = parent[static_cast<std::size_t>(at)];
        }
        std::reverse(path.begin(), path.end());
        if (convention == Convention::IncludeEndpoint) path.push_back({m, n});
    }

    PassageResult res;
    res.geometry = geometry;
    res.convention = convention;
    res.target = {m, n};
    res.value = convention == Convention::IncludeEndpoint ? excl + w(m, n) : excl;
    res.path = std::move(path);
    return res;
}

}  // namespace lpp
