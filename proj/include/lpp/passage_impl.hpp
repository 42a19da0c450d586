#pragma once

// Templated rolling-frontier DP cores shared by the field-backed and
// explicit-grid entry points.  A single call is sequential (the frontier
// carries a dependency); concurrency lives one level up, across replicas.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lpp::detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Inclusive corner-growth value I(P,Q) with captures of I(P-1,Q) and
// I(P,Q-1); accessor A(p,q), frontier over p.
template <class A>
struct WeakWeakCaptures {
    double incl_pm1_q = kNegInf;  // I(P-1, Q)
    double incl_p_qm1 = kNegInf;  // I(P, Q-1)
    double incl = 0.0;            // I(P, Q)
};

template <class A>
WeakWeakCaptures<A> weak_weak_inclusive(A&& a, std::int64_t P, std::int64_t Q) {
    WeakWeakCaptures<A> cap;
    std::vector<double> f(static_cast<std::size_t>(P) + 1);
    f[0] = a(0, 0);
    for (std::int64_t p = 1; p <= P; ++p) f[p] = f[p - 1] + a(p, 0);
    if (Q == 0) {
        if (P >= 1) cap.incl_pm1_q = f[P - 1];
        cap.incl = f[P];
        return cap;
    }
    for (std::int64_t q = 1; q <= Q; ++q) {
        if (q == Q) cap.incl_p_qm1 = f[P];
        f[0] += a(0, q);
        for (std::int64_t p = 1; p <= P; ++p)
            f[p] = std::max(f[p - 1], f[p]) + a(p, q);
        if (q == Q && P >= 1) cap.incl_pm1_q = f[P - 1];
    }
    cap.incl = f[P];
    return cap;
}

template <class A>
double weak_weak_exclusive(A&& a, std::int64_t P, std::int64_t Q) {
    if (P == 0 && Q == 0) return 0.0;
    // orient the frontier along the shorter axis
    if (P <= Q) {
        auto cap = weak_weak_inclusive(a, P, Q);
        return std::max(cap.incl_pm1_q, cap.incl_p_qm1);
    }
    auto swapped = [&a](std::int64_t p, std::int64_t q) { return a(q, p); };
    auto cap = weak_weak_inclusive(swapped, Q, P);
    return std::max(cap.incl_pm1_q, cap.incl_p_qm1);
}

// Strict-x: one point per column 0..m-1, rows nondecreasing in [0, n].
template <class A>
double strict_x_exclusive(A&& a, std::int64_t m, std::int64_t n) {
    if (m < 1) throw std::invalid_argument("strict_x: need m >= 1");
    std::vector<double> f(static_cast<std::size_t>(n) + 1);
    f[0] = a(0, 0);
    for (std::int64_t j = 1; j <= n; ++j) f[j] = std::max(f[j - 1], a(0, j));
    for (std::int64_t c = 1; c < m; ++c) {
        f[0] += a(c, 0);
        for (std::int64_t j = 1; j <= n; ++j) {
            const double take = f[j] + a(c, j);
            f[j] = std::max(f[j - 1], take);
        }
    }
    return f[n];
}

// Strict-y is the transpose: one point per row 0..n-1, columns in [0, m].
template <class A>
double strict_y_exclusive(A&& a, std::int64_t m, std::int64_t n) {
    auto swapped = [&a](std::int64_t p, std::int64_t q) { return a(q, p); };
    return strict_x_exclusive(swapped, n, m);
}

// Strict-strict: best chain from (0,0) with strictly increasing coordinates
// inside the box [0,m-1] x [0,n-1].
template <class A>
double strict_strict_exclusive(A&& a, std::int64_t m, std::int64_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("strict_strict: need m,n >= 1");
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<double> pb(nn, kNegInf);  // prefix-max of reachable D, cols < i
    std::vector<double> col(nn, kNegInf);
    const double d00 = a(0, 0);
    double best = d00;
    for (std::size_t j = 0; j < nn; ++j) pb[j] = d00;
    for (std::int64_t i = 1; i < m; ++i) {
        for (std::size_t j = 1; j < nn; ++j) {
            col[j] = pb[j - 1] > kNegInf
                         ? pb[j - 1] + a(i, static_cast<std::int64_t>(j))
                         : kNegInf;
            if (col[j] > best) best = col[j];
        }
        double run = kNegInf;
        for (std::size_t j = 1; j < nn; ++j) {
            run = std::max(run, col[j]);
            pb[j] = std::max(pb[j], run);
        }
    }
    return best;
}

}  // namespace lpp::detail
