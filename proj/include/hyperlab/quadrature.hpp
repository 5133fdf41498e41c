#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <span>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"

namespace hyperlab {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;   ///< summed error estimate over all pieces
    bool converged = true;
};

/// log(1 + 1/t) for t > 0, finite down to the smallest subnormal.
inline double log1p_inv(double t) { return std::log1p(t) - std::log(t); }

/// Closed-form primitive of log(1 + 1/t) vanishing at t = 0.
inline double log1p_inv_primitive(double t)
{
    return t == 0.0 ? 0.0 : t * log1p_inv(t) + std::log1p(t);
}

namespace detail {

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_engine()
{
    thread_local boost::math::quadrature::tanh_sinh<double> engine(10);
    return engine;
}

/// Upper bound on pieces per integrate() call.
constexpr std::size_t max_quadrature_pieces = 2000;

struct Piece {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece integrate_piece(const F& f, double a, double b)
{
    Piece p{a, b};
    // tanh-sinh cannot place abscissas inside a few ulps; the midpoint rule is exact enough there.
    if (b - a <= 1e-12 * std::fmax(std::fabs(a), std::fabs(b))) {
        p.value = (b - a) * f(0.5 * (a + b));
        p.l1 = std::fabs(p.value);
        if (!std::isfinite(p.value)) {
            p.value = 0.0;
            p.error = INFINITY;
        }
        return p;
    }
    // Map [-1, 1] -> [a, b] here rather than in Boost: its finite-interval wrapper can round an
    // abscissa onto an endpoint. zc is the signed distance to the nearest endpoint of [-1, 1].
    const double half = 0.5 * (b - a);
    const double lo = std::nextafter(a, b), hi = std::nextafter(b, a);
    auto g = [&](double z, double zc) { return f(std::clamp(z < 0.0 ? a - half * zc : b - half * zc, lo, hi)); };
    try {
        p.value = half * tanh_sinh_engine().integrate(g, 1e-14, &p.error, &p.l1);
        p.error *= half;
        p.l1 *= half;
    } catch (const std::exception&) {
        p.value = 0.0;
        p.error = INFINITY;
    }
    if (!std::isfinite(p.value)) {
        p.value = 0.0;
        p.error = INFINITY;
    }
    return p;
}

} // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], forcing subdivision at every
/// interior break point. Each piece is handled by double-exponential (tanh-sinh)
/// quadrature, which tolerates integrable endpoint singularities such as log t.
/// Globally adaptive: the piece with the largest error estimate is bisected until the
/// summed error is below max(abs_tol, rel_tol * L1) or the piece budget is spent.
template <class F>
QuadratureResult integrate(const F& f, std::span<const double> breaks, double abs_tol = 1e-10, double rel_tol = 0.0)
{
    require(breaks.size() >= 2, "integrate: need at least two break points");
    std::vector<double> pts(breaks.begin(), breaks.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::priority_queue<detail::Piece> open;
    std::vector<detail::Piece> done;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        open.push(detail::integrate_piece(f, pts[i], pts[i + 1]));
    auto totals = [&] {
        double err = 0.0, l1 = 0.0;
        for (const auto& p : done) {
            err += p.error;
            l1 += p.l1;
        }
        auto copy = open;
        for (; !copy.empty(); copy.pop()) {
            err += copy.top().error;
            l1 += copy.top().l1;
        }
        return std::pair{err, l1};
    };
    std::size_t pieces = open.size();
    auto [err, l1] = totals();
    while (!open.empty() && err > std::fmax(abs_tol, rel_tol * l1) && pieces < detail::max_quadrature_pieces) {
        const auto worst = open.top();
        open.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        // Too narrow to split meaningfully in double precision.
        if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a <= 1e-12 * std::fabs(mid)) {
            done.push_back(worst);
            if (open.empty())
                break;
            continue;
        }
        const auto left = detail::integrate_piece(f, worst.a, mid);
        const auto right = detail::integrate_piece(f, mid, worst.b);
        err += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        if (!std::isfinite(err))
            std::tie(err, l1) = totals();
        open.push(left);
        open.push(right);
        ++pieces;
    }
    QuadratureResult acc;
    for (; !open.empty(); open.pop())
        done.push_back(open.top());
    // Sum small pieces first to limit rounding.
    std::sort(done.begin(), done.end(), [](const auto& x, const auto& y) { return std::fabs(x.value) < std::fabs(y.value); });
    for (const auto& p : done) {
        acc.value += p.value;
        acc.error += p.error;
    }
    acc.converged = std::isfinite(acc.error) && acc.error <= std::fmax(abs_tol, rel_tol * l1);
    return acc;
}

template <class F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 0.0)
{
    const double pts[2] = {a, b};
    return integrate(f, std::span<const double>(pts, 2), abs_tol, rel_tol);
}

} // namespace hyperlab
