#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace hyperlab {

/// n equispaced points on [lo, hi], endpoints included.
inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    require(n >= 2, "linspace: need at least two points");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

/// n geometrically spaced points on [lo, hi], 0 < lo < hi.
inline std::vector<double> logspace(double lo, double hi, std::size_t n)
{
    require(lo > 0 && hi > lo, "logspace: need 0 < lo < hi");
    require(n >= 2, "logspace: need at least two points");
    std::vector<double> out(n);
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// {0} together with +/- logspace(lo, hi, n): resolves both the origin and large magnitudes.
inline std::vector<double> symmetric_log_grid(double lo, double hi, std::size_t n)
{
    auto pos = logspace(lo, hi, n);
    std::vector<double> out;
    out.reserve(2 * n + 1);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        out.push_back(-*it);
    out.push_back(0.0);
    out.insert(out.end(), pos.begin(), pos.end());
    return out;
}

/// {0} together with logspace(lo, hi, n).
inline std::vector<double> nonnegative_log_grid(double lo, double hi, std::size_t n)
{
    auto pos = logspace(lo, hi, n);
    pos.insert(pos.begin(), 0.0);
    return pos;
}

} // namespace hyperlab
