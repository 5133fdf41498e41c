#pragma once

#include <cmath>

namespace hyperlab {

/// Value and first two derivatives of a scalar function at one point.
struct Jet2 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Canonical C-infinity ramp: 0 for r <= 0, 1 for r >= 1, exp(-1/r)/(exp(-1/r)+exp(-1/(1-r)))
/// in between. Written as a logistic of s = 1/(1-r) - 1/r so that no intermediate overflows.
/// Symmetric: ramp(1-r) = 1 - ramp(r), ramp(1/2) = 1/2.
inline Jet2 smooth_ramp_jet(double r)
{
    if (r <= 0.0)
        return {0.0, 0.0, 0.0};
    if (r >= 1.0)
        return {1.0, 0.0, 0.0};
    const double q = 1.0 - r;
    const double s = 1.0 / q - 1.0 / r;
    const double ds = 1.0 / (q * q) + 1.0 / (r * r);
    const double d2s = 2.0 / (q * q * q) - 2.0 / (r * r * r);
    // sigma(s) and sigma'(s) = sigma(1 - sigma), evaluated on the non-overflowing side.
    double sigma, dsigma;
    if (s >= 0.0) {
        const double e = std::exp(-s);
        sigma = 1.0 / (1.0 + e);
        dsigma = e / ((1.0 + e) * (1.0 + e));
    } else {
        const double e = std::exp(s);
        sigma = e / (1.0 + e);
        dsigma = e / ((1.0 + e) * (1.0 + e));
    }
    const double d2sigma = dsigma * (1.0 - 2.0 * sigma);
    Jet2 out;
    out.value = sigma;
    // Near the edges dsigma underflows to 0 while ds may overflow; the true limits are 0.
    out.d1 = (dsigma == 0.0) ? 0.0 : dsigma * ds;
    out.d2 = (dsigma == 0.0) ? 0.0 : d2sigma * ds * ds + dsigma * d2s;
    return out;
}

inline double smooth_ramp(double r) { return smooth_ramp_jet(r).value; }

/// Cutoff equal to 1 on (-inf, 1], 0 on [2, inf), strictly decreasing in between.
inline Jet2 smooth_step_jet(double r)
{
    const Jet2 g = smooth_ramp_jet(2.0 - r);
    return {g.value, -g.d1, g.d2};
}

inline double smooth_step(double r) { return smooth_ramp(2.0 - r); }

} // namespace hyperlab
