#pragma once

#include <cmath>
#include <string_view>

#include "errors.hpp"
#include "weights.hpp"

namespace hyperlab {

/// <xi>_k = (k^2 + xi^2)^{1/2}, k >= 1.
inline double xi_bracket(double xi, double k)
{
    require(k >= 1.0, "xi_bracket: spectral parameter k must be >= 1");
    return std::hypot(k, xi);
}

struct PhaseParams {
    double k = 1.0; ///< spectral parameter, >= 1
    double N = 1.0; ///< zone constant, > 0
    WeightPair pair;

    void validate() const
    {
        require(k >= 1.0, "PhaseParams: k must be >= 1");
        require(N > 0.0, "PhaseParams: N must be positive");
    }
};

/// Phi(x) <xi>_k: the inverse Planck function.
inline double phase_scale(double x, double xi, const PhaseParams& p)
{
    return p.pair.phi(x) * xi_bracket(xi, p.k);
}

/// Planck function h(x, xi) = 1 / (Phi(x) <xi>_k).
inline double planck_h(double x, double xi, const PhaseParams& p)
{
    p.validate();
    return 1.0 / phase_scale(x, xi, p);
}

/// Time at which (x, xi) crosses from the interior to the exterior zone: N / (Phi(x) <xi>_k).
inline double separatrix_time(double x, double xi, const PhaseParams& p)
{
    p.validate();
    return p.N / phase_scale(x, xi, p);
}

enum class ZoneLabel { Interior, Exterior };

inline std::string_view to_string(ZoneLabel z) { return z == ZoneLabel::Interior ? "interior" : "exterior"; }

/// Interior for 0 <= t <= t_{x,xi} (boundary included), exterior for t > t_{x,xi}.
inline ZoneLabel classify_zone(double t, double x, double xi, const PhaseParams& p)
{
    require(t >= 0.0, "classify_zone: time must be nonnegative");
    return t <= separatrix_time(x, xi, p) ? ZoneLabel::Interior : ZoneLabel::Exterior;
}

} // namespace hyperlab
