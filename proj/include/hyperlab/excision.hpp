#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "coefficients.hpp"
#include "errors.hpp"
#include "grids.hpp"
#include "parallel.hpp"
#include "phasespace.hpp"
#include "quadrature.hpp"
#include "smooth_step.hpp"

namespace hyperlab {

/// The excised principal symbol
///   a~(t,x,xi) = phi(s) omega^2 <xi>_k^2 + (1 - phi(s)) a(t,x) <xi>_k^2,  s = t Phi(x) <xi>_k,
/// which equals omega^2 <xi>_k^2 for s <= 1 and the original symbol for s >= 2.
class ExcisedSymbol {
public:
    ExcisedSymbol(CoefficientField field, PhaseParams params) : field_(std::move(field)), p_(std::move(params))
    {
        p_.validate();
        p_.pair = field_.weights;
    }

    const CoefficientField& field() const { return field_; }
    const PhaseParams& params() const { return p_; }

    double cutoff_argument(double t, double x, double xi) const { return t * phase_scale(x, xi, p_); }

    /// Original symbol a(t,x) <xi>_k^2.
    double original(double t, double x, double xi) const
    {
        const double b = xi_bracket(xi, p_.k);
        return field_.a(t, x) * b * b;
    }

    /// Replacement used near t = 0: omega(x)^2 <xi>_k^2.
    double replacement(double x, double xi) const
    {
        const double w = field_.weights.omega(x);
        const double b = xi_bracket(xi, p_.k);
        return w * w * b * b;
    }

    double operator()(double t, double x, double xi) const
    {
        const double phi = smooth_step(cutoff_argument(t, x, xi));
        if (phi == 1.0)
            return replacement(x, xi);
        if (phi == 0.0)
            return original(t, x, xi);
        return phi * replacement(x, xi) + (1.0 - phi) * original(t, x, xi);
    }

    /// a - a~ = phi(s) (a - omega^2) <xi>_k^2, evaluated without cancellation.
    double difference(double t, double x, double xi) const
    {
        const double phi = smooth_step(cutoff_argument(t, x, xi));
        if (phi == 0.0)
            return 0.0;
        const double w = field_.weights.omega(x);
        const double b = xi_bracket(xi, p_.k);
        return phi * (field_.a(t, x) - w * w) * b * b;
    }

    /// d/dt a~.
    double dt(double t, double x, double xi) const
    {
        const double scale = phase_scale(x, xi, p_);
        const Jet2 phi = smooth_step_jet(t * scale);
        const double b = xi_bracket(xi, p_.k);
        const double w = field_.weights.omega(x);
        double out = 0.0;
        if (phi.d1 != 0.0)
            out += phi.d1 * scale * (w * w - field_.a(t, x)) * b * b;
        if (phi.value != 1.0)
            out += (1.0 - phi.value) * field_.a_t(t, x) * b * b;
        return out;
    }

private:
    CoefficientField field_;
    PhaseParams p_;
};

inline ExcisedSymbol excise(const CoefficientField& field, const PhaseParams& p) { return ExcisedSymbol(field, p); }

/// Characteristic root tau = sqrt(a~). A nonpositive a~ means an upstream hypothesis failed.
inline double tau(const ExcisedSymbol& sym, double t, double x, double xi)
{
    const double v = sym(t, x, xi);
    if (!(v > 0.0))
        throw NumericalError("tau: excised symbol is not positive at t=" + std::to_string(t)
                             + " x=" + std::to_string(x) + " xi=" + std::to_string(xi));
    return std::sqrt(v);
}

/// d/dt tau = (d/dt a~) / (2 tau).
inline double tau_dt(const ExcisedSymbol& sym, double t, double x, double xi)
{
    return sym.dt(t, x, xi) / (2.0 * tau(sym, t, x, xi));
}

/// (t, x, xi) sample set for majorant fits: t log-spaced on [t_min, T]; x and xi in
/// {0} plus log-spaced magnitudes up to the given radii (all symbols here are even in x and xi).
struct PhaseGrid {
    double t_min = 1e-8;
    double T = 1.0;
    std::size_t nt = 80;
    double x_radius = 1e3;
    double xi_radius = 1e3;
    std::size_t n = 16; ///< log-spaced points per axis besides 0

    std::vector<double> times() const { return logspace(t_min, T, nt); }
    std::vector<double> xs() const { return nonnegative_log_grid(1e-2, x_radius, n); }
    std::vector<double> xis() const { return nonnegative_log_grid(1e-2, xi_radius, n); }

    PhaseGrid doubled() const
    {
        PhaseGrid g = *this;
        g.nt = 2 * nt;
        g.n = 2 * n;
        return g;
    }
};

inline double ellipticity_ratio_inf(const ExcisedSymbol& sym, const PhaseGrid& grid)
{
    const auto ts = grid.times();
    const auto xs = grid.xs();
    const auto xis = grid.xis();
    const auto rows = parallel_map<double>(ts.size(), [&](std::size_t i) {
        double m = INFINITY;
        for (double x : xs)
            for (double xi : xis)
                m = std::fmin(m, tau(sym, ts[i], x, xi)
                                     / (sym.field().weights.omega(x) * xi_bracket(xi, sym.params().k)));
        return m;
    });
    return *std::min_element(rows.begin(), rows.end());
}

enum class MajorantFamily { psi, psi_tilde };

/// Majorants of the excision error and the first-order remainder:
///   psi0 = C1 phi(s) log(1+1/t) omega <xi>_k
///   psi1 = C2 (phi(s) log(1+1/t) omega <xi>_k + (1 - phi(s)) / t)
/// and the tilde variants, whose first terms use phi(s/3). The second term of psi~1 uses
/// phi(s) unless symmetric_tilde selects phi(s/3) there as well.
struct MajorantSet {
    PhaseParams params;
    double C1 = 0.0;
    double C2 = 0.0;
    double tilde_C0 = 0.0;
    double tilde_C1 = 0.0;
    bool symmetric_tilde = false;
    /// Uniform bounds of int_0^T |d_xi^a D_x^b psi~| dt / (Phi^{-b} <xi>_k^{-a} log(1 + Phi <xi>_k)).
    double kappa00 = 0.0;
    double kappa10 = 0.0;
    double kappa01 = 0.0;
    /// Fitted constants on the grid extended ten-fold in x, xi and to t_min^2.
    double C1_refined = 0.0;
    double C2_refined = 0.0;
    bool bounded = true;
    PhaseGrid grid;

    double scale(double x, double xi) const { return phase_scale(x, xi, params); }

    double psi0(double t, double x, double xi) const
    {
        if (C1 == 0.0)
            return 0.0;
        const double s = t * scale(x, xi);
        return C1 * smooth_step(s) * log1p_inv(t) * params.pair.omega(x) * xi_bracket(xi, params.k);
    }

    double psi1(double t, double x, double xi) const
    {
        if (C2 == 0.0)
            return 0.0;
        const double phi = smooth_step(t * scale(x, xi));
        return C2 * (phi * log1p_inv(t) * params.pair.omega(x) * xi_bracket(xi, params.k) + (1.0 - phi) / t);
    }

    double psi(double t, double x, double xi) const { return psi0(t, x, xi) + psi1(t, x, xi); }

    double psi_tilde0(double t, double x, double xi) const
    {
        if (tilde_C0 == 0.0)
            return 0.0;
        const double s = t * scale(x, xi);
        return tilde_C0 * smooth_step(s / 3.0) * log1p_inv(t) * params.pair.omega(x) * xi_bracket(xi, params.k);
    }

    double psi_tilde1(double t, double x, double xi) const
    {
        if (tilde_C1 == 0.0)
            return 0.0;
        const double s = t * scale(x, xi);
        const double inner = smooth_step(s / 3.0);
        const double outer = symmetric_tilde ? inner : smooth_step(s);
        return tilde_C1
               * (inner * log1p_inv(t) * params.pair.omega(x) * xi_bracket(xi, params.k) + (1.0 - outer) / t);
    }

    double psi_tilde(double t, double x, double xi) const { return psi_tilde0(t, x, xi) + psi_tilde1(t, x, xi); }

    /// (d/dxi, d/dx) of psi~ = psi~0 + psi~1.
    std::array<double, 2> psi_tilde_gradient(double t, double x, double xi) const
    {
        const auto& w = params.pair.omega;
        const auto& ph = params.pair.phi;
        const double b = xi_bracket(xi, params.k);
        const double db[2] = {xi / b, 0.0};
        const double wv = w(x);
        const double dw[2] = {0.0, w.derivative(x)};
        const double s = t * ph(x) * b;
        const double ds[2] = {t * ph(x) * db[0], t * ph.derivative(x) * b};
        const Jet2 inner = smooth_step_jet(s / 3.0);
        const Jet2 outer = symmetric_tilde ? inner : smooth_step_jet(s);
        const double outer_scale = symmetric_tilde ? 1.0 / 3.0 : 1.0;
        const double lg = log1p_inv(t);
        std::array<double, 2> g{};
        for (int i = 0; i < 2; ++i) {
            const double d_wb = dw[i] * b + wv * db[i];
            const double first = lg * (inner.d1 * ds[i] / 3.0 * wv * b + inner.value * d_wb);
            g[i] = tilde_C0 * first + tilde_C1 * (first - outer.d1 * outer_scale * ds[i] / t);
        }
        return g;
    }

    double eval(MajorantFamily fam, double t, double x, double xi) const
    {
        return fam == MajorantFamily::psi ? psi(t, x, xi) : psi_tilde(t, x, xi);
    }
};

struct IntegralBound {
    double integral = 0.0;
    double ratio = 0.0; ///< integral / log(1 + Phi <xi>_k)
    double error = 0.0;
    bool converged = true;
};

namespace detail {

inline std::vector<double> separatrix_breaks(double scale, double T)
{
    std::vector<double> br{0.0, T};
    for (double n : {1.0, 2.0, 3.0, 6.0})
        if (n / scale < T)
            br.push_back(n / scale);
    std::sort(br.begin(), br.end());
    return br;
}

template <class F>
IntegralBound log_normalised_integral(F&& f, double scale, double T)
{
    const auto br = separatrix_breaks(scale, T);
    const auto q = integrate(f, std::span<const double>(br), 1e-10, 1e-10);
    IntegralBound out;
    out.integral = q.value;
    out.error = q.error;
    out.converged = q.converged;
    out.ratio = q.value / std::log1p(scale);
    return out;
}

} // namespace detail

/// (int_0^T psi dt) / log(1 + Phi(x) <xi>_k), with the quadrature split at the separatrix
/// times 1, 2, 3, 6 over Phi <xi>_k.
inline IntegralBound integral_log_bound(const MajorantSet& m, double x, double xi, double T,
                                       MajorantFamily fam = MajorantFamily::psi)
{
    require(T > 0, "integral_log_bound: T must be positive");
    return detail::log_normalised_integral([&](double t) { return std::fabs(m.eval(fam, t, x, xi)); },
                                           m.scale(x, xi), T);
}

/// Integral bound for a first derivative of psi~: wrt xi (dir = 0, normalised by <xi>_k^{-1})
/// or wrt x (dir = 1, normalised by Phi^{-1}). The derivative is analytic.
inline IntegralBound derivative_integral_log_bound(const MajorantSet& m, double x, double xi, double T, int dir)
{
    require(dir == 0 || dir == 1, "derivative_integral_log_bound: dir must be 0 (xi) or 1 (x)");
    const double norm = dir == 0 ? xi_bracket(xi, m.params.k) : m.params.pair.phi(x);
    auto d = [&](double t) {
        const auto g = m.psi_tilde_gradient(t, x, xi);
        return std::fabs(dir == 0 ? g[0] : g[1]) * norm;
    };
    return detail::log_normalised_integral(d, m.scale(x, xi), T);
}

struct GridSup {
    double value = 0.0;
    double x = 0.0;
    double xi = 0.0;
    bool converged = true;
};

/// Sup over the (x, xi) grid of integral_log_bound.
inline GridSup integral_log_bound_sup(const MajorantSet& m, const std::vector<double>& xs,
                                      const std::vector<double>& xis, double T,
                                      MajorantFamily fam = MajorantFamily::psi)
{
    const auto rows = parallel_map<GridSup>(xs.size(), [&](std::size_t i) {
        GridSup g;
        g.value = -1.0;
        for (double xi : xis) {
            const auto b = integral_log_bound(m, xs[i], xi, T, fam);
            g.converged = g.converged && b.converged;
            if (b.ratio > g.value) {
                g.value = b.ratio;
                g.x = xs[i];
                g.xi = xi;
            }
        }
        return g;
    });
    GridSup best;
    best.value = -1.0;
    for (const auto& r : rows) {
        best.converged = best.converged && r.converged;
        if (r.value > best.value)
            best = GridSup{r.value, r.x, r.xi, best.converged};
    }
    return best;
}

namespace detail {

struct MajorantFit {
    double C1 = 0.0;
    double C2 = 0.0;
};

inline MajorantFit fit_majorant_constants(const ExcisedSymbol& sym, const PhaseGrid& grid)
{
    const auto ts = grid.times();
    const auto xs = grid.xs();
    const auto xis = grid.xis();
    const auto& f = sym.field();
    const double k = sym.params().k;
    const auto rows = parallel_map<MajorantFit>(ts.size(), [&](std::size_t i) {
        MajorantFit m;
        const double t = ts[i];
        const double lg = log1p_inv(t);
        for (double x : xs) {
            const double w = f.weights.omega(x);
            for (double xi : xis) {
                const double b = xi_bracket(xi, k);
                const double phi = smooth_step(sym.cutoff_argument(t, x, xi));
                const double wb = w * b;
                if (phi > 0.0)
                    m.C1 = std::fmax(m.C1, std::fabs(sym.difference(t, x, xi)) / (wb * phi * lg * wb));
                double remainder = std::fabs(tau_dt(sym, t, x, xi));
                if (f.has_lower_order()) {
                    const double b1 = f.b1 ? f.b1(t, x) : 0.0;
                    const double b0 = f.b0 ? f.b0(t, x) : 0.0;
                    remainder += std::hypot(b1 * xi, b0);
                }
                const double shape = phi * lg * wb + (1.0 - phi) / t;
                m.C2 = std::fmax(m.C2, remainder / (wb * shape));
            }
        }
        return m;
    });
    MajorantFit out;
    for (const auto& r : rows) {
        out.C1 = std::fmax(out.C1, r.C1);
        out.C2 = std::fmax(out.C2, r.C2);
    }
    return out;
}

} // namespace detail

struct MajorantOptions {
    bool symmetric_tilde = false;
    bool compute_kappas = true;
    std::size_t kappa_points = 12; ///< per axis, for the kappa sups
};

/// Fits C1 (excision error) and C2 (first-order remainder d_t tau plus the lower-order
/// symbol) as grid sups, checks them on a ten-fold extended grid, and fits the kappa
/// constants of the tilde family. The tilde constants reuse C1 and C2.
inline MajorantSet build_majorants(const CoefficientField& field, const PhaseParams& p, const PhaseGrid& grid,
                                   const MajorantOptions& opt = {})
{
    CoefficientGrid cg;
    cg.t_min = std::fmax(grid.t_min, 1e-12);
    cg.T = std::fmin(grid.T, field.T);
    if (cg.t_min < std::fmin(cg.T, 1.0)) {
        const auto lb = check_log_blowup(field, cg);
        require(lb.pass, "build_majorants: coefficient fails the logarithmic blow-up check");
    }
    const ExcisedSymbol sym(field, p);
    MajorantSet m;
    m.params = sym.params();
    m.grid = grid;
    m.symmetric_tilde = opt.symmetric_tilde;
    const auto fit = detail::fit_majorant_constants(sym, grid);
    m.C1 = fit.C1;
    m.C2 = fit.C2;

    PhaseGrid wide = grid;
    wide.t_min = grid.t_min * grid.t_min;
    wide.x_radius = 10.0 * grid.x_radius;
    wide.xi_radius = 10.0 * grid.xi_radius;
    wide.nt = grid.nt + grid.nt / 2;
    wide.n = grid.n + grid.n / 4;
    const auto fit_wide = detail::fit_majorant_constants(sym, wide);
    m.C1_refined = fit_wide.C1;
    m.C2_refined = fit_wide.C2;
    auto grows = [](double base, double wider) { return !(wider <= 2.0 * base + 1e-12) || !std::isfinite(wider); };
    m.bounded = !grows(m.C1, m.C1_refined) && !grows(m.C2, m.C2_refined);

    m.tilde_C0 = m.C1;
    m.tilde_C1 = m.C2;
    if (opt.compute_kappas) {
        const auto xs = nonnegative_log_grid(1e-2, grid.x_radius, opt.kappa_points);
        const auto xis = nonnegative_log_grid(1e-2, grid.xi_radius, opt.kappa_points);
        m.kappa00 = integral_log_bound_sup(m, xs, xis, grid.T, MajorantFamily::psi_tilde).value;
        for (int dir = 0; dir < 2; ++dir) {
            const auto rows = parallel_map<double>(xs.size(), [&](std::size_t i) {
                double s = 0.0;
                for (double xi : xis)
                    s = std::fmax(s, derivative_integral_log_bound(m, xs[i], xi, grid.T, dir).ratio);
                return s;
            });
            (dir == 0 ? m.kappa10 : m.kappa01) = *std::max_element(rows.begin(), rows.end());
        }
    }
    return m;
}

inline void to_json(nlohmann::json& j, const PhaseGrid& g)
{
    j = {{"t_min", g.t_min}, {"T", g.T}, {"nt", g.nt}, {"x_radius", g.x_radius}, {"xi_radius", g.xi_radius},
         {"n", g.n}};
}

inline void to_json(nlohmann::json& j, const MajorantSet& m)
{
    j = {{"k", m.params.k},
         {"C1", m.C1},
         {"C2", m.C2},
         {"tilde_C0", m.tilde_C0},
         {"tilde_C1", m.tilde_C1},
         {"symmetric_tilde", m.symmetric_tilde},
         {"kappa00", m.kappa00},
         {"kappa10", m.kappa10},
         {"kappa01", m.kappa01},
         {"C1_refined", m.C1_refined},
         {"C2_refined", m.C2_refined},
         {"bounded", m.bounded},
         {"grid", m.grid}};
}

} // namespace hyperlab
