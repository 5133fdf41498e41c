#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "grids.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "regression.hpp"
#include "weights.hpp"

namespace hyperlab {

using ScalarField = std::function<double(double t, double x)>;

/// A t-dependent factor g(t) with its derivative.
struct TimeProfile {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    static TimeProfile constant(double c)
    {
        return {"constant", [c](double) { return c; }, [](double) { return 0.0; }};
    }
    /// log(1 + 1/t)
    static TimeProfile log_blowup()
    {
        return {"log_blowup", [](double t) { return log1p_inv(t); },
                [](double t) { return -1.0 / (t * (1.0 + t)); }};
    }
    /// (log(1 + 1/t))^2
    static TimeProfile log_squared()
    {
        return {"log_squared",
                [](double t) {
                    const double l = log1p_inv(t);
                    return l * l;
                },
                [](double t) { return -2.0 * log1p_inv(t) / (t * (1.0 + t)); }};
    }
    /// t^p (p < 0 gives a power singularity)
    static TimeProfile power(double p)
    {
        return {"power", [p](double t) { return std::pow(t, p); },
                [p](double t) { return p * std::pow(t, p - 1.0); }};
    }
    /// 2 + sin(log(1/t)): bounded, but with derivative of exact order 1/t.
    static TimeProfile oscillating_log()
    {
        return {"oscillating_log", [](double t) { return 2.0 + std::sin(-std::log(t)); },
                [](double t) { return -std::cos(-std::log(t)) / t; }};
    }
};

/// The coefficient a(t, x) of u_tt - a u_xx (+ b1 u_x + b0 u) = f on (0, T].
/// The principal symbol used by the phase-space machinery is a(t, x) <xi>_k^2.
struct CoefficientField {
    std::string name;
    WeightPair weights;
    double T = 1.0;
    ScalarField a;
    ScalarField a_t;
    ScalarField a_x;
    ScalarField a_xx;
    ScalarField a_tx;
    ScalarField b1; ///< optional first-order coefficient (empty = 0)
    ScalarField b0; ///< optional zeroth-order coefficient (empty = 0)

    double operator()(double t, double x) const { return a(t, x); }
    bool has_lower_order() const { return static_cast<bool>(b1) || static_cast<bool>(b0); }
};

namespace detail {

inline double fd_step(double x) { return 1e-4 * japanese_bracket(x); }

inline ScalarField fd_dx(ScalarField f)
{
    return [f = std::move(f)](double t, double x) {
        const double h = fd_step(x);
        return (f(t, x + h) - f(t, x - h)) / (2.0 * h);
    };
}

inline ScalarField fd_dxx(ScalarField f)
{
    return [f = std::move(f)](double t, double x) {
        const double h = 10.0 * fd_step(x);
        return (f(t, x + h) - 2.0 * f(t, x) + f(t, x - h)) / (h * h);
    };
}

} // namespace detail

/// Fills any missing x-derivative evaluators with central differences.
inline CoefficientField with_fd_derivatives(CoefficientField f)
{
    if (!f.a_x)
        f.a_x = detail::fd_dx(f.a);
    if (!f.a_xx)
        f.a_xx = detail::fd_dxx(f.a);
    if (!f.a_tx)
        f.a_tx = detail::fd_dx(f.a_t);
    return f;
}

/// a(t, x) = scale * omega(x)^2 * g(t), all derivatives closed form.
inline CoefficientField separable_coefficient(const WeightPair& pair, const TimeProfile& g, double scale = 1.0,
                                              double T = 1.0)
{
    require(scale > 0.0, "separable_coefficient: scale must be positive");
    const WeightSpec w = pair.omega;
    CoefficientField f;
    f.name = "separable:" + g.name;
    f.weights = pair;
    f.T = T;
    f.a = [=](double t, double x) { return scale * w(x) * w(x) * g.value(t); };
    f.a_t = [=](double t, double x) { return scale * w(x) * w(x) * g.derivative(t); };
    f.a_x = [=](double t, double x) { return scale * 2.0 * w(x) * w.derivative(x) * g.value(t); };
    f.a_xx = [=](double t, double x) {
        const double d1 = w.derivative(x);
        return scale * 2.0 * (d1 * d1 + w(x) * w.second_derivative(x)) * g.value(t);
    };
    f.a_tx = [=](double t, double x) { return scale * 2.0 * w(x) * w.derivative(x) * g.derivative(t); };
    return f;
}

/// a(t,x) = <x>^{2 k1} (2 + sin(<x>^{1-k2} + cos x log t) + (2 + cos <x>^{1-k2}) log(1 + 1/t))
/// with omega = <x>^{k1}, Phi = <x>^{k2}, T = 1. The t-derivative is closed form;
/// x-derivatives are central differences.
inline CoefficientField example_coefficient(double kappa1, double kappa2)
{
    require(kappa1 >= 0.0 && kappa2 <= 1.0 && kappa2 > 0.0 && kappa1 <= kappa2,
            "example_coefficient: need 0 <= kappa1 <= kappa2 <= 1 and kappa2 > 0");
    CoefficientField f;
    f.name = "example";
    f.weights = {WeightSpec::bracket(kappa1), WeightSpec::bracket(kappa2)};
    f.T = 1.0;
    f.a = [=](double t, double x) {
        const double b = japanese_bracket(x);
        const double inner = std::pow(b, 1.0 - kappa2);
        return std::pow(b, 2.0 * kappa1)
               * (2.0 + std::sin(inner + std::cos(x) * std::log(t)) + (2.0 + std::cos(inner)) * log1p_inv(t));
    };
    f.a_t = [=](double t, double x) {
        const double b = japanese_bracket(x);
        const double inner = std::pow(b, 1.0 - kappa2);
        const double cx = std::cos(x);
        return std::pow(b, 2.0 * kappa1)
               * (std::cos(inner + cx * std::log(t)) * cx / t - (2.0 + std::cos(inner)) / (t * (1.0 + t)));
    };
    return with_fd_derivatives(std::move(f));
}

/// Sampling of (t, x) for the hypothesis fits: t log-spaced on [t_min, T], x uniform on [-R, R].
struct CoefficientGrid {
    double t_min = 1e-6;
    double T = 0.0; ///< 0 means: use the field's T
    std::size_t nt = 60;
    double radius = 50.0;
    std::size_t nx = 201;

    std::vector<double> times(double field_T) const
    {
        const double hi = T > 0 ? T : field_T;
        require(t_min > 0 && t_min < hi, "CoefficientGrid: need 0 < t_min < T");
        return logspace(t_min, hi, nt);
    }
    std::vector<double> points() const { return linspace(-radius, radius, nx); }
};

struct EllipticityEstimate {
    double C0 = 0.0;
    double t = 0.0; ///< location of the infimum
    double x = 0.0;
    bool pass = false; ///< C0 > 0
};

/// Fitted C0 = inf over the grid of a(t,x) / omega(x)^2.
inline EllipticityEstimate estimate_ellipticity(const CoefficientField& field, const CoefficientGrid& grid)
{
    const auto ts = grid.times(field.T);
    const auto xs = grid.points();
    struct RowMin {
        double v = std::numeric_limits<double>::infinity();
        double x = 0.0;
    };
    auto rows = parallel_map<RowMin>(ts.size(), [&](std::size_t i) {
        RowMin m;
        for (double x : xs) {
            const double w = field.weights.omega(x);
            const double v = field.a(ts[i], x) / (w * w);
            if (v < m.v || (v == m.v && std::fabs(x) < std::fabs(m.x))) {
                m.v = v;
                m.x = x;
            }
        }
        return m;
    });
    EllipticityEstimate e;
    e.C0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (rows[i].v < e.C0) {
            e.C0 = rows[i].v;
            e.t = ts[i];
            e.x = rows[i].x;
        }
    e.pass = e.C0 > 0.0 && std::isfinite(e.C0);
    return e;
}

enum class FitStatus { ok, zero, non_monotone, degenerate };

inline std::string to_string(FitStatus s)
{
    switch (s) {
    case FitStatus::ok: return "ok";
    case FitStatus::zero: return "zero";
    case FitStatus::non_monotone: return "non_monotone";
    case FitStatus::degenerate: return "degenerate";
    }
    return "?";
}

/// Power-law fit q(t) ~ C t^{-exponent} of a sampled sup profile.
struct PowerFit {
    double exponent = 0.0;
    double constant = 0.0; ///< sup_t q(t) t^{exponent}
    double r_squared = 1.0;
    double max_residual = 0.0;
    FitStatus status = FitStatus::ok;
};

/// Log-log regression of q against t. Status is zero when q vanishes identically,
/// non_monotone when q is neither nondecreasing nor nonincreasing in t (the fit is
/// still reported), degenerate when fewer than two positive samples exist.
inline PowerFit fit_power_law(std::span<const double> ts, std::span<const double> q)
{
    PowerFit fit;
    std::vector<double> lx, ly;
    bool all_zero = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (q[i] != 0.0)
            all_zero = false;
        if (q[i] > 0.0) {
            lx.push_back(std::log(ts[i]));
            ly.push_back(std::log(q[i]));
        }
    }
    if (all_zero) {
        fit.status = FitStatus::zero;
        return fit;
    }
    if (lx.size() < 2) {
        fit.status = FitStatus::degenerate;
        return fit;
    }
    const auto line = fit_line(lx, ly);
    fit.exponent = -line.slope;
    fit.r_squared = line.r_squared;
    fit.max_residual = line.max_residual;
    for (std::size_t i = 0; i < ts.size(); ++i)
        fit.constant = std::fmax(fit.constant, q[i] * std::pow(ts[i], fit.exponent));
    bool up = true, down = true;
    for (std::size_t i = 1; i < q.size(); ++i) {
        const double tol = 1e-9 * std::fmax(std::fabs(q[i]), std::fabs(q[i - 1]));
        if (q[i] < q[i - 1] - tol)
            up = false;
        if (q[i] > q[i - 1] + tol)
            down = false;
    }
    if (!up && !down)
        fit.status = FitStatus::non_monotone;
    return fit;
}

struct SingularityReport {
    double C0 = 0.0;
    PowerFit a_fit;    ///< sup_x |a| / omega^2
    PowerFit dt_fit;   ///< sup_x |d_t a| / omega^2            (exponent 1 + 0 * delta2)
    PowerFit dx_fit;   ///< sup_x |d_x a| Phi / omega^2        (exponent delta1)
    PowerFit dtx_fit;  ///< sup_x |d_x d_t a| Phi / omega^2    (exponent 1 + delta2)
    double delta1 = 0.0;
    double delta2 = 0.0;
    /// Constants of the logarithmic form |d_x^b d_t a| <= C_b t^{-1} log(1+1/t)^b omega^2 Phi^{-b}, b = 0, 1, 2.
    double log_form_constants[3] = {0.0, 0.0, 0.0};
    double log_blowup_ratio = 0.0;
};

struct LogBlowupReport {
    double sup = 0.0;         ///< sup over t in [t_min, min(T,1)] of a / (omega^2 log(1+1/t))
    double sup_refined = 0.0; ///< same with the t-range extended to t_min^2
    bool diverging = false;
    bool pass = false;
};

namespace detail {

template <class Sample>
std::vector<double> sup_profile(const std::vector<double>& ts, const std::vector<double>& xs, Sample&& sample)
{
    return parallel_map<double>(ts.size(), [&](std::size_t i) {
        double m = 0.0;
        for (double x : xs)
            m = std::fmax(m, std::fabs(sample(ts[i], x)));
        return m;
    });
}

inline double log_blowup_sup(const CoefficientField& f, const std::vector<double>& ts, const std::vector<double>& xs)
{
    const auto prof = sup_profile(ts, xs, [&](double t, double x) {
        const double w = f.weights.omega(x);
        return f.a(t, x) / (w * w * log1p_inv(t));
    });
    return *std::max_element(prof.begin(), prof.end());
}

} // namespace detail

/// Sup of a / (omega^2 log(1 + 1/t)); divergence is flagged when extending the t-range
/// toward 0 (t_min -> t_min^2) raises the sup by more than 10 %.
inline LogBlowupReport check_log_blowup(const CoefficientField& field, const CoefficientGrid& grid)
{
    const double hi = std::fmin(grid.T > 0 ? grid.T : field.T, 1.0);
    require(grid.t_min > 0 && grid.t_min < hi, "check_log_blowup: need 0 < t_min < min(T, 1)");
    const auto xs = grid.points();
    LogBlowupReport r;
    r.sup = detail::log_blowup_sup(field, logspace(grid.t_min, hi, grid.nt), xs);
    r.sup_refined = detail::log_blowup_sup(field, logspace(grid.t_min * grid.t_min, hi, 2 * grid.nt), xs);
    r.diverging = !(r.sup_refined <= 1.1 * r.sup) || !std::isfinite(r.sup_refined);
    r.pass = std::isfinite(r.sup) && !r.diverging;
    return r;
}

/// Log-log fits of the derivative profiles against t; delta1 from the spatial derivative,
/// delta2 from the mixed derivative (exponent 1 + delta2).
inline SingularityReport fit_singularity_orders(const CoefficientField& field_in, const CoefficientGrid& grid)
{
    const CoefficientField field = with_fd_derivatives(field_in);
    const auto ts = grid.times(field.T);
    const auto xs = grid.points();
    const auto& om = field.weights.omega;
    const auto& ph = field.weights.phi;

    auto q_a = detail::sup_profile(ts, xs, [&](double t, double x) { return field.a(t, x) / (om(x) * om(x)); });
    auto q_t = detail::sup_profile(ts, xs, [&](double t, double x) { return field.a_t(t, x) / (om(x) * om(x)); });
    auto q_x = detail::sup_profile(ts, xs,
                                   [&](double t, double x) { return field.a_x(t, x) * ph(x) / (om(x) * om(x)); });
    auto q_tx = detail::sup_profile(
        ts, xs, [&](double t, double x) { return field.a_tx(t, x) * ph(x) / (om(x) * om(x)); });
    const ScalarField a_txx = detail::fd_dxx(field.a_t);
    auto q_txx = detail::sup_profile(
        ts, xs, [&](double t, double x) { return a_txx(t, x) * ph(x) * ph(x) / (om(x) * om(x)); });

    SingularityReport r;
    r.C0 = estimate_ellipticity(field, grid).C0;
    r.a_fit = fit_power_law(ts, q_a);
    r.dt_fit = fit_power_law(ts, q_t);
    r.dx_fit = fit_power_law(ts, q_x);
    r.dtx_fit = fit_power_law(ts, q_tx);
    r.delta1 = r.dx_fit.exponent;
    r.delta2 = r.dtx_fit.status == FitStatus::zero ? 0.0 : r.dtx_fit.exponent - 1.0;
    const std::vector<double>* qs[3] = {&q_t, &q_tx, &q_txx};
    for (int b = 0; b < 3; ++b)
        for (std::size_t i = 0; i < ts.size(); ++i)
            r.log_form_constants[b] = std::fmax(r.log_form_constants[b],
                                                (*qs[b])[i] * ts[i] / std::pow(log1p_inv(ts[i]), b));
    if (std::fmin(grid.T > 0 ? grid.T : field.T, 1.0) > grid.t_min)
        r.log_blowup_ratio = check_log_blowup(field, grid).sup;
    return r;
}

/// Fitted constant of |b1| + |b0| <= C omega (lower-order bound at |xi| = 0 scale); 0 when absent.
inline double check_lower_order(const CoefficientField& field, const CoefficientGrid& grid)
{
    if (!field.has_lower_order())
        return 0.0;
    const auto ts = grid.times(field.T);
    const auto prof = detail::sup_profile(ts, grid.points(), [&](double t, double x) {
        const double b1 = field.b1 ? std::fabs(field.b1(t, x)) : 0.0;
        const double b0 = field.b0 ? std::fabs(field.b0(t, x)) : 0.0;
        return (b1 + b0) / field.weights.omega(x);
    });
    return *std::max_element(prof.begin(), prof.end());
}

inline void to_json(nlohmann::json& j, const PowerFit& f)
{
    j = {{"exponent", f.exponent},
         {"constant", f.constant},
         {"r_squared", f.r_squared},
         {"max_residual", f.max_residual},
         {"status", to_string(f.status)}};
}

inline void to_json(nlohmann::json& j, const SingularityReport& r)
{
    j = {{"C0", r.C0},
         {"delta1", r.delta1},
         {"delta2", r.delta2},
         {"a_fit", r.a_fit},
         {"dt_fit", r.dt_fit},
         {"dx_fit", r.dx_fit},
         {"dtx_fit", r.dtx_fit},
         {"log_form_constants", {r.log_form_constants[0], r.log_form_constants[1], r.log_form_constants[2]}},
         {"log_blowup_ratio", r.log_blowup_ratio}};
}

inline void to_json(nlohmann::json& j, const LogBlowupReport& r)
{
    j = {{"sup", r.sup}, {"sup_refined", r.sup_refined}, {"diverging", r.diverging}, {"pass", r.pass}};
}

} // namespace hyperlab
