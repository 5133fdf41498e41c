#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "grids.hpp"
#include "parallel.hpp"
#include "regression.hpp"
#include "smooth_step.hpp"

namespace hyperlab {

/// Modulus theta(t) of a speed class: decreasing on (0, T], divergent at 0.
struct Theta {
    std::string id;
    std::function<double(double)> f;

    double operator()(double t) const { return f(t); }

    static Theta log_inv()
    {
        return {"log_inv", [](double t) { return -std::log(t); }};
    }
    static Theta log1p_inv()
    {
        return {"log1p_inv", [](double t) { return std::log1p(t) - std::log(t); }};
    }
    static Theta from_id(const std::string& id)
    {
        if (id == "log_inv")
            return log_inv();
        if (id == "log1p_inv")
            return log1p_inv();
        throw ValidationError("unknown theta id '" + id + "' (expected log_inv or log1p_inv)");
    }
};

/// C(mu1, mu2, theta): speeds with mu1 <= c <= mu2 and |c'(t)| <= C theta(t) / t.
struct SpeedClass {
    double mu1 = 0.5;
    double mu2 = 2.0;
    Theta theta = Theta::log_inv();
    double T = 1.0;

    void validate() const
    {
        require(mu1 > 0.0 && mu1 <= mu2, "SpeedClass: need 0 < mu1 <= mu2");
        require(T > 0.0, "SpeedClass: T must be positive");
        require(static_cast<bool>(theta.f), "SpeedClass: theta missing");
        // theta must be nonincreasing on a log grid and grow without bound toward 0.
        const auto ts = logspace(1e-300, T, 400);
        for (std::size_t i = 1; i < ts.size(); ++i)
            require(theta(ts[i]) <= theta(ts[i - 1]), "SpeedClass: theta must be nonincreasing");
        require(theta(1e-300) > 100.0 * std::fmax(1.0, std::fabs(theta(T))),
                "SpeedClass: theta does not diverge toward t = 0");
    }
};

/// Interval on which a speed is exactly constant; the oscillator is then an exact rotation.
struct ConstantPiece {
    double t0 = 0.0;
    double t1 = 0.0;
    double c = 1.0;
};

/// A propagation speed c(t) with derivative, plus structural hints for the integrator.
struct Speed {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::vector<ConstantPiece> constant_pieces; ///< sorted, disjoint
    std::vector<double> breakpoints;            ///< where higher derivatives jump

    static Speed constant(double c)
    {
        Speed s;
        s.name = "constant";
        s.value = [c](double) { return c; };
        s.derivative = [](double) { return 0.0; };
        s.constant_pieces.push_back({0.0, std::numeric_limits<double>::infinity(), c});
        return s;
    }

    /// 2 + sin(log(1/t)) scaled by `scale`: bounded with |c'| of exact order 1/t.
    static Speed oscillating_log(double scale = 1.0)
    {
        Speed s;
        s.name = "oscillating_log";
        s.value = [scale](double t) { return scale * (2.0 + std::sin(-std::log(t))); };
        s.derivative = [scale](double t) { return -scale * std::cos(-std::log(t)) / t; };
        return s;
    }

    std::optional<ConstantPiece> piece_at(double t) const
    {
        for (const auto& p : constant_pieces)
            if (t >= p.t0 && t < p.t1)
                return p;
        return std::nullopt;
    }
};

/// Piecewise-constant levels joined by canonical ramps: level[k] -> level[k+1] across
/// [start[k], start[k] + width[k]]. Transitions must be disjoint and ordered.
struct StepProfile {
    std::vector<double> levels;
    std::vector<double> starts;
    std::vector<double> widths;
};

inline Speed smoothed_steps(const StepProfile& prof)
{
    require(!prof.levels.empty() && prof.starts.size() + 1 == prof.levels.size()
                && prof.widths.size() == prof.starts.size(),
            "smoothed_steps: need n levels and n-1 transitions");
    for (std::size_t k = 0; k < prof.starts.size(); ++k) {
        require(prof.widths[k] > 0.0 && prof.starts[k] > 0.0, "smoothed_steps: transitions must be positive");
        if (k + 1 < prof.starts.size())
            require(prof.starts[k] + prof.widths[k] <= prof.starts[k + 1], "smoothed_steps: transitions overlap");
    }
    Speed s;
    s.name = "smoothed_steps";
    auto eval = [prof](double t) {
        double v = prof.levels.front(), d = 0.0;
        for (std::size_t k = 0; k < prof.starts.size(); ++k) {
            const double jump = prof.levels[k + 1] - prof.levels[k];
            const Jet2 r = smooth_ramp_jet((t - prof.starts[k]) / prof.widths[k]);
            v += jump * r.value;
            d += jump * r.d1 / prof.widths[k];
        }
        return std::pair{v, d};
    };
    s.value = [eval](double t) { return eval(t).first; };
    s.derivative = [eval](double t) { return eval(t).second; };
    double t = 0.0;
    for (std::size_t k = 0; k < prof.starts.size(); ++k) {
        s.constant_pieces.push_back({t, prof.starts[k], prof.levels[k]});
        t = prof.starts[k] + prof.widths[k];
        s.breakpoints.push_back(prof.starts[k]);
        s.breakpoints.push_back(t);
    }
    s.constant_pieces.push_back({t, std::numeric_limits<double>::infinity(), prof.levels.back()});
    return s;
}

/// Random member of C(mu1, mu2, theta) on (0, T]: levels uniform in the band, 1 to n_max
/// disjoint transitions inside [0.02 T, 0.9 T]. Constant near T, so theta(T) = 0 is harmless.
template <class Rng>
StepProfile random_step_profile(Rng& rng, const SpeedClass& cls, std::size_t n_max = 6)
{
    std::uniform_real_distribution<double> level(cls.mu1, cls.mu2);
    std::uniform_int_distribution<std::size_t> count(1, n_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = count(rng);
    std::vector<double> cuts(n);
    for (auto& c : cuts)
        c = cls.T * (0.02 + 0.88 * unit(rng));
    std::sort(cuts.begin(), cuts.end());
    StepProfile prof;
    prof.levels.push_back(level(rng));
    for (std::size_t k = 0; k < n; ++k) {
        const double room = (k + 1 < n ? cuts[k + 1] : 0.9 * cls.T) - cuts[k];
        prof.starts.push_back(cuts[k]);
        prof.widths.push_back(std::fmax(room * (0.1 + 0.8 * unit(rng)), 1e-6 * cls.T));
        prof.levels.push_back(level(rng));
    }
    // Guard against coincident cuts.
    for (std::size_t k = 0; k + 1 < n; ++k)
        prof.widths[k] = std::fmin(prof.widths[k], std::fmax(prof.starts[k + 1] - prof.starts[k], 0.0));
    std::vector<double> starts, widths, levels{prof.levels.front()};
    for (std::size_t k = 0; k < n; ++k)
        if (prof.widths[k] > 0.0) {
            starts.push_back(prof.starts[k]);
            widths.push_back(prof.widths[k]);
            levels.push_back(prof.levels[k + 1]);
        }
    return {levels, starts, widths};
}

/// floor(lambda^(1/p)) for p in {2, 4}, exact for every lambda representable as double.
inline long long integer_root_floor(double lambda, int p)
{
    require(lambda >= 0.0, "integer_root_floor: negative argument");
    auto n = static_cast<long long>(std::floor(std::pow(lambda, 1.0 / p)));
    auto pw = [p](long long m) {
        long double r = 1;
        for (int i = 0; i < p; ++i)
            r *= static_cast<long double>(m);
        return r;
    };
    const long double L = lambda;
    while (n > 0 && pw(n) > L)
        --n;
    while (pw(n + 1) <= L)
        ++n;
    return n;
}

struct LambdaMarks {
    double a = 0.0; ///< 2 pi floor(lambda^(1/4)) / (gamma lambda)
    double b = 0.0; ///< 2 pi floor(lambda^(1/2)) / (gamma lambda)
    long long periods_a = 0;
    long long periods_b = 0;
};

inline LambdaMarks lambda_marks(double lambda, double gamma)
{
    LambdaMarks m;
    m.periods_a = integer_root_floor(lambda, 4);
    m.periods_b = integer_root_floor(lambda, 2);
    const double unit = 2.0 * M_PI / (gamma * lambda);
    m.a = unit * static_cast<double>(m.periods_a);
    m.b = unit * static_cast<double>(m.periods_b);
    return m;
}

/// Strict ordering 0 < a < 2a < b/2 < b < T1.
inline bool marks_admissible(const LambdaMarks& m, double T1)
{
    return 0.0 < m.a && 2.0 * m.a < 0.5 * m.b && m.b < T1;
}

struct ActivatorParams {
    double gamma = 1.0;
    double T1 = 0.5;
    double T = 1.0;
    double lambda = 1024.0;
    Theta theta = Theta::log_inv();
    LambdaMarks marks;
    double theta_lambda = 0.0; ///< min(theta(b), log lambda)

    double a() const { return marks.a; }
    double b() const { return marks.b; }
};

inline bool admissible(double lambda, double gamma, double T1)
{
    return lambda > 0.0 && gamma > 0.0 && marks_admissible(lambda_marks(lambda, gamma), T1);
}

/// Builds and validates activator parameters. Throws ValidationError when lambda is below
/// the admissibility threshold or gamma^2 lies outside the open band of the class.
inline ActivatorParams make_activator_params(double gamma, double T1, double lambda, const SpeedClass& cls)
{
    require(gamma > 0.0 && lambda > 0.0, "activator: gamma and lambda must be positive");
    require(cls.mu1 < gamma * gamma && gamma * gamma < cls.mu2, "activator: need mu1 < gamma^2 < mu2");
    require(T1 > 0.0 && T1 < cls.T, "activator: need 0 < T1 < T");
    ActivatorParams p;
    p.gamma = gamma;
    p.T1 = T1;
    p.T = cls.T;
    p.lambda = lambda;
    p.theta = cls.theta;
    p.marks = lambda_marks(lambda, gamma);
    require(marks_admissible(p.marks, T1),
            "activator: lambda=" + std::to_string(lambda) + " violates 0 < a < 2a < b/2 < b < T1");
    p.theta_lambda = std::fmin(cls.theta(p.marks.b), std::log(lambda));
    return p;
}

/// Smallest integer lambda >= 1 for which the ordering holds.
inline double admissibility_threshold(double gamma, double T1, double search_limit = 1e8)
{
    for (double l = 1.0; l <= search_limit; l += 1.0)
        if (admissible(l, gamma, T1))
            return l;
    throw ValidationError("admissibility_threshold: none found below search limit");
}

/// epsilon_lambda with exact first and second derivatives; zero outside [a, b].
inline Jet2 epsilon_lambda(double t, const ActivatorParams& p)
{
    const double a = p.a(), b = p.b(), th = p.theta_lambda;
    if (t <= a || t >= b)
        return {};
    const double g = th / t, g1 = -th / (t * t), g2 = 2.0 * th / (t * t * t);
    if (t >= 2.0 * a && t <= 0.5 * b)
        return {g, g1, g2};
    Jet2 nu;
    double dr;
    if (t < 2.0 * a) {
        nu = smooth_ramp_jet((t - a) / a);
        dr = 1.0 / a;
    } else {
        nu = smooth_ramp_jet(2.0 * (b - t) / b);
        dr = -2.0 / b;
    }
    const double n0 = nu.value, n1 = nu.d1 * dr, n2 = nu.d2 * dr * dr;
    return {g * n0, g1 * n0 + g * n1, g2 * n0 + 2.0 * g1 * n1 + g * n2};
}

/// c_lambda(t) and c_lambda'(t) with c_* = gamma^2.
inline std::pair<double, double> activator_speed(double t, const ActivatorParams& p)
{
    const double g = p.gamma, l = p.lambda, g2 = g * g;
    const Jet2 e = epsilon_lambda(t, p);
    if (e.value == 0.0 && e.d1 == 0.0 && e.d2 == 0.0)
        return {g2, 0.0};
    const double w = g * l;
    const double s = std::sin(w * t), c = std::cos(w * t);
    const double s2 = 2.0 * s * c, c2 = c * c - s * s; // sin(2wt), cos(2wt)
    const double k1 = 1.0 / (4.0 * g * l), k2 = 1.0 / (8.0 * g2 * l * l), k3 = 1.0 / (64.0 * g2 * g2 * l * l);
    const double sq = s * s;
    const double value = g2 - k1 * e.value * s2 - k2 * e.d1 * sq - k3 * e.value * e.value * sq * sq;
    const double deriv = -k1 * (e.d1 * s2 + 2.0 * w * e.value * c2) - k2 * (e.d2 * sq + e.d1 * w * s2)
                         - k3 * (2.0 * e.value * e.d1 * sq * sq + e.value * e.value * 4.0 * sq * s * c * w);
    return {value, deriv};
}

/// The activator as a Speed; with activate = false it is the plateau c_* = gamma^2.
inline Speed make_activator_speed(const ActivatorParams& p, bool activate = true)
{
    if (!activate) {
        Speed s = Speed::constant(p.gamma * p.gamma);
        s.name = "plateau";
        return s;
    }
    Speed s;
    s.name = "activator";
    s.value = [p](double t) { return activator_speed(t, p).first; };
    s.derivative = [p](double t) { return activator_speed(t, p).second; };
    const double g2 = p.gamma * p.gamma;
    s.constant_pieces = {{0.0, p.a(), g2}, {p.b(), std::numeric_limits<double>::infinity(), g2}};
    s.breakpoints = {p.a(), 2.0 * p.a(), 0.5 * p.b(), p.b()};
    return s;
}

/// theta_lambda / (32 gamma^2) * log(floor(sqrt lambda) / floor(lambda^(1/4))).
inline double phi_rate(const ActivatorParams& p)
{
    return p.theta_lambda / (32.0 * p.gamma * p.gamma)
           * std::log(static_cast<double>(p.marks.periods_b) / static_cast<double>(p.marks.periods_a));
}

/// Composite sampling grid on (0, T]: uniform + log-spaced + dense focus intervals.
struct TimeGrid {
    double t_min = 1e-8;
    std::size_t n_uniform = 2000;
    std::size_t n_log = 2000;
    std::vector<std::pair<double, double>> focus;
    std::size_t n_focus = 20000; ///< per focus interval

    std::vector<double> points(double T) const
    {
        std::vector<double> out = linspace(0.0, T, n_uniform);
        out.erase(out.begin()); // t = 0 excluded: theta is infinite there
        const auto lg = logspace(t_min, T, n_log);
        out.insert(out.end(), lg.begin(), lg.end());
        for (const auto& [lo, hi] : focus) {
            const auto f = linspace(lo, hi, n_focus);
            out.insert(out.end(), f.begin(), f.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

inline TimeGrid activator_grid(const ActivatorParams& p, std::size_t n_focus = 20000)
{
    TimeGrid g;
    g.focus.push_back({p.a(), p.b()});
    g.n_focus = n_focus;
    return g;
}

/// d_C(c1, c2) = sup |c1 - c2| + sup t^2 / theta(t) |c1' - c2'| over the sampled grid.
/// Where theta(t) <= 0 the weight is infinite: the term is 0 if the derivatives agree, else inf.
inline double d_C_metric(const Speed& c1, const Speed& c2, const SpeedClass& cls, const TimeGrid& grid)
{
    double sup0 = 0.0, sup1 = 0.0;
    for (double t : grid.points(cls.T)) {
        sup0 = std::fmax(sup0, std::fabs(c1.value(t) - c2.value(t)));
        const double dd = std::fabs(c1.derivative(t) - c2.derivative(t));
        const double th = cls.theta(t);
        if (dd == 0.0)
            continue;
        sup1 = std::fmax(sup1, th > 0.0 ? t * t / th * dd : std::numeric_limits<double>::infinity());
    }
    return sup0 + sup1;
}

struct MembershipReport {
    bool pass = false;
    bool band_ok = false;
    double min_value = 0.0;
    double max_value = 0.0;
    double fitted_C = 0.0; ///< sup t |c'(t)| / theta(t)
    std::optional<double> witness_t; ///< first band violation
    std::size_t samples = 0;
};

inline MembershipReport membership_check(const Speed& c, const SpeedClass& cls, const TimeGrid& grid)
{
    MembershipReport r;
    r.min_value = std::numeric_limits<double>::infinity();
    r.max_value = -r.min_value;
    r.band_ok = true;
    for (double t : grid.points(cls.T)) {
        ++r.samples;
        const double v = c.value(t);
        r.min_value = std::fmin(r.min_value, v);
        r.max_value = std::fmax(r.max_value, v);
        if (!(v >= cls.mu1 && v <= cls.mu2) && r.band_ok) {
            r.band_ok = false;
            r.witness_t = t;
        }
        const double d = std::fabs(c.derivative(t));
        if (d == 0.0)
            continue;
        const double th = cls.theta(t);
        r.fitted_C = std::fmax(r.fitted_C, th > 0.0 ? t * d / th : std::numeric_limits<double>::infinity());
    }
    r.pass = r.band_ok && std::isfinite(r.fitted_C);
    return r;
}

/// One sample of u'' + c(t) lambda^2 u = 0, u(0) = 0, u'(0) = 1.
struct ModeSample {
    double t = 0.0;
    double u = 0.0;
    double du = 0.0;
    double E = 0.0;    ///< |u'|^2 + lambda^2 |u|^2
    double F = 0.0;    ///< |u'|^2 + c lambda^2 |u|^2
    double work = 0.0; ///< int_0^t c' lambda^2 u^2; F(t) = F(0) + work(t) exactly
};

struct ModeTrajectory {
    double lambda = 0.0;
    std::vector<ModeSample> samples;
    std::size_t rk_steps = 0;
    std::size_t rejected = 0;
    double inf_E = std::numeric_limits<double>::infinity(); ///< inf of E over [inf_from, T]
    double energy_identity_error = 0.0; ///< max |F - F(0) - work| / max F

    const ModeSample& final() const { return samples.back(); }
};

/// Step-count budget exhausted before reaching T.
class StepBudgetExceeded : public NumericalError {
public:
    StepBudgetExceeded(double reached, std::size_t steps)
        : NumericalError("step budget of " + std::to_string(steps) + " exceeded at t=" + std::to_string(reached)),
          reached_(reached)
    {
    }
    double reached_time() const { return reached_; }

private:
    double reached_;
};

struct ModeOptions {
    double tolerance = 1e-10;          ///< absolute and relative, on (lambda u, u')
    std::size_t max_steps = 20'000'000;
    bool exact_rotation = true;        ///< use closed-form rotation on constant pieces
    double inf_from = -1.0;            ///< when >= 0, inf_E is taken over [inf_from, T]
    std::size_t samples_per_period = 8; ///< recorded samples on rotation pieces
    double t_start = 1e-14;            ///< start for speeds undefined at t = 0 (Taylor state)
};

namespace detail {

using ModeState = std::array<double, 3>; // (lambda u, u', work)

struct ModeRecorder {
    const Speed& c;
    double lambda;
    double inf_from;
    ModeTrajectory& out;

    void record(double t, const ModeState& y, double cv)
    {
        ModeSample s;
        s.t = t;
        s.u = y[0] / lambda;
        s.du = y[1];
        s.E = y[0] * y[0] + y[1] * y[1];
        s.F = y[1] * y[1] + cv * y[0] * y[0];
        s.work = y[2];
        if (inf_from >= 0.0 && t >= inf_from)
            out.inf_E = std::fmin(out.inf_E, s.E);
        out.samples.push_back(s);
    }
};

/// Exact rotation on a constant piece: y0 = sqrt(F/c) sin psi, y1 = sqrt(F) cos psi.
inline ModeState rotate(const ModeState& y, double c, double lambda, double dt)
{
    const double rc = std::sqrt(c);
    const double w = rc * lambda * dt;
    const double cs = std::cos(w), sn = std::sin(w);
    // (rc y0, y1) rotates by w.
    const double p = rc * y[0], q = y[1];
    return {(p * cs + q * sn) / rc, q * cs - p * sn, y[2]};
}

} // namespace detail

/// Integrates u'' + c(t) lambda^2 u = 0 with u(0) = 0, u'(0) = 1 on [0, T].
/// Non-constant stretches use an embedded Runge-Kutta-Fehlberg 7(8) pair with step control
/// and at least 20 steps per local period; constant pieces are exact rotations.
inline ModeTrajectory integrate_mode(const Speed& c, double lambda, double T, const ModeOptions& opt = {})
{
    namespace ode = boost::numeric::odeint;
    require(lambda > 0.0 && T > 0.0, "integrate_mode: lambda and T must be positive");
    require(opt.tolerance >= 1e-12, "integrate_mode: tolerance must be >= 1e-12");
    ModeTrajectory out;
    out.lambda = lambda;
    detail::ModeRecorder rec{c, lambda, opt.inf_from, out};

    double t = 0.0;
    detail::ModeState y{0.0, 1.0, 0.0};
    if (!std::isfinite(c.value(0.0)) && !(opt.exact_rotation && c.piece_at(0.0))) {
        t = opt.t_start;
        y = {lambda * t, 1.0, 0.0};
    }
    rec.record(t, y, c.piece_at(t) ? c.piece_at(t)->c : c.value(t));

    auto rhs = [&](const detail::ModeState& s, detail::ModeState& ds, double tt) {
        const double cv = c.value(tt);
        ds[0] = lambda * s[1];
        ds[1] = -cv * lambda * s[0];
        ds[2] = c.derivative(tt) * s[0] * s[0];
    };
    auto stepper = ode::make_controlled(opt.tolerance, opt.tolerance, ode::runge_kutta_fehlberg78<detail::ModeState>());

    double dt = 0.0;
    while (t < T) {
        const auto piece = opt.exact_rotation ? c.piece_at(t) : std::nullopt;
        if (piece) {
            const double end = std::fmin(piece->t1, T);
            const double w = std::sqrt(piece->c) * lambda;
            const auto n = static_cast<std::size_t>(
                std::ceil((end - t) * w / (2.0 * M_PI) * static_cast<double>(opt.samples_per_period)));
            const double t0 = t;
            const detail::ModeState y0 = y;
            // Analytic inf of E over the piece when it covers a half period of psi.
            if (opt.inf_from >= 0.0 && end > opt.inf_from) {
                const double from = std::fmax(t0, opt.inf_from);
                if ((end - from) * w >= M_PI) {
                    const double F = y0[1] * y0[1] + piece->c * y0[0] * y0[0];
                    out.inf_E = std::fmin(out.inf_E, F * std::fmin(1.0, 1.0 / piece->c));
                }
            }
            for (std::size_t i = 1; i <= std::max<std::size_t>(n, 1); ++i) {
                const double ti = i == std::max<std::size_t>(n, 1)
                                      ? end
                                      : t0 + (end - t0) * static_cast<double>(i) / static_cast<double>(n);
                y = detail::rotate(y0, piece->c, lambda, ti - t0);
                rec.record(ti, y, piece->c);
            }
            t = end;
            dt = 0.0;
            continue;
        }
        // Next structural boundary: constant piece start or breakpoint.
        double stop = T;
        if (opt.exact_rotation)
            for (const auto& p : c.constant_pieces)
                if (p.t0 > t)
                    stop = std::fmin(stop, p.t0);
        for (double bp : c.breakpoints)
            if (bp > t * (1.0 + 1e-15))
                stop = std::fmin(stop, bp);
        if (dt <= 0.0)
            dt = std::fmin(1.0 / lambda, (stop - t) / 4.0);
        while (t < stop) {
            const double cv = std::fabs(c.value(t));
            const double cap = 2.0 * M_PI / (20.0 * lambda * std::sqrt(std::fmax(cv, 1e-300)));
            dt = std::min({dt, cap, stop - t});
            if (stop - t - dt < 1e-12 * stop)
                dt = stop - t;
            if (stepper.try_step(rhs, y, t, dt) == ode::success) {
                ++out.rk_steps;
                if (stop - t < 1e-14 * std::fmax(1.0, stop))
                    t = stop;
                rec.record(t, y, c.value(t));
            } else {
                ++out.rejected;
            }
            if (out.rk_steps + out.rejected > opt.max_steps)
                throw StepBudgetExceeded(t, opt.max_steps);
        }
    }
    double maxF = 0.0, err = 0.0;
    const double F0 = out.samples.front().F;
    for (const auto& s : out.samples) {
        maxF = std::fmax(maxF, s.F);
        err = std::fmax(err, std::fabs(s.F - F0 - s.work));
    }
    out.energy_identity_error = maxF > 0.0 ? err / maxF : 0.0;
    return out;
}

/// int_0^t |c'| / c, accumulated along the trajectory sample times by composite Simpson per
/// sub-interval with 8 panels. Returns one value per sample.
inline std::vector<double> gronwall_exponent(const Speed& c, const ModeTrajectory& tr)
{
    std::vector<double> out(tr.samples.size(), 0.0);
    auto g = [&](double t) { return std::fabs(c.derivative(t)) / c.value(t); };
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const double a = tr.samples[i - 1].t, b = tr.samples[i].t;
        double acc = 0.0;
        if (b > a && !c.piece_at(a)) {
            constexpr int n = 8;
            const double h = (b - a) / n;
            acc = g(a) + g(b);
            for (int k = 1; k < n; ++k)
                acc += (k % 2 ? 4.0 : 2.0) * g(a + k * h);
            acc *= h / 3.0;
        }
        out[i] = out[i - 1] + acc;
    }
    return out;
}

enum class RowStatus { ok, fail, skipped };

inline std::string to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::ok:
        return "ok";
    case RowStatus::fail:
        return "fail";
    case RowStatus::skipped:
        return "skipped";
    }
    return "?";
}

struct LossRow {
    double lambda = 0.0;
    RowStatus status = RowStatus::skipped;
    double phi = 0.0;
    double a = 0.0;
    double b = 0.0;
    double theta_lambda = 0.0;
    double dC = 0.0;
    double fitted_C = 0.0;
    bool member = false;
    double infE = 0.0;
    double logE_T = 0.0;
    double ratio = 0.0;  ///< logE_T / log lambda
    double M_delta = 0.0; ///< infE / exp(2 phi)
    std::string note;
};

enum class GrowthTrend { polynomial, superpolynomial, undetermined };

inline std::string to_string(GrowthTrend g)
{
    switch (g) {
    case GrowthTrend::polynomial:
        return "polynomial";
    case GrowthTrend::superpolynomial:
        return "superpolynomial";
    case GrowthTrend::undetermined:
        return "undetermined";
    }
    return "?";
}

struct LossScanReport {
    std::vector<LossRow> rows; ///< sorted by lambda
    GrowthTrend trend = GrowthTrend::undetermined;
    bool all_skipped = true;
};

struct SweepConfig {
    double gamma = 1.0;
    double T1 = 0.5;
    SpeedClass cls;
    std::vector<double> lambdas;
    double delta = 0.6;
    double growth_fraction = 0.5; ///< row passes when infE >= exp(2 phi growth_fraction)
    bool activate = true;
    ModeOptions mode;
    std::size_t n_focus = 20000;

    void validate() const
    {
        cls.validate();
        require(delta > 0.0 && delta < cls.T, "sweep: need 0 < delta < T");
        require(!lambdas.empty(), "sweep: empty lambda list");
    }
};

/// Per lambda: activator, membership, d_C to the plateau, mode energy and the growth verdict.
/// log E_T / log lambda strictly increasing over >= 3 ok rows is classified superpolynomial.
inline LossScanReport activator_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    std::vector<double> lambdas = cfg.lambdas;
    std::sort(lambdas.begin(), lambdas.end());
    LossScanReport rep;
    rep.rows = parallel_map<LossRow>(lambdas.size(), [&](std::size_t i) {
        LossRow row;
        row.lambda = lambdas[i];
        if (!admissible(row.lambda, cfg.gamma, cfg.T1)) {
            row.status = RowStatus::skipped;
            row.note = "lambda below admissibility threshold";
            const auto m = lambda_marks(row.lambda, cfg.gamma);
            row.a = m.a;
            row.b = m.b;
            return row;
        }
        const auto p = make_activator_params(cfg.gamma, cfg.T1, row.lambda, cfg.cls);
        row.a = p.a();
        row.b = p.b();
        row.theta_lambda = p.theta_lambda;
        row.phi = phi_rate(p);
        const Speed speed = make_activator_speed(p, cfg.activate);
        const Speed plateau = Speed::constant(cfg.gamma * cfg.gamma);
        const TimeGrid grid = activator_grid(p, cfg.n_focus);
        const auto mem = membership_check(speed, cfg.cls, grid);
        row.member = mem.pass;
        row.fitted_C = mem.fitted_C;
        row.dC = d_C_metric(speed, plateau, cfg.cls, grid);
        ModeOptions mo = cfg.mode;
        mo.inf_from = cfg.delta;
        const auto tr = integrate_mode(speed, row.lambda, cfg.cls.T, mo);
        row.infE = tr.inf_E;
        row.logE_T = std::log(tr.final().E);
        row.ratio = row.logE_T / std::log(row.lambda);
        row.M_delta = row.infE / std::exp(2.0 * row.phi);
        const bool grows = row.infE >= std::exp(2.0 * row.phi * cfg.growth_fraction);
        row.status = mem.pass && grows ? RowStatus::ok : RowStatus::fail;
        if (!mem.pass)
            row.note = "speed outside class";
        else if (!grows)
            row.note = "growth below exp(2 phi fraction)";
        return row;
    });
    std::vector<double> ratios;
    for (const auto& r : rep.rows)
        if (r.status != RowStatus::skipped) {
            rep.all_skipped = false;
            ratios.push_back(r.ratio);
        }
    if (ratios.size() >= 3) {
        bool increasing = true;
        for (std::size_t i = 1; i < ratios.size(); ++i)
            increasing = increasing && ratios[i] > ratios[i - 1];
        rep.trend = increasing ? GrowthTrend::superpolynomial : GrowthTrend::polynomial;
    }
    return rep;
}

/// Fitted slope of log E_i(T) against log lambda_i for one speed applied to every mode.
struct FiniteLossFit {
    std::vector<double> lambdas;
    std::vector<double> logE;
    LinearFit fit;
};

inline FiniteLossFit finite_loss_fit(const Speed& c, std::vector<double> lambdas, double T, const ModeOptions& opt = {})
{
    std::sort(lambdas.begin(), lambdas.end());
    FiniteLossFit out;
    out.lambdas = lambdas;
    out.logE = parallel_map<double>(lambdas.size(), [&](std::size_t i) {
        return std::log(integrate_mode(c, lambdas[i], T, opt).final().E);
    });
    std::vector<double> ll(lambdas.size());
    for (std::size_t i = 0; i < ll.size(); ++i)
        ll[i] = std::log(lambdas[i]);
    out.fit = fit_line(ll, out.logE);
    return out;
}

enum class SeriesVerdict { convergent, divergent, inconclusive };

inline std::string to_string(SeriesVerdict v)
{
    switch (v) {
    case SeriesVerdict::convergent:
        return "convergent";
    case SeriesVerdict::divergent:
        return "divergent";
    case SeriesVerdict::inconclusive:
        return "inconclusive";
    }
    return "?";
}

struct CascadeMode {
    std::size_t index = 0;
    double lambda = 0.0;
    double f = 0.0;
    double E_T = 0.0;   ///< f^2 (|u'|^2 + lambda^2 |u|^2) at T
    double E_unit = 0.0; ///< same for f = 1
    bool activated = false;
};

struct CascadeRow {
    double m = 0.0;
    std::vector<double> partial_sums; ///< at truncations n/4, n/2, 3n/4, n
    double tail_fraction = 0.0;       ///< (S_n - S_{n/2}) / S_n
    double last_term = 0.0;
    double max_term = 0.0;
    SeriesVerdict verdict = SeriesVerdict::inconclusive;
};

struct CascadeReport {
    std::vector<CascadeMode> modes;
    std::vector<CascadeRow> rows;
    std::vector<std::size_t> truncations;
};

/// Sums sum_i lambda_i^{2m} f_i^2 E_i(T) for every m. A series is called convergent when the
/// second half contributes less than `tail_tol` of the total and the last term is below the
/// largest, divergent when the largest term is among the last eighth; otherwise inconclusive.
inline CascadeReport cascade_loss_scan(const std::function<Speed(std::size_t, double)>& speed_for_mode,
                                       const std::vector<double>& lambdas, const std::function<double(double)>& weight,
                                       double T, const std::vector<double>& ms, const ModeOptions& opt = {},
                                       double tail_tol = 1e-3)
{
    require(lambdas.size() >= 8, "cascade_loss_scan: need at least 8 modes");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        require(lambdas[i] >= lambdas[i - 1], "cascade_loss_scan: lambda sequence must be nondecreasing");
    CascadeReport rep;
    rep.modes = parallel_map<CascadeMode>(lambdas.size(), [&](std::size_t i) {
        CascadeMode m;
        m.index = i + 1;
        m.lambda = lambdas[i];
        m.f = weight(m.lambda);
        const Speed s = speed_for_mode(i + 1, m.lambda);
        m.activated = s.name == "activator";
        m.E_unit = integrate_mode(s, m.lambda, T, opt).final().E;
        m.E_T = m.f * m.f * m.E_unit;
        return m;
    });
    const std::size_t n = lambdas.size();
    rep.truncations = {n / 4, n / 2, 3 * n / 4, n};
    for (double m : ms) {
        CascadeRow row;
        row.m = m;
        std::vector<double> terms(n);
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            terms[i] = std::pow(rep.modes[i].lambda, 2.0 * m) * rep.modes[i].E_T;
            if (terms[i] > terms[argmax])
                argmax = i;
        }
        double s = 0.0;
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s += terms[i];
            while (next < rep.truncations.size() && rep.truncations[next] == i + 1) {
                row.partial_sums.push_back(s);
                ++next;
            }
        }
        const double total = row.partial_sums.back(), half = row.partial_sums[1];
        row.tail_fraction = total > 0.0 ? (total - half) / total : 0.0;
        row.last_term = terms.back();
        row.max_term = terms[argmax];
        if (argmax >= n - n / 8)
            row.verdict = SeriesVerdict::divergent;
        else if (row.tail_fraction < tail_tol && row.last_term < row.max_term)
            row.verdict = SeriesVerdict::convergent;
        rep.rows.push_back(row);
    }
    return rep;
}

inline void to_json(nlohmann::json& j, const LossRow& r)
{
    j = {{"lambda", r.lambda},     {"status", to_string(r.status)}, {"phi", r.phi},       {"a_lambda", r.a},
         {"b_lambda", r.b},        {"theta_lambda", r.theta_lambda}, {"dC", r.dC},         {"fitted_C", r.fitted_C},
         {"member", r.member},     {"infE", r.infE},                 {"logE_T", r.logE_T}, {"ratio", r.ratio},
         {"M_delta", r.M_delta},   {"note", r.note}};
}

inline void to_json(nlohmann::json& j, const LossScanReport& r)
{
    j = {{"rows", r.rows}, {"trend", to_string(r.trend)}, {"all_skipped", r.all_skipped}};
}

} // namespace hyperlab
