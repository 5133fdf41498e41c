#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coefficients.hpp"
#include "errors.hpp"
#include "grids.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "sobolev.hpp"

namespace hyperlab {

/// u_tt - a(t,x) u_xx + b1 u_x + b0 u = f on (0, T] x [-L, L), periodic, u(0) = f1, u_t(0) = f2.
struct CauchyProblem {
    CoefficientField field;
    ScalarField rhs; ///< empty means f = 0
    GridFunction f1;
    GridFunction f2;
    double T = 1.0;

    void validate() const
    {
        require(f1.same_grid(f2), "CauchyProblem: data grids must share L and M");
        require(T > 0.0, "CauchyProblem: T must be positive");
        require(static_cast<bool>(field.a), "CauchyProblem: coefficient evaluator missing");
    }
};

struct SchemeConfig {
    double cfl = 0.5;           ///< in (0, 1)
    double grading = 2.0;       ///< t_j = T (j / N)^g, g >= 1
    std::size_t time_steps = 0; ///< N; 0 picks the smallest admissible N automatically

    void validate() const
    {
        require(cfl > 0.0 && cfl < 1.0, "SchemeConfig: CFL number must lie in (0, 1)");
        require(grading >= 1.0, "SchemeConfig: grading exponent must be >= 1");
    }
};

/// A time step exceeded CFL * dx / sqrt(sup_x a).
class CflViolation : public NumericalError {
public:
    CflViolation(double t, double sup_a, double step, double limit)
        : NumericalError("CFL violated at t=" + std::to_string(t) + " (sup a=" + std::to_string(sup_a)
                         + ", step=" + std::to_string(step) + ", limit=" + std::to_string(limit) + ")"),
          t_(t), sup_a_(sup_a)
    {
    }
    double time() const { return t_; }
    double sup_a() const { return sup_a_; }

private:
    double t_;
    double sup_a_;
};

/// Half-open index interval [lo, hi] of exactly nonzero entries; empty when lo > hi.
struct IndexSupport {
    std::ptrdiff_t lo = 1;
    std::ptrdiff_t hi = 0;

    bool empty() const { return lo > hi; }

    static IndexSupport of(const std::vector<cplx>& v)
    {
        IndexSupport s;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[j] != cplx{0.0, 0.0}) {
                if (s.empty())
                    s.lo = static_cast<std::ptrdiff_t>(j);
                s.hi = static_cast<std::ptrdiff_t>(j);
            }
        return s;
    }

    IndexSupport merged(const IndexSupport& o) const
    {
        if (empty())
            return o;
        if (o.empty())
            return *this;
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }
};

/// Kick-drift-kick leapfrog for u_tt = a u_xx - b1 u_x - b0 u + f with second-order
/// central differences. Steps may vary in size and sign; for coefficients frozen in t
/// a step of -h exactly undoes a step of +h up to rounding.
class WaveStepper {
public:
    WaveStepper(const CauchyProblem& problem, double cfl, GridFunction u, GridFunction v, double t)
        : p_(&problem), cfl_(cfl), u_(std::move(u)), v_(std::move(v)), t_(t)
    {
        require(u_.same_grid(v_), "WaveStepper: state grids differ");
        xs_.resize(u_.size());
        for (std::size_t j = 0; j < xs_.size(); ++j)
            xs_[j] = u_.x(j);
        force_ = compute_force(t_, u_, sup_a_);
    }

    /// Taylor start from t = 0: u(t1) = f1 + t1 f2, u_t(t1) = f2 + t1 F(t1/2, f1 + t1/2 f2).
    /// The coefficient is never evaluated at t = 0.
    static WaveStepper start(const CauchyProblem& problem, double cfl, double t1)
    {
        require(t1 > 0.0, "WaveStepper::start: first node must be positive");
        GridFunction u = problem.f1, mid = problem.f1, v = problem.f2;
        for (std::size_t j = 0; j < u.size(); ++j) {
            u[j] += t1 * problem.f2[j];
            mid[j] += 0.5 * t1 * problem.f2[j];
        }
        WaveStepper probe(problem, cfl);
        double unused = 0.0;
        const auto f_mid = probe.compute_force_on(0.5 * t1, mid, unused);
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] += t1 * f_mid[j];
        return WaveStepper(problem, cfl, std::move(u), std::move(v), t1);
    }

    void step(double h)
    {
        const double dx = u_.spacing();
        const std::size_t M = u_.size();
        auto& u = u_.values();
        auto& v = v_.values();
        for (std::size_t j = 0; j < M; ++j) {
            v[j] += 0.5 * h * force_[j];
            u[j] += h * v[j];
        }
        double sup_next = 0.0;
        force_ = compute_force(t_ + h, u_, sup_next);
        const double sup = std::fmax(sup_a_, sup_next);
        const double limit = cfl_ * dx / std::sqrt(sup);
        if (std::fabs(h) > limit * (1.0 + 1e-12))
            throw CflViolation(t_ + h, sup, std::fabs(h), limit);
        for (std::size_t j = 0; j < M; ++j)
            v[j] += 0.5 * h * force_[j];
        t_ += h;
        sup_a_ = sup_next;
    }

    double time() const { return t_; }
    const GridFunction& u() const { return u_; }
    const GridFunction& v() const { return v_; }
    double sup_a() const { return sup_a_; }

private:
    WaveStepper(const CauchyProblem& problem, double cfl) : p_(&problem), cfl_(cfl), u_(problem.f1), v_(problem.f2)
    {
        xs_.resize(u_.size());
        for (std::size_t j = 0; j < xs_.size(); ++j)
            xs_[j] = u_.x(j);
    }

    std::vector<cplx> compute_force(double t, const GridFunction& u, double& sup_a) const
    {
        return compute_force_on(t, u, sup_a);
    }

    std::vector<cplx> compute_force_on(double t, const GridFunction& u, double& sup_a) const
    {
        const std::size_t M = u.size();
        const double dx = u.spacing();
        const double inv_dx2 = 1.0 / (dx * dx);
        const auto& f = p_->field;
        std::vector<cplx> out(M);
        sup_a = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            const std::size_t jp = j + 1 == M ? 0 : j + 1;
            const std::size_t jm = j == 0 ? M - 1 : j - 1;
            const double a = f.a(t, xs_[j]);
            if (!(a > 0.0))
                throw NumericalError("solver: coefficient not positive at t=" + std::to_string(t)
                                     + " x=" + std::to_string(xs_[j]));
            sup_a = std::fmax(sup_a, a);
            cplx acc = a * (u[jp] - 2.0 * u[j] + u[jm]) * inv_dx2;
            if (f.b1)
                acc -= f.b1(t, xs_[j]) * (u[jp] - u[jm]) / (2.0 * dx);
            if (f.b0)
                acc -= f.b0(t, xs_[j]) * u[j];
            if (p_->rhs)
                acc += p_->rhs(t, xs_[j]);
            out[j] = acc;
        }
        return out;
    }

    const CauchyProblem* p_;
    double cfl_;
    GridFunction u_;
    GridFunction v_;
    double t_ = 0.0;
    std::vector<double> xs_;
    std::vector<cplx> force_;
    double sup_a_ = 0.0;
};

struct Snapshot {
    double t = 0.0;
    GridFunction u;
    GridFunction v; ///< u_t
};

struct SolveResult {
    std::vector<Snapshot> snapshots;
    std::vector<double> mesh; ///< graded mesh actually used (sample times excluded)
    std::size_t steps = 0;    ///< steps taken including the Taylor start and sample-time splits
    /// Exact-zero support of (u, u_t) grew by at most one cell per step (only tracked for f = 0).
    bool support_bound_ok = true;
    bool support_tracked = false;
};

inline std::vector<double> graded_mesh(double T, std::size_t N, double g)
{
    std::vector<double> t(N + 1);
    for (std::size_t j = 0; j <= N; ++j)
        t[j] = T * std::pow(static_cast<double>(j) / static_cast<double>(N), g);
    t.back() = T;
    return t;
}

namespace detail {

inline double sup_over_grid(const CoefficientField& f, double t, const GridFunction& g)
{
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        s = std::fmax(s, f.a(t, g.x(j)));
    return s;
}

inline SolveResult solve_on_mesh(const CauchyProblem& p, const SchemeConfig& cfg, std::vector<double> samples,
                                 std::size_t N)
{
    SolveResult res;
    res.mesh = graded_mesh(p.T, N, cfg.grading);
    std::sort(samples.begin(), samples.end());
    std::size_t next_sample = 0;
    while (next_sample < samples.size() && samples[next_sample] == 0.0) {
        res.snapshots.push_back({0.0, p.f1, p.f2});
        ++next_sample;
    }
    const double t1 = std::min(res.mesh[1], next_sample < samples.size() ? samples[next_sample] : res.mesh[1]);
    WaveStepper stepper = WaveStepper::start(p, cfg.cfl, t1);
    res.steps = 1;

    res.support_tracked = !p.rhs;
    const auto initial = IndexSupport::of(p.f1.values()).merged(IndexSupport::of(p.f2.values()));
    const auto M = static_cast<std::ptrdiff_t>(p.f1.size());
    auto check_support = [&] {
        if (!res.support_tracked || initial.empty())
            return;
        const auto s = IndexSupport::of(stepper.u().values()).merged(IndexSupport::of(stepper.v().values()));
        if (s.empty())
            return;
        const auto n = static_cast<std::ptrdiff_t>(res.steps);
        if (initial.lo - n <= 0 || initial.hi + n >= M - 1) {
            res.support_tracked = false; // reached the periodic seam
            return;
        }
        if (s.lo < initial.lo - n || s.hi > initial.hi + n)
            res.support_bound_ok = false;
    };
    check_support();

    auto emit_due = [&] {
        while (next_sample < samples.size() && samples[next_sample] <= stepper.time() * (1.0 + 1e-14)) {
            res.snapshots.push_back({samples[next_sample], stepper.u(), stepper.v()});
            ++next_sample;
        }
    };
    emit_due();
    std::size_t node = 1;
    while (node < res.mesh.size() && res.mesh[node] <= stepper.time())
        ++node;
    while (node < res.mesh.size()) {
        double target = res.mesh[node];
        if (next_sample < samples.size() && samples[next_sample] < target)
            target = samples[next_sample];
        stepper.step(target - stepper.time());
        ++res.steps;
        check_support();
        emit_due();
        if (stepper.time() >= res.mesh[node] * (1.0 - 1e-15))
            ++node;
    }
    return res;
}

} // namespace detail

/// Leapfrog on the graded mesh t_j = T (j/N)^g, landing exactly on every sample time.
/// With cfg.time_steps = 0, N starts from the CFL estimate at t = T and doubles until every
/// step satisfies the CFL bound; with a fixed N a violation aborts with CflViolation.
inline SolveResult solve(const CauchyProblem& p, const SchemeConfig& cfg, std::vector<double> sample_times)
{
    p.validate();
    cfg.validate();
    for (double s : sample_times)
        require(s >= 0.0 && s <= p.T, "solve: sample times must lie in [0, T]");
    if (cfg.time_steps > 0)
        return detail::solve_on_mesh(p, cfg, std::move(sample_times), cfg.time_steps);

    const double dx = p.f1.spacing();
    const double sup_T = detail::sup_over_grid(p.field, p.T, p.f1);
    auto N = static_cast<std::size_t>(std::ceil(1.05 * cfg.grading * p.T * std::sqrt(sup_T) / (cfg.cfl * dx))) + 2;
    for (int attempt = 0;; ++attempt) {
        try {
            return detail::solve_on_mesh(p, cfg, sample_times, N);
        } catch (const CflViolation&) {
            if (attempt >= 8)
                throw;
            N *= 2;
        }
    }
}

/// sum_j (|u_t|^2 + a(t, x_{j+1/2}) |D+ u|^2) dx.
inline double discrete_energy(const CoefficientField& f, double t, const GridFunction& u, const GridFunction& v)
{
    const std::size_t M = u.size();
    const double dx = u.spacing();
    double e = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const std::size_t jp = j + 1 == M ? 0 : j + 1;
        const cplx du = (u[jp] - u[j]) / dx;
        e += std::norm(v[j]) + f.a(t, u.x(j) + 0.5 * dx) * std::norm(du);
    }
    return e * dx;
}

/// Quantity exactly conserved by the leapfrog with constant step h for a coefficient
/// a(x) frozen in t and no lower-order terms: v^T A^{-1} v + u^T S u - h^2/4 (S u)^T A (S u),
/// where S = -D+D- and A = diag(a).
inline double leapfrog_invariant(const CoefficientField& f, double t, const GridFunction& u, const GridFunction& v,
                                 double h)
{
    const std::size_t M = u.size();
    const double dx = u.spacing();
    double kinetic = 0.0, potential = 0.0, correction = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const std::size_t jp = j + 1 == M ? 0 : j + 1;
        const std::size_t jm = j == 0 ? M - 1 : j - 1;
        const double a = f.a(t, u.x(j));
        const cplx su = -(u[jp] - 2.0 * u[j] + u[jm]) / (dx * dx);
        kinetic += std::norm(v[j]) / a;
        potential += std::norm((u[jp] - u[j]) / dx);
        correction += a * std::norm(su);
    }
    return (kinetic + potential - 0.25 * h * h * correction) * dx;
}

/// Grid for the propagation-speed constant: t log-spaced on [t_min, T], x uniform on [-R, R].
struct GammaGrid {
    double t_min = 1e-8;
    double T = 1.0;
    std::size_t nt = 200;
    double radius = 50.0;
    std::size_t nx = 401;
};

struct GammaReport {
    double gamma = 0.0;
    double gamma_refined = 0.0; ///< grid doubled and t_min squared
    bool stable = false;        ///< relative change <= 2 %
    double t = 0.0;             ///< where the sup is attained
    double x = 0.0;
};

namespace detail {

inline GammaReport gamma_sup(const CoefficientField& f, const GammaGrid& g)
{
    const auto ts = logspace(g.t_min, g.T, g.nt);
    const auto xs = linspace(-g.radius, g.radius, g.nx);
    struct Best {
        double v = 0.0, x = 0.0;
    };
    const auto rows = parallel_map<Best>(ts.size(), [&](std::size_t i) {
        Best b;
        for (double x : xs) {
            const double v = std::sqrt(f.a(ts[i], x)) / (f.weights.omega(x) * log1p_inv(ts[i]));
            if (v > b.v) {
                b.v = v;
                b.x = x;
            }
        }
        return b;
    });
    GammaReport r;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (rows[i].v > r.gamma) {
            r.gamma = rows[i].v;
            r.t = ts[i];
            r.x = rows[i].x;
        }
    return r;
}

} // namespace detail

/// gamma = sup sqrt(a(t,x)) / (omega(x) log(1 + 1/t)) with a refinement study.
inline GammaReport compute_gamma(const CoefficientField& field, const GammaGrid& grid)
{
    require(grid.t_min > 0 && grid.t_min < grid.T, "compute_gamma: need 0 < t_min < T");
    GammaReport r = detail::gamma_sup(field, grid);
    GammaGrid fine = grid;
    fine.t_min = grid.t_min * grid.t_min;
    fine.nt = 2 * grid.nt;
    fine.nx = 2 * grid.nx - 1;
    r.gamma_refined = detail::gamma_sup(field, fine).gamma;
    r.stable = std::isfinite(r.gamma_refined) && std::fabs(r.gamma_refined - r.gamma) <= 0.02 * r.gamma;
    return r;
}

/// Vertex (x0, t0) and speed constant gamma of K(x0, t0) = {|x - x0| <= gamma omega(x) l(t0 - t) (t0 - t)},
/// l(s) = log(1 + 1/s).
struct ConeSpec {
    double x0 = 0.0;
    double t0 = 0.5;
    double gamma = 1.0;
};

/// Whether (t, x) lies in the backward cone K(x0, t0).
inline bool in_cone(const ConeSpec& c, const WeightSpec& omega, double t, double x)
{
    const double s = c.t0 - t;
    if (s < 0.0)
        return false;
    if (s == 0.0)
        return x == c.x0;
    return std::fabs(x - c.x0) <= c.gamma * omega(x) * log1p_inv(s) * s;
}

/// Support radius around x0 reached at time t from data in |x - x0| <= R0: the smallest
/// r >= R0 with r = R0 + gamma sup_{|y - x0| <= r} omega(y) t log(1 + 1/t). The sup is
/// taken over the candidate region since omega is evaluated inside the inequality.
inline double cone_radius(const ConeSpec& c, const WeightSpec& omega, double R0, double t)
{
    if (t <= 0.0)
        return R0;
    const double lt = t * log1p_inv(t);
    double r = R0;
    for (int it = 0; it < 500; ++it) {
        const double next = R0 + c.gamma * omega(std::fabs(c.x0) + r) * lt;
        if (std::fabs(next - r) <= 1e-14 * next)
            return next;
        r = next;
    }
    return r;
}

enum class ConeMode { support_growth, vanishing };

struct ConeOptions {
    double R0 = 0.1;
    ConeMode mode = ConeMode::support_growth;
    std::size_t snapshots = 20; ///< equispaced sample times in (0, t0]
};

struct ConeRow {
    double t = 0.0;
    double radius = 0.0; ///< support-growth radius (growth mode) or cone half-width at x0 (vanishing mode)
    double ratio = 0.0;  ///< relative L2 mass outside the radius (growth) or inside K (vanishing)
    double norm = 0.0;
};

struct ConeReport {
    std::vector<ConeRow> rows;
    double max_ratio = 0.0;
    double max_slope = 0.0; ///< largest gamma sup(omega) t log(1 + 1/t) used
    bool support_bound_ok = true;
    bool inconclusive = false;
    std::string note;
};

/// Runs the solver to t0 and measures how much L2 mass escapes the anisotropic cone.
inline ConeReport cone_check(const CauchyProblem& problem, const SchemeConfig& cfg, const ConeSpec& cone,
                             const ConeOptions& opt)
{
    require(cone.t0 > 0.0 && cone.t0 <= problem.T, "cone_check: t0 must lie in (0, T]");
    require(opt.snapshots >= 1, "cone_check: need at least one snapshot");
    std::vector<double> times;
    for (std::size_t i = 1; i <= opt.snapshots; ++i)
        times.push_back(cone.t0 * static_cast<double>(i) / static_cast<double>(opt.snapshots));
    if (opt.mode == ConeMode::vanishing)
        times.back() = cone.t0 * (1.0 - 1e-9);

    ConeReport rep;
    SolveResult sol;
    try {
        sol = solve(problem, cfg, times);
    } catch (const CflViolation& e) {
        rep.inconclusive = true;
        rep.note = e.what();
        return rep;
    }
    rep.support_bound_ok = !sol.support_tracked || sol.support_bound_ok;
    const auto& omega = problem.field.weights.omega;
    for (const auto& snap : sol.snapshots) {
        ConeRow row;
        row.t = snap.t;
        double total = 0.0, selected = 0.0;
        const double radius = opt.mode == ConeMode::support_growth ? cone_radius(cone, omega, opt.R0, snap.t) : 0.0;
        for (std::size_t j = 0; j < snap.u.size(); ++j) {
            const double x = snap.u.x(j);
            const double m = std::norm(snap.u[j]);
            total += m;
            const bool pick = opt.mode == ConeMode::support_growth ? std::fabs(x - cone.x0) > radius
                                                                   : in_cone(cone, omega, snap.t, x);
            if (pick)
                selected += m;
        }
        row.norm = std::sqrt(total * snap.u.spacing());
        row.ratio = total > 0.0 ? std::sqrt(selected / total) : 0.0;
        if (opt.mode == ConeMode::support_growth) {
            row.radius = radius;
            rep.max_slope = std::fmax(rep.max_slope, radius - opt.R0);
        } else {
            const double s = cone.t0 - snap.t;
            row.radius = cone.gamma * omega(cone.x0) * log1p_inv(s) * s;
        }
        rep.max_ratio = std::fmax(rep.max_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    return rep;
}

inline void to_json(nlohmann::json& j, const GammaReport& r)
{
    j = {{"gamma", r.gamma}, {"gamma_refined", r.gamma_refined}, {"stable", r.stable}, {"t", r.t}, {"x", r.x}};
}

inline void to_json(nlohmann::json& j, const ConeReport& r)
{
    j = {{"max_ratio", r.max_ratio},
         {"max_slope", r.max_slope},
         {"support_bound_ok", r.support_bound_ok},
         {"inconclusive", r.inconclusive},
         {"note", r.note}};
    auto rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"t", row.t}, {"radius", row.radius}, {"ratio", row.ratio}, {"norm", row.norm}});
    j["rows"] = rows;
}

} // namespace hyperlab
