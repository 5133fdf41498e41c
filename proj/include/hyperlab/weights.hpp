#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "grids.hpp"

namespace hyperlab {

/// <x> = (1 + x^2)^{1/2}
inline double japanese_bracket(double x) { return std::hypot(1.0, x); }

enum class WeightKind { bracket, one };

/// A structure function of growth in x: either <x>^kappa or the constant 1.
struct WeightSpec {
    WeightKind kind = WeightKind::one;
    double kappa = 0.0;

    static WeightSpec bracket(double kappa) { return {WeightKind::bracket, kappa}; }
    static WeightSpec one() { return {WeightKind::one, 0.0}; }

    /// Exponent of the power law the weight follows; 0 for the constant weight.
    double exponent() const { return kind == WeightKind::one ? 0.0 : kappa; }

    double operator()(double x) const
    {
        if (kind == WeightKind::one)
            return 1.0;
        return std::pow(1.0 + x * x, 0.5 * kappa);
    }

    double derivative(double x) const
    {
        if (kind == WeightKind::one)
            return 0.0;
        return kappa * x * std::pow(1.0 + x * x, 0.5 * kappa - 1.0);
    }

    double second_derivative(double x) const
    {
        if (kind == WeightKind::one)
            return 0.0;
        const double b2 = 1.0 + x * x;
        return kappa * std::pow(b2, 0.5 * kappa - 1.0)
               + kappa * (kappa - 2.0) * x * x * std::pow(b2, 0.5 * kappa - 2.0);
    }

    std::string describe() const
    {
        if (kind == WeightKind::one)
            return "1";
        return "<x>^" + std::to_string(kappa);
    }

    bool operator==(const WeightSpec&) const = default;
};

inline double eval_weight(const WeightSpec& w, double x) { return w(x); }

/// (omega, Phi): omega governs the size of the coefficients, Phi the metric scale in x.
struct WeightPair {
    WeightSpec omega = WeightSpec::one();
    WeightSpec phi = WeightSpec::one();
};

inline void validate_weight(const WeightSpec& w, const std::string& name)
{
    if (w.kind == WeightKind::bracket)
        require(w.kappa >= 0.0 && w.kappa <= 1.0 && std::isfinite(w.kappa),
                name + ": exponent must lie in [0,1] (sub-linear growth), got " + std::to_string(w.kappa));
}

struct AxiomConstants {
    double r = 0.0;
    double s = 0.0;
    double C = 0.0;
};

struct AxiomWitness {
    double x = 0.0;
    double y = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string weight; ///< "omega" or "phi"
};

struct AxiomReport {
    std::string axiom;
    bool pass = true;
    std::size_t samples = 0;
    std::size_t violations = 0;
    AxiomConstants constants;
    std::optional<AxiomWitness> witness; ///< worst violating sample, if any
};

/// Where the axioms are sampled. Single-point axioms use a deterministic grid
/// (uniform plus log-spaced magnitudes); pair axioms use seeded random pairs.
struct AxiomSampling {
    double radius = 1e3;
    std::size_t grid_points = 4001;
    std::size_t random_pairs = 10000;
    std::uint64_t seed = 1;
};

namespace detail {

constexpr double axiom_rounding_tol = 1e-12;

/// Tracks the worst violation; on equal excess the sample with smaller |x| wins.
struct ViolationTracker {
    std::size_t count = 0;
    double worst_excess = -1.0;
    std::optional<AxiomWitness> worst;

    void record(double excess, const AxiomWitness& w)
    {
        ++count;
        if (excess > worst_excess
            || (excess == worst_excess && worst && std::fabs(w.x) < std::fabs(worst->x))) {
            worst_excess = excess;
            worst = w;
        }
    }

    /// Checks lhs <= rhs up to rounding; records the relative excess on failure.
    void check_le(double lhs, double rhs, AxiomWitness w)
    {
        const double scale = std::fmax(std::fabs(rhs), 1.0);
        if (lhs > rhs + axiom_rounding_tol * scale) {
            w.lhs = lhs;
            w.rhs = rhs;
            record((lhs - rhs) / scale, w);
        }
    }
};

inline std::vector<double> axiom_grid(const AxiomSampling& s)
{
    std::vector<double> xs = linspace(-s.radius, s.radius, std::max<std::size_t>(s.grid_points, 2));
    const std::size_t nlog = std::max<std::size_t>(s.grid_points / 4, 2);
    for (double m : logspace(1e-6, s.radius, nlog)) {
        xs.push_back(m);
        xs.push_back(-m);
    }
    xs.push_back(0.0);
    return xs;
}

struct PairSampler {
    std::mt19937_64 rng;
    double radius;

    PairSampler(std::uint64_t seed, double r) : rng(seed), radius(r) {}

    /// Half the draws uniform on [-R, R], half log-uniform in magnitude so small |x| is covered.
    double point()
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double u = unit(rng);
        const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        if (u < 0.5)
            return sign * radius * unit(rng);
        const double lo = std::log(1e-6), hi = std::log(radius);
        return sign * std::exp(lo + (hi - lo) * unit(rng));
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

inline AxiomReport finish(std::string name, std::size_t samples, const ViolationTracker& t, AxiomConstants c)
{
    AxiomReport r;
    r.axiom = std::move(name);
    r.samples = samples;
    r.violations = t.count;
    r.pass = t.count == 0;
    r.constants = c;
    r.witness = t.worst;
    return r;
}

struct NamedWeight {
    const WeightSpec* w;
    const char* name;
};

} // namespace detail

/// Samples every structure axiom for both weights of the pair and reports fitted constants.
/// Order of the returned reports: sl, sv, tp, sa, Phi, scale, dominance.
inline std::vector<AxiomReport> check_weight_axioms(const WeightPair& pair, const AxiomSampling& sampling)
{
    validate_weight(pair.omega, "omega");
    validate_weight(pair.phi, "phi");
    require(sampling.radius > 0, "axiom sampling radius must be positive");
    require(sampling.random_pairs >= 1, "axiom sampling needs at least one random pair");

    using detail::NamedWeight;
    using detail::ViolationTracker;

    const NamedWeight weights[2] = {{&pair.omega, "omega"}, {&pair.phi, "phi"}};
    const auto grid = detail::axiom_grid(sampling);
    std::vector<AxiomReport> reports;

    // (sl) 1 <= w(x) <= C (1 + |x|), declared C = 1.
    {
        ViolationTracker t;
        double fitted = 0.0;
        for (auto [w, name] : weights)
            for (double x : grid) {
                const double v = (*w)(x);
                fitted = std::fmax(fitted, v / (1.0 + std::fabs(x)));
                t.check_le(1.0, v, {x, 0.0, 0, 0, name});
                t.check_le(v, 1.0 + std::fabs(x), {x, 0.0, 0, 0, name});
            }
        reports.push_back(detail::finish("sl", 2 * grid.size(), t, {0.0, 0.0, fitted}));
    }

    // (sv) |x - y| <= r w(y)  =>  w(x)/w(y) in [1/C, C], with r = 1/2 and declared C = 2.
    {
        constexpr double r = 0.5, declared = 2.0;
        ViolationTracker t;
        double fitted = 1.0;
        detail::PairSampler rng(sampling.seed ^ 0x5356ULL, sampling.radius);
        for (auto [w, name] : weights)
            for (std::size_t i = 0; i < sampling.random_pairs; ++i) {
                const double y = rng.point();
                const double x = y + r * (*w)(y) * rng.uniform(-1.0, 1.0);
                const double ratio = (*w)(x) / (*w)(y);
                fitted = std::fmax(fitted, std::fmax(ratio, 1.0 / ratio));
                t.check_le(ratio, declared, {x, y, 0, 0, name});
                t.check_le(1.0 / declared, ratio, {x, y, 0, 0, name});
            }
        reports.push_back(detail::finish("sv", 2 * sampling.random_pairs, t, {r, 0.0, fitted}));
    }

    // (tp) w(x + y) <= C w(x) (1 + |y|)^s with declared C = 1 and s = the larger exponent.
    {
        const double s = std::fmax(pair.omega.exponent(), pair.phi.exponent());
        ViolationTracker t;
        double fitted_c = 0.0, fitted_s = 0.0;
        detail::PairSampler rng(sampling.seed ^ 0x5450ULL, sampling.radius);
        for (auto [w, name] : weights)
            for (std::size_t i = 0; i < sampling.random_pairs; ++i) {
                const double x = rng.point(), y = rng.point();
                const double lhs = (*w)(x + y);
                const double base = (*w)(x);
                const double grow = 1.0 + std::fabs(y);
                fitted_c = std::fmax(fitted_c, lhs / (base * std::pow(grow, s)));
                if (lhs > base)
                    fitted_s = std::fmax(fitted_s, std::log(lhs / base) / std::log(grow));
                t.check_le(lhs, base * std::pow(grow, s), {x, y, 0, 0, name});
            }
        reports.push_back(detail::finish("tp", 2 * sampling.random_pairs, t, {0.0, fitted_s, fitted_c}));
    }

    // (sa) |w(x) - w(y)| <= w(x + y) <= w(x) + w(y).
    {
        ViolationTracker t;
        double fitted = 0.0;
        detail::PairSampler rng(sampling.seed ^ 0x5341ULL, sampling.radius);
        for (auto [w, name] : weights)
            for (std::size_t i = 0; i < sampling.random_pairs; ++i) {
                const double x = rng.point(), y = rng.point();
                const double wx = (*w)(x), wy = (*w)(y), wxy = (*w)(x + y);
                fitted = std::fmax(fitted, wxy / (wx + wy));
                t.check_le(std::fabs(wx - wy), wxy, {x, y, 0, 0, name});
                t.check_le(wxy, wx + wy, {x, y, 0, 0, name});
            }
        reports.push_back(detail::finish("sa", 2 * sampling.random_pairs, t, {0.0, 0.0, fitted}));
    }

    // (Phi) |D^b w(x)| <= C w(x) <x>^{-b}, b = 1, 2, by central differences; declared C = 1.
    {
        constexpr double fd_slack = 1e-6;
        ViolationTracker t;
        double fitted = 0.0;
        for (auto [w, name] : weights)
            for (double x : grid) {
                const double bx = japanese_bracket(x);
                const double h = std::fmax(1e-4, 1e-4 * bx);
                const double wp = (*w)(x + h), w0 = (*w)(x), wm = (*w)(x - h);
                const double d1 = (wp - wm) / (2.0 * h);
                const double d2 = (wp - 2.0 * w0 + wm) / (h * h);
                const double r1 = std::fabs(d1) * bx / w0;
                const double r2 = std::fabs(d2) * bx * bx / w0;
                fitted = std::fmax(fitted, std::fmax(r1, r2));
                t.check_le(r1, 1.0 + fd_slack, {x, 1.0, 0, 0, name});
                t.check_le(r2, 1.0 + fd_slack, {x, 2.0, 0, 0, name});
            }
        reports.push_back(detail::finish("Phi", 4 * grid.size(), t, {0.0, 0.0, fitted}));
    }

    // (scale) a w(x) <= w(a x) for a in [0,1]; w(a x) <= a w(x) for a > 1.
    {
        ViolationTracker t;
        detail::PairSampler rng(sampling.seed ^ 0x5343ULL, sampling.radius);
        for (auto [w, name] : weights)
            for (std::size_t i = 0; i < sampling.random_pairs; ++i) {
                const double x = rng.point();
                const double small = rng.uniform(0.0, 1.0);
                const double large = rng.uniform(1.0, 10.0);
                t.check_le(small * (*w)(x), (*w)(small * x), {x, small, 0, 0, name});
                t.check_le((*w)(large * x), large * (*w)(x), {x, large, 0, 0, name});
            }
        reports.push_back(detail::finish("scale", 4 * sampling.random_pairs, t, {0.0, 0.0, 1.0}));
    }

    // omega <= Phi
    {
        ViolationTracker t;
        double fitted = 0.0;
        detail::PairSampler rng(sampling.seed ^ 0x444FULL, sampling.radius);
        auto check = [&](double x) {
            const double o = pair.omega(x), p = pair.phi(x);
            fitted = std::fmax(fitted, o / p);
            t.check_le(o, p, {x, 0.0, 0, 0, "omega"});
        };
        for (double x : grid)
            check(x);
        for (std::size_t i = 0; i < sampling.random_pairs; ++i)
            check(rng.point());
        reports.push_back(detail::finish("dominance", grid.size() + sampling.random_pairs, t, {0.0, 0.0, fitted}));
    }

    return reports;
}

inline void to_json(nlohmann::json& j, const WeightSpec& w)
{
    if (w.kind == WeightKind::one)
        j = {{"kind", "one"}};
    else
        j = {{"kind", "bracket"}, {"kappa", w.kappa}};
}

inline void to_json(nlohmann::json& j, const AxiomReport& r)
{
    j = {{"axiom", r.axiom},
         {"pass", r.pass},
         {"samples", r.samples},
         {"violations", r.violations},
         {"constants", {{"r", r.constants.r}, {"s", r.constants.s}, {"C", r.constants.C}}}};
    if (r.witness)
        j["witness"] = {{"x", r.witness->x},
                        {"y", r.witness->y},
                        {"lhs", r.witness->lhs},
                        {"rhs", r.witness->rhs},
                        {"weight", r.witness->weight}};
    else
        j["witness"] = nullptr;
}

inline void to_json(nlohmann::json& j, const AxiomSampling& s)
{
    j = {{"radius", s.radius}, {"grid_points", s.grid_points}, {"random_pairs", s.random_pairs}, {"seed", s.seed}};
}

} // namespace hyperlab
