#include <gtest/gtest.h>

#include <hyperlab/excision.hpp>

using namespace hyperlab;

namespace {

PhaseParams params2(double k = 1.0)
{
    PhaseParams p;
    p.k = k;
    p.N = 2.0;
    return p;
}

const WeightPair kPair{WeightSpec::bracket(0.5), WeightSpec::bracket(1.0)};

/// Time that puts (x, xi) at cutoff argument s.
double time_at(const ExcisedSymbol& sym, double s, double x, double xi) { return s / phase_scale(x, xi, sym.params()); }

PhaseGrid small_grid()
{
    PhaseGrid g;
    g.nt = 30;
    g.n = 8;
    g.x_radius = 1e2;
    g.xi_radius = 1e2;
    return g;
}

} // namespace

TEST(Excise, BranchValues)
{
    const auto sym = excise(example_coefficient(0.5, 1.0), params2());
    for (double x : {0.0, 3.0, 40.0})
        for (double xi : {0.0, 2.0, 500.0}) {
            double t = time_at(sym, 0.5, x, xi);
            EXPECT_DOUBLE_EQ(sym(t, x, xi), sym.replacement(x, xi));
            t = time_at(sym, 4.0, x, xi);
            EXPECT_DOUBLE_EQ(sym(t, x, xi), sym.original(t, x, xi));
            EXPECT_EQ(sym.difference(t, x, xi), 0.0);
            t = time_at(sym, 1.5, x, xi);
            const double lo = std::fmin(sym.original(t, x, xi), sym.replacement(x, xi));
            const double hi = std::fmax(sym.original(t, x, xi), sym.replacement(x, xi));
            EXPECT_GE(sym(t, x, xi), lo * (1 - 1e-15));
            EXPECT_LE(sym(t, x, xi), hi * (1 + 1e-15));
        }
}

TEST(Excise, PairFollowsField)
{
    PhaseParams p = params2();
    p.pair = {WeightSpec::one(), WeightSpec::one()};
    const auto sym = excise(example_coefficient(0.25, 0.75), p);
    EXPECT_EQ(sym.params().pair.omega, WeightSpec::bracket(0.25));
}

TEST(Tau, ExactSquares)
{
    for (double c : {1.0, 4.0}) {
        const auto sym = excise(separable_coefficient(kPair, TimeProfile::constant(c)), params2(2.0));
        for (double t : {1e-6, 0.1, 1.0})
            for (double x : {0.0, 10.0})
                for (double xi : {0.0, 7.0}) {
                    const double expect = std::sqrt(c) * kPair.omega(x) * xi_bracket(xi, 2.0);
                    const double s = sym.cutoff_argument(t, x, xi);
                    if (s >= 2.0) {
                        EXPECT_NEAR(tau(sym, t, x, xi), expect, 1e-14 * expect);
                    }
                    if (s <= 1.0) {
                        EXPECT_NEAR(tau(sym, t, x, xi), kPair.omega(x) * xi_bracket(xi, 2.0), 1e-14 * expect);
                    }
                }
    }
}

TEST(Tau, NonpositiveSymbolFlagged)
{
    auto f = separable_coefficient(kPair, TimeProfile::constant(1.0));
    f.a = [](double, double) { return -1.0; };
    const auto sym = excise(f, params2());
    EXPECT_THROW(tau(sym, 10.0, 0.0, 0.0), NumericalError);
}

TEST(Tau, ExampleEllipticityRatio)
{
    const auto sym = excise(example_coefficient(0.5, 0.5), params2());
    EXPECT_GE(ellipticity_ratio_inf(sym, small_grid()), 1.0 - 1e-12);
}

TEST(Tau, TimeDerivativeMatchesFiniteDifferences)
{
    const auto sym = excise(example_coefficient(0.5, 1.0), params2());
    for (double x : {0.0, 5.0})
        for (double xi : {0.0, 30.0})
            for (double s : {0.5, 1.2, 1.5, 1.9, 3.0}) {
                const double t = time_at(sym, s, x, xi);
                const double h = 1e-6 * t;
                const double fd = (sym(t + h, x, xi) - sym(t - h, x, xi)) / (2 * h);
                EXPECT_NEAR(sym.dt(t, x, xi), fd, 1e-5 * std::fmax(1.0, std::fabs(fd))) << x << " " << xi << " " << s;
            }
}

TEST(ExcisionProperties, LowerBoundAndExteriorIdentity)
{
    const auto field = example_coefficient(0.5, 0.5);
    const auto sym = excise(field, params2());
    const double C0 = estimate_ellipticity(field, CoefficientGrid{}).C0;
    const auto g = small_grid();
    for (double t : g.times())
        for (double x : g.xs())
            for (double xi : g.xis()) {
                EXPECT_GE(sym(t, x, xi), std::fmin(C0, 1.0) * sym.replacement(x, xi) * (1 - 1e-12));
                if (classify_zone(t, x, xi, sym.params()) == ZoneLabel::Exterior) {
                    EXPECT_EQ(sym.difference(t, x, xi), 0.0);
                }
            }
}

TEST(Majorants, IdentityExcisionHasZeroC1)
{
    const auto m = build_majorants(separable_coefficient(kPair, TimeProfile::constant(1.0)), params2(), small_grid(),
                                   {false, false});
    EXPECT_EQ(m.C1, 0.0);
    EXPECT_EQ(m.psi0(1e-3, 0.0, 0.0), 0.0);
}

TEST(Majorants, Psi0SupportAndPositivity)
{
    const auto m = build_majorants(example_coefficient(0.5, 0.5), params2(), small_grid(), {false, false});
    EXPECT_GT(m.C1, 0.0);
    EXPECT_GT(m.C2, 0.0);
    EXPECT_TRUE(m.bounded);
    for (double x : {0.0, 2.0, 90.0})
        for (double xi : {0.0, 1.0, 80.0}) {
            const double S = m.scale(x, xi);
            EXPECT_EQ(m.psi0(2.0 / S, x, xi), 0.0);
            EXPECT_EQ(m.psi0(5.0 / S, x, xi), 0.0);
            EXPECT_GT(m.psi0(0.5 / S, x, xi), 0.0);
            for (double s : {0.1, 1.0, 1.7, 2.5, 10.0}) {
                EXPECT_GE(m.psi0(s / S, x, xi), 0.0);
                EXPECT_GE(m.psi1(s / S, x, xi), 0.0);
                EXPECT_GE(m.psi_tilde(s / S, x, xi), 0.0);
            }
        }
}

TEST(Majorants, DominateExcisionErrorOnGrid)
{
    const auto field = example_coefficient(0.5, 0.5);
    const auto g = small_grid();
    const auto m = build_majorants(field, params2(), g, {false, false});
    const auto sym = excise(field, params2());
    for (double t : g.times())
        for (double x : g.xs())
            for (double xi : g.xis()) {
                const double wb = field.weights.omega(x) * xi_bracket(xi, 1.0);
                EXPECT_LE(std::fabs(sym.difference(t, x, xi)), m.psi0(t, x, xi) * wb * (1 + 1e-12));
                EXPECT_LE(std::fabs(tau_dt(sym, t, x, xi)), m.psi1(t, x, xi) * wb * (1 + 1e-12));
            }
}

TEST(Majorants, RejectsFieldFailingLogBlowup)
{
    const auto f = separable_coefficient(kPair, TimeProfile::power(-0.5));
    EXPECT_THROW(build_majorants(f, params2(), small_grid()), ValidationError);
}

TEST(Majorants, TildeVariantsAndJson)
{
    auto opt = MajorantOptions{};
    opt.kappa_points = 5;
    const auto m = build_majorants(example_coefficient(0.5, 0.5), params2(), small_grid(), opt);
    EXPECT_TRUE(std::isfinite(m.kappa00) && m.kappa00 > 0.0);
    EXPECT_TRUE(std::isfinite(m.kappa10));
    EXPECT_TRUE(std::isfinite(m.kappa01));
    // psi~0 keeps its support up to s = 6 rather than 2.
    const double S = m.scale(1.0, 1.0);
    EXPECT_GT(m.psi_tilde0(4.0 / S, 1.0, 1.0), 0.0);
    EXPECT_EQ(m.psi_tilde0(6.0 / S, 1.0, 1.0), 0.0);
    auto sym = m;
    sym.symmetric_tilde = true;
    EXPECT_GE(sym.psi_tilde1(4.0 / S, 1.0, 1.0), 0.0);
    EXPECT_NE(sym.psi_tilde1(2.5 / S, 1.0, 1.0), m.psi_tilde1(2.5 / S, 1.0, 1.0));
    const nlohmann::json j = m;
    EXPECT_TRUE(j.at("grid").contains("xi_radius"));
}

TEST(IntegralBound, Psi0OnlyFrozenRatios)
{
    MajorantSet m;
    m.params.k = 1.0;
    m.params.pair = {WeightSpec::bracket(0.5), WeightSpec::bracket(1.0)};
    m.C1 = 1.0;
    const auto b2 = integral_log_bound(m, 0.0, 0.0, 2.0);
    EXPECT_TRUE(b2.converged);
    EXPECT_NEAR(b2.ratio, 2.4221538811080095, 1e-9);
    EXPECT_LE(b2.ratio, 4.0);
    EXPECT_NEAR(integral_log_bound(m, 0.0, 0.0, 1.0).ratio, 2.0, 1e-9);
    m.C1 = 0.0;
    EXPECT_EQ(integral_log_bound(m, 3.0, 4.0, 1.0).ratio, 0.0);
}

TEST(IntegralBound, UniformOverLogGrid)
{
    const auto m = build_majorants(example_coefficient(0.5, 1.0), params2(), small_grid(), {false, false});
    const auto xs = nonnegative_log_grid(1e-2, 1e3, 8);
    const auto sup = integral_log_bound_sup(m, xs, xs, 1.0);
    EXPECT_TRUE(sup.converged);
    EXPECT_TRUE(std::isfinite(sup.value));
    const auto xs2 = nonnegative_log_grid(1e-2, 1e3, 16);
    const auto sup2 = integral_log_bound_sup(m, xs2, xs2, 1.0);
    EXPECT_NEAR(sup2.value, sup.value, 0.05 * sup.value);
    const auto tilde = integral_log_bound_sup(m, xs, xs, 1.0, MajorantFamily::psi_tilde);
    EXPECT_TRUE(std::isfinite(tilde.value));
}
