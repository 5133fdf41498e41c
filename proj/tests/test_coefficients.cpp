#include <gtest/gtest.h>

#include <random>

#include <hyperlab/coefficients.hpp>

using namespace hyperlab;

namespace {

CoefficientField time_only(const TimeProfile& g)
{
    return separable_coefficient({WeightSpec::one(), WeightSpec::one()}, g);
}

CoefficientGrid fit_grid()
{
    CoefficientGrid g;
    g.t_min = 1e-6;
    g.nt = 200;
    g.radius = 5.0;
    g.nx = 11;
    return g;
}

} // namespace

TEST(ExampleCoefficient, FrozenValue)
{
    const auto f = example_coefficient(0.5, 0.5);
    EXPECT_NEAR(f.a(1.0, 0.0), 4.6022743658903254, 1e-13);
    EXPECT_EQ(f.weights.omega, WeightSpec::bracket(0.5));
    EXPECT_EQ(f.weights.phi, WeightSpec::bracket(0.5));
}

TEST(ExampleCoefficient, LowerBoundAndKappaIndependenceAtOrigin)
{
    for (double k1 : {0.0, 0.2, 0.5})
        for (double k2 : {0.5, 0.8, 1.0})
            EXPECT_GE(example_coefficient(k1, k2).a(1.0, 0.0), 1.0);
    const double base = example_coefficient(0.0, 0.5).a(0.3, 0.0);
    EXPECT_DOUBLE_EQ(example_coefficient(0.4, 0.5).a(0.3, 0.0), base);
}

TEST(ExampleCoefficient, RejectsParameterOrder)
{
    EXPECT_THROW(example_coefficient(0.6, 0.5), ValidationError);
    EXPECT_THROW(example_coefficient(0.0, 0.0), ValidationError);
    EXPECT_THROW(example_coefficient(0.5, 1.2), ValidationError);
}

TEST(CoefficientProperties, ClosedFormTimeDerivativeMatchesFiniteDifferences)
{
    const WeightPair pair{WeightSpec::bracket(0.25), WeightSpec::bracket(0.5)};
    const std::vector<CoefficientField> fields{
        example_coefficient(0.5, 0.5),
        example_coefficient(0.25, 1.0),
        separable_coefficient(pair, TimeProfile::log_blowup()),
        separable_coefficient(pair, TimeProfile::log_squared()),
        separable_coefficient(pair, TimeProfile::power(-0.5)),
        separable_coefficient(pair, TimeProfile::oscillating_log()),
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lt(std::log(1e-3), 0.0), ux(-30.0, 30.0);
    for (const auto& f : fields)
        for (int i = 0; i < 100; ++i) {
            const double t = std::exp(lt(rng)), x = ux(rng);
            const double h = 1e-5 * t;
            const double fd = (f.a(t + h, x) - f.a(t - h, x)) / (2 * h);
            EXPECT_NEAR(f.a_t(t, x), fd, 1e-6 * std::fmax(std::fabs(fd), 1.0)) << f.name << " t=" << t << " x=" << x;
        }
}

TEST(Ellipticity, ExactRatios)
{
    const WeightPair pair{WeightSpec::bracket(0.5), WeightSpec::bracket(1.0)};
    CoefficientGrid g;
    EXPECT_NEAR(estimate_ellipticity(separable_coefficient(pair, TimeProfile::constant(1.0)), g).C0, 1.0, 1e-14);
    EXPECT_NEAR(estimate_ellipticity(separable_coefficient(pair, TimeProfile::constant(1.0), 3.0), g).C0, 3.0,
                1e-14);
    const auto ex = estimate_ellipticity(example_coefficient(0.5, 0.5), g);
    EXPECT_TRUE(ex.pass);
    EXPECT_GE(ex.C0, 1.0);
    EXPECT_LE(ex.C0, 3.0);
}

TEST(Ellipticity, MonotoneUnderNonnegativeAdditions)
{
    const auto base = example_coefficient(0.5, 0.5);
    auto bumped = base;
    bumped.a = [a = base.a, w = base.weights.omega](double t, double x) {
        return a(t, x) + w(x) * w(x) * (1.0 + std::sin(x) * std::sin(x)) * std::log1p(1.0 / t);
    };
    CoefficientGrid g;
    EXPECT_GE(estimate_ellipticity(bumped, g).C0, estimate_ellipticity(base, g).C0);
}

TEST(SingularityFits, LogBlowupDerivativeExponent)
{
    const auto r = fit_singularity_orders(time_only(TimeProfile::log_blowup()), fit_grid());
    EXPECT_NEAR(r.dt_fit.exponent, 1.0, 0.05);
    EXPECT_EQ(r.dt_fit.status, FitStatus::ok);
    EXPECT_NEAR(r.dt_fit.exponent, 1.0222, 5e-4); // least-squares slope on [1e-6, 1]
}

TEST(SingularityFits, PowerLawExponents)
{
    const auto r = fit_singularity_orders(time_only(TimeProfile::power(0.3)), fit_grid());
    EXPECT_NEAR(r.dt_fit.exponent, 0.7, 0.02);
    for (double p : {0.2, 0.5, 0.8}) {
        const auto s = fit_singularity_orders(time_only(TimeProfile::power(-p)), fit_grid());
        EXPECT_NEAR(s.a_fit.exponent, p, 0.02) << p;
        EXPECT_NEAR(s.dt_fit.exponent, p + 1.0, 0.02) << p;
        EXPECT_GT(s.dt_fit.r_squared, 0.999);
    }
}

TEST(SingularityFits, ConstantInTime)
{
    const auto r = fit_singularity_orders(time_only(TimeProfile::constant(2.0)), fit_grid());
    EXPECT_EQ(r.dt_fit.status, FitStatus::zero);
    EXPECT_EQ(r.dt_fit.exponent, 0.0);
    EXPECT_NEAR(r.C0, 2.0, 1e-14);
}

TEST(SingularityFits, NonMonotoneDataIsFlagged)
{
    std::vector<double> ts = logspace(1e-4, 1, 50), q(50);
    for (std::size_t i = 0; i < ts.size(); ++i)
        q[i] = 2.0 + std::sin(5.0 * std::log(ts[i]));
    EXPECT_EQ(fit_power_law(ts, q).status, FitStatus::non_monotone);
    std::vector<double> z(50, 0.0);
    z[3] = 1.0;
    EXPECT_EQ(fit_power_law(ts, z).status, FitStatus::degenerate);
}

TEST(SingularityFits, ExampleCoefficientReport)
{
    CoefficientGrid g;
    g.nt = 40;
    g.nx = 101;
    const auto r = fit_singularity_orders(example_coefficient(0.5, 0.5), g);
    EXPECT_GE(r.C0, 1.0);
    EXPECT_NEAR(r.dt_fit.exponent, 1.0, 0.05);
    EXPECT_TRUE(std::isfinite(r.delta1));
    EXPECT_TRUE(std::isfinite(r.log_form_constants[0]));
    const nlohmann::json j = r;
    EXPECT_TRUE(j.contains("delta2"));
}

TEST(LogBlowup, ExactAndDivergent)
{
    const WeightPair pair{WeightSpec::bracket(0.5), WeightSpec::bracket(0.5)};
    CoefficientGrid g;
    const auto ok = check_log_blowup(separable_coefficient(pair, TimeProfile::log_blowup()), g);
    EXPECT_TRUE(ok.pass);
    EXPECT_NEAR(ok.sup, 1.0, 1e-12);
    const auto bad = check_log_blowup(separable_coefficient(pair, TimeProfile::power(-0.5)), g);
    EXPECT_FALSE(bad.pass);
    EXPECT_TRUE(bad.diverging);
}

TEST(LogBlowup, ExampleCoefficientMatchesGridOracle)
{
    CoefficientGrid g;
    g.t_min = 1e-6;
    g.nt = 400;
    g.radius = 50.0;
    g.nx = 2001;
    const auto r = check_log_blowup(example_coefficient(0.5, 0.5), g);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.sup, 6.639678404480372, 1e-9);
    EXPECT_LE(r.sup, 3.0 + 3.0 / std::log(2.0));
}

TEST(LowerOrder, FittedConstant)
{
    auto f = separable_coefficient({WeightSpec::bracket(0.5), WeightSpec::bracket(1.0)}, TimeProfile::constant(1.0));
    CoefficientGrid g;
    EXPECT_EQ(check_lower_order(f, g), 0.0);
    f.b1 = [](double, double x) { return 0.5 * japanese_bracket(x); };
    const double c = check_lower_order(f, g);
    EXPECT_GT(c, 0.5);
    EXPECT_TRUE(std::isfinite(c));
}
