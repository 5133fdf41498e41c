#include <gtest/gtest.h>

#include <hyperlab/phasespace.hpp>

using namespace hyperlab;

namespace {
PhaseParams unit_bracket(double N = 1.0, double k = 1.0)
{
    PhaseParams p;
    p.k = k;
    p.N = N;
    p.pair = {WeightSpec::bracket(1.0), WeightSpec::bracket(1.0)};
    return p;
}
} // namespace

TEST(XiBracket, Values)
{
    EXPECT_EQ(xi_bracket(0.0, 1.0), 1.0);
    EXPECT_EQ(xi_bracket(0.0, 2.0), 2.0);
    EXPECT_NEAR(xi_bracket(std::sqrt(3.0), 1.0), 2.0, 1e-15);
    EXPECT_THROW(xi_bracket(1.0, 0.5), ValidationError);
    for (double xi : {-7.0, 0.0, 3.0, 1e6})
        for (double k : {1.0, 2.5, 10.0}) {
            EXPECT_GE(xi_bracket(xi, k), k);
            EXPECT_GE(xi_bracket(xi, k), std::fabs(xi));
        }
}

TEST(Planck, Values)
{
    const auto p = unit_bracket();
    EXPECT_EQ(planck_h(0, 0, p), 1.0);
    EXPECT_NEAR(planck_h(std::sqrt(3.0), std::sqrt(3.0), p), 0.25, 1e-15);
}

TEST(Planck, StrongUncertaintyBound)
{
    // h <= C (1 + |x| + |xi|)^{-1/2}; the fitted C must not grow with the sampled radius.
    const auto p = unit_bracket();
    auto sup_to = [&](double R) {
        double sup = 0.0;
        for (double x = 0.0; x < R; x = 1.05 * x + 0.001)
            for (double xi = 0.0; xi < R; xi = 1.05 * xi + 0.001)
                sup = std::fmax(sup, planck_h(x, xi, p) * std::sqrt(1.0 + x + xi));
        return sup;
    };
    const double c1 = sup_to(1e2), c2 = sup_to(1e5);
    EXPECT_LT(c1, 1.2);
    EXPECT_NEAR(c2, c1, 1e-12);
}

TEST(Planck, NonincreasingInMagnitudes)
{
    const auto p = unit_bracket(1.0, 2.0);
    for (double x = 0.0; x < 100; x += 0.7)
        for (double xi = 0.0; xi < 100; xi += 0.9) {
            EXPECT_LE(planck_h(x + 0.5, xi, p), planck_h(x, xi, p));
            EXPECT_LE(planck_h(x, xi + 0.5, p), planck_h(x, xi, p));
            EXPECT_LE(planck_h(x, xi, p), 1.0);
        }
}

TEST(Separatrix, Values)
{
    const auto p = unit_bracket(2.0);
    // Phi(sqrt 3) <0>_1 ... choose Phi <xi> = 4 with x = xi = sqrt 3.
    EXPECT_NEAR(separatrix_time(std::sqrt(3.0), std::sqrt(3.0), p), 0.5, 1e-15);
    EXPECT_EQ(separatrix_time(0, 0, unit_bracket()), 1.0);
    EXPECT_NEAR(separatrix_time(3, 4, unit_bracket(4.0)), 2.0 * separatrix_time(3, 4, unit_bracket(2.0)), 1e-15);
    for (double x : {0.0, 1.0, 50.0})
        for (double xi : {0.0, 2.0, 300.0})
            EXPECT_NEAR(separatrix_time(x, xi, p) * phase_scale(x, xi, p), p.N, 1e-14 * p.N);
}

TEST(Zones, BoundaryIsInterior)
{
    const auto p = unit_bracket(2.0);
    const double x = std::sqrt(3.0), xi = std::sqrt(3.0); // separatrix 0.5
    EXPECT_EQ(classify_zone(0.4, x, xi, p), ZoneLabel::Interior);
    EXPECT_EQ(classify_zone(separatrix_time(x, xi, p), x, xi, p), ZoneLabel::Interior);
    EXPECT_EQ(classify_zone(0.6, x, xi, p), ZoneLabel::Exterior);
    EXPECT_THROW(classify_zone(-0.1, x, xi, p), ValidationError);
    EXPECT_EQ(to_string(ZoneLabel::Exterior), "exterior");
}

TEST(Zones, TimeMonotone)
{
    const auto p = unit_bracket(1.5, 3.0);
    for (double x : {0.0, 2.0, 40.0})
        for (double xi : {0.0, 5.0, 700.0}) {
            bool seen_exterior = false;
            for (double t = 0.0; t <= 1.0; t += 1e-3) {
                const auto z = classify_zone(t, x, xi, p);
                if (seen_exterior) {
                    EXPECT_EQ(z, ZoneLabel::Exterior);
                }
                seen_exterior = seen_exterior || z == ZoneLabel::Exterior;
            }
        }
}

TEST(PhaseParamsValidation, RejectsBadParameters)
{
    PhaseParams p;
    p.k = 0.9;
    EXPECT_THROW(p.validate(), ValidationError);
    p.k = 1.0;
    p.N = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
}
