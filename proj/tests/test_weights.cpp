#include <gtest/gtest.h>

#include <random>

#include <hyperlab/weights.hpp>

using namespace hyperlab;

namespace {

const AxiomReport& find(const std::vector<AxiomReport>& rs, const std::string& id)
{
    for (const auto& r : rs)
        if (r.axiom == id)
            return r;
    throw std::runtime_error("missing axiom " + id);
}

AxiomSampling quick(double radius = 100.0)
{
    AxiomSampling s;
    s.radius = radius;
    s.grid_points = 801;
    s.random_pairs = 10000;
    return s;
}

} // namespace

TEST(EvalWeight, BracketValues)
{
    EXPECT_DOUBLE_EQ(eval_weight(WeightSpec::bracket(0.5), 0.0), 1.0);
    EXPECT_NEAR(eval_weight(WeightSpec::bracket(1.0), std::sqrt(3.0)), 2.0, 1e-15);
    EXPECT_NEAR(eval_weight(WeightSpec::bracket(0.5), 3.0), 1.7782794100389228, 1e-15);
    EXPECT_EQ(eval_weight(WeightSpec::one(), 1e9), 1.0);
}

TEST(EvalWeight, AtLeastOneAndMonotone)
{
    for (double kappa : {0.0, 0.25, 0.5, 1.0}) {
        const auto w = WeightSpec::bracket(kappa);
        double prev = 0.0;
        for (double x = 0.0; x < 1e4; x = 1.3 * x + 0.01) {
            EXPECT_GE(w(x), 1.0);
            EXPECT_GE(w(x), prev);
            EXPECT_EQ(w(x), w(-x));
            prev = w(x);
        }
    }
}

TEST(EvalWeight, DerivativesMatchFiniteDifferences)
{
    const auto w = WeightSpec::bracket(0.7);
    for (double x : {-20.0, -1.0, 0.0, 0.3, 5.0, 100.0}) {
        const double h = 1e-4 * japanese_bracket(x);
        EXPECT_NEAR(w.derivative(x), (w(x + h) - w(x - h)) / (2 * h), 1e-7 * w(x));
        EXPECT_NEAR(w.second_derivative(x), (w(x + h) - 2 * w(x) + w(x - h)) / (h * h), 1e-5 * w(x));
    }
}

TEST(WeightAxioms, BracketPairAllPass)
{
    const auto reports = check_weight_axioms({WeightSpec::bracket(1.0), WeightSpec::bracket(1.0)}, quick());
    ASSERT_EQ(reports.size(), 7u);
    const char* order[] = {"sl", "sv", "tp", "sa", "Phi", "scale", "dominance"};
    for (std::size_t i = 0; i < reports.size(); ++i) {
        EXPECT_EQ(reports[i].axiom, order[i]);
        EXPECT_TRUE(reports[i].pass) << reports[i].axiom;
        EXPECT_EQ(reports[i].violations, 0u) << reports[i].axiom;
        EXPECT_FALSE(reports[i].witness.has_value());
    }
    EXPECT_GE(find(reports, "sa").samples, 10000u);
}

TEST(WeightAxioms, ConstantPhiHasTrivialConstants)
{
    const auto reports = check_weight_axioms({WeightSpec::one(), WeightSpec::one()}, quick());
    for (const auto& r : reports)
        EXPECT_TRUE(r.pass) << r.axiom;
    EXPECT_DOUBLE_EQ(find(reports, "sl").constants.C, 1.0);
    EXPECT_DOUBLE_EQ(find(reports, "tp").constants.s, 0.0);
}

TEST(WeightAxioms, DominanceFailureCarriesWitness)
{
    const auto reports = check_weight_axioms({WeightSpec::bracket(1.0), WeightSpec::bracket(0.5)}, quick());
    const auto& dom = find(reports, "dominance");
    EXPECT_FALSE(dom.pass);
    EXPECT_GT(dom.violations, 0u);
    ASSERT_TRUE(dom.witness.has_value());
    EXPECT_GT(dom.witness->lhs, dom.witness->rhs);
    EXPECT_NE(dom.witness->x, 0.0);
    // Every structural axiom still holds for each weight on its own.
    for (const char* id : {"sl", "sv", "tp", "sa", "Phi", "scale"})
        EXPECT_TRUE(find(reports, id).pass) << id;
}

TEST(WeightAxioms, RejectsSuperlinearExponent)
{
    EXPECT_THROW(check_weight_axioms({WeightSpec::bracket(1.5), WeightSpec::bracket(1.5)}, quick()),
                 ValidationError);
    EXPECT_THROW(check_weight_axioms({WeightSpec::one(), WeightSpec::bracket(-0.1)}, quick()), ValidationError);
}

TEST(WeightAxioms, Deterministic)
{
    const WeightPair p{WeightSpec::bracket(0.25), WeightSpec::bracket(0.5)};
    const auto a = check_weight_axioms(p, quick());
    const auto b = check_weight_axioms(p, quick());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].samples, b[i].samples);
        EXPECT_EQ(a[i].constants.C, b[i].constants.C);
    }
}

TEST(WeightAxioms, SlowlyVaryingConstantStableUnderRadiusDoubling)
{
    const WeightPair p{WeightSpec::bracket(0.5), WeightSpec::bracket(0.5)};
    const double c1 = find(check_weight_axioms(p, quick(500.0)), "sv").constants.C;
    const double c2 = find(check_weight_axioms(p, quick(1000.0)), "sv").constants.C;
    EXPECT_GT(c1, 1.0);
    EXPECT_NEAR(c2, c1, 0.02 * c1);
}

TEST(WeightProperties, SubadditivityOnRandomPairs)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (double kappa : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        const auto w = WeightSpec::bracket(kappa);
        for (int i = 0; i < 10000; ++i) {
            const double x = u(rng), y = u(rng);
            ASSERT_LE(w(x + y), (w(x) + w(y)) * (1 + 1e-14)) << kappa << " " << x << " " << y;
        }
    }
}

TEST(WeightProperties, ScalingExact)
{
    const auto w = WeightSpec::bracket(0.75);
    for (double x = -500; x <= 500; x += 3.7)
        for (double a : {0.0, 0.1, 0.5, 1.0, 2.0, 10.0}) {
            if (a <= 1.0)
                EXPECT_LE(a * w(x), w(a * x) * (1 + 1e-14));
            else
                EXPECT_LE(w(a * x), a * w(x) * (1 + 1e-14));
        }
}

TEST(WeightJson, ReportShape)
{
    AxiomReport r;
    r.axiom = "sa";
    r.witness = AxiomWitness{1.0, 2.0, 3.0, 4.0, "phi"};
    const nlohmann::json j = r;
    EXPECT_EQ(j.at("axiom"), "sa");
    EXPECT_TRUE(j.at("constants").contains("r"));
    EXPECT_EQ(j.at("witness").at("lhs"), 3.0);
    r.witness.reset();
    const nlohmann::json k = r;
    EXPECT_TRUE(k.at("witness").is_null());
}
