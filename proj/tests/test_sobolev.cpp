#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <hyperlab/sobolev.hpp>

using namespace hyperlab;

namespace {

GridFunction gaussian(double L = 20.0, std::size_t M = 2048)
{
    return GridFunction::sample(L, M, [](double x) { return std::exp(-0.5 * x * x); });
}

GridFunction packet(double xi0, double L = 20.0, std::size_t M = 2048)
{
    GridFunction g(L, M);
    for (std::size_t j = 0; j < M; ++j) {
        const double x = g.x(j);
        g[j] = std::exp(-0.5 * x * x) * std::polar(1.0, xi0 * x);
    }
    return g;
}

GridFunction random_state(std::mt19937_64& rng, double L = 10.0, std::size_t M = 256)
{
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.5, 3.0);
    const double c = n(rng), w = u(rng), xi = 5.0 * n(rng);
    GridFunction g(L, M);
    for (std::size_t j = 0; j < M; ++j) {
        const double x = g.x(j);
        g[j] = std::exp(-(x - c) * (x - c) / (w * w)) * std::polar(1.0, xi * x) + 1e-3 * cplx(n(rng), n(rng));
    }
    return g;
}

} // namespace

TEST(GridFunction, Geometry)
{
    GridFunction g(2.0, 8);
    EXPECT_EQ(g.x(0), -2.0);
    EXPECT_EQ(g.spacing(), 0.5);
    EXPECT_NEAR(g.frequency(1), M_PI / 2.0, 1e-15);
    EXPECT_NEAR(g.frequency(7), -M_PI / 2.0, 1e-15);
    EXPECT_NEAR(g.frequency(4), -2.0 * M_PI, 1e-15);
    EXPECT_THROW(GridFunction(1.0, 12), ValidationError);
    EXPECT_THROW(GridFunction(1.0, 4), ValidationError);
    EXPECT_THROW(GridFunction(0.0, 16), ValidationError);
}

TEST(BesselPotential, ConstantAndIdentity)
{
    GridFunction c(3.0, 64);
    for (auto& z : c.values())
        z = 2.5;
    const auto out = bessel_potential(c, 2.0, 3.0);
    for (const auto& z : out.values())
        EXPECT_NEAR(std::abs(z - cplx(22.5)), 0.0, 1e-12);
    const auto g = gaussian();
    const auto same = bessel_potential(g, 0.0, 1.0);
    for (std::size_t j = 0; j < g.size(); ++j)
        EXPECT_EQ(same[j], g[j]);
    EXPECT_THROW(bessel_potential(g, 1.0, 0.5), ValidationError);
}

TEST(BesselPotential, InverseProperty)
{
    const auto v = packet(7.0, 10.0, 512);
    const auto back = bessel_potential(bessel_potential(v, 1.7, 2.0), -1.7, 2.0);
    double err = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j)
        err = std::fmax(err, std::abs(back[j] - v[j]));
    EXPECT_LT(err, 1e-12);
}

TEST(BesselPotential, ModulatedGaussianRatio)
{
    const auto v = packet(50.0);
    const double frozen[] = {50.014997750674747, 2502.4993006992030};
    for (int s1 = 1; s1 <= 2; ++s1) {
        const double ratio = l2_norm(bessel_potential(v, s1, 1.0)) / l2_norm(v);
        EXPECT_NEAR(ratio, frozen[s1 - 1], 1e-6 * frozen[s1 - 1]);
        EXPECT_NEAR(ratio, std::pow(xi_bracket(50.0, 1.0), s1), 0.05 * std::pow(xi_bracket(50.0, 1.0), s1));
    }
}

TEST(SobolevNorm, GaussianAndWeight)
{
    const auto g = gaussian();
    const auto phi = WeightSpec::bracket(1.0);
    EXPECT_NEAR(sobolev_norm(g, {0, 0}, 1.0, phi), 1.3313353638003897, 1e-6);
    EXPECT_EQ(sobolev_norm(g, {0, 0}, 1.0, phi), l2_norm(g));
    EXPECT_GT(sobolev_norm(g, {0, 1}, 1.0, phi), sobolev_norm(g, {0, 0}, 1.0, phi));
    EXPECT_EQ(sobolev_norm(GridFunction(5.0, 64), {2.0, 3.0}, 1.0, phi), 0.0);
}

TEST(SobolevNorm, MonotoneInBothIndices)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> s(-2.0, 2.0), ds(0.0, 1.5), kk(1.0, 5.0);
    const auto phi = WeightSpec::bracket(0.5);
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
        const auto v = random_state(rng);
        const SobolevIndex a{s(rng), s(rng)};
        const SobolevIndex b{a.s1 + ds(rng), a.s2 + ds(rng)};
        const double k = kk(rng);
        if (sobolev_norm(v, b, k, phi) < sobolev_norm(v, a, k, phi) * (1 - 1e-13))
            ++violations;
    }
    EXPECT_EQ(violations, 0);
}

TEST(SobolevNorm, ParameterEquivalence)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> kk(1.0, 10.0), s(-2.0, 2.0);
    const auto phi = WeightSpec::bracket(1.0);
    for (int i = 0; i < 50; ++i) {
        const auto v = random_state(rng);
        const double k = kk(rng), kp = kk(rng);
        const SobolevIndex idx{s(rng), 0.0};
        const double r = sobolev_norm(v, idx, k, phi) / sobolev_norm(v, idx, kp, phi);
        const double q = std::pow(std::fmax(k / kp, kp / k), std::fabs(idx.s1));
        EXPECT_GE(r, (1.0 / q) * (1 - 1e-12));
        EXPECT_LE(r, q * (1 + 1e-12));
    }
}

TEST(Persistence, RoundTrip)
{
    const auto v = packet(3.0, 8.0, 128);
    const auto dir = std::filesystem::temp_directory_path() / "hyperlab_sobolev_test";
    std::filesystem::create_directories(dir);
    const auto stem = dir / "state";
    save_grid_function(v, stem, "unit-test", "2026-01-01T00:00:00Z");
    const auto w = load_grid_function(stem);
    ASSERT_TRUE(w.same_grid(v));
    for (std::size_t j = 0; j < v.size(); ++j)
        EXPECT_EQ(w[j], v[j]);
    EXPECT_EQ(std::filesystem::file_size(std::filesystem::path(stem).concat(".bin")), 128u * 16u);
    std::filesystem::remove_all(dir);
    EXPECT_THROW(load_grid_function(dir / "missing"), std::runtime_error);
}
