#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "zpf/core.hpp"
#include "zpf/polynomial.hpp"
#include "zpf/rng.hpp"

using namespace zpf;

TEST(UnitSystem, TauIsGammaOverOmega)
{
    UnitSystem u;
    u.gamma = 0.02;
    u.omega0 = 4.0;
    EXPECT_DOUBLE_EQ(u.tau(), 0.005);
}

TEST(UnitSystem, RejectsOutOfRangeGamma)
{
    UnitSystem u;
    for (double g : {0.0, -0.01, 0.1, 0.5})
    {
        u.gamma = g;
        EXPECT_THROW(u.validate(), ConfigError) << g;
    }
    u.gamma = 0.05;
    EXPECT_NO_THROW(u.validate());
    u.mass = 0;
    EXPECT_THROW(u.validate(), ConfigError);
}

TEST(CompensatedSum, RecoversCancelledTerms)
{
    std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    EXPECT_EQ(compensated_sum(v), 2.0);
}

TEST(FitLine, ExactLine)
{
    std::vector<double> x{0, 1, 2, 3, 4}, y;
    for (double xi : x)
        y.push_back(1.5 - 2.0 * xi);
    auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, -2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.5, 1e-14);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
}

TEST(FitLine, NeedsTwoPoints)
{
    std::vector<double> x{0}, y{0};
    EXPECT_THROW(fit_line(x, y), ConfigError);
}

TEST(CounterRng, Deterministic)
{
    CounterRng a(42), b(42), c(43);
    for (std::uint64_t k = 0; k < 100; ++k)
    {
        EXPECT_EQ(a.bits(3, k), b.bits(3, k));
        EXPECT_NE(a.bits(3, k), c.bits(3, k));
    }
}

TEST(CounterRng, StreamsAreDistinct)
{
    CounterRng r(7);
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 64; ++s)
        for (std::uint64_t k = 0; k < 64; ++k)
            seen.insert(r.bits(s, k));
    EXPECT_EQ(seen.size(), 64u * 64u);
}

TEST(CounterRng, UniformInOpenInterval)
{
    CounterRng r(1);
    double sum = 0;
    int const n = 200000;
    for (int k = 0; k < n; ++k)
    {
        double u = r.uniform(0, static_cast<std::uint64_t>(k));
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // se of the mean is 1/sqrt(12 n)
    EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(CounterRng, NormalMoments)
{
    CounterRng r(99);
    int const n = 100000;
    double s1 = 0, s2 = 0, s4 = 0, sxy = 0;
    for (int k = 0; k < n; ++k)
    {
        auto [a, b] = r.normal_pair(static_cast<std::uint64_t>(k));
        s1 += a + b;
        s2 += a * a + b * b;
        s4 += a * a * a * a + b * b * b * b;
        sxy += a * b;
    }
    double m = 2.0 * n;
    EXPECT_NEAR(s1 / m, 0.0, 4 / std::sqrt(m));
    EXPECT_NEAR(s2 / m, 1.0, 4 * std::sqrt(2 / m));
    EXPECT_NEAR(s4 / m, 3.0, 4 * std::sqrt(96 / m));
    EXPECT_NEAR(sxy / n, 0.0, 4 / std::sqrt(double(n)));
}

TEST(DeriveSeed, SpreadsNeighbouringSeeds)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 100; ++s)
        for (std::uint64_t k = 0; k < 100; ++k)
            seen.insert(derive_seed(s, k));
    EXPECT_EQ(seen.size(), 10000u);
}

TEST(Polynomial, EvaluatesAndDifferentiates)
{
    Polynomial p{1.0, -2.0, 0.0, 3.0};  // 1 - 2x + 3x^3
    EXPECT_DOUBLE_EQ(p(2.0), 1 - 4 + 24);
    auto d = p.derivative();
    EXPECT_EQ(d.degree(), 2);
    EXPECT_DOUBLE_EQ(d(2.0), -2 + 36);
    EXPECT_DOUBLE_EQ(p.derivative(3)(5.0), 18.0);
    EXPECT_TRUE(p.derivative(4).is_zero());
}

TEST(Polynomial, TrimsTrailingZeros)
{
    Polynomial p{0.0, 1.0, 0.0, 0.0};
    EXPECT_EQ(p.degree(), 1);
    EXPECT_EQ(Polynomial{}.degree(), -1);
}

TEST(PotentialSpec, DriftForceExamples)
{
    EXPECT_DOUBLE_EQ(drift_force(PotentialSpec::harmonic(1, 1), 1.0), -1.0);
    EXPECT_DOUBLE_EQ(drift_force(PotentialSpec::quartic(0.25), 2.0), -8.0);
    EXPECT_DOUBLE_EQ(drift_force(PotentialSpec::harmonic(2, 3), -0.5), 9.0);
}

TEST(PotentialSpec, DriftForceMatchesDerivative)
{
    CounterRng r(5);
    for (std::uint64_t trial = 0; trial < 50; ++trial)
    {
        std::vector<double> c;
        for (std::uint64_t k = 0; k <= 8; ++k)
            c.push_back(2 * r.uniform(trial, k) - 1);
        PotentialSpec v{Polynomial(c)};
        for (double x : {-1.3, 0.0, 0.4, 2.2})
        {
            double h = 1e-5;
            double fd = (v.value(x + h) - v.value(x - h)) / (2 * h);
            EXPECT_NEAR(drift_force(v, x), -fd, 1e-5 * (1 + std::fabs(fd)));
        }
    }
}

TEST(PotentialSpec, RejectsDegreeAboveEight)
{
    std::vector<double> c(10, 0.0);
    c[9] = 1.0;
    EXPECT_THROW(PotentialSpec{Polynomial(c)}, ConfigError);
}

TEST(PotentialSpec, Confinement)
{
    EXPECT_TRUE(PotentialSpec::harmonic().is_confining());
    EXPECT_TRUE(PotentialSpec::quartic(0.1).is_confining());
    EXPECT_FALSE(PotentialSpec::quartic(-0.1).is_confining());
    EXPECT_FALSE((PotentialSpec{Polynomial{0.0, 0.0, 0.0, 1.0}}.is_confining()));
}
