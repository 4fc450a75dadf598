#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "zpf/field.hpp"

using namespace zpf;

namespace
{
UnitSystem units_with_gamma(double g)
{
    UnitSystem u;
    u.gamma = g;
    return u;
}
}  // namespace

TEST(ModeSet, RejectsDegenerateBand)
{
    UnitSystem u;
    EXPECT_THROW(build_mode_set(1.0, 1.0, 1, u), ConfigError);
    EXPECT_THROW(build_mode_set(1.0, 1.0, 10, u), ConfigError);
    EXPECT_THROW(build_mode_set(1.0, 2.0, 1, u), ConfigError);
    EXPECT_THROW(build_mode_set(0.0, 2.0, 10, u), ConfigError);
    EXPECT_THROW(build_mode_set(2.0, 1.0, 10, u), ConfigError);
}

TEST(ModeSet, RejectsInvalidUnits)
{
    EXPECT_THROW(build_mode_set(0.2, 5.0, 64, units_with_gamma(0.5)), ConfigError);
}

TEST(ModeSet, TotalPowerMatchesIntegratedSpectrum)
{
    auto u = units_with_gamma(0.01);
    auto set = build_mode_set(0.5, 1.5, 100, u, FrequencyStrategy::uniform);
    double ref = reference::trapezoid([&](double w) { return u.hbar * u.mass * u.tau() * w * w * w / reference::pi; },
                                    0.5, 1.5, 20000);
    EXPECT_NEAR(set.total_power(), ref, 0.01 * ref);
    EXPECT_NEAR(ref, 3.98e-3, 0.01e-3);
}

TEST(ModeSet, JitteredPowerMatchesIntegratedSpectrum)
{
    auto u = units_with_gamma(0.02);
    double ref = reference::trapezoid([&](double w) { return u.hbar * u.mass * u.tau() * w * w * w / reference::pi; },
                                    0.2, 5.0, 20000);
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        auto set = build_mode_set(0.2, 5.0, 512, u, FrequencyStrategy::stratified_jitter, seed);
        EXPECT_NEAR(set.total_power(), ref, 0.01 * ref);
    }
}

TEST(ModeSet, SortedInsideBandOnePerBin)
{
    UnitSystem u;
    for (auto strategy : {FrequencyStrategy::uniform, FrequencyStrategy::stratified_jitter})
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            std::size_t n = 2 + seed * 13;
            double lo = 0.1 + 0.05 * static_cast<double>(seed), hi = lo + 1.0 + static_cast<double>(seed);
            auto set = build_mode_set(lo, hi, n, u, strategy, seed);
            ASSERT_EQ(set.size(), n);
            double width = (hi - lo) / static_cast<double>(n);
            for (std::size_t l = 0; l < n; ++l)
            {
                double w = set.modes[l].omega;
                EXPECT_GE(w, lo + static_cast<double>(l) * width - 1e-12);
                EXPECT_LE(w, lo + static_cast<double>(l + 1) * width + 1e-12);
                if (l > 0)
                {
                    EXPECT_GT(w, set.modes[l - 1].omega);
                }
                EXPECT_GT(set.modes[l].weight, 0.0);
            }
        }
}

TEST(ModeSet, WeightsFollowSpectralDensity)
{
    auto u = units_with_gamma(0.03);
    auto set = build_mode_set(0.3, 3.0, 50, u, FrequencyStrategy::stratified_jitter, 4);
    double dw = 2.7 / 50;
    for (auto const& m : set.modes)
        EXPECT_NEAR(m.weight * m.weight, force_spectral_density(u, m.omega) * dw, 1e-15);
}

TEST(Vacuum, MeanOccupationIsOneHalf)
{
    UnitSystem u;
    auto set = build_mode_set(0.1, 10.0, 100000, u);
    auto r = sample_vacuum_amplitudes(set, 3);
    double s = 0, sre2 = 0, sim2 = 0, sreim = 0, sadj = 0;
    std::size_t const n = set.size();
    for (std::size_t l = 0; l < n; ++l)
    {
        auto a = r.amplitude(l);
        s += std::norm(a);
        sre2 += a.real() * a.real();
        sim2 += a.imag() * a.imag();
        sreim += a.real() * a.imag();
        if (l + 1 < n)
            sadj += a.real() * r.amplitude(l + 1).real();
    }
    double dn = static_cast<double>(n);
    // |a|^2 is exponential with mean 1/2 and sd 1/2
    EXPECT_NEAR(s / dn, 0.5, 0.005);
    EXPECT_NEAR(sre2 / dn, 0.25, 4 * 0.25 * std::sqrt(2 / dn));
    EXPECT_NEAR(sim2 / dn, 0.25, 4 * 0.25 * std::sqrt(2 / dn));
    EXPECT_NEAR(sreim / dn, 0.0, 4 * 0.25 / std::sqrt(dn));
    EXPECT_NEAR(sadj / dn, 0.0, 4 * 0.25 / std::sqrt(dn));
}

TEST(Vacuum, EnsembleModeEnergyIsHalfQuantum)
{
    UnitSystem u;
    u.hbar = 0.7;
    auto set = build_mode_set(0.5, 4.0, 8, u, FrequencyStrategy::uniform);
    int const draws = 40000;
    std::vector<double> acc(set.size(), 0.0);
    double total = 0;
    for (int k = 0; k < draws; ++k)
    {
        auto r = sample_vacuum_amplitudes(set, static_cast<std::uint64_t>(k));
        for (std::size_t l = 0; l < set.size(); ++l)
        {
            acc[l] += r.mode_energy(l, u.hbar);
            total += r.mode_energy(l, u.hbar);
        }
    }
    double expected_total = 0;
    for (std::size_t l = 0; l < set.size(); ++l)
    {
        double half = 0.5 * u.hbar * set.modes[l].omega;
        expected_total += half;
        EXPECT_NEAR(acc[l] / draws, half, 4 * half / std::sqrt(double(draws)));
    }
    EXPECT_NEAR(total / draws, expected_total, 4 * expected_total / std::sqrt(draws * 8.0));
}

TEST(Vacuum, FieldCoordinatesHaveGroundStateSpread)
{
    UnitSystem u;
    u.hbar = 2.0;
    auto set = build_mode_set(0.5, 3.0, 20000, u, FrequencyStrategy::uniform);
    auto r = sample_vacuum_amplitudes(set, 11);
    double sy = 0, sq = 0;
    for (std::size_t l = 0; l < set.size(); ++l)
    {
        double w = set.modes[l].omega;
        // scaled so that the ground-state expectation is 1
        sy += r.y(l, u.hbar) * r.y(l, u.hbar) / (u.hbar / (2 * w));
        sq += r.q(l, u.hbar) * r.q(l, u.hbar) / (u.hbar * w / 2);
    }
    double n = static_cast<double>(set.size());
    EXPECT_NEAR(sy / n, 1.0, 4 * std::sqrt(2 / n));
    EXPECT_NEAR(sq / n, 1.0, 4 * std::sqrt(2 / n));
}

TEST(Vacuum, SameSeedSameRealization)
{
    UnitSystem u;
    auto set = build_mode_set(0.2, 5.0, 256, u);
    auto a = sample_vacuum_amplitudes(set, 77);
    auto b = sample_vacuum_amplitudes(set, 77);
    auto c = sample_vacuum_amplitudes(set, 78);
    for (std::size_t l = 0; l < set.size(); ++l)
    {
        EXPECT_EQ(a.amplitudes[l].u, b.amplitudes[l].u);
        EXPECT_EQ(a.amplitudes[l].v, b.amplitudes[l].v);
    }
    EXPECT_NE(a.amplitudes[0].u, c.amplitudes[0].u);
    for (double t : {0.0, 3.7, 1234.5})
        EXPECT_EQ(eval_field(a, t), eval_field(b, t));
}

TEST(Vacuum, ModeDrawIndependentOfSetSize)
{
    UnitSystem u;
    auto small = sample_vacuum_amplitudes(build_mode_set(0.2, 5.0, 16, u), 5);
    auto large = sample_vacuum_amplitudes(build_mode_set(0.2, 5.0, 64, u), 5);
    for (std::size_t l = 0; l < 16; ++l)
        EXPECT_EQ(small.amplitudes[l].u, large.amplitudes[l].u);
}

TEST(EvalField, SingleModeExample)
{
    FieldRealization r;
    r.mode_set.modes = {{1.0, 1.0}};
    r.mode_set.omega_min = r.mode_set.omega_max = 1.0;
    r.amplitudes = {{2.0, 0.0}};
    EXPECT_DOUBLE_EQ(eval_field(r, 0.0), 2.0);
    EXPECT_NEAR(eval_field(r, pi / 2), 0.0, 1e-15);
    r.amplitudes = {{0.0, 3.0}};
    EXPECT_NEAR(eval_field(r, pi / 2), 3.0, 1e-15);
}

TEST(EvalField, TimeAverageOfSquareMatchesModeSum)
{
    UnitSystem u;
    auto set = build_mode_set(0.5, 1.5, 32, u);
    auto r = sample_vacuum_amplitudes(set, 21);
    double expected = 0;
    for (std::size_t l = 0; l < set.size(); ++l)
        expected += 0.5 * set.modes[l].weight * set.modes[l].weight
                    * (r.amplitudes[l].u * r.amplitudes[l].u + r.amplitudes[l].v * r.amplitudes[l].v);
    double T = 2000 * 2 * pi / 0.5;
    double avg = reference::trapezoid([&](double t) { return eval_field(r, t) * eval_field(r, t); }, 0.0, T, 400000) / T;
    EXPECT_NEAR(avg, expected, 0.02 * expected);
}

TEST(EvalField, EnsembleVarianceIsStationary)
{
    auto u = units_with_gamma(0.01);
    auto set = build_mode_set(0.2, 5.0, 64, u);
    double expected = set.total_power();
    int const draws = 10000;
    for (double t : {0.0, 7.3, 1000.0})
    {
        double s2 = 0;
        for (int k = 0; k < draws; ++k)
        {
            double f = eval_field(sample_vacuum_amplitudes(set, static_cast<std::uint64_t>(k)), t);
            s2 += f * f;
        }
        EXPECT_NEAR(s2 / draws, expected, 0.03 * expected) << "t = " << t;
    }
}

TEST(EvalField, GridMatchesPointwise)
{
    UnitSystem u;
    auto r = sample_vacuum_amplitudes(build_mode_set(0.2, 5.0, 128, u), 9);
    auto g = eval_field_grid(r, -0.02, 0.02, 500);
    for (std::size_t k = 0; k < g.size(); ++k)
        EXPECT_EQ(g[k], eval_field(r, -0.02 + static_cast<double>(k) * 0.02));
    auto one = eval_field_grid(r, 2.0, 0.1, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], eval_field(r, 2.0));
}

TEST(EvalField, GridRejectsCoarseStep)
{
    UnitSystem u;
    auto r = sample_vacuum_amplitudes(build_mode_set(0.2, 5.0, 16, u), 9);
    EXPECT_THROW(eval_field_grid(r, 0.0, pi / 5.0, 10), ConfigError);
    EXPECT_THROW(eval_field_grid(r, 0.0, 0.0, 10), ConfigError);
}

TEST(RealizationCsv, RoundTrip)
{
    UnitSystem u;
    auto r = sample_vacuum_amplitudes(build_mode_set(0.2, 5.0, 40, u), 1234567890123ULL);
    std::stringstream ss;
    write_realization_csv(ss, r);
    auto back = read_realization_csv(ss);
    EXPECT_EQ(back.seed, r.seed);
    ASSERT_EQ(back.mode_set.size(), r.mode_set.size());
    EXPECT_EQ(back.mode_set.omega_min, 0.2);
    EXPECT_EQ(back.mode_set.omega_max, 5.0);
    for (double t : {0.0, 1.1, 99.0})
        EXPECT_EQ(eval_field(back, t), eval_field(r, t));
}

TEST(RealizationCsv, RejectsMalformed)
{
    std::stringstream bad_header("# seed=1\nomega,u,v\n");
    EXPECT_THROW(read_realization_csv(bad_header), ConfigError);
    std::stringstream no_seed("omega,h,u,v\n1,1,1,1\n");
    EXPECT_THROW(read_realization_csv(no_seed), ConfigError);
    std::stringstream bad_row("# seed=1\nomega,h,u,v\n1,x,1,1\n");
    EXPECT_THROW(read_realization_csv(bad_row), ConfigError);
}
