//! \file lorentz.hpp
//! Monte Carlo test of the statistical Lorentz invariance of a power-law
//! isotropic spectrum.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace zpf
{
/*!
 * A sampled plane-wave mode.
 *
 * measure is the Monte Carlo weight of the mode relative to the invariant
 * phase-space measure; d^3k / omega is Lorentz invariant, so a boost
 * multiplies it by omega' / omega.
 */
struct WaveMode
{
    double omega;
    double cos_theta;
    double measure = 1.0;
};

//! Doppler shift, aberration and measure update for a boost along the axis.
inline WaveMode boost_mode(WaveMode const& m, double beta)
{
    double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
    double doppler = gamma * (1.0 + beta * m.cos_theta);
    WaveMode r;
    r.omega = m.omega * doppler;
    r.cos_theta = (m.cos_theta + beta) / (1.0 + beta * m.cos_theta);
    r.measure = m.measure * doppler;
    return r;
}

inline std::vector<WaveMode> boost_modes(std::vector<WaveMode> const& modes, double beta)
{
    std::vector<WaveMode> out;
    out.reserve(modes.size());
    for (auto const& m : modes)
        out.push_back(boost_mode(m, beta));
    return out;
}

/*!
 * Isotropic directions and frequencies with mode density proportional to
 * omega^(exponent - 1) on [lo, hi]; with hbar omega / 2 per mode the energy
 * density goes as omega^exponent.
 */
inline std::vector<WaveMode>
sample_isotropic_modes(double exponent, double lo, double hi, std::size_t n, std::uint64_t seed)
{
    std::vector<WaveMode> modes;
    modes.reserve(n);
    CounterRng rng(seed);
    double const a = std::pow(lo, exponent);
    double const b = std::pow(hi, exponent);
    for (std::size_t i = 0; i < n; ++i)
    {
        double u = rng.uniform(i, 0);
        double omega = exponent == 0.0 ? lo * std::pow(hi / lo, u)
                                       : std::pow(a + u * (b - a), 1.0 / exponent);
        if (omega > hi)
            omega = hi;
        modes.push_back({omega, 2.0 * rng.uniform(i, 1) - 1.0, 1.0});
    }
    return modes;
}

struct BinnedSpectrum
{
    std::vector<double> edges;    //!< n_bins + 1 log-spaced edges
    std::vector<double> density;  //!< energy per unit angular frequency
    double band_energy = 0;
};

//! Energy density hbar*omega/2 * measure, binned on log-spaced bins.
inline BinnedSpectrum
bin_energy_spectrum(std::vector<WaveMode> const& modes, double lo, double hi, std::size_t n_bins, double hbar = 1.0)
{
    BinnedSpectrum s;
    double const lr = std::log(hi / lo);
    for (std::size_t i = 0; i <= n_bins; ++i)
        s.edges.push_back(lo * std::exp(lr * static_cast<double>(i) / static_cast<double>(n_bins)));
    s.edges.back() = hi;
    std::vector<CompensatedSum> acc(n_bins);
    for (auto const& m : modes)
    {
        if (m.omega < lo || m.omega >= hi)
            continue;
        auto k = static_cast<std::size_t>(std::log(m.omega / lo) / lr * static_cast<double>(n_bins));
        if (k >= n_bins)
            k = n_bins - 1;
        acc[k] += 0.5 * hbar * m.omega * m.measure;
    }
    CompensatedSum total;
    for (std::size_t k = 0; k < n_bins; ++k)
    {
        double e = acc[k].value();
        total += e;
        s.density.push_back(e / (s.edges[k + 1] - s.edges[k]));
    }
    s.band_energy = total.value();
    return s;
}

//! Slope of log density vs log geometric bin centre.
inline LineFit fit_binned_exponent(BinnedSpectrum const& s)
{
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k + 1 < s.edges.size(); ++k)
    {
        if (!(s.density[k] > 0))
            continue;
        lx.push_back(0.5 * (std::log(s.edges[k]) + std::log(s.edges[k + 1])));
        ly.push_back(std::log(s.density[k]));
    }
    return fit_line(lx, ly);
}

struct BoostReport
{
    double spectral_exponent = 0;
    double beta = 0;
    std::size_t n_samples = 0;
    double exponent_before = 0;
    double exponent_after = 0;
    double amplitude_ratio = 1;
    bool invariant = false;
    BinnedSpectrum before;
    BinnedSpectrum after;
};

struct BoostBand
{
    double lo = 1.0;
    double hi = 4.0;
    std::size_t n_bins = 24;
};

/*!
 * Boost an isotropic power-law mode population and compare the binned energy
 * spectrum on a fixed analysis band before and after.
 *
 * The source band is widened by the maximal Doppler factor so every mode that
 * can land in the analysis band after the boost is represented.
 */
inline BoostReport boost_spectrum_check(double spectral_exponent,
                                        double beta,
                                        std::size_t n_samples,
                                        std::uint64_t seed,
                                        BoostBand band = {})
{
    if (!(beta >= 0 && beta <= 0.6))
        throw ConfigError("beta must lie in [0, 0.6]");
    if (n_samples < 100000)
        throw ConfigError("n_samples must be at least 1e5");
    if (!(spectral_exponent >= 0 && spectral_exponent <= 5))
        throw ConfigError("spectral_exponent must lie in [0, 5]");
    if (!(band.lo > 0 && band.hi > band.lo) || band.n_bins < 3)
        throw ConfigError("invalid analysis band");

    double const kappa = std::sqrt((1 + beta) / (1 - beta));
    auto modes = sample_isotropic_modes(spectral_exponent, band.lo / kappa, band.hi * kappa, n_samples, seed);
    auto boosted = boost_modes(modes, beta);

    BoostReport rep;
    rep.spectral_exponent = spectral_exponent;
    rep.beta = beta;
    rep.n_samples = n_samples;
    rep.before = bin_energy_spectrum(modes, band.lo, band.hi, band.n_bins);
    rep.after = bin_energy_spectrum(boosted, band.lo, band.hi, band.n_bins);
    rep.exponent_before = fit_binned_exponent(rep.before).slope;
    rep.exponent_after = fit_binned_exponent(rep.after).slope;
    rep.amplitude_ratio = rep.after.band_energy / rep.before.band_energy;
    rep.invariant = std::fabs(rep.exponent_after - rep.exponent_before) < 0.05
                    && std::fabs(rep.amplitude_ratio - 1.0) < 0.02;
    return rep;
}

}  // namespace zpf
