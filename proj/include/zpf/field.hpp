//! \file field.hpp
//! Finite-mode synthesis of the zero-point force noise.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace zpf
{
//---------------------------------------------------------------------------//
/*!
 * One-sided force spectral density S_F(omega) = hbar m tau omega^3 / pi.
 *
 * With damping rate tau*omega0^2 this is the fluctuation-dissipation partner
 * that puts a narrow-resonance oscillator at <x^2> = hbar / (2 m omega0).
 */
inline double force_spectral_density(UnitSystem const& u, double omega)
{
    return u.hbar * u.mass * u.tau() * omega * omega * omega / pi;
}

enum class FrequencyStrategy
{
    uniform,
    stratified_jitter
};

struct Mode
{
    double omega;
    double weight;  //!< force amplitude h_l
};

struct ModeSet
{
    std::vector<Mode> modes;
    double omega_min = 0;
    double omega_max = 0;

    std::size_t size() const { return modes.size(); }

    //! Sum of h_l^2, the total force variance.
    double total_power() const
    {
        CompensatedSum s;
        for (auto const& m : modes)
            s += m.weight * m.weight;
        return s.value();
    }

    //! Copy with every weight multiplied by factor.
    ModeSet scaled(double factor) const
    {
        ModeSet r = *this;
        for (auto& m : r.modes)
            m.weight *= factor;
        return r;
    }
};

//! Mode set with h_l^2 = amplitude * omega_l^exponent * d_omega.
inline ModeSet build_power_law_mode_set(double omega_min,
                                        double omega_max,
                                        std::size_t n_modes,
                                        double amplitude,
                                        double exponent,
                                        FrequencyStrategy strategy,
                                        std::uint64_t jitter_seed = 0)
{
    if (!(omega_min > 0) || !(omega_max > omega_min) || !std::isfinite(omega_max))
        throw ConfigError("mode band must satisfy 0 < omega_min < omega_max");
    if (n_modes < 2)
        throw ConfigError("n_modes must be at least 2");
    if (!(amplitude >= 0))
        throw ConfigError("spectral amplitude must be non-negative");

    ModeSet set;
    set.omega_min = omega_min;
    set.omega_max = omega_max;
    set.modes.reserve(n_modes);
    double const width = (omega_max - omega_min) / static_cast<double>(n_modes);
    CounterRng rng(derive_seed(jitter_seed, 0x6a17));
    for (std::size_t l = 0; l < n_modes; ++l)
    {
        double lo = omega_min + static_cast<double>(l) * width;
        double frac = strategy == FrequencyStrategy::uniform ? 0.5 : rng.uniform(l, 0);
        double omega = lo + frac * width;
        double h2 = amplitude * std::pow(omega, exponent) * width;
        set.modes.push_back({omega, std::sqrt(h2)});
    }
    return set;
}

/*!
 * Zero-point force modes on [omega_min, omega_max].
 *
 * Bins are uniform; the mode sits at the bin centre (uniform) or at a
 * uniformly drawn point inside its bin (stratified jitter, which suppresses
 * the 2 pi / d_omega recurrence of a regular comb).
 */
inline ModeSet build_mode_set(double omega_min,
                              double omega_max,
                              std::size_t n_modes,
                              UnitSystem const& units,
                              FrequencyStrategy strategy = FrequencyStrategy::stratified_jitter,
                              std::uint64_t jitter_seed = 0)
{
    units.validate();
    double amp = units.hbar * units.mass * units.tau() / pi;
    return build_power_law_mode_set(omega_min, omega_max, n_modes, amp, 3.0, strategy, jitter_seed);
}

//---------------------------------------------------------------------------//
struct Quadrature
{
    double u;
    double v;
};

/*!
 * A sampled field: unit-variance quadratures (u_l, v_l) per mode.
 *
 * The vacuum amplitude is a_l = (u_l + i v_l) / 2 so that Re a and Im a have
 * variance 1/4, matching the density (2/pi) exp(-2|a|^2).
 */
struct FieldRealization
{
    ModeSet mode_set;
    std::vector<Quadrature> amplitudes;
    std::uint64_t seed = 0;

    std::complex<double> amplitude(std::size_t l) const
    {
        return {0.5 * amplitudes[l].u, 0.5 * amplitudes[l].v};
    }
    //! Oscillator-like field coordinate y_l = sqrt(2 hbar / omega_l) Re a_l.
    double y(std::size_t l, double hbar) const
    {
        return std::sqrt(2 * hbar / mode_set.modes[l].omega) * amplitude(l).real();
    }
    //! Conjugate q_l = sqrt(2 hbar omega_l) Im a_l.
    double q(std::size_t l, double hbar) const
    {
        return std::sqrt(2 * hbar * mode_set.modes[l].omega) * amplitude(l).imag();
    }
    //! hbar omega_l |a_l|^2.
    double mode_energy(std::size_t l, double hbar) const
    {
        return hbar * mode_set.modes[l].omega * std::norm(amplitude(l));
    }
};

inline FieldRealization sample_vacuum_amplitudes(ModeSet const& modes, std::uint64_t seed)
{
    FieldRealization r;
    r.mode_set = modes;
    r.seed = seed;
    r.amplitudes.reserve(modes.size());
    CounterRng rng(seed);
    for (std::size_t l = 0; l < modes.size(); ++l)
    {
        auto [u, v] = rng.normal_pair(l);
        r.amplitudes.push_back({u, v});
    }
    return r;
}

//! F(t) = sum_l h_l (u_l cos omega_l t + v_l sin omega_l t), summed in mode order.
inline double eval_field(FieldRealization const& r, double t)
{
    double f = 0;
    auto const& modes = r.mode_set.modes;
    for (std::size_t l = 0; l < modes.size(); ++l)
    {
        double ph = modes[l].omega * t;
        f += modes[l].weight * (r.amplitudes[l].u * std::cos(ph) + r.amplitudes[l].v * std::sin(ph));
    }
    return f;
}

//! Samples F(t0 + k dt) for k < n_steps; requires dt < pi / omega_max.
inline std::vector<double>
eval_field_grid(FieldRealization const& r, double t0, double dt, std::size_t n_steps)
{
    if (!(dt > 0))
        throw ConfigError("field grid step must be positive");
    if (!(dt < pi / r.mode_set.omega_max))
        throw ConfigError("field grid step too coarse: need dt < pi / omega_max");
    std::vector<double> out(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k)
        out[k] = eval_field(r, t0 + static_cast<double>(k) * dt);
    return out;
}

//---------------------------------------------------------------------------//
// Audit CSV: "# seed=<n>" line, then omega,h,u,v rows.
//---------------------------------------------------------------------------//

inline void write_realization_csv(std::ostream& os, FieldRealization const& r)
{
    os << "# seed=" << r.seed << "\n";
    os << "# omega_min=" << std::setprecision(17) << r.mode_set.omega_min
       << ",omega_max=" << r.mode_set.omega_max << "\n";
    os << "omega,h,u,v\n";
    for (std::size_t l = 0; l < r.mode_set.size(); ++l)
    {
        auto const& m = r.mode_set.modes[l];
        os << m.omega << ',' << m.weight << ',' << r.amplitudes[l].u << ','
           << r.amplitudes[l].v << '\n';
    }
}

inline FieldRealization read_realization_csv(std::istream& is)
{
    FieldRealization r;
    std::string line;
    bool have_seed = false, have_header = false;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        if (line.rfind("# seed=", 0) == 0)
        {
            r.seed = parse_number<std::uint64_t>(line.substr(7), "realization seed");
            have_seed = true;
            continue;
        }
        if (line.rfind("# omega_min=", 0) == 0)
        {
            auto comma = line.find(",omega_max=");
            if (comma == std::string::npos)
                throw ConfigError("malformed band line in realization CSV");
            r.mode_set.omega_min = parse_number<double>(line.substr(12, comma - 12), "omega_min");
            r.mode_set.omega_max = parse_number<double>(line.substr(comma + 11), "omega_max");
            continue;
        }
        if (line[0] == '#')
            continue;
        if (!have_header)
        {
            if (line != "omega,h,u,v")
                throw ConfigError("realization CSV header must be omega,h,u,v");
            have_header = true;
            continue;
        }
        std::istringstream ls(line);
        double vals[4];
        char sep;
        for (int i = 0; i < 4; ++i)
        {
            if (!(ls >> vals[i]))
                throw ConfigError("malformed realization CSV row: " + line);
            if (i < 3 && !(ls >> sep && sep == ','))
                throw ConfigError("malformed realization CSV row: " + line);
        }
        r.mode_set.modes.push_back({vals[0], vals[1]});
        r.amplitudes.push_back({vals[2], vals[3]});
    }
    if (!have_seed || !have_header)
        throw ConfigError("realization CSV missing seed or header line");
    if (r.mode_set.modes.empty())
        return r;
    if (r.mode_set.omega_max == 0)
    {
        r.mode_set.omega_min = r.mode_set.modes.front().omega;
        r.mode_set.omega_max = r.mode_set.modes.back().omega;
    }
    return r;
}

}  // namespace zpf
