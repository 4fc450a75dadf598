//! \file spectrum.hpp
//! Welch periodogram of the synthesized force and power-law slope fit.
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <ostream>
#include <vector>

#include "core.hpp"
#include "field.hpp"

namespace zpf
{
struct Periodogram
{
    std::vector<double> freqs;  //!< angular frequencies
    std::vector<double> power;  //!< one-sided density per unit angular frequency
    double fit_exponent = 0;
    double fit_stderr = 0;
    std::size_t n_segments = 0;
    double fit_lo = 0;
    double fit_hi = 0;
};

namespace detail
{
// FFTW's planner is not re-entrant.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwDeleter
{
    void operator()(void* p) const { fftw_free(p); }
};

class RealFft
{
  public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))))
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    }
    ~RealFft()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    RealFft(RealFft const&) = delete;
    RealFft& operator=(RealFft const&) = delete;

    double* input() { return in_.get(); }
    void execute() { fftw_execute(plan_); }
    double norm2(std::size_t k) const
    {
        return out_.get()[k][0] * out_.get()[k][0] + out_.get()[k][1] * out_.get()[k][1];
    }

  private:
    std::size_t n_;
    std::unique_ptr<double, FftwDeleter> in_;
    std::unique_ptr<fftw_complex, FftwDeleter> out_;
    fftw_plan plan_;
};
}  // namespace detail

/*!
 * Averaged (Welch) periodogram of uniformly sampled data.
 *
 * Hann window, 50% overlap, per-segment mean removal. The density is
 * normalized so that its integral over angular frequency equals the signal
 * variance.
 */
inline Periodogram welch_periodogram(std::vector<double> const& samples, double dt, std::size_t n_segments)
{
    if (n_segments < 1)
        throw ConfigError("need at least one Welch segment");
    std::size_t const n = samples.size();
    std::size_t seg = 2 * n / (n_segments + 1);
    if (seg < 16)
        throw ConfigError("record too short for the requested Welch segments");
    std::size_t const hop = seg / 2;

    std::vector<double> window(seg);
    double wsum2 = 0;
    for (std::size_t j = 0; j < seg; ++j)
    {
        window[j] = 0.5 * (1 - std::cos(2 * pi * static_cast<double>(j) / static_cast<double>(seg)));
        wsum2 += window[j] * window[j];
    }

    detail::RealFft fft(seg);
    std::size_t const nbins = seg / 2 + 1;
    std::vector<double> acc(nbins, 0.0);
    std::size_t count = 0;
    for (std::size_t start = 0; start + seg <= n; start += hop)
    {
        double mean = 0;
        for (std::size_t j = 0; j < seg; ++j)
            mean += samples[start + j];
        mean /= static_cast<double>(seg);
        for (std::size_t j = 0; j < seg; ++j)
            fft.input()[j] = (samples[start + j] - mean) * window[j];
        fft.execute();
        for (std::size_t k = 0; k < nbins; ++k)
            acc[k] += fft.norm2(k);
        ++count;
    }

    Periodogram pg;
    pg.n_segments = count;
    double const scale = dt / (wsum2 * static_cast<double>(count)) / (2 * pi);
    double const domega = 2 * pi / (static_cast<double>(seg) * dt);
    for (std::size_t k = 1; k < nbins; ++k)
    {
        bool nyquist = (seg % 2 == 0) && k == seg / 2;
        pg.freqs.push_back(static_cast<double>(k) * domega);
        pg.power.push_back(acc[k] * scale * (nyquist ? 1.0 : 2.0));
    }
    return pg;
}

//! Least-squares slope of log power vs log omega on [lo, hi].
inline void fit_power_law(Periodogram& pg, double lo, double hi)
{
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < pg.freqs.size(); ++k)
    {
        if (pg.freqs[k] < lo || pg.freqs[k] > hi || !(pg.power[k] > 0))
            continue;
        lx.push_back(std::log(pg.freqs[k]));
        ly.push_back(std::log(pg.power[k]));
    }
    if (lx.size() < 3)
        throw ConfigError("too few periodogram bins inside the fit range");
    auto fit = fit_line(lx, ly);
    pg.fit_exponent = fit.slope;
    pg.fit_stderr = fit.slope_stderr;
    pg.fit_lo = lo;
    pg.fit_hi = hi;
}

/*!
 * Periodogram of F(t) sampled over [0, duration) at step dt, with the
 * power-law exponent fitted on [1.25 omega_min, 0.8 omega_max].
 */
inline Periodogram estimate_spectrum(FieldRealization const& r,
                                     double duration,
                                     double dt,
                                     std::size_t n_segments = 64)
{
    auto const& ms = r.mode_set;
    if (ms.size() < 2)
        throw ConfigError("cannot fit a spectral slope with fewer than two modes");
    if (!(duration >= 50 * 2 * pi / ms.omega_min))
        throw ConfigError("duration must be at least 50 periods of omega_min");
    if (!(dt > 0 && dt <= pi / (4 * ms.omega_max)))
        throw ConfigError("dt must satisfy 0 < dt <= pi / (4 omega_max)");
    auto n = static_cast<std::size_t>(duration / dt);
    auto samples = eval_field_grid(r, 0.0, dt, n);
    auto pg = welch_periodogram(samples, dt, n_segments);
    fit_power_law(pg, 1.25 * ms.omega_min, 0.8 * ms.omega_max);
    return pg;
}

}  // namespace zpf
