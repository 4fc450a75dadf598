//! \file core.hpp
//! Units, error types and small numeric helpers shared by every module.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zpf
{
inline constexpr char const* version_string = "0.1.0";

inline constexpr double pi = 3.14159265358979323846;

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

//! Invalid input or configuration; detected before any compute.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! Non-finite particle state during trajectory integration.
class IntegrationBlowup : public std::runtime_error
{
  public:
    IntegrationBlowup(std::string const& msg, double time, long trajectory = -1)
        : std::runtime_error(msg), time_(time), trajectory_(trajectory)
    {
    }

    double time() const { return time_; }
    //! Offending trajectory index within an ensemble, or -1.
    long trajectory() const { return trajectory_; }

  private:
    double time_;
    long trajectory_;
};

//! Phase-space density reached the edge of the computational box.
class GridEscape : public std::runtime_error
{
  public:
    GridEscape(std::string const& msg, double time)
        : std::runtime_error(msg), time_(time)
    {
    }
    double time() const { return time_; }

  private:
    double time_;
};

//! An iterative or basis-truncated oracle failed to converge.
class ConvergenceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Parses the whole of `text` as a number; throws ConfigError naming `what`.
template<class T>
T parse_number(std::string_view text, std::string_view what)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
    return v;
}

//---------------------------------------------------------------------------//
// Units
//---------------------------------------------------------------------------//

/*!
 * Reduced unit system.
 *
 * The only physical dial is the dimensionless radiation-damping coupling
 * gamma = tau * omega0; charge and light speed never appear on their own.
 * The decomposition gamma = (2/3) alpha (hbar omega0 / m c^2) is documentation
 * only.
 */
struct UnitSystem
{
    double hbar = 1.0;
    double mass = 1.0;
    double omega0 = 1.0;
    double gamma = 0.01;

    //! Radiation-reaction time tau.
    double tau() const { return gamma / omega0; }

    //! Strict invariants: positive scales and 0 < gamma < 0.1.
    void validate() const
    {
        if (!(hbar > 0) || !std::isfinite(hbar))
            throw ConfigError("hbar must be positive");
        if (!(mass > 0) || !std::isfinite(mass))
            throw ConfigError("mass must be positive");
        if (!(omega0 > 0) || !std::isfinite(omega0))
            throw ConfigError("omega0 must be positive");
        if (!(gamma > 0 && gamma < 0.1))
            throw ConfigError("gamma must satisfy 0 < gamma < 0.1 (got "
                              + std::to_string(gamma) + ")");
    }

    friend bool operator==(UnitSystem const&, UnitSystem const&) = default;
};

//---------------------------------------------------------------------------//
// Compensated summation
//---------------------------------------------------------------------------//

//! Neumaier (improved Kahan) running sum.
class CompensatedSum
{
  public:
    void add(double v)
    {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double v)
    {
        this->add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

inline double compensated_sum(std::span<double const> values)
{
    CompensatedSum s;
    for (double v : values)
        s.add(v);
    return s.value();
}

//---------------------------------------------------------------------------//
//! Ordinary least-squares line fit y = a + b x.
struct LineFit
{
    double intercept = 0;
    double slope = 0;
    double slope_stderr = 0;
};

inline LineFit fit_line(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("line fit needs at least two points");
    double const n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0))
        throw ConfigError("line fit abscissae are degenerate");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2)
    {
        double ssr = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(ssr / (n - 2) / sxx);
    }
    return fit;
}

}  // namespace zpf
