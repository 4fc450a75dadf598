//! \file polynomial.hpp
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "core.hpp"

namespace zpf
{
//! Dense univariate polynomial sum_k c_k x^k.
class Polynomial
{
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }

    std::vector<double> const& coefficients() const { return c_; }

    //! Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    double coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }

    double operator()(double x) const
    {
        double r = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            r = r * x + *it;
        return r;
    }

    Polynomial derivative(int order = 1) const
    {
        std::vector<double> d = c_;
        for (int o = 0; o < order && !d.empty(); ++o)
        {
            for (std::size_t k = 1; k < d.size(); ++k)
                d[k - 1] = static_cast<double>(k) * d[k];
            d.pop_back();
        }
        return Polynomial(std::move(d));
    }

    friend bool operator==(Polynomial const&, Polynomial const&) = default;

  private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0.0)
            c_.pop_back();
    }

    std::vector<double> c_;
};

/*!
 * Particle potential V(x) as a polynomial of degree at most 8.
 */
struct PotentialSpec
{
    static constexpr int max_degree = 8;

    Polynomial poly;

    PotentialSpec() = default;
    explicit PotentialSpec(Polynomial p) : poly(std::move(p))
    {
        if (poly.degree() > max_degree)
            throw ConfigError("potential degree exceeds 8");
        for (double c : poly.coefficients())
            if (!std::isfinite(c))
                throw ConfigError("potential coefficients must be finite");
    }

    static PotentialSpec harmonic(double mass = 1, double omega = 1)
    {
        return PotentialSpec(Polynomial{0.0, 0.0, 0.5 * mass * omega * omega});
    }
    static PotentialSpec quartic(double lambda)
    {
        return PotentialSpec(Polynomial{0.0, 0.0, 0.0, 0.0, lambda});
    }

    double value(double x) const { return poly(x); }
    int degree() const { return poly.degree(); }

    //! Even leading power with positive coefficient.
    bool is_confining() const
    {
        int d = poly.degree();
        return d >= 2 && d % 2 == 0 && poly.leading() > 0;
    }
    bool is_quadratic() const { return poly.degree() <= 2; }

    friend bool operator==(PotentialSpec const&, PotentialSpec const&) = default;
};

//! Force -V'(x).
inline double drift_force(PotentialSpec const& v, double x)
{
    auto const& c = v.poly.coefficients();
    double r = 0;
    for (std::size_t k = c.size(); k-- > 1;)
        r = r * x + static_cast<double>(k) * c[k];
    return -r;
}

}  // namespace zpf
