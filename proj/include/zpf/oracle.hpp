//! \file oracle.hpp
//! Closed-form and brute-force quantum references.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "polynomial.hpp"

namespace zpf
{
//---------------------------------------------------------------------------//
//! Gaussian Wigner function parameters in a conjugate pair (x, p) or (y, q).
struct GaussianWignerParams
{
    double mean_x = 0;
    double mean_p = 0;
    double var_x = 0;
    double var_p = 0;
    double cov_xp = 0;

    double determinant() const { return var_x * var_p - cov_xp * cov_xp; }

    //! det - (hbar/2)^2; zero for a pure state, negative is unphysical.
    double uncertainty_slack(double hbar) const { return determinant() - 0.25 * hbar * hbar; }

    void validate(double hbar) const
    {
        if (!(var_x > 0) || !(var_p > 0))
            throw ConfigError("Gaussian variances must be positive");
        if (uncertainty_slack(hbar) < -1e-12)
            throw ConfigError("Gaussian violates the uncertainty bound var_x var_p - cov^2 >= (hbar/2)^2");
    }

    //! Normalized phase-space density at (x, p).
    double density(double x, double p) const
    {
        double det = determinant();
        double dx = x - mean_x;
        double dp = p - mean_p;
        double quad = (var_p * dx * dx - 2 * cov_xp * dx * dp + var_x * dp * dp) / det;
        return std::exp(-0.5 * quad) / (2 * pi * std::sqrt(det));
    }
};

//! Vacuum Wigner function of one field mode in (y, q): var_y = hbar/(2 omega), var_q = hbar omega / 2.
inline GaussianWignerParams vacuum_wigner_mode(double omega, double hbar)
{
    if (!(omega > 0))
        throw ConfigError("mode frequency must be positive");
    GaussianWignerParams g;
    g.var_x = hbar / (2 * omega);
    g.var_p = hbar * omega / 2;
    return g;
}

inline GaussianWignerParams oscillator_ground_oracle(double mass, double omega, double hbar)
{
    if (!(mass > 0) || !(omega > 0))
        throw ConfigError("mass and omega must be positive");
    GaussianWignerParams g;
    g.var_x = hbar / (2 * mass * omega);
    g.var_p = mass * hbar * omega / 2;
    return g;
}

//! <p^2/2m + m omega^2 x^2 / 2> of a Gaussian.
inline double harmonic_energy(GaussianWignerParams const& g, double mass, double omega)
{
    double x2 = g.var_x + g.mean_x * g.mean_x;
    double p2 = g.var_p + g.mean_p * g.mean_p;
    return p2 / (2 * mass) + 0.5 * mass * omega * omega * x2;
}

//! Exact harmonic phase flow applied to means and covariance.
inline GaussianWignerParams rotate_gaussian(GaussianWignerParams const& g, double mass, double omega, double t)
{
    double c = std::cos(omega * t);
    double s = std::sin(omega * t);
    double a = c, b = s / (mass * omega);
    double d = -mass * omega * s, e = c;
    GaussianWignerParams r;
    r.mean_x = a * g.mean_x + b * g.mean_p;
    r.mean_p = d * g.mean_x + e * g.mean_p;
    r.var_x = a * a * g.var_x + 2 * a * b * g.cov_xp + b * b * g.var_p;
    r.var_p = d * d * g.var_x + 2 * d * e * g.cov_xp + e * e * g.var_p;
    r.cov_xp = a * d * g.var_x + (a * e + b * d) * g.cov_xp + b * e * g.var_p;
    return r;
}

//---------------------------------------------------------------------------//
// Stationary moments of a bound state, via harmonic-oscillator basis
// diagonalization.
//---------------------------------------------------------------------------//

struct GroundStateMoments
{
    double energy = 0;
    double var_x = 0;
    double var_p = 0;
    double mean_kinetic = 0;
    double mean_potential = 0;
    std::size_t basis_size = 0;  //!< basis at which convergence was declared
    double basis_omega = 0;
    double last_change = 0;
};

namespace detail
{
inline double double_factorial(int n)
{
    double r = 1;
    for (int k = n; k > 1; k -= 2)
        r *= k;
    return r;
}

//! Gaussian trial energy hbar omega / 4 + <V> at width hbar / (2 m omega).
inline double gaussian_trial_energy(PotentialSpec const& v, double mass, double hbar, double omega)
{
    double var = hbar / (2 * mass * omega);
    double e = hbar * omega / 4;
    auto const& c = v.poly.coefficients();
    for (std::size_t k = 0; k < c.size(); k += 2)
        e += c[k] * double_factorial(static_cast<int>(k) - 1) * std::pow(var, static_cast<double>(k) / 2);
    return e;
}

inline double variational_basis_omega(PotentialSpec const& v, double mass, double hbar)
{
    double lo = std::log(1e-4), hi = std::log(1e4);
    double const g = 0.5 * (std::sqrt(5.0) - 1);
    auto f = [&](double lw) { return gaussian_trial_energy(v, mass, hbar, std::exp(lw)); };
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = f(a), fb = f(b);
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it)
    {
        if (fa < fb)
        {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
        else
        {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

inline GroundStateMoments
diagonalize_in_oscillator_basis(PotentialSpec const& v, double mass, double hbar, double omega_b, std::size_t n)
{
    using Eigen::MatrixXd;
    int const deg = v.degree();
    auto const big = static_cast<Eigen::Index>(n + static_cast<std::size_t>(std::max(deg, 2)) + 2);
    auto const nn = static_cast<Eigen::Index>(n);

    MatrixXd x = MatrixXd::Zero(big, big);
    double const xs = std::sqrt(hbar / (2 * mass * omega_b));
    for (Eigen::Index k = 0; k + 1 < big; ++k)
    {
        x(k + 1, k) = xs * std::sqrt(static_cast<double>(k + 1));
        x(k, k + 1) = x(k + 1, k);
    }

    // V(X) by Horner in the enlarged basis, then truncated
    MatrixXd vmat = MatrixXd::Zero(big, big);
    auto const& c = v.poly.coefficients();
    for (std::size_t k = c.size(); k-- > 0;)
    {
        vmat = (vmat * x).eval();
        vmat.diagonal().array() += c[k];
    }
    MatrixXd x2 = x * x;

    MatrixXd p2 = MatrixXd::Zero(nn, nn);
    double const ps = 0.5 * mass * omega_b * hbar;
    for (Eigen::Index k = 0; k < nn; ++k)
    {
        p2(k, k) = ps * (2.0 * static_cast<double>(k) + 1.0);
        if (k + 2 < nn)
        {
            p2(k + 2, k) = -ps * std::sqrt(static_cast<double>((k + 1) * (k + 2)));
            p2(k, k + 2) = p2(k + 2, k);
        }
    }

    MatrixXd kin = p2 / (2 * mass);
    MatrixXd pot = vmat.topLeftCorner(nn, nn);
    MatrixXd h = kin + pot;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("eigensolver failed");
    Eigen::VectorXd g = es.eigenvectors().col(0);

    GroundStateMoments m;
    m.energy = es.eigenvalues()(0);
    double mean_x = g.dot(x.topLeftCorner(nn, nn) * g);
    m.var_x = g.dot(x2.topLeftCorner(nn, nn) * g) - mean_x * mean_x;
    m.var_p = g.dot(p2 * g);
    m.mean_kinetic = g.dot(kin * g);
    m.mean_potential = g.dot(pot * g);
    m.basis_size = n;
    m.basis_omega = omega_b;
    return m;
}
}  // namespace detail

/*!
 * Ground state of p^2/2m + V(x) by dense diagonalization in a harmonic
 * oscillator basis whose frequency minimizes the Gaussian trial energy.
 *
 * The basis is doubled from basis_size until the energy changes by less than
 * tol; the moments of the larger basis are returned.
 */
inline GroundStateMoments polynomial_ground_state(PotentialSpec const& v,
                                                  double mass,
                                                  double hbar,
                                                  std::size_t basis_size,
                                                  double tol = 1e-8,
                                                  std::size_t max_basis = 1280)
{
    if (!v.is_confining())
        throw ConfigError("ground-state oracle needs a confining potential");
    if (basis_size < 8)
        throw ConfigError("basis_size too small");
    double omega_b = detail::variational_basis_omega(v, mass, hbar);
    auto prev = detail::diagonalize_in_oscillator_basis(v, mass, hbar, omega_b, basis_size);
    for (std::size_t n = 2 * basis_size; n <= max_basis; n *= 2)
    {
        auto next = detail::diagonalize_in_oscillator_basis(v, mass, hbar, omega_b, n);
        next.last_change = std::fabs(next.energy - prev.energy);
        if (next.last_change < tol)
            return next;
        prev = next;
    }
    throw ConvergenceError("ground-state energy not converged at basis size "
                           + std::to_string(max_basis));
}

//! Ground state of p^2/2 + lambda x^4 (unit mass).
inline GroundStateMoments quartic_ground_oracle(double lambda, double hbar, std::size_t basis_size)
{
    if (!(lambda > 0))
        throw ConfigError("quartic coefficient must be positive");
    if (basis_size < 40)
        throw ConfigError("basis_size must be at least 40");
    return polynomial_ground_state(PotentialSpec::quartic(lambda), 1.0, hbar, basis_size);
}

}  // namespace zpf
