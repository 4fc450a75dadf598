//! \file moyal.hpp
//! Wigner-function evolution under the truncated Moyal series.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "core.hpp"
#include "oracle.hpp"
#include "polynomial.hpp"
#include "stencil.hpp"
#include "wigner.hpp"

namespace zpf
{
struct HamiltonianSpec
{
    double mass = 1;
    PotentialSpec potential;
    double hbar = 1;

    void validate() const
    {
        if (!(mass > 0))
            throw ConfigError("mass must be positive");
        if (!(hbar > 0))
            throw ConfigError("hbar must be positive");
        if (potential.degree() > PotentialSpec::max_degree)
            throw ConfigError("potential degree exceeds 8");
    }
};

//! Highest retained series index; 0 is the classical Liouville flow.
struct MoyalOrder
{
    int n_max = 0;

    void validate() const
    {
        if (n_max < 0 || n_max > 3)
            throw ConfigError("Moyal order must lie in [0, 3]");
    }
};

/*!
 * Right-hand side of the Moyal equation for H = p^2/2m + V(x) on a grid.
 *
 *   dW/dt = -(p/m) dW/dx + V'(x) dW/dp
 *           + sum_{n=1}^{n_max} (-1)^n (hbar/2)^(2n) / (2n+1)!  V^(2n+1)(x) d^(2n+1)W/dp^(2n+1)
 *
 * Terms whose potential derivative vanishes identically are skipped, so for
 * quadratic V every order produces exactly the classical result.
 */
class MoyalOperator
{
  public:
    MoyalOperator(Axis xa, Axis pa, HamiltonianSpec const& h, MoyalOrder order)
        : x_(xa), p_(pa), mass_(h.mass)
    {
        h.validate();
        order.validate();
        dx_ = DerivativeStencil(1, xa.n, EdgeClosure::zero_extension);
        dp_ = DerivativeStencil(1, pa.n, EdgeClosure::zero_extension);
        auto dv = h.potential.poly.derivative(1);
        for (std::size_t i = 0; i < xa.n; ++i)
            dvdx_.push_back(dv(xa[i]));
        for (std::size_t j = 0; j < pa.n; ++j)
            vel_.push_back(pa[j] / h.mass);

        double factorial = 1;
        for (int n = 1; n <= order.n_max; ++n)
        {
            int k = 2 * n + 1;
            factorial *= (2.0 * n) * (2.0 * n + 1);
            auto vk = h.potential.poly.derivative(k);
            if (vk.is_zero())
                continue;
            double coef = (n % 2 ? -1.0 : 1.0) * std::pow(0.5 * h.hbar, 2 * n) / factorial;
            Term t;
            t.order = k;
            t.stencil = DerivativeStencil(k, pa.n, EdgeClosure::zero_extension);
            for (std::size_t i = 0; i < xa.n; ++i)
                t.coef_x.push_back(coef * vk(xa[i]));
            terms_.push_back(std::move(t));
        }
    }

    Axis const& x_axis() const { return x_; }
    Axis const& p_axis() const { return p_; }
    std::size_t n_correction_terms() const { return terms_.size(); }

    void apply(std::vector<double> const& w, std::vector<double>& out) const
    {
        std::size_t const nx = x_.n, np = p_.n;
        out.assign(nx * np, 0.0);
        std::vector<double> dwx(nx * np);
        std::vector<double> row(np);
        for (std::size_t j = 0; j < np; ++j)
            dx_.apply(w.data() + j, nx, static_cast<std::ptrdiff_t>(np), x_.step(), dwx.data() + j,
                      static_cast<std::ptrdiff_t>(np));
        for (std::size_t i = 0; i < nx; ++i)
        {
            double const* wi = w.data() + i * np;
            double* oi = out.data() + i * np;
            double const* gx = dwx.data() + i * np;
            dp_.apply(wi, np, 1, p_.step(), row.data(), 1);
            for (std::size_t j = 0; j < np; ++j)
                oi[j] = -vel_[j] * gx[j] + dvdx_[i] * row[j];
            for (auto const& t : terms_)
            {
                t.stencil.apply(wi, np, 1, p_.step(), row.data(), 1);
                double c = t.coef_x[i];
                for (std::size_t j = 0; j < np; ++j)
                    oi[j] += c * row[j];
            }
        }
    }

    /*!
     * Largest dt for which RK4 stays inside its imaginary-axis stability
     * interval, from the stencil symbols of every retained term.
     */
    double stability_dt() const
    {
        double rate = dx_.max_symbol() / x_.step() * p_.max_abs() / mass_;
        double maxdv = 0;
        for (double v : dvdx_)
            maxdv = std::max(maxdv, std::fabs(v));
        rate += dp_.max_symbol() / p_.step() * maxdv;
        for (auto const& t : terms_)
        {
            double mc = 0;
            for (double c : t.coef_x)
                mc = std::max(mc, std::fabs(c));
            rate += t.stencil.max_symbol() / std::pow(p_.step(), t.order) * mc;
        }
        return rate > 0 ? 2.5 / rate : std::numeric_limits<double>::infinity();
    }

    //! 0.2 min(dx m / p_max, dp / max|V'|).
    double cfl_dt() const
    {
        double maxdv = 0;
        for (double v : dvdx_)
            maxdv = std::max(maxdv, std::fabs(v));
        double a = x_.step() * mass_ / p_.max_abs();
        double b = maxdv > 0 ? p_.step() / maxdv : std::numeric_limits<double>::infinity();
        return 0.2 * std::min(a, b);
    }

  private:
    struct Term
    {
        int order = 3;
        DerivativeStencil stencil;
        std::vector<double> coef_x;
    };

    Axis x_, p_;
    double mass_;
    DerivativeStencil dx_, dp_;
    std::vector<double> dvdx_;
    std::vector<double> vel_;
    std::vector<Term> terms_;
};

inline WignerGrid moyal_rhs(WignerGrid const& w, HamiltonianSpec const& h, MoyalOrder order)
{
    MoyalOperator op(w.x, w.p, h, order);
    WignerGrid out(w.x, w.p);
    op.apply(w.values, out.values);
    return out;
}

struct WignerEvolution
{
    WignerGrid grid;
    double norm_initial = 0;
    double norm_final = 0;
    double norm_drift = 0;  //!< |norm_final - norm_initial|
    std::vector<double> min_history;  //!< min W after each step, index 0 = initial
    double max_boundary_fraction = 0;
};

using WignerObserver = std::function<void(std::size_t step, WignerGrid const&)>;

/*!
 * Classical RK4 in time for dW/dt = moyal_rhs.
 *
 * Throws ConfigError if dt breaks the CFL bound (or RK4 stability of the
 * retained correction terms) and GridEscape if more than 1e-4 of |W| reaches
 * the outer two cells.
 */
inline WignerEvolution evolve_wigner(WignerGrid const& w0,
                                     HamiltonianSpec const& h,
                                     MoyalOrder order,
                                     double dt,
                                     std::size_t n_steps,
                                     WignerObserver const& observer = {})
{
    MoyalOperator op(w0.x, w0.p, h, order);
    if (!(dt > 0))
        throw ConfigError("dt must be positive");
    if (dt > op.cfl_dt() * (1 + 1e-12))
        throw ConfigError("dt exceeds the CFL bound " + std::to_string(op.cfl_dt()));
    if (dt > op.stability_dt())
        throw ConfigError("dt exceeds the RK4 stability bound of the Moyal correction terms "
                          + std::to_string(op.stability_dt()));
    if (w0.values.size() != w0.x.n * w0.p.n)
        throw ConfigError("grid value count does not match the axes");
    if (boundary_ratio(w0) >= 1e-8)
        throw ConfigError("initial Wigner function is not compactly supported on the grid");

    WignerEvolution ev;
    ev.grid = w0;
    ev.norm_initial = total_mass(w0);
    auto grid_min = [](std::vector<double> const& v) { return *std::min_element(v.begin(), v.end()); };
    ev.min_history.push_back(grid_min(w0.values));

    std::size_t const n = w0.values.size();
    std::vector<double> k1, k2, k3, k4, tmp(n);
    auto& w = ev.grid.values;
    if (observer)
        observer(0, ev.grid);
    for (std::size_t s = 0; s < n_steps; ++s)
    {
        op.apply(w, k1);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = w[i] + 0.5 * dt * k1[i];
        op.apply(tmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = w[i] + 0.5 * dt * k2[i];
        op.apply(tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = w[i] + dt * k3[i];
        op.apply(tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            w[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);

        double frac = boundary_mass_fraction(ev.grid);
        ev.max_boundary_fraction = std::max(ev.max_boundary_fraction, frac);
        if (frac > 1e-4)
            throw GridEscape("Wigner function reached the grid boundary", static_cast<double>(s + 1) * dt);
        ev.min_history.push_back(grid_min(w));
        if (observer)
            observer(s + 1, ev.grid);
    }
    ev.norm_final = total_mass(ev.grid);
    ev.norm_drift = std::fabs(ev.norm_final - ev.norm_initial);
    return ev;
}

//! Number of steps to reach t_final at no more than dt_scale times the admissible step.
inline std::size_t steps_for(MoyalOperator const& op, double t_final, double dt_scale = 1.0)
{
    double dt = std::min(op.cfl_dt(), op.stability_dt()) * dt_scale;
    return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

//---------------------------------------------------------------------------//
// hbar scaling of the classical-vs-quantum gap
//---------------------------------------------------------------------------//

struct ScalingSetup
{
    Axis x{-4.0, 4.0, 128};
    Axis p{-4.0, 4.0, 128};
    GaussianWignerParams initial{0.5, 0.0, 0.25, 0.25, 0.0};
    double mass = 1.0;
    double dt_scale = 1.0;  //!< fraction of the admissible step
    int correction_order = 1;
};

struct ScalingReport
{
    std::vector<double> hbar;
    std::vector<double> distance;  //!< L2 distance between order-0 and corrected grids
    std::vector<std::size_t> steps;
    double slope = 0;
    double slope_stderr = 0;
};

/*!
 * For each hbar, evolve one physical Gaussian under the Liouville flow and
 * under the corrected Moyal flow to t_final; fit log D against log hbar.
 */
inline ScalingReport hbar_scaling_study(PotentialSpec const& v,
                                        std::vector<double> const& hbar_list,
                                        double t_final,
                                        ScalingSetup const& setup = {})
{
    if (v.degree() < 3)
        throw ConfigError("hbar scaling needs an anharmonic potential; the quadratic gap vanishes identically");
    if (hbar_list.size() < 4)
        throw ConfigError("need at least four hbar values");
    auto [lo, hi] = std::minmax_element(hbar_list.begin(), hbar_list.end());
    if (!(*lo > 0) || *hi < 2 * *lo)
        throw ConfigError("hbar values must be positive and span at least one octave");
    if (!(t_final > 0))
        throw ConfigError("t_final must be positive");
    setup.initial.validate(*hi);

    auto w0 = gaussian_grid(setup.x, setup.p, setup.initial);
    ScalingReport rep;
    for (double hb : hbar_list)
    {
        HamiltonianSpec h{setup.mass, v, hb};
        MoyalOperator op(setup.x, setup.p, h, MoyalOrder{setup.correction_order});
        std::size_t n = steps_for(op, t_final, setup.dt_scale);
        double dt = t_final / static_cast<double>(n);
        auto classical = evolve_wigner(w0, h, MoyalOrder{0}, dt, n);
        auto corrected = evolve_wigner(w0, h, MoyalOrder{setup.correction_order}, dt, n);
        rep.hbar.push_back(hb);
        rep.distance.push_back(l2_distance(classical.grid, corrected.grid));
        rep.steps.push_back(n);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.hbar.size(); ++i)
    {
        lx.push_back(std::log(rep.hbar[i]));
        ly.push_back(std::log(rep.distance[i]));
    }
    auto fit = fit_line(lx, ly);
    rep.slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    return rep;
}

}  // namespace zpf
