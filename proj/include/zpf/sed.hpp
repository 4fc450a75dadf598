//! \file sed.hpp
//! Langevin dynamics of a charged particle in the zero-point field, and
//! ensemble statistics over field realizations.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "field.hpp"
#include "oracle.hpp"
#include "polynomial.hpp"
#include "rng.hpp"

namespace zpf
{
enum class RadiationReaction
{
    order_reduced,
    none
};

enum class InitialCondition
{
    fixed,   //!< definite (x0, p0)
    wigner,  //!< (x0, p0) drawn from a Gaussian Wigner function
};

struct ParticleState
{
    double x = 0;
    double p = 0;
    double t = 0;
};

/*!
 * Radiation-reaction force.
 *
 * The order-reduced form replaces the third derivative of x by the time
 * derivative of the conservative acceleration, giving -tau V''(x) p / m.
 */
inline double radiation_reaction_force(RadiationReaction model,
                                       PotentialSpec const& v,
                                       ParticleState const& s,
                                       double tau,
                                       double mass = 1.0)
{
    if (model == RadiationReaction::none || tau == 0)
        return 0.0;
    double curvature = v.poly.derivative(2)(s.x);
    return -tau * curvature * (s.p / mass);
}

struct SedConfig
{
    UnitSystem units;
    PotentialSpec potential = PotentialSpec::harmonic();
    double omega_min = 0.2;
    double omega_max = 5.0;
    std::size_t n_modes = 256;
    FrequencyStrategy strategy = FrequencyStrategy::stratified_jitter;
    double dt = 0.02;
    double t_end = 1000;
    double t_burn = 500;
    std::size_t n_trajectories = 500;
    RadiationReaction rr_model = RadiationReaction::order_reduced;
    InitialCondition init = InitialCondition::fixed;
    double x0 = 0;
    double p0 = 0;
    //! Used when init == wigner; defaults to the oscillator ground state.
    std::optional<GaussianWignerParams> init_wigner;
    std::size_t stride = 1;
    unsigned workers = 0;  //!< 0 = hardware concurrency

    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

    //! Checks needed for a single trajectory.
    void validate_integration() const
    {
        if (!(dt > 0) || !std::isfinite(dt))
            throw ConfigError("dt must be positive");
        if (!(t_end > 0) || !std::isfinite(t_end))
            throw ConfigError("t_end must be positive");
        if (!(units.mass > 0) || !(units.omega0 > 0) || !(units.gamma >= 0))
            throw ConfigError("invalid unit system for integration");
        if (stride < 1)
            throw ConfigError("stride must be at least 1");
        if (!(dt < pi / omega_max))
            throw ConfigError("dt too coarse for omega_max");
    }

    //! Full invariants required for a stationary ensemble.
    void validate() const
    {
        units.validate();
        validate_integration();
        if (!(omega_min > 0 && omega_max > omega_min))
            throw ConfigError("mode band must satisfy 0 < omega_min < omega_max");
        if (n_modes < 2)
            throw ConfigError("n_modes must be at least 2");
        double dt_max = std::min(0.02 * 2 * pi / units.omega0, pi / (2 * omega_max));
        if (dt > dt_max)
            throw ConfigError("dt exceeds min(0.02 * 2pi/omega0, pi/(2 omega_max)) = "
                              + std::to_string(dt_max));
        double burn_min = 5.0 / (units.gamma * units.omega0);
        if (t_burn < burn_min * (1 - 1e-12))
            throw ConfigError("t_burn must be at least 5 / (gamma omega0) = " + std::to_string(burn_min));
        if (!(t_end >= 2 * t_burn * (1 - 1e-12)))
            throw ConfigError("t_end must be at least 2 t_burn");
        if (!potential.is_confining())
            throw ConfigError("stationary statistics need a confining potential "
                              "(even degree >= 2, positive leading coefficient)");
        if (n_trajectories < 2)
            throw ConfigError("n_trajectories must be at least 2");
        if (init == InitialCondition::wigner && init_wigner)
            init_wigner->validate(units.hbar);
    }
};

struct Trajectory
{
    std::vector<ParticleState> states;
    std::uint64_t realization_seed = 0;
};

namespace detail
{
struct ForceModel
{
    Polynomial dv;
    Polynomial d2v;
    double tau = 0;
    double mass = 1;
    bool reaction = false;

    ForceModel(SedConfig const& c)
        : dv(c.potential.poly.derivative(1)),
          d2v(c.potential.poly.derivative(2)),
          tau(c.units.tau()),
          mass(c.units.mass),
          reaction(c.rr_model == RadiationReaction::order_reduced && c.units.gamma > 0)
    {
    }

    double dpdt(double x, double p, double f) const
    {
        double force = -dv(x) + f;
        if (reaction)
            force -= tau * d2v(x) * (p / mass);
        return force;
    }
};

/*!
 * Fixed-step RK4 over [0, n_steps dt]; calls observe(k, state) at every step.
 *
 * The force is sampled once on the step grid (plus one point either side)
 * and evaluated at half steps by four-point cubic interpolation, which keeps
 * the scheme fourth order.
 */
template<class Observer>
void integrate_sed(SedConfig const& cfg, FieldRealization const& r, ParticleState init, Observer&& observe)
{
    std::size_t const n = cfg.n_steps();
    double const h = cfg.dt;
    auto force = eval_field_grid(r, -h, h, n + 3);  // force[k + 1] = F(k h)
    ForceModel fm(cfg);
    double const inv_m = 1.0 / cfg.units.mass;

    double x = init.x, p = init.p;
    observe(std::size_t{0}, ParticleState{x, p, 0.0});
    for (std::size_t k = 0; k < n; ++k)
    {
        double f0 = force[k + 1];
        double f1 = force[k + 2];
        double fm_half = (9.0 * (f0 + f1) - force[k] - force[k + 3]) / 16.0;

        double k1x = p * inv_m;
        double k1p = fm.dpdt(x, p, f0);
        double x2 = x + 0.5 * h * k1x, p2 = p + 0.5 * h * k1p;
        double k2x = p2 * inv_m;
        double k2p = fm.dpdt(x2, p2, fm_half);
        double x3 = x + 0.5 * h * k2x, p3 = p + 0.5 * h * k2p;
        double k3x = p3 * inv_m;
        double k3p = fm.dpdt(x3, p3, fm_half);
        double x4 = x + h * k3x, p4 = p + h * k3p;
        double k4x = p4 * inv_m;
        double k4p = fm.dpdt(x4, p4, f1);
        x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);

        double t = static_cast<double>(k + 1) * h;
        if (!std::isfinite(x) || !std::isfinite(p))
            throw IntegrationBlowup("non-finite particle state at t = " + std::to_string(t), t);
        observe(k + 1, ParticleState{x, p, t});
    }
}

inline void check_band(SedConfig const& cfg, FieldRealization const& r)
{
    auto const& ms = r.mode_set;
    if (ms.size() != cfg.n_modes || ms.omega_min != cfg.omega_min || ms.omega_max != cfg.omega_max)
        throw ConfigError("field realization band does not match the configuration");
}
}  // namespace detail

inline Trajectory integrate_trajectory(SedConfig const& cfg, FieldRealization const& r, ParticleState init)
{
    cfg.validate_integration();
    detail::check_band(cfg, r);
    Trajectory tr;
    tr.realization_seed = r.seed;
    tr.states.reserve(cfg.n_steps() / cfg.stride + 1);
    detail::integrate_sed(cfg, r, init, [&](std::size_t k, ParticleState const& s) {
        if (k % cfg.stride == 0)
            tr.states.push_back(s);
    });
    return tr;
}

//---------------------------------------------------------------------------//
// Ensembles
//---------------------------------------------------------------------------//

//! Time averages of one trajectory over the stationary window and its halves.
struct TrajectoryMoments
{
    struct Window
    {
        double x = 0, p = 0, x2 = 0, p2 = 0, energy = 0;
        std::size_t n = 0;
    };
    Window full, first, second;
};

struct Estimate
{
    double value = 0;
    double std_error = 0;
};

struct EnsembleStats
{
    UnitSystem units;
    PotentialSpec potential;
    Estimate mean_x, mean_p, var_x, var_p, mean_energy;
    //! Same estimates on the two halves of the stationary window.
    Estimate first_var_x, second_var_x, first_var_p, second_var_p;
    Estimate first_mean_x, second_mean_x, first_energy, second_energy;
    std::size_t n_trajectories = 0;
    std::size_t n_blown_up = 0;
    double n_effective_samples = 0;
};

namespace detail
{
inline std::uint64_t trajectory_seed(std::uint64_t master, std::size_t k) { return derive_seed(master, k); }

inline FieldRealization trajectory_realization(SedConfig const& cfg, std::uint64_t seed)
{
    auto modes = build_mode_set(cfg.omega_min, cfg.omega_max, cfg.n_modes, cfg.units, cfg.strategy,
                                derive_seed(seed, 1));
    return sample_vacuum_amplitudes(modes, seed);
}

inline ParticleState trajectory_initial_state(SedConfig const& cfg, std::uint64_t seed)
{
    if (cfg.init == InitialCondition::fixed)
        return {cfg.x0, cfg.p0, 0.0};
    auto g = cfg.init_wigner.value_or(oscillator_ground_oracle(cfg.units.mass, cfg.units.omega0, cfg.units.hbar));
    auto [z1, z2] = CounterRng(derive_seed(seed, 2)).normal_pair(0);
    // Cholesky of the 2x2 covariance
    double lx = std::sqrt(g.var_x);
    double c = g.cov_xp / lx;
    double lp = std::sqrt(std::max(g.var_p - c * c, 0.0));
    return {g.mean_x + lx * z1, g.mean_p + c * z1 + lp * z2, 0.0};
}

inline TrajectoryMoments moments_of_trajectory(SedConfig const& cfg, FieldRealization const& r, ParticleState init)
{
    std::size_t const n = cfg.n_steps();
    auto const k_burn = static_cast<std::size_t>(std::ceil(cfg.t_burn / cfg.dt - 1e-9));
    std::size_t const k_mid = k_burn + (n - k_burn) / 2;
    double const inv_2m = 0.5 / cfg.units.mass;

    struct Acc
    {
        CompensatedSum x, p, x2, p2, e;
        std::size_t n = 0;
        void add(double xv, double pv, double ev)
        {
            x += xv;
            p += pv;
            x2 += xv * xv;
            p2 += pv * pv;
            e += ev;
            ++n;
        }
        TrajectoryMoments::Window finish() const
        {
            double d = n ? static_cast<double>(n) : 1.0;
            return {x.value() / d, p.value() / d, x2.value() / d, p2.value() / d, e.value() / d, n};
        }
    } full, first, second;

    integrate_sed(cfg, r, init, [&](std::size_t k, ParticleState const& s) {
        if (k < k_burn || k % cfg.stride != 0)
            return;
        double e = s.p * s.p * inv_2m + cfg.potential.value(s.x);
        full.add(s.x, s.p, e);
        (k < k_mid ? first : second).add(s.x, s.p, e);
    });
    return {full.finish(), first.finish(), second.finish()};
}

//! Ensemble estimate of a mean with its standard error across trajectories.
inline Estimate mean_estimate(std::vector<double> const& v)
{
    CompensatedSum s;
    for (double x : v)
        s += x;
    double n = static_cast<double>(v.size());
    double m = s.value() / n;
    CompensatedSum ss;
    for (double x : v)
        ss += (x - m) * (x - m);
    return {m, std::sqrt(ss.value() / (n - 1) / n)};
}

//! var = <a2> - <a>^2 with delta-method standard error.
inline Estimate variance_estimate(std::vector<double> const& a, std::vector<double> const& a2)
{
    auto m = mean_estimate(a);
    auto m2 = mean_estimate(a2);
    std::vector<double> infl(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        infl[i] = a2[i] - 2 * m.value * a[i];
    return {m2.value - m.value * m.value, mean_estimate(infl).std_error};
}

inline unsigned resolve_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}
}  // namespace detail

/*!
 * Integrate n_trajectories independent realizations and average the
 * stationary window t >= t_burn.
 *
 * Trajectory k uses the field seeded by derive_seed(master_seed, k).
 * Per-trajectory results are reduced in index order, so the output is
 * bit-identical for any worker count. Blown-up trajectories are dropped
 * unless they exceed 1% of the ensemble, in which case the first offending
 * trajectory is reported.
 */
inline EnsembleStats run_ensemble(SedConfig const& cfg, std::uint64_t master_seed)
{
    cfg.validate();
    std::size_t const n_traj = cfg.n_trajectories;
    std::vector<std::optional<TrajectoryMoments>> results(n_traj);
    std::vector<double> blow_time(n_traj, 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (std::size_t k = next++; k < n_traj; k = next++)
        {
            try
            {
                auto seed = detail::trajectory_seed(master_seed, k);
                auto r = detail::trajectory_realization(cfg, seed);
                results[k] = detail::moments_of_trajectory(cfg, r, detail::trajectory_initial_state(cfg, seed));
            }
            catch (IntegrationBlowup const& e)
            {
                blow_time[k] = e.time();
            }
            catch (...)
            {
                std::lock_guard lock(fatal_mutex);
                if (!fatal)
                    fatal = std::current_exception();
            }
        }
    };
    unsigned nw = std::min<unsigned>(detail::resolve_workers(cfg.workers), static_cast<unsigned>(n_traj));
    if (nw <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < nw; ++i)
            pool.emplace_back(worker);
    }
    if (fatal)
        std::rethrow_exception(fatal);

    std::size_t blown = 0;
    long first_blown = -1;
    for (std::size_t k = 0; k < n_traj; ++k)
        if (!results[k])
        {
            ++blown;
            if (first_blown < 0)
                first_blown = static_cast<long>(k);
        }
    if (static_cast<double>(blown) > 0.01 * static_cast<double>(n_traj) || blown + 2 > n_traj)
        throw IntegrationBlowup("trajectory " + std::to_string(first_blown) + " blew up at t = "
                                    + std::to_string(blow_time[static_cast<std::size_t>(first_blown)])
                                    + " (" + std::to_string(blown) + " of " + std::to_string(n_traj)
                                    + " trajectories failed)",
                                blow_time[static_cast<std::size_t>(first_blown)], first_blown);

    using Window = TrajectoryMoments::Window;
    auto collect = [&](auto member, auto field) {
        std::vector<double> out;
        for (auto const& r : results)
            if (r)
                out.push_back((*r).*member.*field);
        return out;
    };
    auto var_of = [&](auto member, auto fa, auto fa2) {
        return detail::variance_estimate(collect(member, fa), collect(member, fa2));
    };

    EnsembleStats st;
    st.units = cfg.units;
    st.potential = cfg.potential;
    st.n_trajectories = n_traj - blown;
    st.n_blown_up = blown;
    auto full = &TrajectoryMoments::full;
    auto first = &TrajectoryMoments::first;
    auto second = &TrajectoryMoments::second;
    st.mean_x = detail::mean_estimate(collect(full, &Window::x));
    st.mean_p = detail::mean_estimate(collect(full, &Window::p));
    st.var_x = var_of(full, &Window::x, &Window::x2);
    st.var_p = var_of(full, &Window::p, &Window::p2);
    st.mean_energy = detail::mean_estimate(collect(full, &Window::energy));
    st.first_var_x = var_of(first, &Window::x, &Window::x2);
    st.second_var_x = var_of(second, &Window::x, &Window::x2);
    st.first_var_p = var_of(first, &Window::p, &Window::p2);
    st.second_var_p = var_of(second, &Window::p, &Window::p2);
    st.first_mean_x = detail::mean_estimate(collect(first, &Window::x));
    st.second_mean_x = detail::mean_estimate(collect(second, &Window::x));
    st.first_energy = detail::mean_estimate(collect(first, &Window::energy));
    st.second_energy = detail::mean_estimate(collect(second, &Window::energy));
    double se = st.mean_x.std_error;
    st.n_effective_samples = se > 0 ? st.var_x.value / (se * se) : static_cast<double>(st.n_trajectories);
    return st;
}

//---------------------------------------------------------------------------//
// Comparison against quantum references
//---------------------------------------------------------------------------//

struct OracleMoments
{
    UnitSystem units;
    double var_x = 0;
    double var_p = 0;
    double mean_energy = 0;
    std::string source;
};

inline OracleMoments harmonic_oracle_moments(UnitSystem const& u)
{
    auto g = oscillator_ground_oracle(u.mass, u.omega0, u.hbar);
    return {u, g.var_x, g.var_p, harmonic_energy(g, u.mass, u.omega0), "oscillator ground state"};
}

inline OracleMoments polynomial_oracle_moments(PotentialSpec const& v, UnitSystem const& u, std::size_t basis = 64)
{
    auto m = polynomial_ground_state(v, u.mass, u.hbar, basis);
    return {u, m.var_x, m.var_p, m.energy, "basis diagonalization"};
}

struct ComparisonRow
{
    std::string observable;
    double sed = 0;
    double sed_stderr = 0;
    double oracle = 0;
    double relative_deviation = 0;
    double significance = 0;  //!< |sed - oracle| / stderr
};

struct ComparisonReport
{
    std::vector<ComparisonRow> rows;
    double tolerance = 0.1;
    bool agree = false;

    double max_relative_deviation() const
    {
        double m = 0;
        for (auto const& r : rows)
            m = std::max(m, r.relative_deviation);
        return m;
    }
    ComparisonRow const& row(std::string const& name) const
    {
        for (auto const& r : rows)
            if (r.observable == name)
                return r;
        throw ConfigError("no comparison row named " + name);
    }
};

inline ComparisonReport stationary_report(EnsembleStats const& st, OracleMoments const& oracle, double tolerance = 0.1)
{
    if (st.units.hbar != oracle.units.hbar || st.units.mass != oracle.units.mass
        || st.units.omega0 != oracle.units.omega0)
        throw ConfigError("ensemble and oracle use different unit systems");
    ComparisonReport rep;
    rep.tolerance = tolerance;
    auto add = [&](char const* name, Estimate const& e, double ref) {
        ComparisonRow row;
        row.observable = name;
        row.sed = e.value;
        row.sed_stderr = e.std_error;
        row.oracle = ref;
        double diff = std::fabs(e.value - ref);
        row.relative_deviation = ref != 0 ? diff / std::fabs(ref) : diff;
        row.significance = e.std_error > 0 ? diff / e.std_error : (diff == 0 ? 0.0 : INFINITY);
        rep.rows.push_back(row);
    };
    add("var_x", st.var_x, oracle.var_x);
    add("var_p", st.var_p, oracle.var_p);
    add("mean_energy", st.mean_energy, oracle.mean_energy);
    rep.agree = rep.max_relative_deviation() < tolerance;
    return rep;
}

}  // namespace zpf
