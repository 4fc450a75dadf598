// Acceptance suite: one PASS/FAIL line per criterion, fixed seeds, wall-clock budgets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zpf/zpf.hpp"

using namespace zpf;

namespace
{
struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    char const* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

//---------------------------------------------------------------------------//
// 1. Vacuum statistics
//---------------------------------------------------------------------------//
Outcome vacuum_statistics()
{
    UnitSystem u;
    std::size_t const n = 100000;
    auto modes = build_mode_set(0.2, 5.0, n, u, FrequencyStrategy::stratified_jitter, 11);
    auto r = sample_vacuum_amplitudes(modes, 12);

    CompensatedSum occ, ratio;
    int const n_dec = 10;
    std::vector<double> dec_sum(n_dec, 0.0);
    std::vector<std::size_t> dec_n(n_dec, 0);
    for (std::size_t l = 0; l < n; ++l)
    {
        occ += std::norm(r.amplitude(l));
        double e = r.mode_energy(l, u.hbar) / (0.5 * u.hbar * modes.modes[l].omega);
        ratio += e;
        auto d = l * n_dec / n;
        dec_sum[d] += e;
        ++dec_n[d];
    }
    double mean_occ = occ.value() / n;
    double mean_ratio = ratio.value() / n;
    double worst_decile = 0;
    for (int d = 0; d < n_dec; ++d)
        worst_decile = std::max(worst_decile, std::fabs(dec_sum[d] / dec_n[d] - 1.0));
    // Each decile holds 1e4 exponential draws: relative se 1%.
    bool pass = std::fabs(mean_occ - 0.5) <= 0.005 && std::fabs(mean_ratio - 1.0) <= 0.01 && worst_decile <= 0.05;
    return {pass, fmt("<|a|^2> = %.5f (0.500 +/- 0.005), <E_l / (hbar w_l / 2)> = %.5f, worst frequency decile off by %.4f",
                      mean_occ, mean_ratio, worst_decile)};
}

//---------------------------------------------------------------------------//
// 2. Spectrum law
//---------------------------------------------------------------------------//
Outcome spectrum_law()
{
    UnitSystem u;
    auto modes = build_mode_set(0.5, 5.0, 2048, u, FrequencyStrategy::stratified_jitter, 21);
    auto r = sample_vacuum_amplitudes(modes, 22);
    auto pg = estimate_spectrum(r, 20000.0, pi / 20, 64);
    bool pass = pg.n_segments >= 50 && std::fabs(pg.fit_exponent - 3.0) <= 0.15;
    return {pass, fmt("exponent %.4f +/- %.4f over [%.3f, %.3f], %zu Welch segments (target 3.0 +/- 0.15)",
                      pg.fit_exponent, pg.fit_stderr, pg.fit_lo, pg.fit_hi, pg.n_segments)};
}

//---------------------------------------------------------------------------//
// 3. Lorentz invariance
//---------------------------------------------------------------------------//
Outcome lorentz_invariance()
{
    auto cube = boost_spectrum_check(3.0, 0.3, 1000000, 31);
    auto square = boost_spectrum_check(2.0, 0.3, 1000000, 32);
    bool pass = cube.invariant && !square.invariant;
    return {pass, fmt("w^3: drift %.4f, ratio %.4f, invariant=%s; w^2: drift %.4f, ratio %.4f, flagged=%s",
                      std::fabs(cube.exponent_after - cube.exponent_before), cube.amplitude_ratio,
                      cube.invariant ? "yes" : "no", std::fabs(square.exponent_after - square.exponent_before),
                      square.amplitude_ratio, square.invariant ? "no" : "yes")};
}

//---------------------------------------------------------------------------//
// 4. / 8. SED ground states
//---------------------------------------------------------------------------//
SedConfig ground_state_config()
{
    SedConfig c;
    c.units.gamma = 0.01;
    c.omega_min = 0.2;
    c.omega_max = 5.0;
    c.n_modes = 256;
    c.dt = 0.02;
    c.t_end = 1000;
    c.t_burn = 500;
    c.n_trajectories = 500;
    return c;
}

std::uint64_t const ground_state_seed = 1;

EnsembleStats const& harmonic_ensemble()
{
    static EnsembleStats const st = run_ensemble(ground_state_config(), ground_state_seed);
    return st;
}

Outcome harmonic_ground_state()
{
    auto const& st = harmonic_ensemble();
    auto const c = ground_state_config();
    auto oracle = harmonic_oracle_moments(c.units);
    auto rep = stationary_report(st, oracle, 0.1);
    double tau = c.units.tau();
    auto band = reference::linear_oscillator_moments(
        1.0, 1.0, tau, [&](double w) { return tau * w * w * w / reference::pi; }, c.omega_min, c.omega_max);
    return {rep.agree,
            fmt("var_x %.4f +/- %.4f, var_p %.4f +/- %.4f, E %.4f +/- %.4f vs 0.5 (10%%); "
                "band-limited linear response %.4f / %.4f; %zu dropped",
                st.var_x.value, st.var_x.std_error, st.var_p.value, st.var_p.std_error, st.mean_energy.value,
                st.mean_energy.std_error, band.x2, band.p2, st.n_blown_up)};
}

// Measured with ground_state_seed on the ground-state config (x86-64, gcc 11, Release);
// the oracle gives 0.45612, so the SED excess is about 25%.
double const frozen_quartic_var_x = 0.5723;

Outcome nonlinear_disagreement()
{
    auto c = ground_state_config();
    c.potential = PotentialSpec::quartic(0.25);
    auto quartic = run_ensemble(c, ground_state_seed);
    auto oracle = quartic_ground_oracle(0.25, c.units.hbar, 64);
    double dev_q = rel(quartic.var_x.value, oracle.var_x);

    auto const& harmonic = harmonic_ensemble();
    double dev_h = rel(harmonic.var_x.value, 0.5);
    double factor = dev_q / dev_h;
    bool frozen = std::fabs(quartic.var_x.value - frozen_quartic_var_x) <= 0.01 * frozen_quartic_var_x;
    bool pass = factor >= 3.0 && frozen;
    return {pass, fmt("quartic var_x %.6f +/- %.4f vs oracle %.5f (deviation %.4f); harmonic deviation %.4f; "
                      "factor %.1f (>= 3); frozen var_x %.4f (1%%) %s",
                      quartic.var_x.value, quartic.var_x.std_error, oracle.var_x, dev_q, dev_h, factor,
                      frozen_quartic_var_x, frozen ? "reproduced" : "NOT reproduced")};
}

//---------------------------------------------------------------------------//
// 5. / 6. Quadratic Wigner evolution
//---------------------------------------------------------------------------//
Outcome quadratic_exactness()
{
    Axis ax{-6, 6, 128};
    HamiltonianSpec h{1.0, PotentialSpec::harmonic(), 1.0};
    auto g = oscillator_ground_oracle(1, 1, 1);
    g.mean_x = 1.0;
    g.mean_p = -0.5;
    auto w0 = gaussian_grid(ax, ax, g);
    MoyalOperator op0(ax, ax, h, MoyalOrder{0});
    MoyalOperator op3(ax, ax, h, MoyalOrder{3});
    std::size_t n = steps_for(op0, pi);
    double dt = pi / static_cast<double>(n);
    auto a = evolve_wigner(w0, h, MoyalOrder{0}, dt, n);
    auto b = evolve_wigner(w0, h, MoyalOrder{3}, dt, n);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.grid.values.size(); ++i)
        differing += a.grid.values[i] != b.grid.values[i];
    bool pass = differing == 0 && op3.n_correction_terms() == 0;
    return {pass, fmt("%zu steps to t = pi on 128^2; order-3 correction terms %zu; differing elements %zu",
                      n, op3.n_correction_terms(), differing)};
}

Outcome harmonic_closure()
{
    Axis ax{-6, 6, 256};
    HamiltonianSpec h{1.0, PotentialSpec::harmonic(), 1.0};
    auto g = oscillator_ground_oracle(1, 1, 1);
    g.mean_x = 1.0;
    auto w0 = gaussian_grid(ax, ax, g);
    MoyalOperator op(ax, ax, h, MoyalOrder{1});
    double period = 2 * pi;
    std::size_t n = steps_for(op, period);
    auto ev = evolve_wigner(w0, h, MoyalOrder{1}, period / static_cast<double>(n), n);
    auto exact = gaussian_grid(ax, ax, rotate_gaussian(g, 1, 1, period));
    double err = linf_distance(ev.grid, exact);
    return {err < 1e-3, fmt("L_inf %.3e after one period (%zu steps, 256^2), norm drift %.2e", err, n, ev.norm_drift)};
}

//---------------------------------------------------------------------------//
// 7. hbar^2 scaling
//---------------------------------------------------------------------------//
Outcome hbar_scaling()
{
    auto rep = hbar_scaling_study(PotentialSpec::quartic(0.25), {0.05, 0.1, 0.2, 0.4}, 1.0);
    std::ostringstream ds;
    for (std::size_t i = 0; i < rep.hbar.size(); ++i)
        ds << (i ? ", " : "") << fmt("D(%.2f) = %.3e", rep.hbar[i], rep.distance[i]);
    return {std::fabs(rep.slope - 2.0) <= 0.1,
            fmt("slope %.4f +/- %.4f (target 2.0 +/- 0.1); ", rep.slope, rep.slope_stderr) + ds.str()};
}

//---------------------------------------------------------------------------//
// 9. Properties
//---------------------------------------------------------------------------//
Outcome properties()
{
    std::vector<std::string> failed;
    auto check = [&](bool ok, char const* what) {
        if (!ok)
            failed.push_back(what);
    };

    // Normalization under anharmonic Moyal evolution.
    {
        Axis ax{-6, 6, 128};
        HamiltonianSpec h{1.0, PotentialSpec::quartic(0.25), 0.5};
        auto w0 = gaussian_grid(ax, ax, {0.5, 0.0, 0.25, 0.25, 0.0});
        MoyalOperator op(ax, ax, h, MoyalOrder{1});
        std::size_t n = steps_for(op, 1.0);
        auto ev = evolve_wigner(w0, h, MoyalOrder{1}, 1.0 / static_cast<double>(n), n);
        check(std::fabs(ev.norm_initial - 1) < 1e-6 && ev.norm_drift < 1e-5, "normalization conservation");
    }

    // Determinism under reseeding and worker count.
    {
        SedConfig c;
        c.units.gamma = 0.05;
        c.omega_min = 0.5;
        c.omega_max = 2.0;
        c.n_modes = 64;
        c.dt = 0.05;
        c.t_burn = 100;
        c.t_end = 240;
        c.n_trajectories = 12;
        c.workers = 1;
        auto a = run_ensemble(c, 5);
        c.workers = 3;
        auto b = run_ensemble(c, 5);
        auto d = run_ensemble(c, 6);
        check(a.var_x.value == b.var_x.value && a.var_p.value == b.var_p.value
                  && a.mean_energy.value == b.mean_energy.value,
              "worker-count determinism");
        check(d.var_x.value != a.var_x.value, "reseeding changes the ensemble");
    }

    // Energy conservation with the field and radiation reaction switched off:
    // relative drift below 1e-6 per period of 2 pi at dt = 0.01 * 2 pi.
    {
        int const periods = 10;
        for (auto v : {PotentialSpec::harmonic(), PotentialSpec::quartic(0.25)})
        {
            SedConfig c;
            c.potential = v;
            c.units.gamma = 0;
            c.rr_model = RadiationReaction::none;
            c.dt = 0.01 * 2 * pi;
            c.t_end = periods * 2 * pi;
            UnitSystem u;
            auto silent = sample_vacuum_amplitudes(build_mode_set(c.omega_min, c.omega_max, c.n_modes, u).scaled(0.0), 1);
            auto tr = integrate_trajectory(c, silent, {1.0, 0.3, 0.0});
            auto energy = [&](ParticleState const& s) { return 0.5 * s.p * s.p + v.value(s.x); };
            check(rel(energy(tr.states.back()), energy(tr.states.front())) < periods * 1e-6,
                  "decoupled energy conservation");
        }
    }

    // Oracle Gaussians saturate the uncertainty bound.
    {
        for (double hbar : {0.1, 1.0, 3.0})
            for (double w : {0.3, 1.0, 4.0})
            {
                auto g = oscillator_ground_oracle(1.0, w, hbar);
                auto v = vacuum_wigner_mode(w, hbar);
                auto r = rotate_gaussian(g, 1.0, 2.0 * w, 0.37);
                for (auto const& q : {g, v, r})
                {
                    double det = q.var_x * q.var_p - q.cov_xp * q.cov_xp;
                    check(rel(det, hbar * hbar / 4) < 1e-12, "purity saturation");
                }
            }
    }

    if (failed.empty())
        return {true, "normalization, worker/seed determinism, decoupled energy, purity saturation"};
    std::string s = "failed:";
    for (auto const& f : failed)
        s += " [" + f + "]";
    return {false, s};
}
}  // namespace

int main()
{
    std::vector<Criterion> const criteria{
        {1, "vacuum statistics", 1, vacuum_statistics},
        {2, "spectrum law", 30, spectrum_law},
        {3, "Lorentz invariance", 60, lorentz_invariance},
        {4, "SED harmonic ground state", 600, harmonic_ground_state},
        {5, "quadratic exactness", 60, quadratic_exactness},
        {6, "harmonic Wigner closure", 120, harmonic_closure},
        {7, "hbar^2 scaling", 600, hbar_scaling},
        {8, "nonlinear disagreement", 600, nonlinear_disagreement},
        {9, "property suites", 300, properties},
    };
    int failures = 0;
    for (auto const& c : criteria)
    {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs <= c.budget_seconds;
        bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
