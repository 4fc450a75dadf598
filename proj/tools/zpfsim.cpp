// zpfsim: command-line driver for the zero-point-field experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "zpf/zpf.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace zpf;

namespace
{
class OutputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Staging directory that only becomes the run directory on success.
class RunDirectory
{
  public:
    explicit RunDirectory(fs::path target) : target_(std::move(target))
    {
        if (fs::exists(target_) && !(fs::is_directory(target_) && fs::is_empty(target_)))
            throw OutputError("output directory " + target_.string() + " exists and is not empty");
        auto parent = target_.parent_path().empty() ? fs::path(".") : target_.parent_path();
        fs::create_directories(parent);
        staging_ = parent / (".zpfsim-staging-" + target_.filename().string() + "-" + std::to_string(::getpid()));
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }
    RunDirectory(RunDirectory const&) = delete;
    RunDirectory& operator=(RunDirectory const&) = delete;
    ~RunDirectory()
    {
        if (!committed_)
        {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    fs::path path(std::string const& name) const { return staging_ / name; }

    void write(std::string const& name, std::string const& text)
    {
        std::ofstream os(path(name), std::ios::binary);
        os << text;
        if (!os)
            throw OutputError("cannot write " + path(name).string());
        files_.push_back(name);
    }
    template<class F>
    void write_with(std::string const& name, F&& f, bool binary = false)
    {
        std::ofstream os(path(name), binary ? std::ios::binary : std::ios::out);
        f(os);
        if (!os)
            throw OutputError("cannot write " + path(name).string());
        files_.push_back(name);
    }
    std::vector<std::string> const& files() const { return files_; }

    void commit()
    {
        if (fs::exists(target_))
            fs::remove(target_);  // empty, checked above
        fs::rename(staging_, target_);
        committed_ = true;
    }

  private:
    fs::path target_;
    fs::path staging_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

json to_json(ConfigValue const& v)
{
    return std::visit([](auto const& x) { return json(x); }, v);
}

json to_json(Estimate const& e) { return json{{"value", e.value}, {"std_error", e.std_error}}; }

json stats_json(EnsembleStats const& st)
{
    return json{{"n_trajectories", st.n_trajectories},
                {"n_blown_up", st.n_blown_up},
                {"n_effective_samples", st.n_effective_samples},
                {"mean_x", to_json(st.mean_x)},
                {"mean_p", to_json(st.mean_p)},
                {"var_x", to_json(st.var_x)},
                {"var_p", to_json(st.var_p)},
                {"mean_energy", to_json(st.mean_energy)},
                {"first_half",
                 {{"mean_x", to_json(st.first_mean_x)},
                  {"var_x", to_json(st.first_var_x)},
                  {"var_p", to_json(st.first_var_p)},
                  {"mean_energy", to_json(st.first_energy)}}},
                {"second_half",
                 {{"mean_x", to_json(st.second_mean_x)},
                  {"var_x", to_json(st.second_var_x)},
                  {"var_p", to_json(st.second_var_p)},
                  {"mean_energy", to_json(st.second_energy)}}}};
}

std::string csv_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

//---------------------------------------------------------------------------//
// Experiments. Each writes its outputs and returns a short summary.
//---------------------------------------------------------------------------//

json run_sample_field(RunConfig const& c, RunDirectory& out)
{
    auto modes = build_mode_set(c.omega_min, c.omega_max, c.n_modes, c.units, c.strategy, derive_seed(c.master_seed, 1));
    auto r = sample_vacuum_amplitudes(modes, c.master_seed);
    out.write_with("modes.csv", [&](std::ostream& os) { write_realization_csv(os, r); });

    CompensatedSum occupation, energy_ratio;
    for (std::size_t l = 0; l < r.mode_set.size(); ++l)
    {
        occupation += std::norm(r.amplitude(l));
        energy_ratio += r.mode_energy(l, c.units.hbar) / (0.5 * c.units.hbar * r.mode_set.modes[l].omega);
    }
    auto n = static_cast<double>(r.mode_set.size());

    auto pg = estimate_spectrum(r, c.spectrum_duration, c.resolved_spectrum_dt(), c.welch_segments);
    out.write_with("periodogram.csv", [&](std::ostream& os) {
        os << "omega,power\n";
        for (std::size_t k = 0; k < pg.freqs.size(); ++k)
            os << csv_number(pg.freqs[k]) << ',' << csv_number(pg.power[k]) << '\n';
    });
    json summary{{"n_modes", r.mode_set.size()},
                 {"total_power", r.mode_set.total_power()},
                 {"mean_occupation", occupation.value() / n},
                 {"mean_energy_over_half_quantum", energy_ratio.value() / n},
                 {"fit_exponent", pg.fit_exponent},
                 {"fit_stderr", pg.fit_stderr},
                 {"fit_lo", pg.fit_lo},
                 {"fit_hi", pg.fit_hi},
                 {"welch_segments", pg.n_segments},
                 {"duration", c.spectrum_duration},
                 {"sample_dt", c.resolved_spectrum_dt()}};
    out.write("spectrum.json", summary.dump(2) + "\n");
    return summary;
}

json run_sed(RunConfig const& c, RunDirectory& out)
{
    auto cfg = c.sed();
    auto st = run_ensemble(cfg, c.master_seed);
    auto js = stats_json(st);
    out.write("ensemble_stats.json", js.dump(2) + "\n");
    for (std::size_t k = 0; k < std::min(c.save_trajectories, cfg.n_trajectories); ++k)
    {
        auto seed = detail::trajectory_seed(c.master_seed, k);
        auto tr = integrate_trajectory(cfg, detail::trajectory_realization(cfg, seed),
                                       detail::trajectory_initial_state(cfg, seed));
        out.write_with("trajectory_" + std::to_string(k) + ".csv", [&](std::ostream& os) {
            os << "t,x,p\n";
            for (auto const& s : tr.states)
                os << csv_number(s.t) << ',' << csv_number(s.x) << ',' << csv_number(s.p) << '\n';
        });
    }
    return js;
}

json run_compare(RunConfig const& c, RunDirectory& out)
{
    auto cfg = c.sed();
    auto oracle = c.potential == "harmonic" ? harmonic_oracle_moments(c.units)
                                            : polynomial_oracle_moments(cfg.potential, c.units, c.oracle_basis);
    auto st = run_ensemble(cfg, c.master_seed);
    out.write("ensemble_stats.json", stats_json(st).dump(2) + "\n");
    auto rep = stationary_report(st, oracle, c.tolerance);
    out.write_with("comparison.csv", [&](std::ostream& os) {
        os << "observable,sed,sed_stderr,oracle,relative_deviation,significance\n";
        for (auto const& r : rep.rows)
            os << r.observable << ',' << csv_number(r.sed) << ',' << csv_number(r.sed_stderr) << ','
               << csv_number(r.oracle) << ',' << csv_number(r.relative_deviation) << ','
               << csv_number(r.significance) << '\n';
    });
    json rows = json::array();
    for (auto const& r : rep.rows)
        rows.push_back({{"observable", r.observable},
                        {"sed", r.sed},
                        {"sed_stderr", r.sed_stderr},
                        {"oracle", r.oracle},
                        {"relative_deviation", r.relative_deviation},
                        {"significance", r.significance}});
    json js{{"agree", rep.agree},
            {"tolerance", rep.tolerance},
            {"max_relative_deviation", rep.max_relative_deviation()},
            {"oracle_source", oracle.source},
            {"rows", rows}};
    out.write("comparison.json", js.dump(2) + "\n");
    return js;
}

json run_check_lorentz(RunConfig const& c, RunDirectory& out)
{
    auto rep = boost_spectrum_check(c.lorentz_exponent, c.beta, c.n_samples, c.master_seed, c.lorentz_band());
    out.write_with("lorentz_report.csv", [&](std::ostream& os) {
        os << "omega_lo,omega_hi,density_before,density_after\n";
        for (std::size_t k = 0; k < rep.before.density.size(); ++k)
            os << csv_number(rep.before.edges[k]) << ',' << csv_number(rep.before.edges[k + 1]) << ','
               << csv_number(rep.before.density[k]) << ',' << csv_number(rep.after.density[k]) << '\n';
    });
    json js{{"spectral_exponent", rep.spectral_exponent},
            {"beta", rep.beta},
            {"n_samples", rep.n_samples},
            {"exponent_before", rep.exponent_before},
            {"exponent_after", rep.exponent_after},
            {"amplitude_ratio", rep.amplitude_ratio},
            {"invariant", rep.invariant}};
    out.write("lorentz_report.json", js.dump() + "\n");
    return js;
}

void write_grid_pair(RunDirectory& out, std::string const& stem, WignerGrid const& w)
{
    out.write_with(stem + ".csv", [&](std::ostream& os) { write_grid_csv(os, w); });
    out.write_with(stem + ".bin", [&](std::ostream& os) { write_grid_binary(os, w); }, true);
}

json moments_json(WignerGrid const& w, double mass, PotentialSpec const& v)
{
    double kinetic = expectation(w, {{0.5 / mass, 0, 2}});
    double potential = 0;
    auto const& cf = v.poly.coefficients();
    if (v.degree() <= 6)
    {
        PhasePolynomial pv;
        for (std::size_t k = 0; k < cf.size(); ++k)
            pv.terms.push_back({cf[k], static_cast<int>(k), 0});
        potential = expectation(w, pv);
    }
    return json{{"norm", total_mass(w)},
                {"mean_x", expectation(w, {{1.0, 1, 0}})},
                {"mean_p", expectation(w, {{1.0, 0, 1}})},
                {"mean_x2", expectation(w, {{1.0, 2, 0}})},
                {"mean_p2", expectation(w, {{1.0, 0, 2}})},
                {"energy", v.degree() <= 6 ? json(kinetic + potential) : json(nullptr)},
                {"min_w", *std::min_element(w.values.begin(), w.values.end())}};
}

json run_evolve_wigner(RunConfig const& c, RunDirectory& out)
{
    auto g = c.initial_gaussian();
    auto w0 = gaussian_grid(c.x_axis(), c.p_axis(), g);
    auto h = c.hamiltonian();
    MoyalOperator op(c.x_axis(), c.p_axis(), h, MoyalOrder{c.moyal_order});
    std::size_t n = steps_for(op, c.t_final, c.dt_scale);
    double dt = c.t_final / static_cast<double>(n);

    std::vector<std::size_t> snap_steps;
    for (std::size_t i = 1; i <= c.snapshots; ++i)
        snap_steps.push_back(i * n / (c.snapshots + 1));
    std::size_t next_snap = 0;
    auto ev = evolve_wigner(w0, h, MoyalOrder{c.moyal_order}, dt, n, [&](std::size_t step, WignerGrid const& w) {
        while (next_snap < snap_steps.size() && snap_steps[next_snap] == step)
        {
            out.write_with("wigner_snapshot_" + std::to_string(next_snap) + ".bin",
                           [&](std::ostream& os) { write_grid_binary(os, w); }, true);
            ++next_snap;
        }
    });
    write_grid_pair(out, "wigner_initial", w0);
    write_grid_pair(out, "wigner_final", ev.grid);
    out.write_with("evolution_diagnostics.csv", [&](std::ostream& os) {
        os << "step,t,min_w\n";
        for (std::size_t k = 0; k < ev.min_history.size(); ++k)
            os << k << ',' << csv_number(static_cast<double>(k) * dt) << ',' << csv_number(ev.min_history[k]) << '\n';
    });

    json js{{"steps", n},
            {"dt", dt},
            {"t_final", c.t_final},
            {"moyal_order", c.moyal_order},
            {"correction_terms", op.n_correction_terms()},
            {"norm_initial", ev.norm_initial},
            {"norm_final", ev.norm_final},
            {"norm_drift", ev.norm_drift},
            {"max_boundary_fraction", ev.max_boundary_fraction},
            {"initial", moments_json(w0, c.units.mass, h.potential)},
            {"final", moments_json(ev.grid, c.units.mass, h.potential)}};
    if (h.potential.is_quadratic() && h.potential.poly.coefficient(1) == 0 && h.potential.poly.coefficient(2) > 0)
    {
        double omega = std::sqrt(2 * h.potential.poly.coefficient(2) / c.units.mass);
        auto exact = gaussian_grid(c.x_axis(), c.p_axis(), rotate_gaussian(g, c.units.mass, omega, c.t_final));
        js["linf_vs_exact_rotation"] = linf_distance(ev.grid, exact);
        js["l2_vs_exact_rotation"] = l2_distance(ev.grid, exact);
    }
    out.write("evolution.json", js.dump(2) + "\n");
    return js;
}

json run_hbar_scaling(RunConfig const& c, RunDirectory& out)
{
    auto rep = hbar_scaling_study(c.potential_spec(), c.hbar_list, c.t_final, c.scaling_setup());
    out.write_with("scaling.csv", [&](std::ostream& os) {
        os << "hbar,distance,steps\n";
        for (std::size_t i = 0; i < rep.hbar.size(); ++i)
            os << csv_number(rep.hbar[i]) << ',' << csv_number(rep.distance[i]) << ',' << rep.steps[i] << '\n';
    });
    json js{{"slope", rep.slope},
            {"slope_stderr", rep.slope_stderr},
            {"t_final", c.t_final},
            {"correction_order", c.moyal_order},
            {"hbar", rep.hbar},
            {"distance", rep.distance},
            {"steps", rep.steps}};
    out.write("scaling.json", js.dump(2) + "\n");
    return js;
}

json dispatch(Experiment e, RunConfig const& c, RunDirectory& out)
{
    switch (e)
    {
    case Experiment::sample_field: return run_sample_field(c, out);
    case Experiment::run_sed: return run_sed(c, out);
    case Experiment::evolve_wigner: return run_evolve_wigner(c, out);
    case Experiment::hbar_scaling: return run_hbar_scaling(c, out);
    case Experiment::check_lorentz: return run_check_lorentz(c, out);
    case Experiment::compare: return run_compare(c, out);
    }
    return {};
}

std::string utc_now()
{
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

int report_error(std::string const& kind, std::string const& message, json extra = json::object())
{
    json rec{{"status", "error"}, {"error", kind}, {"message", message}};
    for (auto& [k, v] : extra.items())
        rec[k] = v;
    std::cerr << rec.dump() << std::endl;
    return kind == "usage" || kind.rfind("config", 0) == 0 ? 2 : kind == "output" ? 4 : 3;
}

struct CommonOptions
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<unsigned> workers;
    std::vector<std::string> sets;
};

int run_command(Experiment e, CommonOptions const& opt, std::vector<std::string> const& argv)
{
    auto const start = std::chrono::steady_clock::now();
    RunConfig cfg;
    try
    {
        std::vector<std::pair<std::string, std::string>> overrides;
        for (auto const& s : opt.sets)
        {
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigFileError(ConfigErrorKind::syntax, "", "--set", "expected key=value, got '" + s + "'");
            overrides.emplace_back(detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
        }
        if (opt.seed)
            overrides.emplace_back("master_seed", std::to_string(*opt.seed));
        if (opt.workers)
            overrides.emplace_back("workers", std::to_string(*opt.workers));
        if (!opt.out_dir.empty())
            overrides.emplace_back("out_dir", opt.out_dir);
        cfg = parse_config(opt.config, overrides);
        validate_for(cfg, e);
    }
    catch (ConfigFileError const& err)
    {
        return report_error(std::string("config.") + to_string(err.kind()), err.what(),
                            {{"key", err.key()}, {"origin", err.origin()}});
    }
    catch (ConfigError const& err)
    {
        return report_error("config.invariant_violation", err.what());
    }

    fs::path target = cfg.out_dir.empty()
                          ? fs::path(std::string("zpf-") + to_string(e) + "-seed" + std::to_string(cfg.master_seed))
                          : fs::path(cfg.out_dir);
    try
    {
        RunDirectory out(target);
        out.write("config.txt", render_config(cfg));
        json summary = dispatch(e, cfg, out);

        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json config_echo_json = json::object();
        for (auto const& [k, v] : config_echo(cfg))
            config_echo_json[k] = to_json(v);
        json manifest{{"tool", "zpfsim"},
                      {"version", version_string},
                      {"experiment", to_string(e)},
                      {"master_seed", cfg.master_seed},
                      {"workers", detail::resolve_workers(cfg.workers)},
                      {"command_line", argv},
                      {"config_file", opt.config},
                      {"config", config_echo_json},
                      {"outputs", out.files()},
                      {"started_utc", utc_now()},
                      {"wall_time_seconds", wall}};
        out.write("manifest.json", manifest.dump(2) + "\n");
        out.commit();
        std::cout << json{{"status", "ok"}, {"experiment", to_string(e)}, {"out_dir", target.string()},
                          {"summary", summary}}
                         .dump()
                  << std::endl;
        return 0;
    }
    catch (OutputError const& err)
    {
        return report_error("output", err.what(), {{"out_dir", target.string()}});
    }
    catch (fs::filesystem_error const& err)
    {
        return report_error("output", err.what(), {{"out_dir", target.string()}});
    }
    catch (IntegrationBlowup const& err)
    {
        return report_error("integration_blowup", err.what(), {{"time", err.time()}, {"trajectory", err.trajectory()}});
    }
    catch (GridEscape const& err)
    {
        return report_error("grid_escape", err.what(), {{"time", err.time()}});
    }
    catch (ConvergenceError const& err)
    {
        return report_error("convergence", err.what());
    }
    catch (ConfigError const& err)
    {
        return report_error("config.invariant_violation", err.what());
    }
    catch (std::exception const& err)
    {
        return report_error("internal", err.what());
    }
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zero-point-field simulations: field diagnostics, SED ensembles, Wigner evolution"};
    app.set_version_flag("--version", std::string("zpfsim ") + version_string);
    app.require_subcommand(1);

    struct Sub
    {
        Experiment e;
        char const* help;
    };
    Sub const subs[] = {
        {Experiment::sample_field, "Sample a vacuum field realization and estimate its spectrum"},
        {Experiment::run_sed, "Integrate an SED trajectory ensemble and report stationary moments"},
        {Experiment::evolve_wigner, "Evolve a Gaussian Wigner function under the truncated Moyal equation"},
        {Experiment::hbar_scaling, "Measure how the classical/corrected gap scales with hbar"},
        {Experiment::check_lorentz, "Check Lorentz invariance of a power-law spectrum by Monte Carlo boost"},
        {Experiment::compare, "Compare SED stationary moments against the quantum ground state"},
    };
    CommonOptions opt;
    std::optional<Experiment> chosen;
    for (auto const& s : subs)
    {
        auto* sc = app.add_subcommand(to_string(s.e), s.help);
        sc->add_option("--config", opt.config, "Flat key = value config file")->required();
        sc->add_option("--seed", opt.seed, "Master seed (overrides master_seed)");
        sc->add_option("--out-dir", opt.out_dir, "Output directory (must not exist or be empty)");
        sc->add_option("--workers", opt.workers, "Worker threads, 0 = all cores (overrides workers)");
        sc->add_option("--set", opt.sets, "Override any config key: --set key=value (repeatable)");
        Experiment e = s.e;
        sc->callback([&chosen, e] { chosen = e; });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForAllHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForVersion const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        return report_error("usage", e.what());
    }
    return run_command(*chosen, opt, std::vector<std::string>(argv, argv + argc));
}
