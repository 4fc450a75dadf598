//! \file config.hpp
//! Flat `key = value` run configuration shared by every experiment.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "core.hpp"
#include "field.hpp"
#include "lorentz.hpp"
#include "moyal.hpp"
#include "sed.hpp"

namespace zpf
{
enum class Experiment
{
    sample_field,
    run_sed,
    evolve_wigner,
    hbar_scaling,
    check_lorentz,
    compare
};

inline constexpr std::pair<Experiment, char const*> experiment_names[] = {
    {Experiment::sample_field, "sample-field"},
    {Experiment::run_sed, "run-sed"},
    {Experiment::evolve_wigner, "evolve-wigner"},
    {Experiment::hbar_scaling, "hbar-scaling"},
    {Experiment::check_lorentz, "check-lorentz"},
    {Experiment::compare, "compare"},
};

inline char const* to_string(Experiment e)
{
    for (auto const& [k, n] : experiment_names)
        if (k == e)
            return n;
    return "?";
}

//! Diagnostic categories; each maps to a distinct message shape.
enum class ConfigErrorKind
{
    missing_file,
    syntax,
    unknown_key,
    duplicate_key,
    type_mismatch,
    invariant_violation
};

inline char const* to_string(ConfigErrorKind k)
{
    switch (k)
    {
    case ConfigErrorKind::missing_file: return "missing_file";
    case ConfigErrorKind::syntax: return "syntax";
    case ConfigErrorKind::unknown_key: return "unknown_key";
    case ConfigErrorKind::duplicate_key: return "duplicate_key";
    case ConfigErrorKind::type_mismatch: return "type_mismatch";
    case ConfigErrorKind::invariant_violation: return "invariant_violation";
    }
    return "?";
}

class ConfigFileError : public ConfigError
{
  public:
    ConfigFileError(ConfigErrorKind kind, std::string key, std::string origin, std::string const& msg)
        : ConfigError(origin.empty() ? msg : origin + ": " + msg),
          kind_(kind),
          key_(std::move(key)),
          origin_(std::move(origin))
    {
    }
    ConfigErrorKind kind() const { return kind_; }
    std::string const& key() const { return key_; }
    //! "path:line", "--set", "env ZPF_WORKERS" or empty.
    std::string const& origin() const { return origin_; }

  private:
    ConfigErrorKind kind_;
    std::string key_;
    std::string origin_;
};

//---------------------------------------------------------------------------//
// RunConfig
//---------------------------------------------------------------------------//

struct RunConfig
{
    std::optional<Experiment> experiment;
    UnitSystem units;

    // field band
    double omega_min = 0.2;
    double omega_max = 5.0;
    std::size_t n_modes = 256;
    FrequencyStrategy strategy = FrequencyStrategy::stratified_jitter;

    // potential: harmonic uses units.mass and units.omega0
    std::string potential = "harmonic";
    double quartic_lambda = 0.25;
    std::vector<double> potential_coefficients;

    // SED integrator and ensemble
    double dt = 0.02;
    double t_end = 1000;
    double t_burn = 500;
    RadiationReaction radiation_reaction = RadiationReaction::order_reduced;
    std::size_t stride = 1;
    std::size_t n_trajectories = 500;
    InitialCondition init = InitialCondition::fixed;
    double x0 = 0;
    double p0 = 0;
    std::size_t save_trajectories = 0;

    // field spectrum diagnostics (spectrum_dt = 0 picks pi / (4 omega_max))
    double spectrum_duration = 20000;
    double spectrum_dt = 0;
    std::size_t welch_segments = 64;

    // Lorentz check
    double lorentz_exponent = 3;
    double beta = 0.3;
    std::size_t n_samples = 1000000;
    double lorentz_lo = 1;
    double lorentz_hi = 4;
    std::size_t lorentz_bins = 24;

    // phase-space grid and evolution
    double x_min = -6, x_max = 6;
    std::size_t n_x = 256;
    double p_min = -6, p_max = 6;
    std::size_t n_p = 256;
    int moyal_order = 1;
    double t_final = 2 * pi;
    double dt_scale = 1;
    std::size_t snapshots = 0;
    //! Initial Gaussian; unset fields default to the oscillator ground state.
    std::optional<double> w_mean_x, w_mean_p, w_var_x, w_var_p, w_cov_xp;

    // hbar scaling
    std::vector<double> hbar_list{0.05, 0.1, 0.2, 0.4};

    // compare
    double tolerance = 0.1;
    std::size_t oracle_basis = 64;

    std::uint64_t master_seed = 1;
    unsigned workers = 0;
    std::string out_dir;

    //! Where each explicitly set key came from.
    std::map<std::string, std::string> origin;

    PotentialSpec potential_spec() const
    {
        if (potential == "harmonic")
            return PotentialSpec::harmonic(units.mass, units.omega0);
        if (potential == "quartic")
            return PotentialSpec::quartic(quartic_lambda);
        return PotentialSpec(Polynomial(potential_coefficients));
    }

    SedConfig sed() const
    {
        SedConfig c;
        c.units = units;
        c.potential = potential_spec();
        c.omega_min = omega_min;
        c.omega_max = omega_max;
        c.n_modes = n_modes;
        c.strategy = strategy;
        c.dt = dt;
        c.t_end = t_end;
        c.t_burn = t_burn;
        c.n_trajectories = n_trajectories;
        c.rr_model = radiation_reaction;
        c.init = init;
        c.x0 = x0;
        c.p0 = p0;
        if (init == InitialCondition::wigner && has_initial_gaussian())
            c.init_wigner = initial_gaussian();
        c.stride = stride;
        c.workers = workers;
        return c;
    }

    bool has_initial_gaussian() const { return w_mean_x || w_mean_p || w_var_x || w_var_p || w_cov_xp; }

    GaussianWignerParams initial_gaussian() const
    {
        auto g = oscillator_ground_oracle(units.mass, units.omega0, units.hbar);
        g.mean_x = w_mean_x.value_or(g.mean_x);
        g.mean_p = w_mean_p.value_or(g.mean_p);
        g.var_x = w_var_x.value_or(g.var_x);
        g.var_p = w_var_p.value_or(g.var_p);
        g.cov_xp = w_cov_xp.value_or(g.cov_xp);
        return g;
    }

    Axis x_axis() const { return {x_min, x_max, n_x}; }
    Axis p_axis() const { return {p_min, p_max, n_p}; }
    HamiltonianSpec hamiltonian() const { return {units.mass, potential_spec(), units.hbar}; }
    double resolved_spectrum_dt() const { return spectrum_dt > 0 ? spectrum_dt : pi / (4 * omega_max); }
    BoostBand lorentz_band() const { return {lorentz_lo, lorentz_hi, lorentz_bins}; }

    //! Scaling study setup; without w_* keys the study's own default Gaussian is used.
    ScalingSetup scaling_setup() const
    {
        ScalingSetup s;
        s.x = x_axis();
        s.p = p_axis();
        if (has_initial_gaussian())
            s.initial = initial_gaussian();
        s.mass = units.mass;
        s.dt_scale = dt_scale;
        s.correction_order = moyal_order;
        return s;
    }
};

//---------------------------------------------------------------------------//
// Key schema
//---------------------------------------------------------------------------//

//! Value of one key, for echoing into manifests.
using ConfigValue = std::variant<bool, std::int64_t, std::uint64_t, double, std::string, std::vector<double>>;

namespace detail
{
struct KeySpec
{
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;  //!< throws on type mismatch or invariant
    std::function<std::optional<ConfigValue>(RunConfig const&)> get;
};

struct TypeMismatch
{
    std::string expected;
};
struct Violation
{
    std::string rule;
};

inline std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double to_double(std::string_view v)
{
    try
    {
        double d = parse_number<double>(v, "");
        if (!std::isfinite(d))
            throw TypeMismatch{"a finite number"};
        return d;
    }
    catch (ConfigError const&)
    {
        throw TypeMismatch{"a number"};
    }
}

inline std::uint64_t to_unsigned(std::string_view v)
{
    try
    {
        return parse_number<std::uint64_t>(v, "");
    }
    catch (ConfigError const&)
    {
        throw TypeMismatch{"a non-negative integer"};
    }
}

inline std::vector<double> to_list(std::string_view v)
{
    std::vector<double> out;
    std::string s(v);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(trim(item)));
    if (out.empty())
        throw TypeMismatch{"a comma-separated list of numbers"};
    return out;
}

template<class Check>
KeySpec real(std::string name, double RunConfig::* m, Check check, char const* rule)
{
    return {name,
            [=](RunConfig& c, std::string_view v) {
                double d = to_double(v);
                if (!check(d))
                    throw Violation{rule};
                c.*m = d;
            },
            [=](RunConfig const& c) { return std::optional<ConfigValue>(c.*m); }};
}

template<class Check>
KeySpec unit_real(std::string name, double UnitSystem::* m, Check check, char const* rule)
{
    return {name,
            [=](RunConfig& c, std::string_view v) {
                double d = to_double(v);
                if (!check(d))
                    throw Violation{rule};
                c.units.*m = d;
            },
            [=](RunConfig const& c) { return std::optional<ConfigValue>(c.units.*m); }};
}

template<class T, class Check>
KeySpec count(std::string name, T RunConfig::* m, Check check, char const* rule)
{
    return {name,
            [=](RunConfig& c, std::string_view v) {
                auto u = to_unsigned(v);
                if (!check(u))
                    throw Violation{rule};
                c.*m = static_cast<T>(u);
            },
            [=](RunConfig const& c) { return std::optional<ConfigValue>(static_cast<std::uint64_t>(c.*m)); }};
}

inline KeySpec optional_real(std::string name, std::optional<double> RunConfig::* m)
{
    return {name, [=](RunConfig& c, std::string_view v) { c.*m = to_double(v); },
            [=](RunConfig const& c) {
                return c.*m ? std::optional<ConfigValue>(*(c.*m)) : std::nullopt;
            }};
}

template<class E, std::size_t N>
KeySpec choice(std::string name, E RunConfig::* m, std::pair<E, char const*> const (&names)[N])
{
    std::vector<std::pair<E, std::string>> table(std::begin(names), std::end(names));
    std::string expected;
    for (auto const& [e, n] : table)
        expected += (expected.empty() ? "" : " | ") + n;
    return {name,
            [=](RunConfig& c, std::string_view v) {
                for (auto const& [e, n] : table)
                    if (v == n)
                    {
                        c.*m = e;
                        return;
                    }
                throw TypeMismatch{"one of " + expected};
            },
            [=](RunConfig const& c) {
                for (auto const& [e, n] : table)
                    if (c.*m == e)
                        return std::optional<ConfigValue>(n);
                return std::optional<ConfigValue>();
            }};
}

inline constexpr std::pair<FrequencyStrategy, char const*> strategy_names[] = {
    {FrequencyStrategy::uniform, "uniform"}, {FrequencyStrategy::stratified_jitter, "stratified_jitter"}};
inline constexpr std::pair<RadiationReaction, char const*> reaction_names[] = {
    {RadiationReaction::order_reduced, "order_reduced"}, {RadiationReaction::none, "none"}};
inline constexpr std::pair<InitialCondition, char const*> init_names[] = {
    {InitialCondition::fixed, "fixed"}, {InitialCondition::wigner, "wigner"}};

inline std::vector<KeySpec> const& schema()
{
    auto pos = [](double d) { return d > 0; };
    auto nonneg = [](double d) { return d >= 0; };
    auto any = [](double) { return true; };
    static std::vector<KeySpec> const keys = [&] {
        std::vector<KeySpec> k;
        k.push_back({"experiment",
                     [](RunConfig& c, std::string_view v) {
                         for (auto const& [e, n] : experiment_names)
                             if (v == n)
                             {
                                 c.experiment = e;
                                 return;
                             }
                         throw TypeMismatch{"an experiment name (sample-field | run-sed | evolve-wigner | "
                                            "hbar-scaling | check-lorentz | compare)"};
                     },
                     [](RunConfig const& c) {
                         return c.experiment ? std::optional<ConfigValue>(std::string(to_string(*c.experiment)))
                                             : std::nullopt;
                     }});
        k.push_back(count("master_seed", &RunConfig::master_seed, [](std::uint64_t) { return true; }, ""));
        k.push_back(count("workers", &RunConfig::workers, [](std::uint64_t w) { return w <= 1024; },
                          "workers <= 1024 (0 = all cores)"));
        k.push_back({"out_dir", [](RunConfig& c, std::string_view v) { c.out_dir = std::string(v); },
                     [](RunConfig const& c) {
                         return c.out_dir.empty() ? std::nullopt : std::optional<ConfigValue>(c.out_dir);
                     }});

        k.push_back(unit_real("hbar", &UnitSystem::hbar, pos, "hbar > 0"));
        k.push_back(unit_real("mass", &UnitSystem::mass, pos, "mass > 0"));
        k.push_back(unit_real("omega0", &UnitSystem::omega0, pos, "omega0 > 0"));
        k.push_back(unit_real("gamma", &UnitSystem::gamma, [](double g) { return g > 0 && g < 0.1; },
                              "0 < gamma < 0.1"));

        k.push_back(real("omega_min", &RunConfig::omega_min, pos, "omega_min > 0"));
        k.push_back(real("omega_max", &RunConfig::omega_max, pos, "omega_max > 0"));
        k.push_back(count("n_modes", &RunConfig::n_modes, [](std::uint64_t n) { return n >= 2; }, "n_modes >= 2"));
        k.push_back(choice("frequency_strategy", &RunConfig::strategy, strategy_names));

        k.push_back({"potential",
                     [](RunConfig& c, std::string_view v) {
                         if (v != "harmonic" && v != "quartic" && v != "polynomial")
                             throw TypeMismatch{"one of harmonic | quartic | polynomial"};
                         c.potential = std::string(v);
                     },
                     [](RunConfig const& c) { return std::optional<ConfigValue>(c.potential); }});
        k.push_back(real("quartic_lambda", &RunConfig::quartic_lambda, any, ""));
        k.push_back({"potential_coefficients",
                     [](RunConfig& c, std::string_view v) {
                         auto l = to_list(v);
                         if (l.size() > 9)
                             throw Violation{"at most 9 coefficients (degree <= 8)"};
                         c.potential_coefficients = l;
                     },
                     [](RunConfig const& c) {
                         return c.potential_coefficients.empty()
                                    ? std::nullopt
                                    : std::optional<ConfigValue>(c.potential_coefficients);
                     }});

        k.push_back(real("dt", &RunConfig::dt, pos, "dt > 0"));
        k.push_back(real("t_end", &RunConfig::t_end, pos, "t_end > 0"));
        k.push_back(real("t_burn", &RunConfig::t_burn, nonneg, "t_burn >= 0"));
        k.push_back(choice("radiation_reaction", &RunConfig::radiation_reaction, reaction_names));
        k.push_back(count("stride", &RunConfig::stride, [](std::uint64_t s) { return s >= 1; }, "stride >= 1"));
        k.push_back(count("n_trajectories", &RunConfig::n_trajectories, [](std::uint64_t n) { return n >= 2; },
                          "n_trajectories >= 2"));
        k.push_back(choice("init", &RunConfig::init, init_names));
        k.push_back(real("x0", &RunConfig::x0, any, ""));
        k.push_back(real("p0", &RunConfig::p0, any, ""));
        k.push_back(count("save_trajectories", &RunConfig::save_trajectories, [](std::uint64_t) { return true; }, ""));

        k.push_back(real("spectrum_duration", &RunConfig::spectrum_duration, pos, "spectrum_duration > 0"));
        k.push_back(real("spectrum_dt", &RunConfig::spectrum_dt, nonneg, "spectrum_dt >= 0 (0 = automatic)"));
        k.push_back(count("welch_segments", &RunConfig::welch_segments, [](std::uint64_t n) { return n >= 1; },
                          "welch_segments >= 1"));

        k.push_back(real("lorentz_exponent", &RunConfig::lorentz_exponent, [](double s) { return s >= 0 && s <= 5; },
                         "0 <= lorentz_exponent <= 5"));
        k.push_back(real("beta", &RunConfig::beta, [](double b) { return b >= 0 && b <= 0.6; }, "0 <= beta <= 0.6"));
        k.push_back(count("n_samples", &RunConfig::n_samples, [](std::uint64_t n) { return n >= 100000; },
                          "n_samples >= 100000"));
        k.push_back(real("lorentz_lo", &RunConfig::lorentz_lo, pos, "lorentz_lo > 0"));
        k.push_back(real("lorentz_hi", &RunConfig::lorentz_hi, pos, "lorentz_hi > 0"));
        k.push_back(count("lorentz_bins", &RunConfig::lorentz_bins, [](std::uint64_t n) { return n >= 3; },
                          "lorentz_bins >= 3"));

        k.push_back(real("x_min", &RunConfig::x_min, any, ""));
        k.push_back(real("x_max", &RunConfig::x_max, any, ""));
        k.push_back(count("n_x", &RunConfig::n_x, [](std::uint64_t n) { return n >= 16; }, "n_x >= 16"));
        k.push_back(real("p_min", &RunConfig::p_min, any, ""));
        k.push_back(real("p_max", &RunConfig::p_max, any, ""));
        k.push_back(count("n_p", &RunConfig::n_p, [](std::uint64_t n) { return n >= 16; }, "n_p >= 16"));
        k.push_back({"moyal_order",
                     [](RunConfig& c, std::string_view v) {
                         auto u = to_unsigned(v);
                         if (u > 3)
                             throw Violation{"0 <= moyal_order <= 3"};
                         c.moyal_order = static_cast<int>(u);
                     },
                     [](RunConfig const& c) { return std::optional<ConfigValue>(std::int64_t{c.moyal_order}); }});
        k.push_back(real("t_final", &RunConfig::t_final, pos, "t_final > 0"));
        k.push_back(real("dt_scale", &RunConfig::dt_scale, [](double s) { return s > 0 && s <= 1; },
                         "0 < dt_scale <= 1"));
        k.push_back(count("snapshots", &RunConfig::snapshots, [](std::uint64_t) { return true; }, ""));
        k.push_back(optional_real("w_mean_x", &RunConfig::w_mean_x));
        k.push_back(optional_real("w_mean_p", &RunConfig::w_mean_p));
        k.push_back(optional_real("w_var_x", &RunConfig::w_var_x));
        k.push_back(optional_real("w_var_p", &RunConfig::w_var_p));
        k.push_back(optional_real("w_cov_xp", &RunConfig::w_cov_xp));

        k.push_back({"hbar_list",
                     [](RunConfig& c, std::string_view v) {
                         auto l = to_list(v);
                         for (double h : l)
                             if (!(h > 0))
                                 throw Violation{"every hbar_list entry > 0"};
                         c.hbar_list = l;
                     },
                     [](RunConfig const& c) { return std::optional<ConfigValue>(c.hbar_list); }});

        k.push_back(real("tolerance", &RunConfig::tolerance, pos, "tolerance > 0"));
        k.push_back(count("oracle_basis", &RunConfig::oracle_basis, [](std::uint64_t n) { return n >= 40; },
                          "oracle_basis >= 40"));
        return k;
    }();
    return keys;
}

inline KeySpec const* find_key(std::string_view name)
{
    for (auto const& k : schema())
        if (k.name == name)
            return &k;
    return nullptr;
}

inline void apply_key(RunConfig& c, std::string const& key, std::string const& value, std::string const& origin)
{
    auto const* spec = find_key(key);
    if (!spec)
        throw ConfigFileError(ConfigErrorKind::unknown_key, key, origin, "unknown key '" + key + "'");
    try
    {
        spec->set(c, value);
    }
    catch (TypeMismatch const& t)
    {
        throw ConfigFileError(ConfigErrorKind::type_mismatch, key, origin,
                              "key '" + key + "' expects " + t.expected + ", got '" + value + "'");
    }
    catch (Violation const& v)
    {
        throw ConfigFileError(ConfigErrorKind::invariant_violation, key, origin,
                              "key '" + key + "' = " + value + " violates " + v.rule);
    }
    c.origin[key] = origin;
}

inline std::pair<std::string, std::string> split_assignment(std::string_view line, std::string const& origin)
{
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
        throw ConfigFileError(ConfigErrorKind::syntax, "", origin, "expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty())
        throw ConfigFileError(ConfigErrorKind::syntax, "", origin, "missing key before '='");
    if (value.empty())
        throw ConfigFileError(ConfigErrorKind::syntax, key, origin, "missing value for key '" + key + "'");
    return {key, value};
}
}  // namespace detail

//! Keys in schema order with their current values (unset optionals omitted).
inline std::vector<std::pair<std::string, ConfigValue>> config_echo(RunConfig const& c)
{
    std::vector<std::pair<std::string, ConfigValue>> out;
    for (auto const& k : detail::schema())
        if (auto v = k.get(c))
            out.emplace_back(k.name, *v);
    return out;
}

inline std::string format_value(ConfigValue const& v)
{
    std::ostringstream os;
    os << std::setprecision(17);
    std::visit(
        [&](auto const& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::vector<double>>)
                for (std::size_t i = 0; i < x.size(); ++i)
                    os << (i ? ", " : "") << x[i];
            else if constexpr (std::is_same_v<T, bool>)
                os << (x ? "true" : "false");
            else
                os << x;
        },
        v);
    return os.str();
}

//! The resolved configuration as a config file that reproduces it.
inline std::string render_config(RunConfig const& c)
{
    std::ostringstream os;
    for (auto const& [k, v] : config_echo(c))
        os << k << " = " << format_value(v) << "\n";
    return os.str();
}

/*!
 * Parse a config file and apply overrides (`key`, `value` pairs, applied in
 * order after the file). If `workers` is set by neither, ZPF_WORKERS is used.
 * Only per-key rules are checked here; see validate_for().
 */
inline RunConfig parse_config_text(std::istream& is,
                                   std::string const& source,
                                   std::vector<std::pair<std::string, std::string>> const& overrides = {})
{
    RunConfig c;
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(is, line))
    {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        if (detail::trim(line).empty())
            continue;
        std::string origin = source + ":" + std::to_string(lineno);
        auto [key, value] = detail::split_assignment(line, origin);
        if (auto it = seen.find(key); it != seen.end())
            throw ConfigFileError(ConfigErrorKind::duplicate_key, key, origin,
                                  "key '" + key + "' already set on line " + std::to_string(it->second));
        seen[key] = lineno;
        detail::apply_key(c, key, value, origin);
    }
    for (auto const& [key, value] : overrides)
        detail::apply_key(c, key, value, "--set " + key);
    if (!c.origin.count("workers"))
        if (char const* env = std::getenv("ZPF_WORKERS"); env && *env)
            detail::apply_key(c, "workers", env, "env ZPF_WORKERS");
    return c;
}

inline RunConfig parse_config(std::string const& path,
                              std::vector<std::pair<std::string, std::string>> const& overrides = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigFileError(ConfigErrorKind::missing_file, "", path, "cannot open config file");
    return parse_config_text(in, path, overrides);
}

namespace detail
{
//! Re-throws a module ConfigError as an invariant violation naming its keys.
template<class F>
void check_invariant(RunConfig const& c, std::initializer_list<char const*> keys, F&& f)
{
    try
    {
        f();
    }
    catch (ConfigFileError const&)
    {
        throw;
    }
    catch (ConfigError const& e)
    {
        std::string names, origin;
        for (char const* k : keys)
        {
            names += (names.empty() ? "" : ", ") + std::string(k);
            if (origin.empty())
                if (auto it = c.origin.find(k); it != c.origin.end())
                    origin = it->second;
        }
        throw ConfigFileError(ConfigErrorKind::invariant_violation, *keys.begin(), origin,
                              std::string(e.what()) + " [keys: " + names + "]");
    }
}
}  // namespace detail

/*!
 * Cross-key validation for one experiment, run before any compute. Builds
 * the module configuration and applies its invariants.
 */
inline void validate_for(RunConfig const& c, Experiment e)
{
    using detail::check_invariant;
    if (c.experiment && *c.experiment != e)
        throw ConfigFileError(ConfigErrorKind::invariant_violation, "experiment", c.origin.at("experiment"),
                              std::string("config is for '") + to_string(*c.experiment) + "', not '" + to_string(e)
                                  + "'");
    check_invariant(c, {"gamma", "hbar", "mass", "omega0"}, [&] { c.units.validate(); });
    check_invariant(c, {"potential", "quartic_lambda", "potential_coefficients"}, [&] {
        if (c.potential == "polynomial" && c.potential_coefficients.empty())
            throw ConfigError("potential = polynomial needs potential_coefficients");
        (void)c.potential_spec();
    });

    switch (e)
    {
    case Experiment::sample_field:
        check_invariant(c, {"omega_min", "omega_max", "n_modes"}, [&] {
            (void)build_mode_set(c.omega_min, c.omega_max, c.n_modes, c.units, c.strategy);
        });
        check_invariant(c, {"spectrum_duration", "spectrum_dt", "omega_min", "omega_max"}, [&] {
            if (c.spectrum_duration < 50 * 2 * pi / c.omega_min)
                throw ConfigError("spectrum_duration must be at least 50 periods of omega_min");
            if (c.resolved_spectrum_dt() > pi / (4 * c.omega_max))
                throw ConfigError("spectrum_dt must not exceed pi / (4 omega_max)");
        });
        break;
    case Experiment::run_sed:
    case Experiment::compare:
        check_invariant(c, {"dt", "t_end", "t_burn", "omega_min", "omega_max", "n_modes", "potential",
                            "n_trajectories", "w_var_x"},
                        [&] { c.sed().validate(); });
        if (e == Experiment::compare)
            check_invariant(c, {"potential"}, [&] {
                if (!c.potential_spec().is_confining())
                    throw ConfigError("comparison needs a confining potential");
            });
        break;
    case Experiment::check_lorentz:
        check_invariant(c, {"lorentz_lo", "lorentz_hi", "lorentz_bins"}, [&] {
            if (!(c.lorentz_hi > c.lorentz_lo))
                throw ConfigError("lorentz_hi must exceed lorentz_lo");
        });
        break;
    case Experiment::evolve_wigner:
    case Experiment::hbar_scaling:
        check_invariant(c, {"x_min", "x_max", "n_x"}, [&] { c.x_axis().validate("x"); });
        check_invariant(c, {"p_min", "p_max", "n_p"}, [&] { c.p_axis().validate("p"); });
        if (e == Experiment::evolve_wigner)
        {
            check_invariant(c, {"w_var_x", "w_var_p", "w_cov_xp", "hbar"},
                            [&] { c.initial_gaussian().validate(c.units.hbar); });
            check_invariant(c, {"w_mean_x", "w_var_x", "x_min", "x_max", "p_min", "p_max"}, [&] {
                auto w0 = gaussian_grid(c.x_axis(), c.p_axis(), c.initial_gaussian());
                if (boundary_ratio(w0) >= 1e-8)
                    throw ConfigError("initial Gaussian is not compactly supported on the grid");
            });
        }
        else
        {
            check_invariant(c, {"hbar_list", "potential", "moyal_order", "w_var_x"}, [&] {
                if (c.potential_spec().degree() < 3)
                    throw ConfigError("hbar scaling needs an anharmonic potential");
                if (c.hbar_list.size() < 4)
                    throw ConfigError("hbar_list needs at least four values");
                double lo = *std::min_element(c.hbar_list.begin(), c.hbar_list.end());
                double hi = *std::max_element(c.hbar_list.begin(), c.hbar_list.end());
                if (hi < 2 * lo)
                    throw ConfigError("hbar_list must span at least one octave");
                if (c.moyal_order < 1)
                    throw ConfigError("hbar scaling compares against moyal_order >= 1");
                auto s = c.scaling_setup();
                s.initial.validate(hi);
                if (boundary_ratio(gaussian_grid(s.x, s.p, s.initial)) >= 1e-8)
                    throw ConfigError("initial Gaussian is not compactly supported on the grid");
            });
        }
        check_invariant(c, {"moyal_order"}, [&] { MoyalOrder{c.moyal_order}.validate(); });
        break;
    }
}

}  // namespace zpf
