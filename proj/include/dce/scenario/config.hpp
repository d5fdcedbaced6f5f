#pragma once

// Scenario configuration: a flat INI file with one section per module.
//
//   scenario = compare            ; ideal|lindblad|moments|compare|gedanken|dephasing|threelevel|sweep
//   output = out/compare          ; path prefix for .csv / .json
//   formats = csv,json
//   seed = 7                      ; only used by the `random` initial state
//   jobs = 1                      ; parallel sweep points
//
//   [model]
//   units = xi                    ; xi: gamma, Gamma are multiples of xi and
//                                 ;     times are in units of 1/xi
//                                 ; absolute: every number taken as given
//   xi = 0.1
//   gamma = 0.5
//   Gamma = 10
//   n0 = 0
//   t_max = 10
//   samples = 200
//   dim = 0                       ; 0 picks default_dimension()
//   initial_state = thermal       ; thermal|fock|squeezed|random
//
// Remaining sections: [integrator], [tolerances], [analysis], [gedanken],
// [threelevel], [sweep]; see README.md for every key.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dce/lindblad.hpp"
#include "dce/model.hpp"
#include "dce/types.hpp"

namespace dce::scenario {

using boost::property_tree::ptree;

class UsageError : public Error {
public:
    UsageError(std::string field, const std::string& why)
        : Error(field + ": " + why), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class Kind { ideal, lindblad, moments, compare, gedanken, dephasing, threelevel, sweep };

inline const std::map<std::string, Kind>& kind_names() {
    static const std::map<std::string, Kind> names{
        {"ideal", Kind::ideal},         {"lindblad", Kind::lindblad},   {"moments", Kind::moments},
        {"compare", Kind::compare},     {"gedanken", Kind::gedanken},   {"dephasing", Kind::dephasing},
        {"threelevel", Kind::threelevel}, {"sweep", Kind::sweep},
    };
    return names;
}

inline std::string to_string(Kind k) {
    for (const auto& [name, kind] : kind_names())
        if (kind == k) return name;
    return "unknown";
}

inline Kind parse_kind(const std::string& s, const std::string& field) {
    const auto it = kind_names().find(s);
    if (it == kind_names().end()) throw UsageError(field, "unknown scenario '" + s + "'");
    return it->second;
}

enum class InitialState { thermal, fock, squeezed, random };

struct GedankenSettings {
    std::optional<double> dt;  // absolute; otherwise dt_constant / Gamma
    double dt_constant = 1.0;
    int steps = 200;
    bool density_check = false;
    int dim = 64;
};

struct ThreeLevelSettings {
    double level_gap = 1.0;
    double dipole = 0.01;
    double field_amplitude = 1.0;
    double field_freq = 0.01;
    double rabi = 0.0;
    double t_max = 628.3185307179586;
    int samples = 2000;
    std::string initial = "adiabatic";  // a | b | adiabatic
    std::int64_t photons = 100;
    std::int64_t laser_photons = 10000;
    double mode_freq = 1000.0;
};

struct GateTolerances {
    double compare_rel = 1e-3;
    double moments_rel = 1e-9;
    double dephasing_abs = 1e-8;
    double gedanken_rel = 1e-5;
    double rel_floor = 1e-12;  // denominator floor for relative gaps
};

struct ScenarioConfig {
    Kind kind = Kind::ideal;
    std::string output = "dce_out";
    bool write_csv = true;
    bool write_json = true;
    std::uint64_t seed = 0;
    int jobs = 1;

    ModelParams model;  // absolute units after parsing
    InitialState initial = InitialState::thermal;
    int fock_level = 0;
    double squeeze_r = 0.0;

    EvolveOptions evolve;
    GateTolerances gates;
    double fit_window = 0.3;
    GedankenSettings gedanken;
    ThreeLevelSettings threelevel;

    Kind sweep_base = Kind::moments;
    std::vector<std::pair<std::string, std::vector<std::string>>> sweep_axes;

    ptree raw;  // the file as read plus command-line overrides
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::set<std::string> model_keys{"units", "xi", "gamma", "Gamma", "n0", "t_max", "samples",
                                                  "dim", "initial_state", "fock_level", "squeeze_r"};
    static const std::map<std::string, std::set<std::string>> keys{
        {"", {"scenario", "output", "formats", "seed", "jobs"}},
        {"model", model_keys},
        {"integrator", {"rel_tol", "abs_tol", "positivity_every", "max_step"}},
        {"tolerances",
         {"hermiticity", "trace", "positivity", "leakage", "compare_rel", "moments_rel", "dephasing_abs",
          "gedanken_rel", "rel_floor"}},
        {"analysis", {"fit_window"}},
        {"gedanken", {"dt", "dt_constant", "steps", "density_check", "dim"}},
        {"threelevel",
         {"level_gap", "dipole", "field_amplitude", "field_freq", "rabi", "t_max", "samples", "initial", "photons",
          "laser_photons", "mode_freq"}},
    };
    return keys;
}

inline const std::set<std::string>& sweepable_keys() {
    static const std::set<std::string> keys{"xi", "gamma", "Gamma", "n0", "dim", "t_max", "samples"};
    return keys;
}

inline std::string field_name(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

template <class T>
T parse_value(const std::string& text, const std::string& field) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (!in || !(in >> std::ws).eof()) throw UsageError(field, "cannot parse '" + text + "'");
    return value;
}

template <>
inline std::string parse_value<std::string>(const std::string& text, const std::string&) {
    return text;
}

template <>
inline bool parse_value<bool>(const std::string& text, const std::string& field) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw UsageError(field, "expected a boolean, got '" + text + "'");
}

template <class T>
std::optional<T> lookup(const ptree& pt, const std::string& section, const std::string& key) {
    const auto node = pt.get_optional<std::string>(field_name(section, key));
    if (!node) return std::nullopt;
    return parse_value<T>(*node, field_name(section, key));
}

template <class T>
T get(const ptree& pt, const std::string& section, const std::string& key, T fallback) {
    return lookup<T>(pt, section, key).value_or(fallback);
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline void check_keys(const ptree& pt) {
    const auto& allowed = allowed_keys();
    for (const auto& [name, child] : pt) {
        if (child.empty()) {
            if (!allowed.at("").count(name)) throw UsageError(name, "unknown key");
            continue;
        }
        if (name == "sweep") {
            for (const auto& [key, value] : child) {
                if (key != "base" && !sweepable_keys().count(key)) throw UsageError("sweep." + key, "not a sweepable key");
            }
            continue;
        }
        const auto sec = allowed.find(name);
        if (sec == allowed.end()) throw UsageError(name, "unknown section");
        for (const auto& [key, value] : child) {
            if (!sec->second.count(key)) throw UsageError(name + "." + key, "unknown key");
        }
    }
}

inline void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw UsageError(field, why);
}

}  // namespace detail

// Builds a validated configuration from the property tree. Every violated
// precondition raises UsageError naming the offending field.
inline ScenarioConfig parse_config(const ptree& pt) {
    using detail::get;
    using detail::lookup;
    using detail::require;
    detail::check_keys(pt);

    ScenarioConfig c;
    c.raw = pt;
    c.kind = parse_kind(get<std::string>(pt, "", "scenario", "ideal"), "scenario");
    c.output = get<std::string>(pt, "", "output", c.output);
    require(!c.output.empty(), "output", "must not be empty");
    if (auto f = lookup<std::string>(pt, "", "formats")) {
        c.write_csv = c.write_json = false;
        for (const auto& item : detail::split_list(*f)) {
            if (item == "csv") c.write_csv = true;
            else if (item == "json") c.write_json = true;
            else throw UsageError("formats", "unknown format '" + item + "'");
        }
    }
    c.seed = get<std::uint64_t>(pt, "", "seed", 0);
    c.jobs = get<int>(pt, "", "jobs", 1);
    require(c.jobs >= 1, "jobs", "must be >= 1");

    // [model]
    const std::string units = get<std::string>(pt, "model", "units", "xi");
    require(units == "xi" || units == "absolute", "model.units", "must be 'xi' or 'absolute'");
    const double xi = get<double>(pt, "model", "xi", 0.1);
    require(std::isfinite(xi), "model.xi", "must be finite");
    const bool relative = units == "xi";
    if (relative) require(xi != 0.0, "model.units", "xi units need a nonzero model.xi");
    const double rate_scale = relative ? std::abs(xi) : 1.0;
    const double time_scale = relative ? 1.0 / std::abs(xi) : 1.0;

    ModelParams& m = c.model;
    m.squeeze_rate = xi;
    m.decay_rate = get<double>(pt, "model", "gamma", 0.0) * rate_scale;
    m.dephasing_rate = get<double>(pt, "model", "Gamma", 0.0) * rate_scale;
    m.initial_photons = get<double>(pt, "model", "n0", 0.0);
    require(m.decay_rate >= 0.0, "model.gamma", "must be >= 0");
    require(m.dephasing_rate >= 0.0, "model.Gamma", "must be >= 0");
    require(m.initial_photons >= 0.0, "model.n0", "must be >= 0");
    const double t_max = get<double>(pt, "model", "t_max", 10.0) * time_scale;
    const int samples = get<int>(pt, "model", "samples", 200);
    require(t_max > 0.0 && std::isfinite(t_max), "model.t_max", "must be > 0");
    require(samples >= 1, "model.samples", "must be >= 1");
    m.times = uniform_times(t_max, samples);
    const int dim = get<int>(pt, "model", "dim", 0);
    require(dim == 0 || dim >= 2, "model.dim", "must be 0 (automatic) or >= 2");
    m.dim = dim == 0 ? default_dimension(m.squeeze_rate, m.initial_photons, t_max) : dim;

    const std::string init = get<std::string>(pt, "model", "initial_state", "thermal");
    if (init == "thermal") c.initial = InitialState::thermal;
    else if (init == "fock") c.initial = InitialState::fock;
    else if (init == "squeezed") c.initial = InitialState::squeezed;
    else if (init == "random") c.initial = InitialState::random;
    else throw UsageError("model.initial_state", "unknown initial state '" + init + "'");
    c.fock_level = get<int>(pt, "model", "fock_level", 0);
    require(c.fock_level >= 0 && c.fock_level < m.dim, "model.fock_level", "must lie inside the truncated space");
    c.squeeze_r = get<double>(pt, "model", "squeeze_r", 0.0);
    require(std::isfinite(c.squeeze_r), "model.squeeze_r", "must be finite");

    // [integrator] / [tolerances] / [analysis]
    EvolveOptions& e = c.evolve;
    e.rel_tol = get<double>(pt, "integrator", "rel_tol", e.rel_tol);
    e.abs_tol = get<double>(pt, "integrator", "abs_tol", e.abs_tol);
    require(e.rel_tol > 0.0 && e.rel_tol < 1.0, "integrator.rel_tol", "must lie in (0, 1)");
    require(e.abs_tol > 0.0 && e.abs_tol < 1.0, "integrator.abs_tol", "must lie in (0, 1)");
    e.positivity_every = get<int>(pt, "integrator", "positivity_every", 10);
    require(e.positivity_every >= 0, "integrator.positivity_every", "must be >= 0");
    if (auto h = lookup<double>(pt, "integrator", "max_step")) {
        require(*h > 0.0, "integrator.max_step", "must be > 0");
        e.max_step = *h * time_scale;
    }
    e.tol.hermiticity = get<double>(pt, "tolerances", "hermiticity", e.tol.hermiticity);
    e.tol.trace = get<double>(pt, "tolerances", "trace", e.tol.trace);
    e.tol.positivity = get<double>(pt, "tolerances", "positivity", e.tol.positivity);
    e.tol.leakage = get<double>(pt, "tolerances", "leakage", e.tol.leakage);
    c.gates.compare_rel = get<double>(pt, "tolerances", "compare_rel", c.gates.compare_rel);
    c.gates.moments_rel = get<double>(pt, "tolerances", "moments_rel", c.gates.moments_rel);
    c.gates.dephasing_abs = get<double>(pt, "tolerances", "dephasing_abs", c.gates.dephasing_abs);
    c.gates.gedanken_rel = get<double>(pt, "tolerances", "gedanken_rel", c.gates.gedanken_rel);
    c.gates.rel_floor = get<double>(pt, "tolerances", "rel_floor", c.gates.rel_floor);
    for (const char* key : {"hermiticity", "trace", "positivity", "leakage", "compare_rel", "moments_rel",
                            "dephasing_abs", "gedanken_rel", "rel_floor"}) {
        if (auto v = lookup<double>(pt, "tolerances", key)) require(*v > 0.0, std::string("tolerances.") + key, "must be > 0");
    }
    c.fit_window = get<double>(pt, "analysis", "fit_window", c.fit_window);
    require(c.fit_window > 0.0 && c.fit_window <= 1.0, "analysis.fit_window", "must lie in (0, 1]");

    // [gedanken]
    GedankenSettings& g = c.gedanken;
    if (auto dt = lookup<double>(pt, "gedanken", "dt")) {
        require(*dt > 0.0, "gedanken.dt", "must be > 0");
        g.dt = *dt * time_scale;
    }
    g.dt_constant = get<double>(pt, "gedanken", "dt_constant", g.dt_constant);
    require(g.dt_constant > 0.0, "gedanken.dt_constant", "must be > 0");
    g.steps = get<int>(pt, "gedanken", "steps", g.steps);
    require(g.steps >= 1, "gedanken.steps", "must be >= 1");
    g.density_check = get<bool>(pt, "gedanken", "density_check", g.density_check);
    g.dim = get<int>(pt, "gedanken", "dim", g.dim);
    require(g.dim >= 2, "gedanken.dim", "must be >= 2");
    if (c.kind == Kind::gedanken && !g.dt) {
        require(m.dephasing_rate > 0.0, "model.Gamma", "gedanken without gedanken.dt needs Gamma > 0 (dt = c / Gamma)");
    }

    // [threelevel]: frequencies in absolute units
    ThreeLevelSettings& t = c.threelevel;
    t.level_gap = get<double>(pt, "threelevel", "level_gap", t.level_gap);
    require(t.level_gap > 0.0, "threelevel.level_gap", "must be > 0");
    t.dipole = get<double>(pt, "threelevel", "dipole", t.dipole);
    t.field_amplitude = get<double>(pt, "threelevel", "field_amplitude", t.field_amplitude);
    t.field_freq = get<double>(pt, "threelevel", "field_freq", t.field_freq);
    t.rabi = get<double>(pt, "threelevel", "rabi", t.rabi);
    t.t_max = get<double>(pt, "threelevel", "t_max", t.t_max);
    require(t.t_max > 0.0, "threelevel.t_max", "must be > 0");
    t.samples = get<int>(pt, "threelevel", "samples", t.samples);
    require(t.samples >= 1, "threelevel.samples", "must be >= 1");
    t.initial = get<std::string>(pt, "threelevel", "initial", t.initial);
    require(t.initial == "a" || t.initial == "b" || t.initial == "adiabatic", "threelevel.initial",
            "must be a, b or adiabatic");
    t.photons = get<std::int64_t>(pt, "threelevel", "photons", t.photons);
    require(t.photons >= 0, "threelevel.photons", "must be >= 0");
    t.laser_photons = get<std::int64_t>(pt, "threelevel", "laser_photons", t.laser_photons);
    require(t.laser_photons >= 0, "threelevel.laser_photons", "must be >= 0");
    t.mode_freq = get<double>(pt, "threelevel", "mode_freq", t.mode_freq);
    require(t.mode_freq > 0.0, "threelevel.mode_freq", "must be > 0");

    // [sweep]
    if (const auto sweep = pt.get_child_optional("sweep")) {
        for (const auto& [key, value] : *sweep) {
            if (key == "base") {
                c.sweep_base = parse_kind(value.data(), "sweep.base");
                require(c.sweep_base != Kind::sweep && c.sweep_base != Kind::threelevel, "sweep.base",
                        "must be a single Fock-space scenario");
                continue;
            }
            auto values = detail::split_list(value.data());
            require(!values.empty(), "sweep." + key, "needs at least one value");
            c.sweep_axes.emplace_back(key, std::move(values));
        }
    }
    if (c.kind == Kind::sweep) require(!c.sweep_axes.empty(), "sweep", "sweep scenario needs at least one axis");

    m.validate();
    return c;
}

inline ptree read_config_file(const std::string& path) {
    ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(path, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError("config", e.what());
    }
    return pt;
}

inline ScenarioConfig load_config(const std::string& path) { return parse_config(read_config_file(path)); }

}  // namespace dce::scenario
