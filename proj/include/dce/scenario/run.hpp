#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dce/analysis.hpp"
#include "dce/dephasing.hpp"
#include "dce/fock.hpp"
#include "dce/lindblad.hpp"
#include "dce/moments.hpp"
#include "dce/scenario/config.hpp"
#include "dce/scenario/output.hpp"
#include "dce/threelevel.hpp"

namespace dce::scenario {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kUsage = 1, kIntegrationFailure = 2, kDisagreement = 3 };

using json = nlohmann::json;

struct RunResult {
    json report;
    int exit_code = kSuccess;
    std::vector<std::filesystem::path> files;
};

namespace detail {

struct OracleCheck {
    std::string metric;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass() const { return value <= tolerance; }
};

struct PointOutcome {
    Table table;
    json results = json::object();
    std::optional<OracleCheck> oracle;
    std::optional<json> failure;
};

inline double relative_gap(double a, double b, double floor) {
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

inline std::vector<Cell> fock_row(double t, Cell n_num, Cell n_an, Cell s_num, Cell s_an, Cell trace, Cell herm,
                                  Cell leak) {
    return {t, n_num, n_an, s_num, s_an, trace, herm, leak};
}

inline json ptree_to_json(const ptree& pt) {
    json out = json::object();
    for (const auto& [key, child] : pt) {
        if (child.empty()) out[key] = child.data();
        else out[key] = ptree_to_json(child);
    }
    return out;
}

inline json resolved_model(const ScenarioConfig& c) {
    const ModelParams& m = c.model;
    return {{"xi", format_number(m.squeeze_rate)},
            {"gamma", format_number(m.decay_rate)},
            {"Gamma", format_number(m.dephasing_rate)},
            {"n0", format_number(m.initial_photons)},
            {"dim", std::to_string(m.dim)},
            {"t_max", format_number(m.t_max())},
            {"samples", std::to_string(m.times.size() - 1)}};
}

inline json oracle_json(const OracleCheck& o) {
    return {{"metric", o.metric},
            {"value", tagged(o.value, kNumeric)},
            {"tolerance", format_number(o.tolerance)},
            {"pass", o.pass()}};
}

inline json failure_json(const IntegrationFailure& e) {
    return {{"message", e.what()}, {"last_good_time", tagged(e.last_good_time(), kNumeric)}};
}

// Final value, fitted exponent and the closed-form threshold data for one series.
inline json trajectory_summary(const ModelParams& p, const std::vector<double>& t, const std::vector<double>& n,
                               std::string_view n_source, double window) {
    json j;
    j["final_n"] = tagged(n.empty() ? std::nan("") : n.back(), n_source);
    try {
        const ExponentFit fit = fit_exponent(t, n, window);
        j["fitted_exponent"] = tagged(fit.rate, kNumeric);
        j["growing"] = fit.growing;
    } catch (const InvalidArgument& e) {
        j["fitted_exponent"] = tagged(std::nullopt, kNumeric);
        j["fit_error"] = e.what();
    }
    j["characteristic_exponent"] = tagged(characteristic_exponent(p), kAnalytic);
    j["above_threshold"] = {{"value", above_threshold(p)}, {"source", kAnalytic}};
    j["steady_state_n"] = tagged(steady_state_n(p), kAnalytic);
    return j;
}

inline json diagnostics_json(const Trajectory& tr) {
    double min_eig = std::numeric_limits<double>::infinity();
    for (double v : tr.min_eigenvalue)
        if (!std::isnan(v)) min_eig = std::min(min_eig, v);
    return {{"max_trace_err", tagged(tr.max_trace_err(), kNumeric)},
            {"max_herm_err", tagged(tr.max_herm_err(), kNumeric)},
            {"max_leakage", tagged(tr.max_leakage(), kNumeric)},
            {"min_eigenvalue", tagged(std::isfinite(min_eig) ? std::optional(min_eig) : std::nullopt, kNumeric)},
            {"truncation_warning", tr.truncation_warning},
            {"accepted_steps", tagged(static_cast<double>(tr.stats.accepted), kNumeric)},
            {"rejected_steps", tagged(static_cast<double>(tr.stats.rejected), kNumeric)}};
}

inline DensityMatrix initial_state(const ScenarioConfig& c, int dim) {
    switch (c.initial) {
        case InitialState::fock: return fock_state(c.fock_level, dim);
        case InitialState::squeezed: return squeezed_vacuum(c.squeeze_r, dim);
        case InitialState::random: return random_density(dim, c.seed);
        case InitialState::thermal: break;
    }
    return thermal_state(c.model.initial_photons, dim);
}

// Parameters for the closed forms, which assume a number-diagonal start.
inline std::optional<ModelParams> analytic_params(const ModelParams& p, const DensityMatrix& rho0) {
    const Operator& m = rho0.matrix();
    const Operator off = m - Operator(m.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() != 0.0) return std::nullopt;
    ModelParams q = p;
    q.initial_photons = mean_photon_number(rho0);
    return q;
}

inline void append_trajectory_rows(Table& table, const Trajectory& tr, const std::optional<ModelParams>& ap) {
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.times[i];
        Cell n_an, s_an;
        if (ap) {
            n_an = analytic_n(t, *ap);
            s_an = analytic_s(t, *ap);
        }
        table.rows.push_back(fock_row(t, tr.mean_n[i], n_an, tr.s_moment[i], s_an, tr.trace_err[i], tr.herm_err[i],
                                      tr.leakage[i]));
    }
}

inline PointOutcome run_ideal(const ScenarioConfig& c) {
    PointOutcome out;
    out.table.header = fock_csv_header();
    const double xi = c.model.squeeze_rate;
    std::vector<double> n;
    for (double t : c.model.times) {
        n.push_back(ideal_n(t, xi));
        out.table.rows.push_back(fock_row(t, {}, n.back(), {}, ideal_s(t, xi), {}, {}, {}));
    }
    ModelParams p = c.model;
    p.decay_rate = p.dephasing_rate = 0.0;
    out.results["summary"] = trajectory_summary(p, p.times, n, kAnalytic, c.fit_window);
    return out;
}

inline PointOutcome run_moments(const ScenarioConfig& c) {
    PointOutcome out;
    out.table.header = fock_csv_header();
    const ModelParams& p = c.model;
    const MomentSeries ms = integrate_moments({p.initial_photons, 0.0}, p);
    double worst = 0.0;
    std::vector<double> n_an;
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        const double t = p.times[i];
        n_an.push_back(analytic_n(t, p));
        const double s_an = analytic_s(t, p);
        worst = std::max({worst, relative_gap(ms.n[i], n_an.back(), c.gates.rel_floor),
                          relative_gap(ms.s[i], s_an, c.gates.rel_floor)});
        out.table.rows.push_back(fock_row(t, ms.n[i], n_an.back(), ms.s[i], s_an, {}, {}, {}));
    }
    out.oracle = OracleCheck{"max relative gap, integrate_moments vs closed form (n and s)", worst,
                             c.gates.moments_rel};
    out.results["summary"] = trajectory_summary(p, p.times, ms.n, kNumeric, c.fit_window);
    return out;
}

// Shared by lindblad and compare: the latter gates the agreement.
inline PointOutcome run_master(const ScenarioConfig& c, bool gate) {
    PointOutcome out;
    out.table.header = fock_csv_header();
    const ModelParams& p = c.model;
    const DensityMatrix rho0 = initial_state(c, p.dim);
    const auto ap = analytic_params(p, rho0);

    Trajectory tr;
    try {
        tr = evolve(rho0, p, c.evolve);
    } catch (const EvolveFailure& e) {
        append_trajectory_rows(out.table, e.partial(), ap);
        out.failure = failure_json(e);
        out.results["diagnostics"] = diagnostics_json(e.partial());
        return out;
    }
    append_trajectory_rows(out.table, tr, ap);
    out.results["summary"] = trajectory_summary(p, tr.times, tr.mean_n, kNumeric, c.fit_window);
    out.results["diagnostics"] = diagnostics_json(tr);

    const MomentSeries ms = integrate_moments({mean_photon_number(rho0), quadrature_moment(rho0)}, p);
    double gap_moments = 0.0, gap_closed = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (!(tr.leakage[i] < c.evolve.tol.leakage)) continue;
        ++used;
        const double f = c.gates.rel_floor;
        gap_moments = std::max({gap_moments, relative_gap(tr.mean_n[i], ms.n[i], f),
                                relative_gap(tr.s_moment[i], ms.s[i], f)});
        if (ap) gap_closed = std::max(gap_closed, relative_gap(tr.mean_n[i], analytic_n(tr.times[i], *ap), f));
    }
    json agreement;
    agreement["samples_compared"] = tagged(static_cast<double>(used), kNumeric);
    agreement["max_rel_gap_moments"] = tagged(gap_moments, kNumeric);
    agreement["max_rel_gap_analytic_n"] = tagged(ap ? std::optional(gap_closed) : std::nullopt, kNumeric);
    out.results["agreement"] = agreement;
    if (gate) {
        out.oracle = OracleCheck{"max relative gap, master equation vs analytic_n and integrate_moments",
                                 std::max(gap_moments, gap_closed), c.gates.compare_rel};
    }
    return out;
}

inline double gedanken_dt(const ScenarioConfig& c) {
    if (c.gedanken.dt) return *c.gedanken.dt;
    return measurement_interval(c.model.dephasing_rate, c.gedanken.dt_constant);
}

inline PointOutcome run_gedanken(const ScenarioConfig& c) {
    PointOutcome out;
    out.table.header = fock_csv_header();
    const ModelParams& p = c.model;
    const GedankenSettings& g = c.gedanken;
    const double dt = gedanken_dt(c);
    const std::vector<double> n = gedanken_evolution(p.initial_photons, p.squeeze_rate, dt, g.steps);
    std::vector<double> t(n.size());
    for (std::size_t k = 0; k < n.size(); ++k) t[k] = dt * static_cast<double>(k);

    std::optional<DensityGedanken> dens;
    if (g.density_check) {
        EvolveOptions o = c.evolve;
        o.positivity_every = 0;
        try {
            dens = gedanken_density_loop(thermal_state(p.initial_photons, g.dim), p.squeeze_rate, dt, g.steps, o);
        } catch (const EvolveFailure& e) {
            out.failure = failure_json(e);
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        Cell num;
        if (dens) {
            num = dens->mean_n[k];
            worst = std::max(worst, relative_gap(*num, n[k], c.gates.rel_floor));
        }
        out.table.rows.push_back(fock_row(t[k], num, n[k], {}, {}, {}, {}, {}));
    }

    const double xi = p.squeeze_rate;
    json r;
    r["dt"] = tagged(dt, kAnalytic);
    r["per_step_factor"] = tagged(std::cosh(4.0 * xi * dt), kAnalytic);
    r["exponent_exact"] = tagged(gedanken_exponent(xi, dt), kAnalytic);
    try {
        const ExponentFit fit = fit_exponent(t, n, c.fit_window);
        r["fitted_exponent"] = tagged(fit.rate, kNumeric);
        r["fitted_exponent_per_step"] = tagged(fit.rate * dt, kNumeric);
        if (p.dephasing_rate > 0.0) r["fitted_exponent_gamma_scaled"] = tagged(fit.rate / p.dephasing_rate, kNumeric);
    } catch (const InvalidArgument& e) {
        r["fitted_exponent"] = tagged(std::nullopt, kNumeric);
        r["fit_error"] = e.what();
    }
    if (p.dephasing_rate > 0.0) {
        const double ref = 8.0 * xi * xi / p.dephasing_rate;
        r["reference_8xi2_over_Gamma"] = tagged(ref, kAnalytic);
        r["reference_gamma_scaled"] = tagged(ref / p.dephasing_rate, kAnalytic);
    }
    r["final_n"] = tagged(n.back(), kAnalytic);
    if (dens) {
        r["density_final_n"] = tagged(dens->mean_n.back(), kNumeric);
        r["density_max_leakage"] = tagged(dens->max_leakage, kNumeric);
        out.oracle = OracleCheck{"max relative gap, density loop vs scalar recurrence", worst, c.gates.gedanken_rel};
    }
    out.results["gedanken"] = r;
    return out;
}

inline PointOutcome run_dephasing(const ScenarioConfig& c) {
    PointOutcome out;
    out.table.header = fock_csv_header();
    ModelParams p = c.model;
    p.squeeze_rate = 0.0;
    p.decay_rate = 0.0;
    const DensityMatrix rho0 = initial_state(c, p.dim);
    EvolveOptions o = c.evolve;
    o.keep_states = true;

    Trajectory tr;
    try {
        tr = evolve(rho0, p, o);
    } catch (const EvolveFailure& e) {
        append_trajectory_rows(out.table, e.partial(), std::nullopt);
        out.failure = failure_json(e);
        return out;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const DensityMatrix exact = dephase_map(rho0, p.dephasing_rate, tr.times[i]);
        worst = std::max(worst, (tr.states[i] - exact.matrix()).cwiseAbs().maxCoeff());
        out.table.rows.push_back(fock_row(tr.times[i], tr.mean_n[i], mean_photon_number(exact), tr.s_moment[i],
                                          quadrature_moment(exact), tr.trace_err[i], tr.herm_err[i], tr.leakage[i]));
    }
    out.results["diagnostics"] = diagnostics_json(tr);
    out.oracle = OracleCheck{"max elementwise gap, master equation vs dephasing map", worst, c.gates.dephasing_abs};
    return out;
}

inline PointOutcome run_threelevel(const ScenarioConfig& c) {
    PointOutcome out;
    out.table.header = threelevel_csv_header();
    const ThreeLevelSettings& s = c.threelevel;
    ThreeLevelParams p;
    p.level_gap = s.level_gap;
    p.dipole = s.dipole;
    const double amp = s.field_amplitude, nu = s.field_freq, rabi = s.rabi;
    p.field = [amp, nu](double t) { return amp * std::cos(nu * t); };
    p.rabi = [rabi](double) { return Complex(rabi, 0.0); };

    ThreeLevelState psi0{};
    if (s.initial == "a") psi0.ground = 1.0;
    else if (s.initial == "b") psi0.excited = 1.0;
    else {
        psi0.excited = 1.0;
        psi0.upper = adiabatic_psi_c(1.0, p.field(0.0), p);
        const double norm = std::sqrt(psi0.norm_sq());
        psi0.excited /= norm;
        psi0.upper /= norm;
    }
    const std::vector<double> times = uniform_times(s.t_max, s.samples);
    ode::Options o;
    o.rel_tol = c.evolve.rel_tol;
    o.abs_tol = c.evolve.abs_tol;

    ThreeLevelRun run;
    try {
        run = integrate_three_level(psi0, p, times, o);
    } catch (const IntegrationFailure& e) {
        out.failure = failure_json(e);
        return out;
    }
    const double norm0 = psi0.norm_sq();
    double max_err = 0.0, max_upper = 0.0;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const double t = run.times[i];
        const ThreeLevelState& y = run.states[i];
        const Complex ad = adiabatic_psi_c(y.excited, p.field(t), p);
        const double err = std::abs(y.upper - ad);
        max_err = std::max(max_err, err);
        max_upper = std::max(max_upper, std::abs(y.upper));
        out.table.rows.push_back({t, std::norm(y.ground), std::norm(y.excited), std::norm(y.upper), std::abs(ad), err,
                                  effective_permittivity(y.excited, p), std::abs(y.norm_sq() - norm0)});
    }

    const double xi = c.model.squeeze_rate;
    json r;
    r["max_norm_drift"] = tagged(run.max_norm_drift, kNumeric);
    r["max_upper_abs_err"] = tagged(max_err, kNumeric);
    r["adiabatic_rel_err"] = tagged(max_upper > 0.0 ? std::optional(max_err / max_upper) : std::nullopt, kNumeric);
    r["adiabaticity_parameter"] = tagged(nu / s.level_gap, kAnalytic);
    r["max_upper_ratio"] = tagged(run.max_upper_ratio, kNumeric);
    r["linear_response_warning"] = run.linear_response_warning;
    r["eps_eff_full_b"] = tagged(effective_permittivity(1.0, p), kAnalytic);
    r["stark_shift_full_b"] = tagged(stark_shift(amp, s.dipole, -s.level_gap), kAnalytic);

    json est;
    const Estimate noise = noise_energy_estimate(s.photons, xi);
    est["noise_energy_per_cycle"] = tagged(noise.value, noise.source);
    if (xi > 0.0) {
        const Estimate thr = decoherence_photon_threshold(s.laser_photons, s.mode_freq, xi);
        est["decoherence_photon_threshold"] = tagged(thr.value, thr.source);
    }
    const double growth = std::max(characteristic_exponent(c.model), 0.0);
    const Estimate gain = dce_energy_gain_per_cycle(s.photons, growth);
    est["dce_gain_per_cycle"] = tagged(gain.value, gain.source);
    est["noise_to_gain_ratio"] =
        tagged(gain.value > 0.0 ? std::optional(noise.value / gain.value) : std::nullopt, kOrderOfMagnitude);
    r["estimates"] = est;
    out.results["threelevel"] = r;
    return out;
}

inline PointOutcome run_point(const ScenarioConfig& c, Kind kind) {
    switch (kind) {
        case Kind::ideal: return run_ideal(c);
        case Kind::lindblad: return run_master(c, false);
        case Kind::compare: return run_master(c, true);
        case Kind::moments: return run_moments(c);
        case Kind::gedanken: return run_gedanken(c);
        case Kind::dephasing: return run_dephasing(c);
        case Kind::threelevel: return run_threelevel(c);
        case Kind::sweep: break;
    }
    throw InvalidArgument("run_point: sweep is not a single scenario");
}

inline int outcome_code(const PointOutcome& o) {
    if (o.failure) return kIntegrationFailure;
    if (o.oracle && !o.oracle->pass()) return kDisagreement;
    return kSuccess;
}

inline int combine_codes(int a, int b) {
    if (a == kIntegrationFailure || b == kIntegrationFailure) return kIntegrationFailure;
    return std::max(a, b);
}

inline const char* status_name(int code) {
    switch (code) {
        case kSuccess: return "ok";
        case kIntegrationFailure: return "integration_failure";
        case kDisagreement: return "oracle_disagreement";
        default: return "usage_error";
    }
}

inline json point_json(const PointOutcome& o) {
    json j = o.results;
    if (o.oracle) j["oracle"] = oracle_json(*o.oracle);
    if (o.failure) j["failure"] = *o.failure;
    j["status"] = status_name(outcome_code(o));
    return j;
}

// Every combination of the sweep axes, first axis slowest.
inline std::vector<std::vector<std::pair<std::string, std::string>>> sweep_points(const ScenarioConfig& c) {
    std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
    for (const auto& [key, values] : c.sweep_axes) {
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& partial : points) {
            for (const auto& v : values) {
                auto p = partial;
                p.emplace_back(key, v);
                next.push_back(std::move(p));
            }
        }
        points = std::move(next);
    }
    return points;
}

inline std::string point_suffix(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_p%03zu", i);
    return buf;
}

}  // namespace detail

// Runs one configuration, writes its data files and returns the report.
inline RunResult run(const ScenarioConfig& c) {
    using namespace detail;
    const auto start = std::chrono::steady_clock::now();
    RunResult res;
    json report;
    report["version"] = kVersion;
    report["scenario"] = to_string(c.kind);
    report["config"] = ptree_to_json(c.raw);

    auto emit_csv = [&](const std::string& path, const Table& table) {
        if (!c.write_csv) return;
        write_atomic(path, to_csv(table));
        res.files.emplace_back(path);
    };

    if (c.kind != Kind::sweep) {
        report["parameters"] = resolved_model(c);
        const PointOutcome o = run_point(c, c.kind);
        emit_csv(c.output + ".csv", o.table);
        report["result"] = point_json(o);
        res.exit_code = outcome_code(o);
    } else {
        // Validate every point before running any of them.
        const auto points = sweep_points(c);
        std::vector<ScenarioConfig> configs;
        for (const auto& overrides : points) {
            ptree pt = c.raw;
            pt.erase("sweep");
            pt.put("scenario", to_string(c.sweep_base));
            for (const auto& [key, value] : overrides) pt.put(ptree::path_type("model." + key, '.'), value);
            configs.push_back(parse_config(pt));
        }

        std::vector<PointOutcome> outcomes(configs.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < configs.size(); i = next++) outcomes[i] = run_point(configs[i], c.sweep_base);
        };
        const int workers = std::min<int>(c.jobs, static_cast<int>(configs.size()));
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        json arr = json::array();
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const std::string path = c.output + point_suffix(i) + ".csv";
            emit_csv(path, outcomes[i].table);
            json pj = point_json(outcomes[i]);
            json ov = json::object();
            for (const auto& [key, value] : points[i]) ov[key] = value;
            pj["overrides"] = ov;
            pj["parameters"] = resolved_model(configs[i]);
            if (c.write_csv) pj["csv"] = path;
            arr.push_back(std::move(pj));
            res.exit_code = combine_codes(res.exit_code, outcome_code(outcomes[i]));
        }
        report["base"] = to_string(c.sweep_base);
        report["points"] = std::move(arr);
    }

    report["status"] = status_name(res.exit_code);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["wall_seconds"] = tagged(wall, kNumeric);
    if (c.write_json) {
        const std::string path = c.output + ".json";
        write_atomic(path, report.dump(2) + "\n");
        res.files.emplace_back(path);
    }
    res.report = std::move(report);
    return res;
}

}  // namespace dce::scenario
