#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "epidde/cli.hpp"
#include "epidde/report.hpp"
#include "format.hpp"

namespace epidde {

namespace {

std::string fmt(double v) { return detail::format_double(v, 10); }

int effective_jobs(const RunConfig& cfg) {
    return cfg.jobs == 0 ? default_jobs() : cfg.jobs;
}

RunConfig build_config(const std::string& config_arg,
                       const std::vector<std::string>& sets, bool exploratory,
                       int jobs_flag, const std::string& out_flag) {
    std::string text;
    if (config_arg != "defaults") {
        std::ifstream in(config_arg, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file: " + config_arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got `" + s + "`");
        text += "\n" + s.substr(0, eq) + " = " + s.substr(eq + 1);
    }
    // appended last so the flag wins over any file setting
    if (exploratory) text += "\nexploratory = true";
    RunConfig cfg = parse_config(text);
    if (jobs_flag >= 0) cfg.jobs = jobs_flag;
    if (!out_flag.empty()) cfg.out_dir = out_flag;
    return cfg;
}

double resolved_beta(const RunConfig& cfg) {
    return beta_at(cfg.params.beta_model, cfg.temperature);
}

SweepOptions sweep_options(const RunConfig& cfg) {
    SweepOptions opt;
    opt.horizon = cfg.horizon;
    opt.step = cfg.step;
    opt.tail_window = cfg.tail_window;
    opt.jobs = effective_jobs(cfg);
    return opt;
}

Series sweep_series(const SweepTable& table, std::size_t response_index,
                    const std::string& label) {
    Series s;
    s.label = label;
    for (const auto& row : table.rows) {
        s.x.push_back(row.value);
        s.y.push_back(row.ok ? row.response[response_index]
                             : std::numeric_limits<double>::quiet_NaN());
    }
    return s;
}

void print_sweep_summary(const SweepTable& table) {
    std::cout << table.rows.size() << " rows, " << table.flagged()
              << " flagged (integration failures)\n";
    for (const auto& row : table.rows) {
        if (!row.ok)
            std::cout << "  flagged: " << table.columns[0] << " = "
                      << fmt(row.value) << " diverged at t = "
                      << fmt(row.fail_time) << "\n";
    }
}

int run_simulate(const RunConfig& cfg) {
    const Trajectory traj =
        simulate(cfg.params, cfg.temperature, cfg.horizon, cfg.step, cfg.init);
    ResultBundle bundle(resolve_out_dir(cfg.out_dir), echo_config(cfg));
    bundle.write_table("trajectory.csv", trajectory_table(traj));

    const char* const names[] = {"S", "E", "I", "Q", "R", "D"};
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 2000);
    std::vector<Series> series(6);
    for (int c = 0; c < 6; ++c) {
        series[c].label = names[c];
        for (std::size_t k = 0; k < traj.size(); k += stride) {
            series[c].x.push_back(traj.time(k));
            series[c].y.push_back(traj.state(k)[c]);
        }
    }
    bundle.write_svg("trajectory.svg", series, "t (days)",
                     "population fraction", "compartment trajectories");
    bundle.note("simulate: horizon " + fmt(cfg.horizon) + ", step " +
                fmt(cfg.step) + ", temperature " + fmt(cfg.temperature));
    bundle.finalize();

    const double* x = traj.state(traj.size() - 1);
    std::cout << "R0 = " << fmt(reproduction_number(cfg.params, resolved_beta(cfg)))
              << "\n";
    std::cout << "final state at t = " << fmt(traj.t_end()) << ":";
    for (int c = 0; c < 6; ++c)
        std::cout << " " << names[c] << " = " << fmt(x[c]);
    std::cout << "\n";
    return 0;
}

int run_r0(const RunConfig& cfg) {
    const double r0 = reproduction_number(cfg.params, resolved_beta(cfg));
    std::cout << "R0 = " << fmt(r0) << "\n";
    if (r0 > 1.0)
        std::cout << "above threshold: the infection spreads (R0 > 1)\n";
    else if (r0 < 1.0)
        std::cout << "below threshold: the infection dies out (R0 < 1)\n";
    else
        std::cout << "at threshold (R0 = 1)\n";
    return 0;
}

void print_state(const char* name, const StateVector& x) {
    const char* const labels[] = {"S", "E", "I", "Q", "R", "D"};
    std::cout << name << ":";
    for (int c = 0; c < 6; ++c)
        std::cout << " " << labels[c] << " = " << fmt(x[c]);
    std::cout << "\n";
}

int run_equilibria(const RunConfig& cfg) {
    const double beta = resolved_beta(cfg);
    const double r0 = reproduction_number(cfg.params, beta);
    std::cout << "R0 = " << fmt(r0) << "\n";
    print_state("disease-free equilibrium", disease_free_equilibrium());
    if (const auto endemic = endemic_equilibrium(cfg.params, beta)) {
        print_state("endemic equilibrium", *endemic);
        std::cout << "component sum = " << fmt(endemic->sum()) << "\n";
    } else {
        std::cout << "endemic equilibrium does not exist (requires R0 > 1)\n";
    }
    return 0;
}

void print_report(const StabilityReport& report) {
    std::cout << to_string(report.equilibrium)
              << ": verdict = " << to_string(report.verdict) << "\n";
    for (const auto& [name, value] : report.conditions)
        std::cout << "  " << name << " = " << (value ? "true" : "false")
                  << "\n";
    if (report.omega_star)
        std::cout << "  omega* = " << fmt(*report.omega_star) << "\n";
    if (report.tau_star)
        std::cout << "  tau* = " << fmt(*report.tau_star) << "\n";
    if (report.transversality) {
        const Transversality& t = *report.transversality;
        std::cout << "  transversality: x = " << fmt(t.x) << ", y = "
                  << fmt(t.y) << ", z = " << fmt(t.z) << ", holds = "
                  << (t.holds ? "true" : "false") << "\n";
    }
}

int run_stability(const RunConfig& cfg) {
    const double beta = resolved_beta(cfg);
    const StabilityReport dfe = classify_dfe(cfg.params, beta);
    std::cout << "R0 = " << fmt(dfe.r0) << "\n";
    print_report(dfe);
    std::string jsonl = stability_report_json(dfe) + "\n";
    if (const auto endemic = classify_endemic(cfg.params, beta)) {
        print_report(*endemic);
        jsonl += stability_report_json(*endemic) + "\n";
    } else {
        std::cout << "endemic equilibrium does not exist (requires R0 > 1)\n";
    }
    ResultBundle bundle(resolve_out_dir(cfg.out_dir), echo_config(cfg));
    bundle.write_text("stability.jsonl", jsonl);
    bundle.finalize();
    return 0;
}

int run_critical_delay(const RunConfig& cfg, int family) {
    const double beta = resolved_beta(cfg);
    const CriticalDelayResult fp = critical_delay(cfg.params, beta);
    if (fp.value) {
        std::cout << "fixed point: tau* = " << fmt(fp.value->tau_star)
                  << ", omega* = " << fmt(fp.value->omega_star)
                  << ", iterations = " << fp.value->iterations << "\n";
    } else {
        std::cout << "fixed point: " << fp.diagnostic << "\n";
    }
    if (const auto rt = critical_delay_root_tracking(cfg.params, beta)) {
        std::cout << "root tracking: tau* = " << fmt(*rt) << "\n";
    } else {
        std::cout << "root tracking: no real-part crossing below tau = 50\n";
    }
    if (family > 0) {
        const auto taus = critical_delay_family(cfg.params, beta, family);
        for (std::size_t k = 0; k < taus.size(); ++k)
            std::cout << "family k = " << k << ": tau = " << fmt(taus[k])
                      << "\n";
        if (taus.empty())
            std::cout << "family: no critical delay to extend\n";
    }
    return 0;
}

int run_bifurcation(const RunConfig& cfg, double beta, double horizon) {
    const Grid grid = cfg.grid ? *cfg.grid : Grid{0.0, 10.0, 0.5};
    SweepOptions opt = sweep_options(cfg);
    opt.horizon = horizon;
    const SweepTable table = bifurcation_sweep(cfg.params, beta, grid, opt);
    ResultBundle bundle(resolve_out_dir(cfg.out_dir), echo_config(cfg));
    bundle.write_table("bifurcation.csv", sweep_table(table));
    bundle.write_svg("bifurcation.svg",
                     {sweep_series(table, 0, "amplitude"),
                      sweep_series(table, 1, "min I"),
                      sweep_series(table, 2, "max I")},
                     "tau (days)", "tail amplitude of I",
                     "delay response at beta = " + fmt(beta));
    bundle.note("bifurcation: beta " + fmt(beta) + ", horizon " +
                fmt(opt.horizon));
    bundle.finalize();
    print_sweep_summary(table);
    return 0;
}

int run_sweep_temperature(const RunConfig& cfg, const std::string& kind_name) {
    TempBetaModel::Kind kind;
    if (kind_name == "linear") kind = TempBetaModel::Kind::linear;
    else if (kind_name == "quadratic") kind = TempBetaModel::Kind::quadratic;
    else
        throw ConfigError("--kind must be linear or quadratic, got `" +
                          kind_name + "`");
    const Grid grid = cfg.grid ? *cfg.grid : Grid{-10.0, 40.0, 5.0};
    const SweepTable table =
        temperature_sweep(cfg.params, kind, grid, sweep_options(cfg));
    ResultBundle bundle(resolve_out_dir(cfg.out_dir), echo_config(cfg));
    bundle.write_table("sweep_temperature.csv", sweep_table(table));
    bundle.write_svg("sweep_temperature.svg",
                     {sweep_series(table, 3, "avg I")},
                     "temperature (Celsius)", "time-averaged I",
                     "temperature response (" + kind_name + " beta)");
    bundle.note("sweep-temperature: kind " + kind_name);
    bundle.finalize();
    print_sweep_summary(table);
    return 0;
}

int run_sweep_isolation(const RunConfig& cfg, const std::string& axis) {
    SweepTable table;
    if (axis == "p") {
        const Grid grid = cfg.grid ? *cfg.grid : Grid{0.0, 1.0, 0.1};
        table = isolation_probability_sweep(cfg.params, grid,
                                            sweep_options(cfg));
    } else if (axis == "tau") {
        const Grid grid = cfg.grid ? *cfg.grid : Grid{0.0, 10.0, 1.0};
        table = isolation_delay_sweep(cfg.params, grid, sweep_options(cfg));
    } else {
        throw ConfigError("--axis must be p or tau, got `" + axis + "`");
    }
    ResultBundle bundle(resolve_out_dir(cfg.out_dir), echo_config(cfg));
    bundle.write_table("sweep_isolation_" + axis + ".csv", sweep_table(table));
    bundle.write_svg("sweep_isolation_" + axis + ".svg",
                     {sweep_series(table, 0, "avg I")}, axis,
                     "time-averaged I", "isolation response (" + axis + ")");
    bundle.note("sweep-isolation: axis " + axis);
    bundle.finalize();
    print_sweep_summary(table);
    return 0;
}

int run_sensitivity(const RunConfig& cfg, const std::string& parameter_flag) {
    const std::string parameter =
        parameter_flag.empty() ? cfg.sensitivity.parameter : parameter_flag;
    std::vector<NamedInterval> intervals;
    if (cfg.sensitivity.lo && cfg.sensitivity.hi) {
        intervals.push_back({*cfg.sensitivity.lo, *cfg.sensitivity.hi});
    } else {
        intervals = documented_intervals(parameter);
        if (intervals.empty())
            throw ConfigError("no documented interval for parameter `" +
                              parameter +
                              "`; set sensitivity.lo and sensitivity.hi");
    }
    ResultBundle bundle(resolve_out_dir(cfg.out_dir), echo_config(cfg));
    for (std::size_t idx = 0; idx < intervals.size(); ++idx) {
        SensitivitySpec spec;
        spec.parameter = parameter;
        spec.lo = intervals[idx].lo;
        spec.hi = intervals[idx].hi;
        spec.step = cfg.sensitivity.step;
        spec.theta = cfg.sensitivity.theta;
        spec.horizon = cfg.horizon;
        spec.jobs = effective_jobs(cfg);
        const SensitivityResult res = sensitivity_scan(cfg.params, spec);
        const std::string base =
            "sensitivity_" + parameter + "_" + std::to_string(idx);
        bundle.write_table(base + ".csv", sensitivity_summary_table(res));
        bundle.write_table(base + "_fan.csv", sensitivity_fan_table(res));
        Series mse;
        mse.label = "MSE";
        mse.x = res.times;
        mse.y = res.mse;
        bundle.write_svg(base + ".svg", {mse}, "t (days)",
                         "mean square error of I",
                         parameter + " in [" + fmt(res.lo) + ", " +
                             fmt(res.hi) + "]");
        const std::string verdict =
            "parameter " + parameter + " on [" + fmt(res.lo) + ", " +
            fmt(res.hi) + "]: " +
            (res.sensitive ? "sensitive" : "insensitive") + " (max MSE " +
            fmt(res.max_mse) + ", theta " + fmt(res.theta) + ")";
        std::cout << verdict << "\n";
        for (const auto& w : res.warnings) std::cout << "  warning: " << w << "\n";
        bundle.note(verdict);
        for (const auto& w : res.warnings) bundle.note("warning: " + w);
    }
    bundle.finalize();
    return 0;
}

double eval_poly(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (std::size_t m = c.size(); m-- > 0;) v = v * s + c[m];
    return v;
}

// Scalar reference for y'(t) = -y(t-1), unit history: on [k, k+1] the exact
// solution is a polynomial in s = t - k; each segment starts at the previous
// segment's endpoint and integrates the negated previous piece.
double steps_reference(double t) {
    if (t <= 0.0) return 1.0;
    const int k = static_cast<int>(std::floor(t));
    std::vector<double> piece{1.0};  // history piece, constant 1
    for (int j = 0; j <= k; ++j) {
        std::vector<double> next(piece.size() + 1);
        next[0] = eval_poly(piece, 1.0);
        for (std::size_t m = 0; m < piece.size(); ++m)
            next[m + 1] = -piece[m] / static_cast<double>(m + 1);
        piece = std::move(next);
    }
    return eval_poly(piece, t - static_cast<double>(k));
}

Trajectory integrate_delayed_decay(double step, const History& history) {
    DelayedVectorField field;
    field.dimension = 1;
    field.delays = {1.0};
    field.rhs = [](double, const double*, const double* const* lag,
                   double* out) { out[0] = -lag[0][0]; };
    return integrate(field, history, 0.0, 4.0, step);
}

double max_node_error(const Trajectory& traj,
                      const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        worst = std::max(worst, std::abs(traj.state(k)[0] - exact(traj.time(k))));
    return worst;
}

int run_validate() {
    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;
    const History unit = [](double) { return std::vector<double>{1.0}; };

    {
        const Trajectory traj = integrate_delayed_decay(0.01, unit);
        const double e1 = std::abs(traj.interpolate(1.0)[0] - 0.0);
        const double e2 = std::abs(traj.interpolate(2.0)[0] - (-0.5));
        checks.push_back({"delayed decay endpoint values",
                          e1 < 1e-8 && e2 < 1e-6,
                          "|y(1)| = " + fmt(e1) + ", |y(2) + 0.5| = " +
                              fmt(e2)});
    }
    {
        const double coarse =
            max_node_error(integrate_delayed_decay(0.08, unit), steps_reference);
        const double fine =
            max_node_error(integrate_delayed_decay(0.04, unit), steps_reference);
        const double ratio = coarse / std::max(fine, 1e-300);
        checks.push_back({"step halving contracts the error",
                          ratio >= 8.0,
                          "max error " + fmt(coarse) + " -> " + fmt(fine) +
                              " (ratio " + fmt(ratio) + ")"});
    }
    {
        // smooth history: the root lambda of lambda = -e^{-lambda} makes
        // e^{sigma t} cos(omega t) an exact solution of y' = -y(t-1)
        const double sig = -0.318131505204764;
        const double om = 1.337235701430689;
        auto exact = [=](double t) {
            return std::exp(sig * t) * std::cos(om * t);
        };
        const History smooth = [=](double t) {
            return std::vector<double>{exact(t)};
        };
        const double coarse =
            max_node_error(integrate_delayed_decay(0.1, smooth), exact);
        const double fine =
            max_node_error(integrate_delayed_decay(0.05, smooth), exact);
        const double ratio = coarse / std::max(fine, 1e-300);
        checks.push_back({"fourth order on a smooth history",
                          ratio >= 12.0 && ratio <= 20.0 && fine < 1e-6,
                          "max error " + fmt(coarse) + " -> " + fmt(fine) +
                              " (ratio " + fmt(ratio) + ")"});
    }
    {
        DelayedVectorField field;
        field.dimension = 1;
        field.delays = {1.0};
        field.rhs = [](double, const double*, const double* const*,
                       double* out) { out[0] = 0.0; };
        const Trajectory traj = integrate(field, unit, 0.0, 4.0, 0.1);
        const double drift = std::abs(traj.interpolate(4.0)[0] - 1.0);
        checks.push_back({"zero field is constant", drift < 1e-15,
                          "|y(4) - 1| = " + fmt(drift)});
    }
    {
        DelayedVectorField field;
        field.dimension = 1;
        field.delays = {};
        field.rhs = [](double, const double* y, const double* const*,
                       double* out) { out[0] = -y[0]; };
        const Trajectory traj = integrate(field, unit, 0.0, 1.0, 0.01);
        const double err =
            std::abs(traj.interpolate(1.0)[0] - std::exp(-1.0));
        checks.push_back({"zero-lag exponential decay", err < 1e-10,
                          "|y(1) - 1/e| = " + fmt(err)});
    }

    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "[ok]   " : "[FAIL] ") << c.name << ": "
                  << c.detail << "\n";
        all = all && c.pass;
    }
    std::cout << (all ? "validate: all checks passed\n"
                      : "validate: checks failed\n");
    return all ? 0 : 2;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"delay epidemic model toolkit"};
    app.name("epidde");
    app.require_subcommand(1);

    std::string config_arg = "defaults";
    std::string out_flag;
    std::vector<std::string> sets;
    bool exploratory = false;
    int jobs_flag = -1;
    app.add_option("--config", config_arg,
                   "config file path, or the literal `defaults`");
    app.add_option("--out", out_flag, "output directory");
    app.add_option("--set", sets, "override one config key, key=value");
    app.add_flag("--exploratory", exploratory,
                 "allow parameter values outside the documented ranges");
    app.add_option("--jobs", jobs_flag, "worker thread count, 0 = auto");

    CLI::App* sim = app.add_subcommand("simulate", "integrate the model");
    CLI::App* r0 = app.add_subcommand("r0", "basic reproduction number");
    CLI::App* eq = app.add_subcommand("equilibria", "equilibrium states");
    CLI::App* stab = app.add_subcommand("stability", "stability classification");

    CLI::App* crit =
        app.add_subcommand("critical-delay", "Hopf threshold estimates");
    int family = 0;
    crit->add_option("--family", family,
                     "also print the first k delay values of the crossing "
                     "family");

    CLI::App* bif =
        app.add_subcommand("bifurcation", "tail amplitude over a tau grid");
    double bif_beta = 0.84;
    double bif_horizon = 2000.0;
    bif->add_option("--beta", bif_beta, "fixed transmission rate");
    bif->add_option("--horizon", bif_horizon, "integration horizon in days");

    CLI::App* sweep_t =
        app.add_subcommand("sweep-temperature", "averages over a temperature "
                                                "grid");
    std::string kind_name = "linear";
    sweep_t->add_option("--kind", kind_name,
                        "temperature response: linear or quadratic");

    CLI::App* sweep_i =
        app.add_subcommand("sweep-isolation", "averages over p or tau");
    std::string axis = "p";
    sweep_i->add_option("--axis", axis, "swept quantity: p or tau");

    CLI::App* sens =
        app.add_subcommand("sensitivity", "one-parameter fan scan");
    std::string parameter_flag;
    sens->add_option("--parameter", parameter_flag,
                     "parameter to scan (defaults to the config setting)");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "integrator self checks");

    for (CLI::App* sub : {sim, r0, eq, stab, crit, bif, sweep_t, sweep_i,
                          sens, validate_cmd})
        sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (validate_cmd->parsed()) return run_validate();
        const RunConfig cfg =
            build_config(config_arg, sets, exploratory, jobs_flag, out_flag);
        if (sim->parsed()) return run_simulate(cfg);
        if (r0->parsed()) return run_r0(cfg);
        if (eq->parsed()) return run_equilibria(cfg);
        if (stab->parsed()) return run_stability(cfg);
        if (crit->parsed()) return run_critical_delay(cfg, family);
        if (bif->parsed())
            return run_bifurcation(cfg,
                                   bif->count("--beta") > 0
                                       ? bif_beta
                                       : resolved_beta(cfg),
                                   bif_horizon);
        if (sweep_t->parsed()) return run_sweep_temperature(cfg, kind_name);
        if (sweep_i->parsed()) return run_sweep_isolation(cfg, axis);
        if (sens->parsed()) return run_sensitivity(cfg, parameter_flag);
        std::cerr << "error: no subcommand\n" << app.help();
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << "\n";
        return 2;
    }
}

int cli_dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return cli_dispatch(args);
}

}  // namespace epidde
