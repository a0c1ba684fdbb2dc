#include "epidde/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "epidde/stability.hpp"

namespace epidde {

namespace {
const double kNan = std::numeric_limits<double>::quiet_NaN();
}

std::size_t Grid::size() const {
    if (!(step > 0.0) || !(stop >= start)) throw ConfigError("malformed grid");
    return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

double Grid::at(std::size_t k) const {
    return start + step * static_cast<double>(k);
}

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    const int workers = static_cast<int>(
        std::min<std::size_t>(n, static_cast<std::size_t>(jobs)));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= n) return;
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::size_t SweepTable::flagged() const {
    std::size_t n = 0;
    for (const auto& row : rows)
        if (!row.ok) ++n;
    return n;
}

namespace {

// Shared driver: one simulation per grid point, responses assembled by grid
// index; integration failures keep a flagged NaN row.
SweepTable run_sweep(const Grid& grid, const std::vector<std::string>& columns,
                     const SweepOptions& opt,
                     const std::function<std::vector<double>(std::size_t)>& cell) {
    SweepTable table;
    table.columns = columns;
    table.horizon = opt.horizon;
    table.step = opt.step;
    table.rows.resize(grid.size());
    parallel_for(grid.size(), opt.jobs, [&](std::size_t k) {
        SweepRow& row = table.rows[k];
        row.value = grid.at(k);
        try {
            row.response = cell(k);
            row.ok = true;
        } catch (const IntegrationError& err) {
            row.ok = false;
            row.fail_time = err.time;
            row.response.assign(columns.size() - 1, kNan);
        }
    });
    return table;
}

std::vector<double> compartment_averages(const Trajectory& traj) {
    std::vector<double> out(6);
    for (int j = 0; j < 6; ++j)
        out[j] = time_average(traj, static_cast<Compartment>(j), traj.t0(),
                              traj.t_end());
    return out;
}

}  // namespace

SweepTable temperature_sweep(const ModelParams& base, TempBetaModel::Kind kind,
                             const Grid& grid, const SweepOptions& opt) {
    if (kind == TempBetaModel::Kind::fixed)
        throw ConfigError("temperature sweep needs a temperature-dependent "
                          "beta model (linear or quadratic)");
    ModelParams par = base;
    par.beta_model = kind == TempBetaModel::Kind::linear
                         ? TempBetaModel::linear_default()
                         : TempBetaModel::quadratic_default();
    return run_sweep(
        grid,
        {"T", "beta", "avg_S", "avg_E", "avg_I", "avg_Q", "avg_R", "avg_D"},
        opt, [&](std::size_t k) {
            const double t_c = grid.at(k);
            const Trajectory traj =
                simulate(par, t_c, opt.horizon, opt.step);
            std::vector<double> cells{beta_at(par.beta_model, t_c)};
            const auto avg = compartment_averages(traj);
            cells.insert(cells.end(), avg.begin(), avg.end());
            return cells;
        });
}

SweepTable isolation_probability_sweep(const ModelParams& base,
                                       const Grid& grid,
                                       const SweepOptions& opt) {
    return run_sweep(grid, {"p", "avg_I"}, opt, [&](std::size_t k) {
        ModelParams par = base;
        par.p = grid.at(k);
        const Trajectory traj = simulate(par, 0.0, opt.horizon, opt.step);
        return std::vector<double>{
            time_average(traj, Compartment::I, 0.0, opt.horizon)};
    });
}

SweepTable isolation_delay_sweep(const ModelParams& base, const Grid& grid,
                                 const SweepOptions& opt) {
    return run_sweep(grid, {"tau", "avg_I"}, opt, [&](std::size_t k) {
        ModelParams par = base;
        par.tau = grid.at(k);
        const Trajectory traj = simulate(par, 0.0, opt.horizon, opt.step);
        return std::vector<double>{
            time_average(traj, Compartment::I, 0.0, opt.horizon)};
    });
}

SweepTable r0_sweep(const ModelParams& base, R0Axis axis, const Grid& grid) {
    const char* name = axis == R0Axis::temperature ? "T"
                       : axis == R0Axis::p         ? "p"
                                                   : "tau";
    SweepTable table;
    table.columns = {name, "r0"};
    table.rows.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SweepRow& row = table.rows[k];
        row.value = grid.at(k);
        ModelParams par = base;
        double beta = 0.0;
        switch (axis) {
            case R0Axis::temperature:
                beta = beta_at(par.beta_model, row.value);
                break;
            case R0Axis::p:
                par.p = row.value;
                beta = beta_at(par.beta_model, 0.0);
                break;
            case R0Axis::tau:
                par.tau = row.value;
                beta = beta_at(par.beta_model, 0.0);
                break;
        }
        row.response = {reproduction_number(par, beta)};
    }
    return table;
}

SweepTable bifurcation_sweep(const ModelParams& base, double beta,
                             const Grid& tau_grid, const SweepOptions& opt) {
    ModelParams par = base;
    par.beta_model = TempBetaModel::fixed(beta);
    return run_sweep(tau_grid, {"tau", "amplitude", "min_I", "max_I"}, opt,
                     [&](std::size_t k) {
                         ModelParams point = par;
                         point.tau = tau_grid.at(k);
                         const Trajectory traj =
                             simulate(point, 0.0, opt.horizon, opt.step);
                         const double tail_start =
                             opt.horizon * (1.0 - opt.tail_window);
                         double lo = std::numeric_limits<double>::infinity();
                         double hi = -lo;
                         for (std::size_t n = 0; n < traj.size(); ++n) {
                             if (traj.time(n) < tail_start) continue;
                             const double v = traj.state(n)[2];
                             lo = std::min(lo, v);
                             hi = std::max(hi, v);
                         }
                         return std::vector<double>{hi - lo, lo, hi};
                     });
}

std::vector<NamedInterval> documented_intervals(const std::string& parameter) {
    if (parameter == "mu") return {{0.0, 0.5}, {0.5, 2.5}};
    if (parameter == "beta") return {{0.0, 0.5}, {2.0, 3.0}};
    if (parameter == "alpha") return {{0.0, 1.0}, {2.0, 5.0}};
    if (parameter == "gamma") return {{0.0, 1.0}, {1.0, 2.5}};
    if (parameter == "epsilon") return {{0.0, 0.5}, {1.5, 2.5}};
    if (parameter == "omega") return {{0.0, 2.0}, {2.0, 4.0}};
    if (parameter == "delta") return {{0.0, 1.0}, {1.0, 2.5}};
    return {};
}

namespace {

void apply_parameter(ModelParams& par, const std::string& name, double value) {
    if (name == "mu") {
        par.mu = value;  // birth rate tracks mu unless explicitly overridden
    } else if (name == "epsilon") {
        par.epsilon = value;
    } else if (name == "gamma") {
        par.gamma = value;
    } else if (name == "p") {
        par.p = value;
    } else if (name == "tau") {
        par.tau = value;
    } else if (name == "kappa") {
        par.kappa = value;
    } else if (name == "rho") {
        par.rho = value;
    } else if (name == "alpha") {
        par.alpha = value;
    } else if (name == "delta") {
        par.delta = value;
    } else if (name == "beta") {
        par.beta_model = TempBetaModel::fixed(value);
    } else {
        throw ConfigError("unknown parameter name: " + name);
    }
}

}  // namespace

SensitivityResult sensitivity_scan(const ModelParams& base,
                                   const SensitivitySpec& spec) {
    SensitivityResult res;
    res.parameter = spec.parameter;
    res.scanned = spec.parameter;
    res.lo = spec.lo;
    res.hi = spec.hi;
    res.step = spec.step;
    res.theta = spec.theta;

    if (spec.parameter == "omega") {
        // not a state-equation parameter; the closest stand-in is the
        // quarantine exit rate
        if (!base.exploratory)
            throw ConfigError(
                "parameter omega is not part of the state equations; rerun "
                "with the exploratory flag to scan it as rho");
        res.scanned = "rho";
        res.warnings.push_back(
            "unmapped parameter omega scanned as rho (exploratory)");
    }
    if (!(spec.hi >= spec.lo) || !(spec.step > 0.0))
        throw ConfigError("sensitivity interval is malformed");

    const Grid grid{spec.lo, spec.hi, spec.step};
    const std::size_t n = grid.size();
    res.values.resize(n);
    res.member_ok.assign(n, 1);
    res.fan.assign(n, {});

    const std::size_t samples =
        static_cast<std::size_t>(std::floor(spec.horizon / spec.sample_dt + 1e-9)) +
        1;
    res.times.resize(samples);
    for (std::size_t s = 0; s < samples; ++s)
        res.times[s] = spec.sample_dt * static_cast<double>(s);

    parallel_for(n, spec.jobs, [&](std::size_t k) {
        const double value = grid.at(k);
        res.values[k] = value;
        ModelParams par = base;
        apply_parameter(par, res.scanned, value);
        std::vector<double>& curve = res.fan[k];
        curve.assign(samples, kNan);
        try {
            const Trajectory traj = simulate(par, 0.0, spec.horizon, 0.01);
            for (std::size_t s = 0; s < samples; ++s)
                curve[s] = traj.interpolate(res.times[s])[2];
        } catch (const IntegrationError&) {
            res.member_ok[k] = 0;
        }
    });

    for (std::size_t k = 0; k < n; ++k)
        if (!res.member_ok[k]) ++res.failed_members;
    const std::size_t alive = n - static_cast<std::size_t>(res.failed_members);
    if (res.failed_members > 0) {
        res.warnings.push_back(
            std::to_string(res.failed_members) + " of " + std::to_string(n) +
            " fan members failed integration and were excluded");
    }

    res.mean.assign(samples, kNan);
    res.mse.assign(samples, kNan);
    if (alive == 0) {
        res.max_mse = kNan;
        res.sensitive = false;
        res.warnings.push_back("all fan members failed; spread is undefined");
        return res;
    }

    for (std::size_t s = 0; s < samples; ++s) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (res.member_ok[k]) sum += res.fan[k][s];
        const double mean = sum / static_cast<double>(alive);
        double sq = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (res.member_ok[k]) {
                const double dev = res.fan[k][s] - mean;
                sq += dev * dev;
            }
        res.mean[s] = mean;
        res.mse[s] = sq / static_cast<double>(alive);
    }
    res.max_mse = *std::max_element(res.mse.begin(), res.mse.end());
    res.sensitive = res.max_mse > spec.theta;
    return res;
}

}  // namespace epidde
