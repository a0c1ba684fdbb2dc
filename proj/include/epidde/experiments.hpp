#ifndef EPIDDE_EXPERIMENTS_HPP
#define EPIDDE_EXPERIMENTS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "epidde/model.hpp"

namespace epidde {

// Inclusive uniform grid start, start+step, ..., stop (within rounding fuzz).
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::size_t size() const;
    double at(std::size_t k) const;
};

// One sweep row: the grid value, per-response cells, and an ok flag. Failed
// integrations keep their row with NaN cells (rows are flagged, not dropped).
struct SweepRow {
    double value = 0.0;
    bool ok = true;
    double fail_time = 0.0;
    std::vector<double> response;
};

struct SweepTable {
    std::vector<std::string> columns;  // first column is the grid quantity
    std::vector<SweepRow> rows;
    double horizon = 0.0;
    double step = 0.0;

    std::size_t flagged() const;
};

// Shared numeric settings for the batch studies.
struct SweepOptions {
    double horizon = 500.0;
    double step = 0.01;
    double tail_window = 0.25;  // fraction of horizon, amplitude measurements
    int jobs = 1;
};

// Grid-parallel work pool; results land in preassigned slots so assembly is
// deterministic regardless of scheduling.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& body);

// Columns T,beta,avg_S..avg_D; averages over the full horizon.
SweepTable temperature_sweep(const ModelParams& base, TempBetaModel::Kind kind,
                             const Grid& grid = {-10.0, 40.0, 5.0},
                             const SweepOptions& opt = {});

// Columns p,avg_I and tau,avg_I.
SweepTable isolation_probability_sweep(const ModelParams& base,
                                       const Grid& grid = {0.0, 1.0, 0.1},
                                       const SweepOptions& opt = {});
SweepTable isolation_delay_sweep(const ModelParams& base,
                                 const Grid& grid = {0.0, 10.0, 1.0},
                                 const SweepOptions& opt = {});

enum class R0Axis { temperature, p, tau };

// Columns <axis>,r0. Temperature axis resolves beta through the base model's
// temperature response.
SweepTable r0_sweep(const ModelParams& base, R0Axis axis, const Grid& grid);

// Columns tau,amplitude,min_I,max_I measured over the tail window of a long
// horizon run (default 2000 days).
SweepTable bifurcation_sweep(const ModelParams& base, double beta,
                             const Grid& tau_grid,
                             const SweepOptions& opt = {2000.0, 0.01, 0.25, 1});

struct SensitivityResult {
    std::string parameter;      // requested name ("omega" stays literal)
    std::string scanned;        // actual model member that was varied
    double lo = 0, hi = 0, step = 0.01;
    double theta = 1e-4;
    std::vector<double> values;          // fan parameter values
    std::vector<char> member_ok;         // per fan member
    int failed_members = 0;
    std::vector<double> times;           // sampling grid, dt = 0.5
    std::vector<std::vector<double>> fan;  // I curves, NaN rows for failures
    std::vector<double> mean;            // over surviving members
    std::vector<double> mse;
    double max_mse = 0.0;                // NaN when no member survived
    bool sensitive = false;              // max_mse > theta
    std::vector<std::string> warnings;
};

struct SensitivitySpec {
    std::string parameter;
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.01;
    double theta = 1e-4;
    double horizon = 500.0;
    double sample_dt = 0.5;
    int jobs = 1;
};

// Varies one parameter over [lo, hi], simulates every value with defaults
// elsewhere, and summarizes spread through the mean infected curve and the
// pointwise mean square error. Verdict: sensitive <=> max_t MSE(t) > theta.
// Scanning mu also moves the birth rate with it unless omega was overridden.
// The literal name "omega" is not a model parameter: rejected unless
// exploratory, then scanned as rho with a warning.
SensitivityResult sensitivity_scan(const ModelParams& base,
                                   const SensitivitySpec& spec);

// Documented scan intervals keyed by parameter name; empty for unknown names.
struct NamedInterval {
    double lo, hi;
};
std::vector<NamedInterval> documented_intervals(const std::string& parameter);

}  // namespace epidde

#endif
