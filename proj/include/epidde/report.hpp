#ifndef EPIDDE_REPORT_HPP
#define EPIDDE_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epidde/experiments.hpp"
#include "epidde/model.hpp"
#include "epidde/stability.hpp"

namespace epidde {

// Fully resolved run configuration: model overrides, numerics, experiment
// grids, output directory. Built from the flat `key = value` format; unknown
// keys are rejected with one aggregated error.
struct RunConfig {
    ModelParams params;
    double temperature = 0.0;
    double step = 0.01;
    double horizon = 500.0;
    double tail_window = 0.25;
    StateVector init = initial_state();
    std::optional<Grid> grid;  // experiment grid override
    struct Sensitivity {
        std::string parameter = "beta";
        std::optional<double> lo, hi;
        double step = 0.01;
        double theta = 1e-4;
    } sensitivity;
    int jobs = 0;  // 0 = auto
    std::string out_dir;
};

int default_jobs();
std::string resolve_out_dir(const std::string& cli_out);  // --out, EPIDDE_OUT, "."

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path_or_defaults);  // literal "defaults" allowed
std::string echo_config(const RunConfig& cfg);  // re-parseable round trip

// Plain numeric table for CSV emission; 12 significant digits, '\n' rows,
// ',' separator, C locale.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_csv(const Table& table);
Table parse_csv(const std::string& text);
Table trajectory_table(const Trajectory& traj);
Table sweep_table(const SweepTable& sweep);
Table sensitivity_summary_table(const SensitivityResult& result);
Table sensitivity_fan_table(const SensitivityResult& result);

// Self contained SVG line plot: one polyline per series, linear axes with
// ticks, legend; byte-identical output for identical input.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string render_svg(const std::vector<Series>& series,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& title);

std::uint64_t fnv1a64(std::string_view bytes);

// Collects every emitted file and finishes with a manifest carrying content
// checksums and the resolved-config provenance block.
class ResultBundle {
  public:
    ResultBundle(std::string out_dir, std::string config_echo);

    std::string write_text(const std::string& name, const std::string& content);
    std::string write_table(const std::string& name, const Table& table);
    std::string write_svg(const std::string& name,
                          const std::vector<Series>& series,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::string& title);
    void note(const std::string& line);  // free-form provenance notes
    std::string finalize();              // writes manifest.json, returns path

    struct Entry {
        std::string name;
        std::uint64_t checksum;
        std::size_t bytes;
    };
    const std::vector<Entry>& entries() const { return entries_; }

  private:
    std::string out_dir_;
    std::string config_echo_;
    std::vector<Entry> entries_;
    std::vector<std::string> notes_;
};

std::string stability_report_json(const StabilityReport& report);

}  // namespace epidde

#endif
