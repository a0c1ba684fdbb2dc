#include <sstream>

#include "epidde/report.hpp"
#include "format.hpp"

namespace epidde {

std::string format_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw ConfigError("table row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += detail::format_double(row[c], 12);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) fields.push_back(cell);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

Table parse_csv(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            table.columns = split_fields(line);
            header = false;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != table.columns.size())
            throw ConfigError("csv line " + std::to_string(number) + " has " +
                              std::to_string(fields.size()) +
                              " fields, header has " +
                              std::to_string(table.columns.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!detail::parse_double(fields[c], row[c]))
                throw ConfigError("csv line " + std::to_string(number) +
                                  ": cell `" + fields[c] + "` is not numeric");
        }
        table.rows.push_back(std::move(row));
    }
    if (header) throw ConfigError("csv text has no header row");
    return table;
}

Table trajectory_table(const Trajectory& traj) {
    Table table;
    table.columns = {"t", "S", "E", "I", "Q", "R", "D"};
    table.rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row(7);
        row[0] = traj.time(k);
        const double* x = traj.state(k);
        for (int c = 0; c < 6; ++c) row[c + 1] = x[c];
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table sweep_table(const SweepTable& sweep) {
    Table table;
    table.columns = sweep.columns;
    table.rows.reserve(sweep.rows.size());
    for (const auto& row : sweep.rows) {
        std::vector<double> cells;
        cells.reserve(1 + row.response.size());
        cells.push_back(row.value);
        cells.insert(cells.end(), row.response.begin(), row.response.end());
        table.rows.push_back(std::move(cells));
    }
    return table;
}

Table sensitivity_summary_table(const SensitivityResult& result) {
    Table table;
    table.columns = {"t", "mean_I", "mse"};
    table.rows.reserve(result.times.size());
    for (std::size_t s = 0; s < result.times.size(); ++s)
        table.rows.push_back({result.times[s], result.mean[s], result.mse[s]});
    return table;
}

Table sensitivity_fan_table(const SensitivityResult& result) {
    Table table;
    table.columns.push_back("t");
    for (double v : result.values)
        table.columns.push_back("I@" + detail::format_double(v, 6));
    table.rows.reserve(result.times.size());
    for (std::size_t s = 0; s < result.times.size(); ++s) {
        std::vector<double> row;
        row.reserve(1 + result.fan.size());
        row.push_back(result.times[s]);
        for (const auto& curve : result.fan) row.push_back(curve[s]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace epidde
