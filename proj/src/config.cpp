#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "epidde/report.hpp"
#include "format.hpp"

namespace epidde {

int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(std::min(n, 8u));
}

std::string resolve_out_dir(const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("EPIDDE_OUT"); env && *env) return env;
    return ".";
}

namespace {

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

struct Line {
    int number;
    std::string key;
    std::string value;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<std::string> errors;
    std::vector<Line> lines;

    {
        std::istringstream in(text);
        std::string raw;
        int number = 0;
        while (std::getline(in, raw)) {
            ++number;
            if (const auto hash = raw.find('#'); hash != std::string::npos)
                raw.erase(hash);
            const std::string stripped = trim(raw);
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                errors.push_back("line " + std::to_string(number) +
                                 ": expected `key = value`, got `" + stripped +
                                 "`");
                continue;
            }
            Line line;
            line.number = number;
            line.key = trim(std::string_view(stripped).substr(0, eq));
            line.value = trim(std::string_view(stripped).substr(eq + 1));
            if (line.key.empty() || line.value.empty()) {
                errors.push_back("line " + std::to_string(number) +
                                 ": empty key or value");
                continue;
            }
            lines.push_back(std::move(line));
        }
    }

    bool saw_kind = false, saw_beta0 = false, saw_beta1 = false,
         saw_tm = false, saw_fixed = false;
    TempBetaModel::Kind kind = TempBetaModel::Kind::fixed;
    double beta0 = 0, beta1 = 0, t_m = 0, fixed_value = 0;

    auto numeric = [&](const Line& line, double& target) {
        double v;
        if (!detail::parse_double(line.value, v)) {
            errors.push_back("line " + std::to_string(line.number) +
                             ": value of `" + line.key + "` is not numeric: `" +
                             line.value + "`");
            return;
        }
        if (!std::isfinite(v)) {
            errors.push_back("line " + std::to_string(line.number) +
                             ": value of `" + line.key + "` must be finite");
            return;
        }
        target = v;
    };

    for (const Line& line : lines) {
        const std::string& k = line.key;
        if (k == "mu") numeric(line, cfg.params.mu);
        else if (k == "epsilon") numeric(line, cfg.params.epsilon);
        else if (k == "gamma") numeric(line, cfg.params.gamma);
        else if (k == "p") numeric(line, cfg.params.p);
        else if (k == "tau") numeric(line, cfg.params.tau);
        else if (k == "kappa") numeric(line, cfg.params.kappa);
        else if (k == "rho") numeric(line, cfg.params.rho);
        else if (k == "alpha") numeric(line, cfg.params.alpha);
        else if (k == "delta") numeric(line, cfg.params.delta);
        else if (k == "omega") {
            double v = 0;
            const std::size_t before = errors.size();
            numeric(line, v);
            if (errors.size() == before) cfg.params.omega_override = v;
        } else if (k == "beta.kind") {
            saw_kind = true;
            if (line.value == "linear") kind = TempBetaModel::Kind::linear;
            else if (line.value == "quadratic")
                kind = TempBetaModel::Kind::quadratic;
            else if (line.value == "fixed") kind = TempBetaModel::Kind::fixed;
            else {
                saw_kind = false;
                errors.push_back("line " + std::to_string(line.number) +
                                 ": beta.kind must be linear, quadratic, or "
                                 "fixed, got `" + line.value + "`");
            }
        } else if (k == "beta.beta0") { saw_beta0 = true; numeric(line, beta0); }
        else if (k == "beta.beta1") { saw_beta1 = true; numeric(line, beta1); }
        else if (k == "beta.t_m") { saw_tm = true; numeric(line, t_m); }
        else if (k == "beta.fixed") { saw_fixed = true; numeric(line, fixed_value); }
        else if (k == "temperature") numeric(line, cfg.temperature);
        else if (k == "step") numeric(line, cfg.step);
        else if (k == "horizon") numeric(line, cfg.horizon);
        else if (k == "tail_window") numeric(line, cfg.tail_window);
        else if (k == "init.s") numeric(line, cfg.init.s);
        else if (k == "init.e") numeric(line, cfg.init.e);
        else if (k == "init.i") numeric(line, cfg.init.i);
        else if (k == "init.q") numeric(line, cfg.init.q);
        else if (k == "init.r") numeric(line, cfg.init.r);
        else if (k == "init.d") numeric(line, cfg.init.d);
        else if (k == "grid.start" || k == "grid.stop" || k == "grid.step") {
            if (!cfg.grid) cfg.grid = Grid{0.0, 0.0, 1.0};
            if (k == "grid.start") numeric(line, cfg.grid->start);
            else if (k == "grid.stop") numeric(line, cfg.grid->stop);
            else numeric(line, cfg.grid->step);
        } else if (k == "sensitivity.parameter") {
            cfg.sensitivity.parameter = line.value;
        } else if (k == "sensitivity.lo") {
            double v = 0;
            const std::size_t before = errors.size();
            numeric(line, v);
            if (errors.size() == before) cfg.sensitivity.lo = v;
        } else if (k == "sensitivity.hi") {
            double v = 0;
            const std::size_t before = errors.size();
            numeric(line, v);
            if (errors.size() == before) cfg.sensitivity.hi = v;
        } else if (k == "sensitivity.step") numeric(line, cfg.sensitivity.step);
        else if (k == "sensitivity.theta") numeric(line, cfg.sensitivity.theta);
        else if (k == "exploratory") {
            if (line.value == "true" || line.value == "1")
                cfg.params.exploratory = true;
            else if (line.value == "false" || line.value == "0")
                cfg.params.exploratory = false;
            else
                errors.push_back("line " + std::to_string(line.number) +
                                 ": exploratory must be true or false, got `" +
                                 line.value + "`");
        } else if (k == "jobs") {
            int v;
            if (!detail::parse_int(line.value, v) || v < 0)
                errors.push_back("line " + std::to_string(line.number) +
                                 ": jobs must be a nonnegative integer, got `" +
                                 line.value + "`");
            else
                cfg.jobs = v;
        } else if (k == "out") {
            cfg.out_dir = line.value;
        } else {
            errors.push_back("line " + std::to_string(line.number) +
                             ": unknown key `" + k + "`");
        }
    }

    // beta block resolves after the scan so key order cannot matter
    if (saw_kind) {
        switch (kind) {
            case TempBetaModel::Kind::linear:
                cfg.params.beta_model = TempBetaModel::linear_default();
                break;
            case TempBetaModel::Kind::quadratic:
                cfg.params.beta_model = TempBetaModel::quadratic_default();
                break;
            case TempBetaModel::Kind::fixed:
                cfg.params.beta_model = TempBetaModel::fixed(0.84);
                break;
        }
    }
    const TempBetaModel::Kind effective = cfg.params.beta_model.kind;
    if (saw_fixed) {
        if (effective == TempBetaModel::Kind::fixed)
            cfg.params.beta_model.fixed_value = fixed_value;
        else
            errors.push_back("beta.fixed requires beta.kind = fixed");
    }
    if (saw_beta0) {
        if (effective != TempBetaModel::Kind::fixed)
            cfg.params.beta_model.beta0 = beta0;
        else
            errors.push_back(
                "beta.beta0 requires beta.kind = linear or quadratic");
    }
    if (saw_beta1) {
        if (effective != TempBetaModel::Kind::fixed)
            cfg.params.beta_model.beta1 = beta1;
        else
            errors.push_back(
                "beta.beta1 requires beta.kind = linear or quadratic");
    }
    if (saw_tm) {
        if (effective == TempBetaModel::Kind::quadratic)
            cfg.params.beta_model.t_m = t_m;
        else
            errors.push_back("beta.t_m requires beta.kind = quadratic");
    }

    for (const auto& issue : cfg.params.validate()) errors.push_back(issue);
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
        errors.push_back("step must be positive and finite");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
        errors.push_back("horizon must be positive and finite");
    if (!(cfg.tail_window > 0.0) || !(cfg.tail_window <= 1.0))
        errors.push_back("tail_window must lie in (0, 1]");
    for (int c = 0; c < StateVector::size(); ++c) {
        if (!std::isfinite(cfg.init[c]) || cfg.init[c] < 0.0) {
            errors.push_back("init components must be finite and nonnegative");
            break;
        }
    }
    if (cfg.grid) {
        if (!(cfg.grid->step > 0.0) || !(cfg.grid->stop >= cfg.grid->start))
            errors.push_back(
                "grid requires step > 0 and grid.stop >= grid.start");
    }
    if (!(cfg.sensitivity.step > 0.0))
        errors.push_back("sensitivity.step must be positive");
    if (!(cfg.sensitivity.theta > 0.0))
        errors.push_back("sensitivity.theta must be positive");
    if (cfg.sensitivity.lo && cfg.sensitivity.hi &&
        !(*cfg.sensitivity.hi >= *cfg.sensitivity.lo))
        errors.push_back("sensitivity.hi must be >= sensitivity.lo");

    if (!errors.empty()) {
        std::string msg = "configuration rejected:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path_or_defaults) {
    if (path_or_defaults == "defaults") return parse_config("");
    std::ifstream in(path_or_defaults, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file: " + path_or_defaults);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string echo_config(const RunConfig& cfg) {
    auto num = [](double v) { return detail::format_double(v, 17); };
    std::ostringstream out;
    out << "# resolved configuration\n";
    out << "mu = " << num(cfg.params.mu) << "\n";
    out << "epsilon = " << num(cfg.params.epsilon) << "\n";
    out << "gamma = " << num(cfg.params.gamma) << "\n";
    out << "p = " << num(cfg.params.p) << "\n";
    out << "tau = " << num(cfg.params.tau) << "\n";
    out << "kappa = " << num(cfg.params.kappa) << "\n";
    out << "rho = " << num(cfg.params.rho) << "\n";
    out << "alpha = " << num(cfg.params.alpha) << "\n";
    out << "delta = " << num(cfg.params.delta) << "\n";
    if (cfg.params.omega_override)
        out << "omega = " << num(*cfg.params.omega_override) << "\n";
    const TempBetaModel& bm = cfg.params.beta_model;
    switch (bm.kind) {
        case TempBetaModel::Kind::fixed:
            out << "beta.kind = fixed\n";
            out << "beta.fixed = " << num(bm.fixed_value) << "\n";
            break;
        case TempBetaModel::Kind::linear:
            out << "beta.kind = linear\n";
            out << "beta.beta0 = " << num(bm.beta0) << "\n";
            out << "beta.beta1 = " << num(bm.beta1) << "\n";
            break;
        case TempBetaModel::Kind::quadratic:
            out << "beta.kind = quadratic\n";
            out << "beta.beta0 = " << num(bm.beta0) << "\n";
            out << "beta.beta1 = " << num(bm.beta1) << "\n";
            out << "beta.t_m = " << num(bm.t_m) << "\n";
            break;
    }
    out << "temperature = " << num(cfg.temperature) << "\n";
    out << "step = " << num(cfg.step) << "\n";
    out << "horizon = " << num(cfg.horizon) << "\n";
    out << "tail_window = " << num(cfg.tail_window) << "\n";
    out << "init.s = " << num(cfg.init.s) << "\n";
    out << "init.e = " << num(cfg.init.e) << "\n";
    out << "init.i = " << num(cfg.init.i) << "\n";
    out << "init.q = " << num(cfg.init.q) << "\n";
    out << "init.r = " << num(cfg.init.r) << "\n";
    out << "init.d = " << num(cfg.init.d) << "\n";
    if (cfg.grid) {
        out << "grid.start = " << num(cfg.grid->start) << "\n";
        out << "grid.stop = " << num(cfg.grid->stop) << "\n";
        out << "grid.step = " << num(cfg.grid->step) << "\n";
    }
    out << "sensitivity.parameter = " << cfg.sensitivity.parameter << "\n";
    if (cfg.sensitivity.lo)
        out << "sensitivity.lo = " << num(*cfg.sensitivity.lo) << "\n";
    if (cfg.sensitivity.hi)
        out << "sensitivity.hi = " << num(*cfg.sensitivity.hi) << "\n";
    out << "sensitivity.step = " << num(cfg.sensitivity.step) << "\n";
    out << "sensitivity.theta = " << num(cfg.sensitivity.theta) << "\n";
    out << "exploratory = " << (cfg.params.exploratory ? "true" : "false")
        << "\n";
    out << "jobs = " << cfg.jobs << "\n";
    if (!cfg.out_dir.empty()) out << "out = " << cfg.out_dir << "\n";
    return out.str();
}

}  // namespace epidde
