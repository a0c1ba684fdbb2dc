#include "epidde/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epidde {

TempBetaModel TempBetaModel::linear_default() {
    TempBetaModel m;
    m.kind = Kind::linear;
    m.beta0 = 0.84;
    m.beta1 = -0.00425;
    return m;
}

TempBetaModel TempBetaModel::quadratic_default() {
    TempBetaModel m;
    m.kind = Kind::quadratic;
    m.beta0 = 0.792;
    m.beta1 = 0.000345;
    m.t_m = 7.73;
    return m;
}

TempBetaModel TempBetaModel::fixed(double value) {
    TempBetaModel m;
    m.kind = Kind::fixed;
    m.fixed_value = value;
    return m;
}

BetaEval beta_at_checked(const TempBetaModel& model, double temperature_c) {
    double v = 0.0;
    switch (model.kind) {
        case TempBetaModel::Kind::linear:
            v = model.beta0 + model.beta1 * temperature_c;
            break;
        case TempBetaModel::Kind::quadratic: {
            const double dt = temperature_c - model.t_m;
            v = model.beta0 - model.beta1 * dt * dt;
            break;
        }
        case TempBetaModel::Kind::fixed:
            v = model.fixed_value;
            break;
    }
    if (v < 0.0) return {0.0, true};
    return {v, false};
}

double beta_at(const TempBetaModel& model, double temperature_c) {
    return beta_at_checked(model, temperature_c).value;
}

ModelParams default_params() { return ModelParams{}; }

std::vector<std::string> ModelParams::validate() const {
    std::vector<std::string> issues;
    auto nonneg = [&](double v, const char* name) {
        if (!(v >= 0.0)) {
            std::ostringstream msg;
            msg << name << " = " << v << " violates the nonnegativity rule";
            issues.push_back(msg.str());
        }
    };
    nonneg(mu, "mu");
    nonneg(epsilon, "epsilon");
    nonneg(gamma, "gamma");
    nonneg(tau, "tau");
    nonneg(kappa, "kappa");
    nonneg(rho, "rho");
    nonneg(delta, "delta");
    nonneg(p, "p");
    nonneg(alpha, "alpha");
    if (omega_override) nonneg(*omega_override, "omega");
    if (!exploratory) {
        if (p > 1.0)
            issues.push_back("p > 1 is outside the probability range "
                             "(use exploratory mode to override)");
        if (alpha > 1.0)
            issues.push_back("alpha > 1 is outside the probability range "
                             "(use exploratory mode to override)");
    }
    auto finite = [&](double v, const char* name) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << name << " is not finite";
            issues.push_back(msg.str());
        }
    };
    finite(mu, "mu");
    finite(epsilon, "epsilon");
    finite(gamma, "gamma");
    finite(tau, "tau");
    finite(kappa, "kappa");
    finite(rho, "rho");
    finite(delta, "delta");
    finite(p, "p");
    finite(alpha, "alpha");
    return issues;
}

StateVector initial_state() { return StateVector{0.999, 0.0, 0.001, 0.0, 0.0, 0.0}; }

StateVector rhs(double /*t*/, const StateVector& x, double i_lag, double q_lag,
                const ModelParams& par, double beta) {
    const double rem = par.removal();
    const double om = par.omega();
    StateVector out;
    out.s = om - beta * x.s * x.i - par.mu * x.s;
    out.e = beta * x.s * x.i - (par.epsilon + par.mu) * x.e;
    out.i = par.epsilon * x.e - par.gamma * x.i - rem * i_lag - par.mu * x.i;
    out.q = rem * i_lag - par.rho * (1.0 - par.alpha) * q_lag -
            (par.delta * par.alpha + par.mu) * x.q;
    out.r = par.gamma * x.i + par.rho * (1.0 - par.alpha) * q_lag - par.mu * x.r;
    out.d = par.delta * par.alpha * x.q - par.mu * x.d;
    return out;
}

StateVector rhs_at_temperature(double t, const StateVector& x, double i_lag,
                               double q_lag, const ModelParams& par,
                               double temperature_c) {
    return rhs(t, x, i_lag, q_lag, par, beta_at(par.beta_model, temperature_c));
}

Trajectory simulate(const ModelParams& par, double temperature_c,
                    double horizon, double step, const StateVector& init) {
    {
        auto issues = par.validate();
        if (!issues.empty()) {
            std::ostringstream msg;
            msg << "invalid parameters:";
            for (const auto& s : issues) msg << "\n  " << s;
            throw ConfigError(msg.str());
        }
    }
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");

    const double beta = beta_at(par.beta_model, temperature_c);

    DelayedVectorField field;
    field.dimension = 6;
    field.delays = {par.tau, par.kappa};
    field.rhs = [par, beta](double t, const double* y,
                            const double* const* lagged, double* dydt) {
        StateVector x{y[0], y[1], y[2], y[3], y[4], y[5]};
        const double i_lag = lagged[0][2];
        const double q_lag = lagged[1][3];
        const StateVector out = rhs(t, x, i_lag, q_lag, par, beta);
        for (int j = 0; j < 6; ++j) dydt[j] = out[j];
    };

    std::vector<double> init_v{init.s, init.e, init.i, init.q, init.r, init.d};
    History history = [init_v](double) { return init_v; };
    return integrate(field, history, 0.0, horizon, step);
}

double time_average(const Trajectory& traj, Compartment c, double t_a,
                    double t_b) {
    const double fuzz = traj.step() * 1e-9;
    if (!(t_a < t_b) || t_a < traj.t0() - fuzz || t_b > traj.t_end() + fuzz) {
        std::ostringstream msg;
        msg << "average window [" << t_a << ", " << t_b
            << "] outside the trajectory span [" << traj.t0() << ", "
            << traj.t_end() << "]";
        throw std::out_of_range(msg.str());
    }
    const int j = static_cast<int>(c);
    const double h = traj.step();

    // composite trapezoid: interpolated end cells, stored nodes inside
    std::size_t first = static_cast<std::size_t>(
        std::ceil((t_a - traj.t0()) / h - 1e-9));
    std::size_t last = static_cast<std::size_t>(
        std::floor((t_b - traj.t0()) / h + 1e-9));
    last = std::min(last, traj.segments());

    auto value_at = [&](double t) {
        std::vector<double> v = traj.interpolate(t);
        return v[j];
    };

    double integral = 0.0;
    double prev_t = t_a;
    double prev_v = value_at(t_a);
    for (std::size_t k = first; k <= last; ++k) {
        const double t = traj.time(k);
        if (t <= prev_t + fuzz) continue;
        const double v = traj.state(k)[j];
        integral += 0.5 * (v + prev_v) * (t - prev_t);
        prev_t = t;
        prev_v = v;
    }
    if (t_b > prev_t + fuzz) {
        const double v = value_at(t_b);
        integral += 0.5 * (v + prev_v) * (t_b - prev_t);
    }
    return integral / (t_b - t_a);
}

}  // namespace epidde
