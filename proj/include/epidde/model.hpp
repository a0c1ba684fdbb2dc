#ifndef EPIDDE_MODEL_HPP
#define EPIDDE_MODEL_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "epidde/dde.hpp"

namespace epidde {

// Transmission rate as a function of temperature. Evaluation clamps at zero
// (a rate cannot be negative); the clamp is reported, never silent.
struct TempBetaModel {
    enum class Kind { linear, quadratic, fixed };

    Kind kind = Kind::fixed;
    double beta0 = 0.0;
    double beta1 = 0.0;        // slope (linear) or curvature (quadratic)
    double t_m = 0.0;          // peak temperature, quadratic only
    double fixed_value = 0.0;

    static TempBetaModel linear_default();     // 0.84 - 0.00425 T
    static TempBetaModel quadratic_default();  // 0.792 - 0.000345 (T - 7.73)^2
    static TempBetaModel fixed(double value);
};

struct BetaEval {
    double value;
    bool clamped;
};

BetaEval beta_at_checked(const TempBetaModel& model, double temperature_c);
double beta_at(const TempBetaModel& model, double temperature_c);

// All model constants for one run. Rates are per day, delays in days,
// fractions dimensionless. The birth rate tracks mu unless explicitly
// overridden.
struct ModelParams {
    double mu = 0.062;
    double epsilon = 0.1961;
    double gamma = 1.0 / 7.0;
    double p = 0.4;
    double tau = 4.0;
    double kappa = 14.0;
    double rho = 1.0 / 14.0;
    double alpha = 0.0043;
    double delta = 1.0;
    std::optional<double> omega_override;
    TempBetaModel beta_model = TempBetaModel::fixed(0.84);
    bool exploratory = false;

    double omega() const { return omega_override ? *omega_override : mu; }
    double removal() const { return p * std::exp(-gamma * tau); }

    // Empty when valid; otherwise one message per violated rule. Exploratory
    // mode relaxes the probability bounds on p and alpha.
    std::vector<std::string> validate() const;
};

ModelParams default_params();

struct StateVector {
    double s = 0, e = 0, i = 0, q = 0, r = 0, d = 0;

    double sum() const { return s + e + i + q + r + d; }
    double& operator[](int k) { return (&s)[k]; }
    double operator[](int k) const { return (&s)[k]; }
    static constexpr int size() { return 6; }
};

enum class Compartment { S = 0, E, I, Q, R, D };

StateVector initial_state();  // (0.999, 0, 0.001, 0, 0, 0)

// The six flow equations with the delayed arguments passed explicitly:
// i_lag = I(t - tau), q_lag = Q(t - kappa). beta is the already resolved
// transmission rate.
StateVector rhs(double t, const StateVector& x, double i_lag, double q_lag,
                const ModelParams& params, double beta);
StateVector rhs_at_temperature(double t, const StateVector& x, double i_lag,
                               double q_lag, const ModelParams& params,
                               double temperature_c);

// Integrates the model from a constant history == init for t <= 0.
// Requires step <= min positive delay.
Trajectory simulate(const ModelParams& params, double temperature_c,
                    double horizon, double step = 0.01,
                    const StateVector& init = initial_state());

// Trapezoidal mean of one compartment over [t_a, t_b] on the stored grid,
// with interpolated end cells when the window does not align with nodes.
double time_average(const Trajectory& traj, Compartment c, double t_a,
                    double t_b);

}  // namespace epidde

#endif
