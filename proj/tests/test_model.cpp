#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "epidde/model.hpp"
#include "epidde/stability.hpp"

using namespace epidde;

TEST_CASE("temperature response constants") {
    const TempBetaModel lin = TempBetaModel::linear_default();
    const TempBetaModel quad = TempBetaModel::quadratic_default();
    CHECK(beta_at(lin, 0.0) == doctest::Approx(0.84).epsilon(1e-12));
    CHECK(beta_at(lin, 30.0) == doctest::Approx(0.7125).epsilon(1e-12));
    CHECK(beta_at(quad, 7.73) == doctest::Approx(0.792).epsilon(1e-12));
    // vertex is the maximum
    CHECK(beta_at(quad, 0.0) < 0.792);
    CHECK(beta_at(quad, 20.0) < 0.792);
    CHECK(beta_at(TempBetaModel::fixed(0.84), -40.0) == 0.84);
}

TEST_CASE("negative transmission clamps to zero and reports it") {
    const TempBetaModel lin = TempBetaModel::linear_default();
    const BetaEval hot = beta_at_checked(lin, 300.0);  // 0.84 - 0.00425*300 < 0
    CHECK(hot.value == 0.0);
    CHECK(hot.clamped);
    const BetaEval mild = beta_at_checked(lin, 10.0);
    CHECK(mild.value == doctest::Approx(0.7975).epsilon(1e-12));
    CHECK_FALSE(mild.clamped);
}

TEST_CASE("parameter validation") {
    ModelParams par;
    CHECK(par.validate().empty());
    CHECK(par.omega() == par.mu);  // birth rate tracks mu
    par.omega_override = 0.1;
    CHECK(par.omega() == 0.1);

    ModelParams bad;
    bad.tau = -1.0;
    const auto issues = bad.validate();
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("tau") != std::string::npos);
    CHECK(issues[0].find("nonnegativity") != std::string::npos);

    ModelParams prob;
    prob.p = 1.5;
    CHECK_FALSE(prob.validate().empty());
    prob.exploratory = true;
    CHECK(prob.validate().empty());

    ModelParams alpha_high;
    alpha_high.alpha = 2.0;
    CHECK_FALSE(alpha_high.validate().empty());
    alpha_high.exploratory = true;
    CHECK(alpha_high.validate().empty());
}

TEST_CASE("rhs vanishes at the infection-free state") {
    const ModelParams par;
    const StateVector x = disease_free_equilibrium();
    const StateVector dx = rhs(0.0, x, 0.0, 0.0, par, 0.84);
    for (int c = 0; c < 6; ++c) CHECK(std::abs(dx[c]) < 1e-15);
}

TEST_CASE("rhs matches direct arithmetic at the initial state") {
    const ModelParams par;
    const StateVector x = initial_state();
    const StateVector dx = rhs(0.0, x, x.i, x.q, par, 0.84);
    // dS = mu - beta S I - mu S with the default constants
    CHECK(dx.s == doctest::Approx(-7.7716e-4).epsilon(1e-6));
    // dE picks up the new infections
    CHECK(dx.e ==
          doctest::Approx(0.84 * 0.999 * 0.001).epsilon(1e-12));
}

TEST_CASE("rhs components telescope to the net demographic flow") {
    const ModelParams par;
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    for (int trial = 0; trial < 200; ++trial) {
        StateVector x;
        for (int c = 0; c < 6; ++c) x[c] = u(rng);
        const double i_lag = u(rng), q_lag = u(rng);
        const StateVector dx = rhs(0.0, x, i_lag, q_lag, par, 0.84);
        const double expected = par.omega() - par.mu * x.sum();
        CHECK(dx.sum() == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("rhs_at_temperature resolves beta through the model") {
    ModelParams par;
    par.beta_model = TempBetaModel::linear_default();
    const StateVector x = initial_state();
    const StateVector via_t = rhs_at_temperature(0.0, x, x.i, x.q, par, 30.0);
    const StateVector direct = rhs(0.0, x, x.i, x.q, par, 0.7125);
    for (int c = 0; c < 6; ++c)
        CHECK(via_t[c] == doctest::Approx(direct[c]).epsilon(1e-12));
}

TEST_CASE("subcritical run decays to the infection-free state") {
    ModelParams par;
    par.beta_model = TempBetaModel::fixed(0.5);
    const Trajectory traj = simulate(par, 0.0, 500.0);
    const double i_end = traj.interpolate(500.0)[2];
    CHECK(i_end < 1e-3);
    CHECK(i_end > 0.0);
}

TEST_CASE("supercritical run approaches the endemic infected level") {
    ModelParams par;
    par.beta_model = TempBetaModel::fixed(1.0);
    const Trajectory traj = simulate(par, 0.0, 1000.0);
    const auto eq = endemic_equilibrium(par, 1.0);
    REQUIRE(eq.has_value());
    const double i_star = eq->i;
    CHECK(i_star == doctest::Approx(0.0474).epsilon(2e-3));
    CHECK(std::abs(traj.interpolate(1000.0)[2] - i_star) < 0.1 * i_star);
}

TEST_CASE("equilibrium initial condition stays constant") {
    ModelParams par;
    par.beta_model = TempBetaModel::fixed(0.7);
    const Trajectory traj =
        simulate(par, 0.0, 50.0, 0.01, disease_free_equilibrium());
    double drift = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        drift = std::max(drift, std::abs(traj.state(k)[0] - 1.0));
        for (int c = 1; c < 6; ++c)
            drift = std::max(drift, std::abs(traj.state(k)[c]));
    }
    CHECK(drift < 1e-12);
}

TEST_CASE("population is conserved along the run") {
    const ModelParams par;  // fixed beta 0.84 default
    const Trajectory traj = simulate(par, 0.0, 300.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double sum = 0.0;
        for (int c = 0; c < 6; ++c) sum += traj.state(k)[c];
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("compartments admit only tolerance-level negativity") {
    const ModelParams par;
    const Trajectory traj = simulate(par, 0.0, 500.0);
    double floor = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        for (int c = 0; c < 6; ++c)
            floor = std::min(floor, traj.state(k)[c]);
    CHECK(floor >= -1e-9);
}

TEST_CASE("time averaged infections do not decrease with beta") {
    std::vector<double> averages;
    for (double beta : {0.2, 0.4, 0.6, 0.8, 1.0, 1.2}) {
        ModelParams par;
        par.beta_model = TempBetaModel::fixed(beta);
        const Trajectory traj = simulate(par, 0.0, 500.0);
        averages.push_back(time_average(traj, Compartment::I, 0.0, 500.0));
    }
    for (std::size_t k = 1; k < averages.size(); ++k)
        CHECK(averages[k] >= averages[k - 1] - 1e-12);
}

TEST_CASE("time average of synthetic trajectories") {
    // constant
    {
        std::vector<std::vector<double>> states(11,
                                                {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
        std::vector<std::vector<double>> derivs(11, std::vector<double>(6, 0.0));
        const Trajectory traj = Trajectory::from_samples(0.0, 1.0, states, derivs);
        CHECK(time_average(traj, Compartment::I, 0.0, 10.0) ==
              doctest::Approx(0.3).epsilon(1e-12));
    }
    // linear ramp 0 -> 1 in the I slot
    {
        std::vector<std::vector<double>> states, derivs;
        for (int k = 0; k <= 10; ++k) {
            std::vector<double> x(6, 0.0), dx(6, 0.0);
            x[2] = k / 10.0;
            dx[2] = 0.1;
            states.push_back(x);
            derivs.push_back(dx);
        }
        const Trajectory traj = Trajectory::from_samples(0.0, 1.0, states, derivs);
        CHECK(time_average(traj, Compartment::I, 0.0, 10.0) ==
              doctest::Approx(0.5).epsilon(1e-12));
        // half window: mean of a ramp over [0, 5] is 0.25
        CHECK(time_average(traj, Compartment::I, 0.0, 5.0) ==
              doctest::Approx(0.25).epsilon(1e-12));
        // off-node window ends interpolate
        CHECK(time_average(traj, Compartment::I, 2.5, 7.5) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK_THROWS_AS(time_average(traj, Compartment::I, -1.0, 5.0),
                        std::out_of_range);
        CHECK_THROWS_AS(time_average(traj, Compartment::I, 5.0, 5.0),
                        std::out_of_range);
    }
}

TEST_CASE("time average agrees with a refined-grid quadrature") {
    ModelParams par;
    par.beta_model = TempBetaModel::fixed(1.0);
    const Trajectory coarse = simulate(par, 0.0, 500.0, 0.01);
    const Trajectory fine = simulate(par, 0.0, 500.0, 0.005);
    const double a = time_average(coarse, Compartment::I, 0.0, 500.0);
    const double b = time_average(fine, Compartment::I, 0.0, 500.0);
    CHECK(std::abs(a - b) < 1e-4);
}

TEST_CASE("simulate rejects invalid setups") {
    ModelParams par;
    par.mu = -0.1;
    CHECK_THROWS_AS(simulate(par, 0.0, 100.0), ConfigError);
    ModelParams ok;
    CHECK_THROWS_AS(simulate(ok, 0.0, -5.0), ConfigError);
    // step above the smallest positive delay (tau = 4)
    CHECK_THROWS_AS(simulate(ok, 0.0, 100.0, 5.0), ConfigError);
    // no positive delays: any step is admissible
    ModelParams nodelay;
    nodelay.tau = 0.0;
    nodelay.kappa = 0.0;
    CHECK_NOTHROW(simulate(nodelay, 0.0, 10.0, 0.5));
}
