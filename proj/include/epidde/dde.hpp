#ifndef EPIDDE_DDE_HPP
#define EPIDDE_DDE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "epidde/errors.hpp"

namespace epidde {

// History function: state for t <= t0. Must cover [t0 - max_delay, t0] and be
// deterministic.
using History = std::function<std::vector<double>(double)>;

// Right hand side of a delayed system. lagged[k] points at the state vector
// evaluated at t - delays[k]; a zero lag is served the current stage state.
struct DelayedVectorField {
    int dimension = 0;
    std::vector<double> delays;
    std::function<void(double t, const double* y, const double* const* lagged,
                       double* dydt)>
        rhs;
};

// Solution on a uniform grid with the node derivatives kept for cubic Hermite
// dense output. Immutable after construction; interpolate() is exact at grid
// nodes.
class Trajectory {
  public:
    Trajectory(double t0, double step, int dimension,
               std::vector<double> states, std::vector<double> derivatives);

    static Trajectory from_samples(double t0, double step,
                                   const std::vector<std::vector<double>>& states,
                                   const std::vector<std::vector<double>>& derivatives);

    double t0() const { return t0_; }
    double t_end() const { return t0_ + step_ * static_cast<double>(segments()); }
    double step() const { return step_; }
    int dimension() const { return dim_; }
    std::size_t size() const { return states_.size() / dim_; }  // grid nodes
    std::size_t segments() const { return size() - 1; }

    double time(std::size_t k) const { return t0_ + step_ * static_cast<double>(k); }
    const double* state(std::size_t k) const { return states_.data() + k * dim_; }
    const double* derivative(std::size_t k) const { return derivs_.data() + k * dim_; }

    // Cubic Hermite value at t; throws std::out_of_range outside [t0, t_end]
    // (beyond a rounding-fuzz margin).
    std::vector<double> interpolate(double t) const;
    void interpolate_to(double t, double* out) const;

  private:
    double t0_;
    double step_;
    int dim_;
    std::vector<double> states_;  // flat, node-major
    std::vector<double> derivs_;
};

// Method of steps with classical RK4 and Hermite dense output for the delayed
// lookups. Requires step <= min positive lag so every stage lookup lands in an
// already completed segment. Throws IntegrationError on a non-finite state.
Trajectory integrate(const DelayedVectorField& field, const History& history,
                     double t0, double t_end, double step);

}  // namespace epidde

#endif
