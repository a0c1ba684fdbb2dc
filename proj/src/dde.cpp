#include "epidde/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epidde {

namespace {

// Hermite basis on [0,1].
inline double h00(double u) { return (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u); }
inline double h10(double u) { return u * (1.0 - u) * (1.0 - u); }
inline double h01(double u) { return u * u * (3.0 - 2.0 * u); }
inline double h11(double u) { return u * u * (u - 1.0); }

inline void hermite(const double* y0, const double* f0, const double* y1,
                    const double* f1, double h, double u, int dim,
                    double* out) {
    const double a = h00(u), b = h10(u) * h, c = h01(u), d = h11(u) * h;
    for (int j = 0; j < dim; ++j)
        out[j] = a * y0[j] + b * f0[j] + c * y1[j] + d * f1[j];
}

std::size_t grid_steps(double t0, double t_end, double step) {
    // floor with a fuzz guard so 5.0/0.01 style quotients land exactly
    return static_cast<std::size_t>(std::floor((t_end - t0) / step + 1e-9));
}

}  // namespace

Trajectory::Trajectory(double t0, double step, int dimension,
                       std::vector<double> states,
                       std::vector<double> derivatives)
    : t0_(t0), step_(step), dim_(dimension), states_(std::move(states)),
      derivs_(std::move(derivatives)) {
    if (dim_ <= 0 || step_ <= 0.0)
        throw ConfigError("trajectory needs a positive dimension and step");
    if (states_.size() != derivs_.size() || states_.empty() ||
        states_.size() % dim_ != 0)
        throw ConfigError("trajectory state/derivative arrays are inconsistent");
    if (states_.size() / dim_ < 2)
        throw ConfigError("trajectory needs at least two grid nodes");
}

Trajectory Trajectory::from_samples(
    double t0, double step, const std::vector<std::vector<double>>& states,
    const std::vector<std::vector<double>>& derivatives) {
    if (states.empty() || states.size() != derivatives.size())
        throw ConfigError("from_samples: mismatched sample arrays");
    const int dim = static_cast<int>(states.front().size());
    std::vector<double> flat_s, flat_d;
    flat_s.reserve(states.size() * dim);
    flat_d.reserve(states.size() * dim);
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (static_cast<int>(states[k].size()) != dim ||
            static_cast<int>(derivatives[k].size()) != dim)
            throw ConfigError("from_samples: ragged sample arrays");
        flat_s.insert(flat_s.end(), states[k].begin(), states[k].end());
        flat_d.insert(flat_d.end(), derivatives[k].begin(), derivatives[k].end());
    }
    return Trajectory(t0, step, dim, std::move(flat_s), std::move(flat_d));
}

void Trajectory::interpolate_to(double t, double* out) const {
    const double fuzz = step_ * 1e-9;
    if (t < t0_ - fuzz || t > t_end() + fuzz) {
        std::ostringstream msg;
        msg << "interpolation time " << t << " outside [" << t0_ << ", "
            << t_end() << "]";
        throw std::out_of_range(msg.str());
    }
    const std::size_t last = segments() - 1;
    double pos = (t - t0_) / step_;
    if (pos < 0.0) pos = 0.0;
    std::size_t seg = std::min(static_cast<std::size_t>(pos), last);
    const double u = pos - static_cast<double>(seg);
    hermite(state(seg), derivative(seg), state(seg + 1), derivative(seg + 1),
            step_, u, dim_, out);
}

std::vector<double> Trajectory::interpolate(double t) const {
    std::vector<double> out(dim_);
    interpolate_to(t, out.data());
    return out;
}

Trajectory integrate(const DelayedVectorField& field, const History& history,
                     double t0, double t_end, double step) {
    const int dim = field.dimension;
    if (dim <= 0) throw ConfigError("field dimension must be positive");
    if (!(step > 0.0)) throw ConfigError("step must be positive");
    if (!(t_end > t0)) throw ConfigError("t_end must exceed t0");
    double min_lag = std::numeric_limits<double>::infinity();
    for (double lag : field.delays) {
        if (lag < 0.0) throw ConfigError("delays must be nonnegative");
        if (lag > 0.0) min_lag = std::min(min_lag, lag);
    }
    if (step > min_lag) {
        std::ostringstream msg;
        msg << "step " << step << " exceeds the smallest positive lag "
            << min_lag;
        throw ConfigError(msg.str());
    }

    const std::size_t n = grid_steps(t0, t_end, step);
    if (n == 0) throw ConfigError("horizon shorter than one step");

    std::vector<double> states((n + 1) * dim), derivs((n + 1) * dim);
    {
        std::vector<double> y0 = history(t0);
        if (static_cast<int>(y0.size()) != dim)
            throw ConfigError("history dimension does not match the field");
        std::copy(y0.begin(), y0.end(), states.begin());
    }

    const std::size_t nlags = field.delays.size();
    std::vector<double> lag_store(nlags * dim);
    std::vector<const double*> lag_ptrs(nlags);
    std::vector<double> stage(dim), k1(dim), k2(dim), k3(dim), k4(dim);

    // Delayed value at query time q with `done` completed segments. History
    // serves q <= t0; the last completed Hermite segment absorbs rounding
    // fuzz past its right edge.
    auto lookup = [&](double q, std::size_t done, double* out) {
        if (q <= t0) {
            std::vector<double> h = history(q);
            std::copy(h.begin(), h.end(), out);
            return;
        }
        double pos = (q - t0) / step;
        std::size_t seg = static_cast<std::size_t>(pos);
        if (done > 0 && seg > done - 1) seg = done - 1;
        const double u = pos - static_cast<double>(seg);
        hermite(&states[seg * dim], &derivs[seg * dim], &states[(seg + 1) * dim],
                &derivs[(seg + 1) * dim], step, u, dim, out);
    };

    auto eval = [&](double t_stage, const double* y_stage, std::size_t done,
                    double* dydt) {
        for (std::size_t l = 0; l < nlags; ++l) {
            if (field.delays[l] == 0.0) {
                lag_ptrs[l] = y_stage;  // zero lag: the current stage state
            } else {
                lookup(t_stage - field.delays[l], done, &lag_store[l * dim]);
                lag_ptrs[l] = &lag_store[l * dim];
            }
        }
        field.rhs(t_stage, y_stage, lag_ptrs.data(), dydt);
    };

    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + step * static_cast<double>(k);
        const double* y = &states[k * dim];
        double* ynext = &states[(k + 1) * dim];

        eval(t, y, k, k1.data());
        std::copy(k1.begin(), k1.end(), derivs.begin() + k * dim);

        for (int j = 0; j < dim; ++j) stage[j] = y[j] + 0.5 * step * k1[j];
        eval(t + 0.5 * step, stage.data(), k, k2.data());

        for (int j = 0; j < dim; ++j) stage[j] = y[j] + 0.5 * step * k2[j];
        eval(t + 0.5 * step, stage.data(), k, k3.data());

        for (int j = 0; j < dim; ++j) stage[j] = y[j] + step * k3[j];
        eval(t + step, stage.data(), k, k4.data());

        bool finite = true;
        for (int j = 0; j < dim; ++j) {
            ynext[j] = y[j] + step / 6.0 *
                                  (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            finite = finite && std::isfinite(ynext[j]);
        }
        if (!finite) {
            const double t_fail = t + step;
            std::ostringstream msg;
            msg << "non-finite state at t = " << t_fail;
            throw IntegrationError(msg.str(), t_fail);
        }
    }

    eval(t0 + step * static_cast<double>(n), &states[n * dim], n,
         &derivs[n * dim]);

    return Trajectory(t0, step, dim, std::move(states), std::move(derivs));
}

}  // namespace epidde
