#ifndef EPIDDE_STABILITY_HPP
#define EPIDDE_STABILITY_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>

#include "epidde/model.hpp"

namespace epidde {

// Basic reproduction number beta*eps / ((eps+mu)(gamma + p e^{-gamma tau} + mu)).
double reproduction_number(const ModelParams& params, double beta);

StateVector disease_free_equilibrium();

// Interior equilibrium exists iff R0 > 1.
bool endemic_exists(const ModelParams& params, double beta);
std::optional<StateVector> endemic_equilibrium(const ModelParams& params,
                                               double beta);

// Quadratic-factor coefficients of the characteristic function at the
// disease free state, lambda^2 + d1 lambda + d2 + e^{-lambda tau}(e1 lambda + e2),
// plus the induced quartic-in-omega coefficients f1, f2.
struct DfeCoefficients {
    double d1, d2, e1, e2, f1, f2;
};

DfeCoefficients dfe_coefficients(const ModelParams& params, double beta);
DfeCoefficients dfe_coefficients_at(const ModelParams& params, double beta,
                                    double tau);

// Cubic-factor coefficients at the endemic state plus the sextic-in-omega
// c coefficients. Absent when the endemic state does not exist.
struct EndemicCoefficients {
    double a1, a2, a3, b0, b1, b2, c1, c2, c3;
};

std::optional<EndemicCoefficients> endemic_coefficients(
    const ModelParams& params, double beta);

// Delay independent sufficient condition for the quarantine factor:
// (mu + delta alpha)^2 > rho^2 (1 - alpha)^2.
bool quarantine_branch_stable(const ModelParams& params);

// Unique positive root omega of omega^4 + f1 omega^2 + f2 = 0, when it is
// unique; absent otherwise.
std::optional<double> omega_star(const DfeCoefficients& c);

struct CriticalDelay {
    double tau_star;
    double omega_star;
    int iterations;
};

struct CriticalDelayResult {
    std::optional<CriticalDelay> value;
    std::string diagnostic;  // set when absent
};

// Self consistent critical delay: the arccos map is iterated to a fixed point
// because e1, e2 depend on tau themselves. Seeded at tau = 0, converged at
// 1e-8, at most 200 iterations.
CriticalDelayResult critical_delay(const ModelParams& params, double beta);

// Delay values tau* + 2 pi k / omega* for k = 0..count-1 (later stability
// switches of the same root pair).
std::vector<double> critical_delay_family(const ModelParams& params,
                                          double beta, int count);

// Independent check: track the leading root of the quadratic factor along a
// tau grid and locate the first sign change of its real part. Returns the
// bracketing tau midpoint; absent if no crossing below tau_max.
std::optional<double> critical_delay_root_tracking(const ModelParams& params,
                                                   double beta,
                                                   double tau_max = 50.0,
                                                   double dtau = 0.01);

// Crossing speed quantities evaluated exactly as displayed in the source
// analysis; holds <=> x + y > 0 and x + y > z. The quantities are reported
// as-is and do not gate any verdict.
struct Transversality {
    double x, y, z;
    bool holds;
};

Transversality transversality(const ModelParams& params, double beta,
                              double omega, double tau);

enum class Verdict {
    stable_all_delays,
    stable_below_tau_star,
    unstable,
    inconclusive,
};

enum class EquilibriumKind { dfe, endemic };

std::string to_string(Verdict v);
std::string to_string(EquilibriumKind k);

// Equilibrium classification: named condition booleans, the sufficient
// condition verdict, and (for the delay-crossing branch) omega*, tau* and the
// transversality quantities. tau_star is populated only when the verdict is
// stable_below_tau_star; the standalone critical_delay() answers everyone
// else.
struct StabilityReport {
    EquilibriumKind equilibrium;
    double r0;
    std::map<std::string, bool> conditions;
    std::optional<double> omega_star;
    std::optional<double> tau_star;
    std::optional<Transversality> transversality;
    Verdict verdict = Verdict::inconclusive;
};

StabilityReport classify_dfe(const ModelParams& params, double beta);
std::optional<StabilityReport> classify_endemic(const ModelParams& params,
                                                double beta);

// Characteristic function in factored form and its analytic derivative.
std::complex<double> chi(const ModelParams& params, double beta,
                         EquilibriumKind eq, std::complex<double> lambda);
std::complex<double> chi_derivative(const ModelParams& params, double beta,
                                    EquilibriumKind eq,
                                    std::complex<double> lambda);

struct SearchBox {
    double re_lo = -2.0;
    double re_hi = 1.0;
    double im_lo = 0.0;
    double im_hi = 5.0;
    double grid = 0.05;
};

struct LeadingRootResult {
    std::optional<std::complex<double>> root;
    std::string diagnostic;
};

// Rightmost root of chi inside the box: |chi| minima on a grid, polished by
// damped Newton with the analytic derivative.
LeadingRootResult leading_root(const ModelParams& params, double beta,
                               EquilibriumKind eq, const SearchBox& box = {});

}  // namespace epidde

#endif
