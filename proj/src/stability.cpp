#include "epidde/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace epidde {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double reproduction_number(const ModelParams& par, double beta) {
    const double den = (par.epsilon + par.mu) *
                       (par.gamma + par.removal() + par.mu);
    if (den == 0.0)
        throw ConfigError("reproduction number denominator is zero");
    return beta * par.epsilon / den;
}

StateVector disease_free_equilibrium() {
    return StateVector{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
}

bool endemic_exists(const ModelParams& par, double beta) {
    return (par.epsilon + par.mu) * (par.gamma + par.removal() + par.mu) <
           beta * par.epsilon;
}

std::optional<StateVector> endemic_equilibrium(const ModelParams& par,
                                               double beta) {
    if (!endemic_exists(par, beta)) return std::nullopt;
    const double rem = par.removal();
    const double out_i = par.gamma + rem + par.mu;
    const double s = (par.epsilon + par.mu) * out_i / (beta * par.epsilon);
    const double i = (par.omega() - par.mu * s) / (beta * s);
    const double e = beta * s * i / (par.epsilon + par.mu);
    const double q = rem * i /
                     (par.rho * (1.0 - par.alpha) + par.delta * par.alpha + par.mu);
    const double r =
        (par.gamma * i + par.rho * (1.0 - par.alpha) * q) / par.mu;
    const double d = par.delta * par.alpha * q / par.mu;
    return StateVector{s, e, i, q, r, d};
}

DfeCoefficients dfe_coefficients_at(const ModelParams& par, double beta,
                                    double tau) {
    DfeCoefficients c;
    c.d1 = 2.0 * par.mu + par.epsilon + par.gamma;
    c.d2 = (par.gamma + par.mu) * (par.epsilon + par.mu) - par.epsilon * beta;
    c.e1 = par.p * std::exp(-par.gamma * tau);
    c.e2 = c.e1 * (par.mu + par.epsilon);
    c.f1 = c.d1 * c.d1 - 2.0 * c.d2 - c.e1 * c.e1;
    c.f2 = c.d2 * c.d2 - c.e2 * c.e2;
    return c;
}

DfeCoefficients dfe_coefficients(const ModelParams& par, double beta) {
    return dfe_coefficients_at(par, beta, par.tau);
}

std::optional<EndemicCoefficients> endemic_coefficients(const ModelParams& par,
                                                        double beta) {
    auto eq = endemic_equilibrium(par, beta);
    if (!eq) return std::nullopt;
    const double s = eq->s, i = eq->i;
    const double rem = par.removal();
    const double gm = par.gamma + par.mu;
    const double em = par.epsilon + par.mu;
    EndemicCoefficients c;
    c.a1 = 3.0 * par.mu + par.epsilon + par.gamma + beta * i;
    c.a2 = gm * em + (par.gamma + par.epsilon + 2.0 * par.mu) * (beta * i + par.mu) -
           par.epsilon * beta * s;
    c.a3 = gm * em * (beta * i + par.mu) - beta * par.epsilon * par.mu * s;
    c.b0 = rem;
    c.b1 = rem * (2.0 * par.mu + par.epsilon + beta * i);
    c.b2 = rem * em * (par.mu + beta * i);
    c.c1 = c.a1 * c.a1 - 2.0 * c.a2 - c.a3 * c.a3 * c.b0 * c.b0;
    c.c2 = c.a2 * c.a2 + 2.0 * c.a3 * c.a3 * c.b0 * c.b2 -
           c.a3 * c.a3 * c.b1 * c.b1 - 2.0 * c.a1 * c.a3;
    c.c3 = c.a3 * c.a3 * (1.0 - c.b2 * c.b2);
    return c;
}

bool quarantine_branch_stable(const ModelParams& par) {
    const double lhs = par.mu + par.delta * par.alpha;
    const double rhs = par.rho * (1.0 - par.alpha);
    return lhs * lhs > rhs * rhs;
}

std::optional<double> omega_star(const DfeCoefficients& c) {
    const double disc = c.f1 * c.f1 - 4.0 * c.f2;
    if (c.f2 < 0.0) {
        // exactly one sign change: a single positive root in u = omega^2
        const double u = 0.5 * (-c.f1 + std::sqrt(disc));
        return std::sqrt(u);
    }
    if (c.f2 == 0.0 && c.f1 < 0.0) return std::sqrt(-c.f1);
    // f2 > 0: either no positive root or two of them; neither is "the" root
    return std::nullopt;
}

namespace {

// One application of the arccos map at delay tau; empty when no admissible
// omega exists there.
std::optional<std::pair<double, double>> tau_map(const ModelParams& par,
                                                 double beta, double tau) {
    const DfeCoefficients c = dfe_coefficients_at(par, beta, tau);
    const auto w = omega_star(c);
    if (!w) return std::nullopt;
    const double w2 = *w * *w;
    const double num = (c.e2 - c.d1 * c.e1) * w2 - c.d2 * c.e2;
    const double den = c.e1 * c.e1 * w2 + c.e2 * c.e2;
    const double a = std::clamp(num / den, -1.0, 1.0);
    return std::make_pair(std::acos(a) / *w, *w);
}

}  // namespace

CriticalDelayResult critical_delay(const ModelParams& par, double beta) {
    double tau = 0.0;
    for (int it = 0; it < 200; ++it) {
        const auto next = tau_map(par, beta, tau);
        if (!next) {
            std::ostringstream msg;
            msg << "no admissible crossing frequency at tau = " << tau
                << " (d2^2 >= e2^2 region)";
            return {std::nullopt, msg.str()};
        }
        if (std::abs(next->first - tau) < 1e-8) {
            const double tau_s = next->first;
            const DfeCoefficients c = dfe_coefficients_at(par, beta, tau_s);
            if (c.f2 >= 0.0 && !(c.f2 == 0.0 && c.f1 < 0.0))
                return {std::nullopt,
                        "fixed point landed where d2^2 >= e2^2; no crossing"};
            return {CriticalDelay{tau_s, next->second, it + 1}, ""};
        }
        tau = next->first;
    }
    return {std::nullopt, "fixed point did not converge in 200 iterations"};
}

std::vector<double> critical_delay_family(const ModelParams& par, double beta,
                                          int count) {
    std::vector<double> out;
    const auto cd = critical_delay(par, beta);
    if (!cd.value) return out;
    for (int k = 0; k < count; ++k)
        out.push_back(cd.value->tau_star +
                      2.0 * kPi * static_cast<double>(k) / cd.value->omega_star);
    return out;
}

namespace {

using Cplx = std::complex<double>;

// Quadratic factor of the infection-free characteristic function and its
// lambda derivative, coefficients frozen at the given tau.
Cplx quad_factor(const DfeCoefficients& c, double tau, Cplx lam) {
    return lam * lam + c.d1 * lam + c.d2 +
           std::exp(-lam * tau) * (c.e1 * lam + c.e2);
}

Cplx quad_factor_dl(const DfeCoefficients& c, double tau, Cplx lam) {
    return 2.0 * lam + c.d1 +
           std::exp(-lam * tau) * (c.e1 - tau * (c.e1 * lam + c.e2));
}

std::optional<Cplx> newton_root(const DfeCoefficients& c, double tau,
                                Cplx seed) {
    Cplx lam = seed;
    for (int it = 0; it < 80; ++it) {
        const Cplx d = quad_factor_dl(c, tau, lam);
        if (d == Cplx(0.0, 0.0)) return std::nullopt;
        const Cplx step = quad_factor(c, tau, lam) / d;
        lam -= step;
        if (std::abs(step) < 1e-13 * (1.0 + std::abs(lam))) return lam;
    }
    return std::nullopt;
}

// Rightmost quadratic-factor root near the given seeds.
std::optional<Cplx> track_root(const DfeCoefficients& c, double tau,
                               const std::vector<Cplx>& seeds) {
    std::optional<Cplx> best;
    for (const Cplx& s : seeds) {
        const auto r = newton_root(c, tau, s);
        if (!r) continue;
        if (!best || r->real() > best->real() + 1e-12) best = r;
    }
    return best;
}

}  // namespace

std::optional<double> critical_delay_root_tracking(const ModelParams& par,
                                                   double beta, double tau_max,
                                                   double dtau) {
    // start from the tau = 0 quadratic, exact roots
    const DfeCoefficients c0 = dfe_coefficients_at(par, beta, 0.0);
    const double b = c0.d1 + c0.e1;
    const double cc = c0.d2 + c0.e2;
    const Cplx disc = std::sqrt(Cplx(b * b - 4.0 * cc, 0.0));
    Cplx prev = 0.5 * (-b + disc);
    if (prev.imag() < 0.0) prev = std::conj(prev);
    double prev_re = prev.real();
    double prev_tau = 0.0;

    for (double tau = dtau; tau <= tau_max + 1e-12; tau += dtau) {
        const DfeCoefficients c = dfe_coefficients_at(par, beta, tau);
        std::vector<Cplx> seeds{prev, prev + Cplx(0.0, 0.1),
                                prev - Cplx(0.0, 0.1)};
        if (const auto w = omega_star(c)) seeds.push_back(Cplx(0.0, *w));
        const auto root = track_root(c, tau, seeds);
        if (!root) return std::nullopt;
        const double re = root->real();
        if (prev_re <= 0.0 && re > 0.0) {
            // linear interpolation of the zero crossing
            return prev_tau + dtau * prev_re / (prev_re - re);
        }
        prev = *root;
        prev_re = re;
        prev_tau = tau;
    }
    return std::nullopt;
}

Transversality transversality(const ModelParams& par, double beta,
                              double omega, double tau) {
    const DfeCoefficients c = dfe_coefficients_at(par, beta, tau);
    const double g2 = par.gamma * par.gamma;
    const double w2 = omega * omega;
    const double me = par.mu + par.epsilon;
    const double den_c = (g2 - w2) * (g2 - w2) + 4.0 * w2 * g2;
    Transversality t;
    t.x = (c.d1 * (-g2 + w2) * (c.d2 - w2) +
           2.0 * w2 * c.d1 * par.gamma * (2.0 + c.d1)) /
          (den_c * ((c.d2 - w2) * (c.d2 - w2) + c.d1 * w2));
    t.y = ((g2 - w2) * me - 2.0 * w2 * par.gamma) /
          (den_c * (me * me + w2));
    t.z = tau * par.gamma / (g2 + w2);
    t.holds = (t.x + t.y > 0.0) && (t.x + t.y > t.z);
    return t;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::stable_all_delays: return "stable_all_delays";
        case Verdict::stable_below_tau_star: return "stable_below_tau_star";
        case Verdict::unstable: return "unstable";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(EquilibriumKind k) {
    return k == EquilibriumKind::dfe ? "disease_free" : "endemic";
}

StabilityReport classify_dfe(const ModelParams& par, double beta) {
    StabilityReport rep;
    rep.equilibrium = EquilibriumKind::dfe;
    rep.r0 = reproduction_number(par, beta);
    const DfeCoefficients c = dfe_coefficients(par, beta);

    const bool qb = quarantine_branch_stable(par);
    // tau = 0 stability of the infection factor plus a real quarantine factor
    const bool no_delay =
        par.alpha < 1.0 && c.d2 + par.p * (par.mu + par.epsilon) > 0.0;
    const bool separated = c.d2 * c.d2 > c.e2 * c.e2;

    rep.conditions["quarantine_branch"] = qb;
    rep.conditions["no_delay_stable"] = no_delay;
    rep.conditions["d2sq_gt_e2sq"] = separated;
    rep.conditions["f1_positive"] = c.f1 > 0.0;
    rep.conditions["r0_lt_1"] = rep.r0 < 1.0;

    if (rep.r0 > 1.0) {
        // chi(0) < 0 with chi -> +inf on the real axis: a positive real root
        rep.verdict = Verdict::unstable;
        return rep;
    }
    if (qb && no_delay && separated && c.f1 > 0.0) {
        rep.verdict = Verdict::stable_all_delays;
        return rep;
    }
    if (qb && no_delay && !separated) {
        const auto cd = critical_delay(par, beta);
        if (cd.value) {
            rep.verdict = Verdict::stable_below_tau_star;
            rep.tau_star = cd.value->tau_star;
            rep.omega_star = cd.value->omega_star;
            const Transversality tv = transversality(
                par, beta, cd.value->omega_star, cd.value->tau_star);
            rep.transversality = tv;
            const double w2 = cd.value->omega_star * cd.value->omega_star;
            rep.conditions["gamma_sq_gt_omega_sq"] =
                par.gamma * par.gamma > w2;
            rep.conditions["d2_lt_omega_sq"] = c.d2 < w2;
            rep.conditions["x_gt_y"] = tv.x > tv.y;
            rep.conditions["transversality_holds"] = tv.holds;
            return rep;
        }
    }
    rep.verdict = Verdict::inconclusive;
    return rep;
}

std::optional<StabilityReport> classify_endemic(const ModelParams& par,
                                                double beta) {
    const auto coeffs = endemic_coefficients(par, beta);
    if (!coeffs) return std::nullopt;
    StabilityReport rep;
    rep.equilibrium = EquilibriumKind::endemic;
    rep.r0 = reproduction_number(par, beta);
    const bool qb = quarantine_branch_stable(par);
    const bool all_c = coeffs->c1 > 0.0 && coeffs->c2 > 0.0 && coeffs->c3 > 0.0;
    rep.conditions["existence"] = true;
    rep.conditions["quarantine_branch"] = qb;
    rep.conditions["c_all_positive"] = all_c;
    rep.conditions["c3_negative"] = coeffs->c3 < 0.0;
    if (qb && all_c)
        rep.verdict = Verdict::stable_all_delays;
    else if (coeffs->c3 < 0.0)
        rep.verdict = Verdict::unstable;
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

namespace {

struct ChiParts {
    Cplx value;
    Cplx derivative;
};

// chi = (lambda + mu)^k * Q(lambda) * C(lambda) with Q the quarantine factor
// and C the infection factor (quadratic for the infection-free state, cubic
// for the endemic one).
ChiParts chi_parts(const ModelParams& par, double beta, EquilibriumKind eq,
                   Cplx lam) {
    const int k = eq == EquilibriumKind::dfe ? 3 : 2;
    const Cplx a = std::pow(lam + par.mu, k);
    const Cplx da = static_cast<double>(k) * std::pow(lam + par.mu, k - 1);

    const double rq = par.rho * (1.0 - par.alpha);
    const Cplx eq_exp = std::exp(-par.kappa * lam);
    const Cplx b = lam + par.mu + par.delta * par.alpha + rq * eq_exp;
    const Cplx db = 1.0 - par.kappa * rq * eq_exp;

    Cplx c, dc;
    const Cplx et = std::exp(-par.tau * lam);
    if (eq == EquilibriumKind::dfe) {
        const DfeCoefficients f = dfe_coefficients(par, beta);
        const Cplx poly = lam * lam + f.d1 * lam + f.d2;
        const Cplx dpoly = 2.0 * lam + f.d1;
        const Cplx q = f.e1 * lam + f.e2;
        const Cplx dq = f.e1;
        c = poly + et * q;
        dc = dpoly + et * (dq - par.tau * q);
    } else {
        const auto fo = endemic_coefficients(par, beta);
        if (!fo)
            throw ConfigError(
                "endemic characteristic function requires an endemic state "
                "(R0 <= 1 here)");
        const EndemicCoefficients f = *fo;
        const Cplx poly = ((lam + f.a1) * lam + f.a2) * lam + f.a3;
        const Cplx dpoly = (3.0 * lam + 2.0 * f.a1) * lam + f.a2;
        const Cplx q = (f.b0 * lam + f.b1) * lam + f.b2;
        const Cplx dq = 2.0 * f.b0 * lam + f.b1;
        c = poly + et * q;
        dc = dpoly + et * (dq - par.tau * q);
    }

    ChiParts out;
    out.value = a * b * c;
    out.derivative = da * b * c + a * db * c + a * b * dc;
    return out;
}

}  // namespace

Cplx chi(const ModelParams& par, double beta, EquilibriumKind eq, Cplx lam) {
    return chi_parts(par, beta, eq, lam).value;
}

Cplx chi_derivative(const ModelParams& par, double beta, EquilibriumKind eq,
                    Cplx lam) {
    return chi_parts(par, beta, eq, lam).derivative;
}

LeadingRootResult leading_root(const ModelParams& par, double beta,
                               EquilibriumKind eq, const SearchBox& box) {
    if (eq == EquilibriumKind::endemic && !endemic_exists(par, beta))
        return {std::nullopt, "endemic equilibrium does not exist (R0 <= 1)"};
    if (!(box.re_hi > box.re_lo) || !(box.im_hi >= box.im_lo) ||
        !(box.grid > 0.0))
        throw ConfigError("leading_root: malformed search box");

    const std::size_t nr =
        static_cast<std::size_t>((box.re_hi - box.re_lo) / box.grid + 1e-9) + 1;
    const std::size_t ni =
        static_cast<std::size_t>((box.im_hi - box.im_lo) / box.grid + 1e-9) + 1;

    std::vector<double> mag(nr * ni);
    for (std::size_t a = 0; a < nr; ++a)
        for (std::size_t b = 0; b < ni; ++b) {
            const Cplx lam(box.re_lo + box.grid * static_cast<double>(a),
                           box.im_lo + box.grid * static_cast<double>(b));
            mag[a * ni + b] = std::abs(chi(par, beta, eq, lam));
        }

    auto is_min = [&](std::size_t a, std::size_t b) {
        const double v = mag[a * ni + b];
        if (a > 0 && mag[(a - 1) * ni + b] < v) return false;
        if (a + 1 < nr && mag[(a + 1) * ni + b] < v) return false;
        if (b > 0 && mag[a * ni + b - 1] < v) return false;
        if (b + 1 < ni && mag[a * ni + b + 1] < v) return false;
        return true;
    };

    std::vector<Cplx> roots;
    for (std::size_t a = 0; a < nr; ++a) {
        for (std::size_t b = 0; b < ni; ++b) {
            if (!is_min(a, b)) continue;
            Cplx lam(box.re_lo + box.grid * static_cast<double>(a),
                     box.im_lo + box.grid * static_cast<double>(b));
            // damped Newton with the analytic derivative
            bool converged = false;
            for (int it = 0; it < 100; ++it) {
                const ChiParts parts = chi_parts(par, beta, eq, lam);
                if (parts.derivative == Cplx(0.0, 0.0)) break;
                const Cplx full = parts.value / parts.derivative;
                double damp = 1.0;
                Cplx trial = lam - full;
                const double before = std::abs(parts.value);
                for (int half = 0; half < 8; ++half) {
                    if (std::abs(chi(par, beta, eq, trial)) <= before) break;
                    damp *= 0.5;
                    trial = lam - damp * full;
                }
                const Cplx step = lam - trial;
                lam = trial;
                if (std::abs(step) < 1e-12 * (1.0 + std::abs(lam))) {
                    converged = true;
                    break;
                }
            }
            if (!converged) continue;
            const double scale = std::pow(1.0 + std::abs(lam), 6);
            if (std::abs(chi(par, beta, eq, lam)) > 1e-8 * scale) continue;
            const double margin = 2.0 * box.grid;
            if (lam.real() < box.re_lo - margin ||
                lam.real() > box.re_hi + margin ||
                lam.imag() < box.im_lo - margin ||
                lam.imag() > box.im_hi + margin)
                continue;
            bool dup = false;
            for (const Cplx& r : roots)
                if (std::abs(r - lam) < 1e-6) { dup = true; break; }
            if (!dup) roots.push_back(lam);
        }
    }

    if (roots.empty())
        return {std::nullopt, "no characteristic root found in the search box"};
    const Cplx best = *std::max_element(
        roots.begin(), roots.end(),
        [](const Cplx& u, const Cplx& v) { return u.real() < v.real(); });
    return {best, ""};
}

}  // namespace epidde
