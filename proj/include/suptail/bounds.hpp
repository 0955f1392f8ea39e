#pragma once

// Explicit certified upper bounds for the supremum tail P(M(y) > x) of the
// truncated negative-drift walk, via lower bounds on the Cramer-Lundberg rate.
//
// Power-moment route (heavy power tails, E[(X+)^beta] < infty):
//   for y above an explicit threshold y_beta the rate satisfies
//   gamma(y) >= s1(y) = (beta-1) log(y)/y, giving
//       P(M(y) > x) <= y^{-(beta-1) x/y}.
//   The threshold is assembled from the Taylor-remainder constants ME/MG, the
//   one-sided moments of order delta = min(2, beta), and L = E[(X+)^beta].
//
// Hazard route (stretched-exponential / log-normal type tails, mu2 < infty,
// hazard q(y) = -log P(X>y) concave with (log y)^{1+kappa} <= q(y) <= y^{1-kappa}
// past y_kappa): for y above an explicit y_eta* the rate satisfies
//   gamma(y) >= s2(y) = (q(y) - log y + r)/y  with  r = log(eta |mu|), giving
//       P(M(y) > x) <= ( y P(X>y) / (eta |mu|) )^{x/y}.
//
// Every certified evaluation is log-space; requesting a bound below its
// threshold raises ThresholdViolation rather than silently clamping.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suptail/csv.hpp"
#include "suptail/distribution.hpp"
#include "suptail/errors.hpp"
#include "suptail/moments.hpp"
#include "suptail/rootfind.hpp"
#include "suptail/taylor.hpp"

namespace suptail {

enum class TaylorMode { exact, closed, simple };

inline const char* taylor_mode_name(TaylorMode m) {
    switch (m) {
        case TaylorMode::exact: return "exact";
        case TaylorMode::closed: return "closed";
        case TaylorMode::simple: return "simple";
    }
    return "?";
}

namespace bound_detail {

inline std::string json_field(const char* name, double v) {
    return std::string("\"") + name + "\":" + format_sig(v, 15);
}

}  // namespace bound_detail

// ---------------------------------------------------------------------------
// Power-moment certificate
// ---------------------------------------------------------------------------

struct Theorem1Certificate {
    double beta = 0;
    double delta = 0;  // min(2, beta)
    TaylorMode mode = TaylorMode::exact;
    double me_used = 0, mg_used = 0;  // Taylor constants entering K
    double K = 0;                     // mu_delta_minus * MG + e^beta * ME * mu_delta_plus
    double L = 0;                     // E[(X+)^beta]
    double C_max = 0;                 // max_{y>1} (log y)^delta / y^(delta-1)
    double y_beta = 0;                // certification threshold
    double mu = 0;                    // E[X] < 0
    double mu_delta_plus = 0, mu_delta_minus = 0;
    std::optional<double> sharper_offset_xi;  // offset for the sharpened variant
    std::optional<double> sharper_y_min;      // user-supplied (uncertified) threshold

    // Certified rate lower bound for y > y_beta.
    double rate_s1(double y) const {
        if (!(y > 1.0)) throw DomainError("rate_s1: y must exceed 1");
        return (beta - 1.0) * std::log(y) / y;
    }

    // Bracketed quantity of the MGF upper bound at s = s1(y); negative above y_beta.
    double Q_of_y(double y) const {
        if (!(y > 1.0)) throw DomainError("Q_of_y: y must exceed 1");
        return mu + K * std::pow(rate_s1(y), delta - 1.0) +
               L / ((beta - 1.0) * std::log(y));
    }

    std::string to_json() const {
        using bound_detail::json_field;
        std::string s = "{";
        s += json_field("beta", beta) + ",";
        s += json_field("delta", delta) + ",";
        s += std::string("\"taylor_mode\":\"") + taylor_mode_name(mode) + "\",";
        s += json_field("me_used", me_used) + ",";
        s += json_field("mg_used", mg_used) + ",";
        s += json_field("K", K) + ",";
        s += json_field("L", L) + ",";
        s += json_field("C_max", C_max) + ",";
        s += json_field("y_beta", y_beta) + ",";
        s += json_field("log_y_beta", std::log(y_beta)) + ",";
        s += json_field("mu", mu) + ",";
        s += json_field("mu_delta_plus", mu_delta_plus) + ",";
        s += json_field("mu_delta_minus", mu_delta_minus);
        if (sharper_offset_xi) {
            s += "," + json_field("sharper_offset_xi", *sharper_offset_xi);
            s += "," + json_field("sharper_y_min", *sharper_y_min);
        }
        return s + "}";
    }
};

inline Theorem1Certificate theorem1_certificate(
    const MomentSet& m, TaylorMode mode = TaylorMode::exact,
    std::optional<double> sharper_offset_xi = std::nullopt,
    std::optional<double> sharper_y_min = std::nullopt) {
    if (!(m.mu < 0.0)) throw DomainError("theorem1_certificate: mean must be negative");

    Theorem1Certificate c;
    c.beta = m.beta;
    c.delta = m.delta;
    c.mode = mode;
    switch (mode) {
        case TaylorMode::exact:
            c.me_used = taylor::me(c.delta);
            c.mg_used = taylor::mg(c.delta);
            break;
        case TaylorMode::closed:
            c.me_used = taylor::ue(c.delta);
            c.mg_used = taylor::ug(c.delta);
            break;
        case TaylorMode::simple:
            c.me_used = taylor::simple_e(c.delta);
            c.mg_used = taylor::simple_g(c.delta);
            break;
    }
    c.mu = m.mu;
    c.mu_delta_plus = m.mu_delta_plus;
    c.mu_delta_minus = m.mu_delta_minus;
    c.K = m.mu_delta_minus * c.mg_used + std::exp(c.beta) * c.me_used * m.mu_delta_plus;
    c.L = m.mu_beta_plus;
    c.C_max = std::pow(c.delta / ((c.delta - 1.0) * std::exp(1.0)), c.delta);
    const double c_scaled =
        std::pow((c.beta - 1.0) / (c.delta - 1.0) * c.delta / std::exp(1.0), c.delta);
    c.y_beta = std::exp((c.L + c.K * c_scaled) / ((c.beta - 1.0) * std::fabs(c.mu)));

    if (sharper_offset_xi) {
        if (!sharper_y_min)
            throw DomainError(
                "theorem1_certificate: the sharpened variant needs an explicit y threshold "
                "(it is not certified by y_beta alone)");
        const double cap = std::log((c.beta - 1.0) * std::fabs(c.mu) / c.L);
        if (!(*sharper_offset_xi < cap))
            throw DomainError("theorem1_certificate: offset xi must satisfy e^xi < (beta-1)|mu|/L, "
                              "i.e. xi < " + std::to_string(cap));
        c.sharper_offset_xi = sharper_offset_xi;
        c.sharper_y_min = sharper_y_min;
    } else if (sharper_y_min) {
        throw DomainError("theorem1_certificate: sharper_y_min given without an offset xi");
    }
    return c;
}

// log P-bound: -(beta-1) (x/y) log y, certified for y > y_beta.
inline double theorem1_log_bound(const Theorem1Certificate& c, double x, double y) {
    if (!(x >= 0.0)) throw DomainError("theorem1_bound: x must be nonnegative");
    if (!(y > c.y_beta))
        throw ThresholdViolation("theorem1_bound: y = " + std::to_string(y) +
                                 " is not above the certification threshold y_beta = " +
                                 std::to_string(c.y_beta));
    return -(c.beta - 1.0) * (x / y) * std::log(y);
}

inline double theorem1_bound(const Theorem1Certificate& c, double x, double y) {
    return std::exp(theorem1_log_bound(c, x, y));
}

// Valid for every y > 0 (vacuous value 1 at or below y_beta): (y/y_beta)^{-(beta-1)x/y}.
inline double theorem1_log_bound_all_y(const Theorem1Certificate& c, double x, double y) {
    if (!(x >= 0.0)) throw DomainError("theorem1_bound_all_y: x must be nonnegative");
    if (!(y > 0.0)) throw DomainError("theorem1_bound_all_y: y must be positive");
    const double lg = -(c.beta - 1.0) * (x / y) * (std::log(y) - std::log(c.y_beta));
    return std::min(0.0, lg);
}

inline double theorem1_bound_all_y(const Theorem1Certificate& c, double x, double y) {
    return std::exp(theorem1_log_bound_all_y(c, x, y));
}

// Sharpened variant y^{-(beta-1)x/y} (log y)^{-x/y} e^{-xi x/y}; gated behind the
// user-supplied threshold recorded in the certificate (not certified by y_beta).
inline double theorem1_log_bound_sharper(const Theorem1Certificate& c, double x, double y) {
    if (!c.sharper_offset_xi)
        throw DomainError("theorem1_bound_sharper: certificate carries no offset xi");
    if (!(x >= 0.0)) throw DomainError("theorem1_bound_sharper: x must be nonnegative");
    if (!(y > c.y_beta) || !(y >= *c.sharper_y_min))
        throw ThresholdViolation("theorem1_bound_sharper: y = " + std::to_string(y) +
                                 " is below max(y_beta, sharper_y_min)");
    return -(x / y) *
           ((c.beta - 1.0) * std::log(y) + std::log(std::log(y)) + *c.sharper_offset_xi);
}

inline double theorem1_bound_sharper(const Theorem1Certificate& c, double x, double y) {
    return std::exp(theorem1_log_bound_sharper(c, x, y));
}

// Upper bound for E[exp(s min(X,y))] in the power-moment route, y > 1:
//   1 + s (mu + s^{delta-1} K + L / ((beta-1) log y)).
inline double mgf_upper_bound_thm1(const Theorem1Certificate& c, double y, double s) {
    if (!(y > 1.0)) throw DomainError("mgf_upper_bound_thm1: y must exceed 1");
    if (!(s > 0.0)) throw DomainError("mgf_upper_bound_thm1: s must be positive");
    return 1.0 + s * (c.mu + std::pow(s, c.delta - 1.0) * c.K +
                      c.L / ((c.beta - 1.0) * std::log(y)));
}

inline double mgf_upper_bound_thm1(const MomentSet& m, double y, double s,
                                   TaylorMode mode = TaylorMode::exact) {
    return mgf_upper_bound_thm1(theorem1_certificate(m, mode), y, s);
}

// ---------------------------------------------------------------------------
// Hazard certificate
// ---------------------------------------------------------------------------

struct Theorem2Certificate {
    explicit Theorem2Certificate(DistributionSpec s) : spec(std::move(s)) {}

    DistributionSpec spec;  // law whose hazard exponent drives the rate
    double eta = 0;         // slack factor in (0,1)
    double kappa = 0;       // hazard growth exponent in (0,1)
    double y_kappa = 0;     // point past which the growth envelope holds
    double mu = 0;          // E[X] < 0
    double mu2 = 0;         // E[X^2]
    double r = 0;           // log(eta |mu|)
    double y_r = 0;
    double y_eta_star = 0;  // certification threshold

    // Certified rate lower bound for y > y_eta_star.
    double rate_s2(double y) const {
        if (!(y > 1.0)) throw DomainError("rate_s2: y must exceed 1");
        return (spec.hazard(y) - std::log(y) + r) / y;
    }

    // Bracketed quantity of the MGF upper bound at s = s2(y); <= 0 above y_eta_star.
    double Q_of_y(double y) const {
        const double s = rate_s2(y);
        if (!(s > 0.0)) throw DomainError("Q_of_y: rate not positive at this y");
        const double first = y * std::exp(1.0 - spec.hazard(1.0 / s));
        return mu + s * (std::exp(1.0) / 2.0) * mu2 + std::max(first, std::exp(r));
    }

    std::string to_json() const {
        using bound_detail::json_field;
        std::string s = "{";
        s += std::string("\"family\":\"") + family_name(spec.family()) + "\",";
        s += json_field("eta", eta) + ",";
        s += json_field("kappa", kappa) + ",";
        s += json_field("y_kappa", y_kappa) + ",";
        s += json_field("mu", mu) + ",";
        s += json_field("mu2", mu2) + ",";
        s += json_field("r", r) + ",";
        s += json_field("y_r", y_r) + ",";
        s += json_field("y_eta_star", y_eta_star) + ",";
        s += json_field("log_y_eta_star", std::log(y_eta_star));
        return s + "}";
    }
};

namespace bound_detail {

// Verifies (log y)^{1+kappa} <= q(y) on [a, b] on a log grid, inclusive endpoints.
inline void check_hazard_lower(const DistributionSpec& spec, double kappa, double a, double b) {
    const int n = 400;
    const double la = std::log(a), lb = std::log(std::max(b, a * (1.0 + 1e-12)));
    for (int i = 0; i <= n; ++i) {
        const double y = std::exp(la + (lb - la) * i / n);
        const double lhs = std::pow(std::log(y), 1.0 + kappa);
        const double q = spec.hazard(y);
        if (!(lhs <= q * (1.0 + 1e-12) + 1e-12))
            throw HypothesisViolation(
                "hazard_lower_growth",
                "hazard envelope fails at y = " + std::to_string(y) + ": (log y)^(1+kappa) = " +
                    std::to_string(lhs) + " > q(y) = " + std::to_string(q));
    }
}

// Verifies q(y) <= y^{1-kappa} on [a, b] likewise.
inline void check_hazard_upper(const DistributionSpec& spec, double kappa, double a, double b) {
    const int n = 400;
    const double la = std::log(a), lb = std::log(std::max(b, a * (1.0 + 1e-12)));
    for (int i = 0; i <= n; ++i) {
        const double y = std::exp(la + (lb - la) * i / n);
        const double rhs = std::pow(y, 1.0 - kappa);
        const double q = spec.hazard(y);
        if (!(q <= rhs * (1.0 + 1e-12) + 1e-12))
            throw HypothesisViolation(
                "hazard_upper_growth",
                "hazard envelope fails at y = " + std::to_string(y) + ": q(y) = " +
                    std::to_string(q) + " > y^(1-kappa) = " + std::to_string(rhs));
    }
}

}  // namespace bound_detail

inline Theorem2Certificate theorem2_certificate(const DistributionSpec& spec,
                                                const MomentSet& m, double eta, double kappa,
                                                double y_kappa) {
    if (!(eta > 0.0 && eta < 1.0))
        throw DomainError("theorem2_certificate: eta must lie in (0,1)");
    if (!(kappa > 0.0 && kappa < 1.0))
        throw DomainError("theorem2_certificate: kappa must lie in (0,1)");
    if (!(y_kappa >= 1.0))
        throw DomainError("theorem2_certificate: y_kappa must be at least 1 "
                          "((log y)^(1+kappa) is not defined below it)");
    if (!(m.mu < 0.0)) throw DomainError("theorem2_certificate: mean must be negative");
    if (!m.mu2)
        throw HypothesisViolation("finite_second_moment",
                                  "the hazard-route bound needs E[X^2] < infinity");

    // --- hypothesis verification -------------------------------------------
    // Structural facts first: families whose hazard exponent is on the wrong
    // side of the growth window can never satisfy the envelope.
    switch (spec.family()) {
        case Family::weibull_shift:
            // (1-kappa) log y - xi log(y+c) has derivative
            // ((1-kappa-xi) y + (1-kappa) c) / (y (y+c)) > 0 for all y when
            // xi <= 1-kappa; past that exponent the envelope must eventually fail.
            if (spec.xi() > 1.0 - kappa)
                throw HypothesisViolation(
                    "hazard_upper_growth",
                    "hazard exponent xi = " + std::to_string(spec.xi()) +
                        " exceeds 1 - kappa; q(y) ~ y^xi eventually exceeds y^(1-kappa)");
            break;
        case Family::lognormal_type_shift:
            if (spec.xi() < 1.0 + kappa)
                throw HypothesisViolation(
                    "hazard_lower_growth",
                    "hazard exponent xi = " + std::to_string(spec.xi()) +
                        " is below 1 + kappa; (log y)^(1+kappa) eventually exceeds q(y)");
            break;
        case Family::pareto_shift:
            throw HypothesisViolation(
                "hazard_lower_growth",
                "regularly varying tails have q(y) of order log y, which cannot stay above "
                "(log y)^(1+kappa); use the power-moment route instead");
        case Family::custom:
            throw HypothesisViolation(
                "hazard_upper_growth",
                "tabulated laws extend with an exponential tail whose hazard grows linearly "
                "and eventually exceeds y^(1-kappa); the hazard route cannot be certified");
    }
    if (!(spec.hazard_concave_from() <= y_kappa))
        throw HypothesisViolation(
            "hazard_concavity",
            "q is only concave from " + std::to_string(spec.hazard_concave_from()) +
                " on, which is past y_kappa = " + std::to_string(y_kappa));

    // Grid checks cover [y_kappa, Y]; past the family-specific Y the envelope
    // gaps are monotone increasing (reasons below), so the grid plus the
    // endpoint certify the whole half-line.
    if (spec.family() == Family::weibull_shift) {
        const double xi = spec.xi(), cdrift = spec.drift_c();
        bound_detail::check_hazard_upper(spec, kappa, y_kappa, y_kappa * (1.0 + 1e-9));
        // xi log(y+c) - (1+kappa) log log y is increasing once
        // xi y log y >= (1+kappa)(y+c), which holds past max(2c, e^{2(1+kappa)/xi}).
        const double y_mono = std::max({2.0 * cdrift, std::exp(2.0 * (1.0 + kappa) / xi),
                                        y_kappa * (1.0 + 1e-9)});
        bound_detail::check_hazard_lower(spec, kappa, y_kappa, y_mono);
    } else {
        const double xi = spec.xi();
        // For xi >= 1+kappa and y >= e, (log(y+c))^xi >= (log y)^xi >=
        // (log y)^{1+kappa}; below e the grid decides.
        bound_detail::check_hazard_lower(spec, kappa, y_kappa,
                                         std::max(std::exp(1.0), y_kappa * (1.0 + 1e-9)));
        // (1-kappa) log y - xi log log(y+c) is increasing once log(y+c) >= xi/(1-kappa).
        const double y_mono = std::max(std::exp(xi / (1.0 - kappa)), y_kappa * (1.0 + 1e-9));
        bound_detail::check_hazard_upper(spec, kappa, y_kappa, y_mono);
    }

    // --- thresholds ----------------------------------------------------------
    Theorem2Certificate c(spec);
    c.eta = eta;
    c.kappa = kappa;
    c.y_kappa = y_kappa;
    c.mu = m.mu;
    c.mu2 = *m.mu2;
    c.r = std::log(eta * std::fabs(m.mu));

    // Largest y with y exp(-(kappa ln y)^{1+kappa}) >= e^{r-1}, in t = ln y:
    // g(t) = t - (kappa t)^{1+kappa} - (r-1) is concave with an explicit peak;
    // no crossing at all means the clause is vacuous.
    auto g = [&](double t) { return t - std::pow(kappa * t, 1.0 + kappa) - (c.r - 1.0); };
    const double t_peak = std::pow((1.0 + kappa) * std::pow(kappa, 1.0 + kappa), -1.0 / kappa);
    double clause_sup = 0.0;
    if (g(t_peak) >= 0.0) {
        double t_hi = t_peak + 1.0;
        while (g(t_hi) >= 0.0) t_hi *= 2.0;
        clause_sup = std::exp(bisect(g, t_peak, t_hi, 1e-13));
    }
    c.y_r = std::max({clause_sup, std::exp(c.r), std::pow(y_kappa, 1.0 / kappa)});
    const double moment_clause = std::pow(
        std::exp(1.0) * c.mu2 / 2.0 / (std::fabs(c.mu) * (1.0 - eta)), 1.0 / kappa);
    c.y_eta_star = std::max(c.y_r, moment_clause);
    return c;
}

// log P-bound: (x/y) log( y P(X>y) / (eta |mu|) ), certified for y > y_eta_star.
// Computed both from the tail form and from -s2(y) x; the two must agree.
inline double theorem2_log_bound(const Theorem2Certificate& c, double x, double y) {
    if (!(x >= 0.0)) throw DomainError("theorem2_bound: x must be nonnegative");
    if (!(y > c.y_eta_star))
        throw ThresholdViolation("theorem2_bound: y = " + std::to_string(y) +
                                 " is not above the certification threshold y_eta_star = " +
                                 std::to_string(c.y_eta_star));
    const double tail_form = (x / y) * (std::log(y) + c.spec.log_tail(y) - c.r);
    const double rate_form = -c.rate_s2(y) * x;
    if (std::fabs(tail_form - rate_form) > 1e-12 * std::max(1.0, std::fabs(tail_form)))
        throw SolverFailure("theorem2_bound: the two algebraic forms disagree: " +
                            std::to_string(tail_form) + " vs " + std::to_string(rate_form));
    return tail_form;
}

inline double theorem2_bound(const Theorem2Certificate& c, double x, double y) {
    return std::exp(theorem2_log_bound(c, x, y));
}

// Upper bound for E[exp(s min(X,y))] in the hazard route, s > 0, y > 1/s:
//   1 + s (mu + s (e/2) mu2 + y max{ e^{1-q(1/s)}, e^{s y - q(y)} }).
inline double mgf_upper_bound_thm2(const Theorem2Certificate& c, double y, double s) {
    if (!(s > 0.0)) throw DomainError("mgf_upper_bound_thm2: s must be positive");
    if (!(y > 1.0 / s)) throw DomainError("mgf_upper_bound_thm2: need y > 1/s");
    const double m =
        std::max(1.0 - c.spec.hazard(1.0 / s), s * y - c.spec.hazard(y));
    return 1.0 + s * (c.mu + s * (std::exp(1.0) / 2.0) * c.mu2 + y * std::exp(m));
}

inline double mgf_upper_bound_thm2(const DistributionSpec& spec, const MomentSet& m, double y,
                                   double s) {
    if (!m.mu2) throw InfiniteMoment("mgf_upper_bound_thm2: E[X^2] required");
    if (!(s > 0.0)) throw DomainError("mgf_upper_bound_thm2: s must be positive");
    if (!(y > 1.0 / s)) throw DomainError("mgf_upper_bound_thm2: need y > 1/s");
    const double mx = std::max(1.0 - spec.hazard(1.0 / s), s * y - spec.hazard(y));
    return 1.0 + s * (m.mu + s * (std::exp(1.0) / 2.0) * (*m.mu2) + y * std::exp(mx));
}

}  // namespace suptail
