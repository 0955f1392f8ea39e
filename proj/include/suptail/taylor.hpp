#pragma once

// Sharp constants for first-order Taylor remainders of the exponential:
//
//   ME_delta = max_{s>=0} (1 - (1+s)e^{-s}) / s^delta,   delta in [0,2]
//   MG_delta = max_{u>=0} (e^{-u} - 1 + u) / u^delta,    delta in [1,2]
//
// together with the closed-form upper envelopes UE/UG and the elementary bounds
// 1/(1+delta/2), 1/delta. Interior maxima are stationary points solved by Newton;
// the endpoint values (where the stationary equation degenerates) are returned
// exactly: ME_0 = 1, ME_2 = 1/2 (limit s->0), MG_1 = 1 (limit u->inf), MG_2 = 1/2
// (limit u->0). Convention 0^0 = 1 in the envelopes.

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "suptail/csv.hpp"
#include "suptail/errors.hpp"
#include "suptail/rootfind.hpp"

namespace suptail::taylor {

// Weighted remainder ratios; the objects being maximised.
inline double remainder_ratio_e(double delta, double s) {
    return (1.0 - (1.0 + s) * std::exp(-s)) / std::pow(s, delta);
}
inline double remainder_ratio_g(double delta, double u) {
    return (std::expm1(-u) + u) / std::pow(u, delta);
}

namespace detail {

struct NewtonSolve {
    double root = 0;
    double residual = 0;
    int iterations = 0;
};

// Residual tolerance: 1e-12, relaxed to round-off level when the equation's own
// terms exceed ~1e4 in magnitude (then 1e-12 is below one ulp of the arithmetic).
inline double residual_tol(double term_scale) {
    return std::max(1e-12, 16.0 * std::numeric_limits<double>::epsilon() * term_scale);
}

// Stationary equation for ME: e^s = 1 + s + s^2/delta, delta in (0,2).
// Formulated through expm1 so the sign of g survives near s = 0. Newton from the
// analytic starting point, keeping the best iterate; if that stalls (for extreme
// delta the start can sit near a critical point of g), fall back to bisection on
// the guaranteed bracket (g < 0 left of the unique positive root, g > 0 right).
inline NewtonSolve solve_e_star(double delta) {
    NewtonSolve out;
    auto g = [delta](double s) { return std::expm1(s) - s - s * s / delta; };
    auto gp = [delta](double s) { return std::expm1(s) - 2.0 * s / delta; };
    double s = std::log(2.0 / delta) + (2.0 - delta);
    double best = s, best_abs = std::fabs(g(s));
    for (int i = 0; i < 24; ++i) {
        const double step = g(s) / gp(s);
        const double next = s - step;
        ++out.iterations;
        if (!std::isfinite(next) || next <= 0.0 || next >= 750.0) break;
        s = next;
        const double ga = std::fabs(g(s));
        if (ga < best_abs) {
            best_abs = ga;
            best = s;
        }
        if (ga == 0.0 || std::fabs(step) <= 4e-15 * std::max(1.0, s)) break;
    }
    const double tol = residual_tol(std::exp(std::min(best, 700.0)));
    if (best_abs > tol) {
        double root = bisect(g, 1e-12, 750.0, 1e-16);
        for (int i = 0; i < 2; ++i) {  // polish
            root -= g(root) / gp(root);
            ++out.iterations;
        }
        const double ra = std::fabs(g(root));
        if (ra < best_abs) {
            best = root;
            best_abs = ra;
        }
    }
    out.root = best;
    out.residual = best_abs;
    if (out.residual > residual_tol(std::exp(std::min(best, 700.0))))
        throw SolverFailure("ME stationary solve: residual " + std::to_string(out.residual) +
                            " at delta=" + std::to_string(delta));
    return out;
}

// Stationary equation for MG: e^{-u} = 1 - delta*u/(u+delta), delta in (1,2).
inline NewtonSolve solve_g_star(double delta) {
    NewtonSolve out;
    auto h = [delta](double u) { return std::expm1(-u) + delta * u / (u + delta); };
    auto hp = [delta](double u) {
        const double t = u + delta;
        return -std::exp(-u) + delta * delta / (t * t);
    };
    const double hi_bracket = std::max(800.0, 4.0 * delta / (delta - 1.0));
    double u = (2.0 - delta) * delta / (delta - 1.0) - std::log(delta - 1.0);
    double best = u, best_abs = std::fabs(h(u));
    for (int i = 0; i < 24; ++i) {
        const double step = h(u) / hp(u);
        const double next = u - step;
        ++out.iterations;
        if (!std::isfinite(next) || next <= 0.0 || next >= hi_bracket * 4.0) break;
        u = next;
        const double ha = std::fabs(h(u));
        if (ha < best_abs) {
            best_abs = ha;
            best = u;
        }
        if (ha == 0.0 || std::fabs(step) <= 4e-15 * std::max(1.0, u)) break;
    }
    if (best_abs > residual_tol(1.0)) {
        double root = bisect(h, 1e-8, hi_bracket, 1e-16);  // h < 0 near 0+, h > 0 at hi
        for (int i = 0; i < 2; ++i) {  // polish
            root -= h(root) / hp(root);
            ++out.iterations;
        }
        const double ra = std::fabs(h(root));
        if (ra < best_abs) {
            best = root;
            best_abs = ra;
        }
    }
    out.root = best;
    out.residual = best_abs;
    if (out.residual > residual_tol(1.0))
        throw SolverFailure("MG stationary solve: residual " + std::to_string(out.residual) +
                            " at delta=" + std::to_string(delta));
    return out;
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

inline void require_me_domain(double delta) {
    if (!(delta >= 0.0 && delta <= 2.0))
        throw DomainError("ME_delta requires delta in [0,2], got " + std::to_string(delta));
}
inline void require_mg_domain(double delta) {
    if (!(delta >= 1.0 && delta <= 2.0))
        throw DomainError("MG_delta requires delta in [1,2], got " + std::to_string(delta));
}

// Interior stationary points (argmax locations).
inline double me_argmax(double delta) {
    require_me_domain(delta);
    if (delta == 0.0 || delta == 2.0)
        throw DomainError("ME argmax is a boundary limit at delta=" + std::to_string(delta));
    return detail::solve_e_star(delta).root;
}
inline double mg_argmax(double delta) {
    require_mg_domain(delta);
    if (delta == 1.0 || delta == 2.0)
        throw DomainError("MG argmax is a boundary limit at delta=" + std::to_string(delta));
    return detail::solve_g_star(delta).root;
}

inline double me(double delta) {
    require_me_domain(delta);
    if (delta == 0.0) return 1.0;
    if (delta == 2.0) return 0.5;
    return remainder_ratio_e(delta, detail::solve_e_star(delta).root);
}

inline double mg(double delta) {
    require_mg_domain(delta);
    if (delta == 1.0) return 1.0;
    if (delta == 2.0) return 0.5;
    return remainder_ratio_g(delta, detail::solve_g_star(delta).root);
}

// Closed-form envelopes (0^0 = 1 at the right endpoint).
inline double ue(double delta) {
    require_me_domain(delta);
    const double t = 2.0 - delta;
    const double pow_term = (t == 0.0) ? 1.0 : std::pow(t, t);
    return pow_term / (4.0 - delta);
}
inline double ug(double delta) {
    require_mg_domain(delta);
    const double t = 2.0 - delta;
    const double pow_t = (t == 0.0) ? 1.0 : std::pow(t, t);
    const double s = delta - 1.0;
    const double pow_s = (s == 0.0) ? 1.0 : std::pow(s / delta, s);
    return pow_s * pow_t;
}

inline double simple_e(double delta) {
    require_me_domain(delta);
    return 1.0 / (1.0 + 0.5 * delta);
}
inline double simple_g(double delta) {
    require_mg_domain(delta);
    return 1.0 / delta;
}

// Sign-certificates for the envelope comparisons UE <= 1/(1+delta/2) and UG <= 1/delta:
// both functions are <= 0 on their domains (convexity arguments), vanishing at the ends.
inline double f_e(double delta) {
    require_me_domain(delta);
    return std::log1p(0.5 * delta) + detail::xlogx(2.0 - delta) - std::log(4.0 - delta);
}
inline double f_g(double delta) {
    require_mg_domain(delta);
    return (2.0 - delta) * std::log(delta) + detail::xlogx(delta - 1.0) +
           detail::xlogx(2.0 - delta);
}

struct TaylorConstants {
    double delta = 0;
    double me = 0, ue = 0, simple_e = 0;
    std::optional<double> mg, ug, simple_g;  // defined on delta in [1,2]
    std::optional<double> s_star, u_star;    // present when an interior solve happened
    std::optional<int> me_iterations, mg_iterations;
};

inline TaylorConstants constants(double delta) {
    require_me_domain(delta);
    TaylorConstants c;
    c.delta = delta;
    c.ue = ue(delta);
    c.simple_e = simple_e(delta);
    if (delta == 0.0) {
        c.me = 1.0;
    } else if (delta == 2.0) {
        c.me = 0.5;
    } else {
        const auto sol = detail::solve_e_star(delta);
        c.s_star = sol.root;
        c.me_iterations = sol.iterations;
        c.me = remainder_ratio_e(delta, sol.root);
    }
    if (delta >= 1.0) {
        c.ug = ug(delta);
        c.simple_g = simple_g(delta);
        if (delta == 1.0) {
            c.mg = 1.0;
        } else if (delta == 2.0) {
            c.mg = 0.5;
        } else {
            const auto sol = detail::solve_g_star(delta);
            c.u_star = sol.root;
            c.mg_iterations = sol.iterations;
            c.mg = remainder_ratio_g(delta, sol.root);
        }
    }
    return c;
}

// Figure tables for external plotting; 12 significant digits.
inline void write_me_table(std::ostream& out, int n_points = 201) {
    if (n_points < 2) throw DomainError("write_me_table: need at least 2 grid points");
    CsvWriter csv(out, 12);
    csv.row({"delta", "ME", "UE", "simple_E"});
    for (int i = 0; i < n_points; ++i) {
        const double d = 2.0 * i / (n_points - 1);
        csv.row({csv.num(d), csv.num(me(d)), csv.num(ue(d)), csv.num(simple_e(d))});
    }
}

inline void write_mg_table(std::ostream& out, int n_points = 101) {
    if (n_points < 2) throw DomainError("write_mg_table: need at least 2 grid points");
    CsvWriter csv(out, 12);
    csv.row({"delta", "MG", "UG", "simple_G"});
    for (int i = 0; i < n_points; ++i) {
        const double d = 1.0 + 1.0 * i / (n_points - 1);
        csv.row({csv.num(d), csv.num(mg(d)), csv.num(ug(d)), csv.num(simple_g(d))});
    }
}

}  // namespace suptail::taylor
