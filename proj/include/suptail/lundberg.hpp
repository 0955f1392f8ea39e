#pragma once

// The truncated random walk S_n(y) = sum min{X_i, y}, its moment generating
// function, and the exact Cramer-Lundberg rate gamma(y): the unique positive
// root of E[exp(s min{X,y})] = 1, which certifies P(M(y) > x) <= exp(-gamma x)
// for the all-time supremum M(y).
//
// The MGF is evaluated from the layered representation (integration by parts,
// valid for the compactly supported min{X,y}):
//
//   E[e^{sZ}] = 1 + s int_0^y e^{sx} P(X>x) dx - s int_m^0 e^{sx} P(X<=x) dx,
//
// which handles the atom of min{X,y} at y exactly and needs no density. The
// positive-side integrand is computed as exp(s x + log P(X>x)) so that large
// hazards never underflow pairwise. Root bracketing never overflows: whenever
// s y + log P(X>y) >= 1 the atom alone certifies MGF >= e > 1 and the
// evaluation short-circuits to +infinity.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "suptail/distribution.hpp"
#include "suptail/errors.hpp"
#include "suptail/quadrature.hpp"
#include "suptail/rootfind.hpp"

namespace suptail {

struct LundbergRoot {
    double gamma = 0;
    double mgf_residual = 0;  // E[exp(gamma min(X,y))] - 1 at the returned root
};

class TruncatedWalkModel {
  public:
    TruncatedWalkModel(DistributionSpec spec, double y) : spec_(std::move(spec)), y_(y) {
        if (!(y > 0.0))
            throw DomainError("TruncatedWalkModel: truncation level y must be positive");
        trunc_mean_ = compute_truncated_mean();
        if (!(trunc_mean_ < 0.0))
            throw DomainError("TruncatedWalkModel: E[min(X,y)] must be negative, got " +
                              std::to_string(trunc_mean_));
    }

    const DistributionSpec& spec() const { return spec_; }
    double y() const { return y_; }

    // E[min(X, y)] < 0.
    double truncated_mean() const { return trunc_mean_; }

    // E[exp(s min(X, y))]. Defined for every real s (compact support); returns
    // +infinity when the atom at y alone certifies a value above e.
    double truncated_mgf(double s) const {
        if (s == 0.0) return 1.0;
        if (s > 0.0 && s * y_ + spec_.log_tail(y_) >= 1.0)
            return std::numeric_limits<double>::infinity();
        const double pos = integrate(
            [this, s](double x) { return std::exp(s * x + spec_.log_tail(x)); }, 0.0, y_,
            mgf_opts(), breakpoints());
        const double lo = spec_.support_min();
        const double neg =
            lo < 0.0 ? integrate([this, s](double x) { return std::exp(s * x) * (1.0 - spec_.tail(x)); },
                                 lo, 0.0, mgf_opts())
                     : 0.0;
        return 1.0 + s * (pos - neg);
    }

    // d/ds E[exp(s min(X, y))], same layered representation differentiated in s.
    double truncated_mgf_derivative(double s) const {
        const double pos = integrate(
            [this, s](double x) { return (1.0 + s * x) * std::exp(s * x + spec_.log_tail(x)); },
            0.0, y_, mgf_opts(), breakpoints());
        const double lo = spec_.support_min();
        const double neg = lo < 0.0
                               ? integrate([this, s](double x) {
                                     return (1.0 + s * x) * std::exp(s * x) * (1.0 - spec_.tail(x));
                                 }, lo, 0.0, mgf_opts())
                               : 0.0;
        return pos - neg;
    }

    double gamma() const { return root().gamma; }
    double gamma_residual() const { return root().mgf_residual; }

    // P(M(y) > x) <= exp(-gamma(y) x).
    double cl_bound(double x) const {
        if (!(x >= 0.0)) throw DomainError("cl_bound: x must be nonnegative");
        return std::exp(-gamma() * x);
    }

  private:
    static QuadOptions mgf_opts() {
        QuadOptions o;
        o.abs_tol = 5e-14;
        o.rel_tol = 1e-14;
        return o;
    }

    // Geometric refinement toward both ends of [0, y]: the integrand peaks at 0
    // and/or at y with a trough between, across many decades when y is large.
    std::vector<double> breakpoints() const {
        std::vector<double> bp;
        for (double t = 0.5 * y_; t > 1e-6; t *= 0.5) bp.push_back(t);
        for (int j = 2; j <= 20; ++j) bp.push_back(y_ * (1.0 - std::pow(2.0, -j)));
        return bp;
    }

    double compute_truncated_mean() const {
        const double pos =
            integrate([this](double x) { return spec_.tail(x); }, 0.0, y_, mgf_opts(), breakpoints());
        const double lo = spec_.support_min();
        const double neg =
            lo < 0.0
                ? integrate([this](double x) { return 1.0 - spec_.tail(x); }, lo, 0.0, mgf_opts())
                : 0.0;
        return pos - neg;
    }

    const LundbergRoot& root() const {
        if (!root_) root_ = solve_root();
        return *root_;
    }

    LundbergRoot solve_root() const {
        // Bracket by doubling from the natural scale 1/y; the atom short-circuit
        // guarantees termination long before overflow.
        double s = 1.0 / y_;
        double lo = 0.0, hi = 0.0;
        if (truncated_mgf(s) <= 1.0) {
            for (int i = 0;; ++i) {
                if (i > 200) throw NoPositiveRoot("lundberg: MGF never exceeds 1");
                lo = s;
                s *= 2.0;
                if (truncated_mgf(s) > 1.0) break;
            }
            hi = s;
        } else {
            // Root below the first probe: halve down until the MGF dips under 1.
            hi = s;
            for (int i = 0;; ++i) {
                if (i > 1100) throw NoPositiveRoot("lundberg: no positive root above 1e-300");
                s *= 0.5;
                const double v = truncated_mgf(s);
                if (v <= 1.0) {
                    lo = s;
                    break;
                }
                hi = s;
            }
        }
        double g = bisect([this](double t) { return truncated_mgf(t) - 1.0; }, lo, hi, 1e-9);
        double resid = truncated_mgf(g) - 1.0;
        for (int i = 0; i < 6 && std::fabs(resid) > 1e-13; ++i) {
            const double d = truncated_mgf_derivative(g);
            if (!(d > 0.0) || !std::isfinite(d)) break;
            const double next = g - resid / d;
            if (!(next > 0.0) || !std::isfinite(next)) break;
            g = next;
            resid = truncated_mgf(g) - 1.0;
        }
        if (!(std::fabs(resid) <= 1e-10))
            throw SolverFailure("lundberg: MGF residual " + std::to_string(resid) +
                                " exceeds 1e-10 at gamma = " + std::to_string(g));
        return {g, resid};
    }

    DistributionSpec spec_;
    double y_ = 0;
    double trunc_mean_ = 0;
    mutable std::optional<LundbergRoot> root_;
};

}  // namespace suptail
