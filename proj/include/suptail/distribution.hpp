#pragma once

// Increment distributions X = B - c: a non-negative claim B minus a constant
// premium drift c, with E[X] < 0 enforced at construction. Families:
//
//   ParetoShift        P(B>z) = min(1, L z^-alpha)        regularly varying tail
//   WeibullShift       P(B>z) = exp(-z^xi),   xi in (0,1) stretched exponential
//   LogNormalTypeShift P(B>z) = exp(-(log z)^xi), xi > 1  log-normal type
//   Custom             tabulated (x, P(X>x)) knots, log-linear in between
//
// The slowly varying factor L is a positive constant by default (a constant is
// slowly varying, and rescales the claim: B = L^{1/alpha} * standard Pareto); a
// user-supplied callable is accepted for exotic tails, in which case moments and
// quantiles run through generic numeric paths and tail monotonicity is the
// caller's responsibility.
//
// Sampling is inverse-CDF from a (0,1] uniform; u = 1 lands on the support
// infimum, u -> 0 produces the far tail.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suptail/errors.hpp"
#include "suptail/quadrature.hpp"
#include "suptail/rng.hpp"
#include "suptail/rootfind.hpp"

namespace suptail {

enum class Family { pareto_shift, weibull_shift, lognormal_type_shift, custom };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::pareto_shift: return "pareto";
        case Family::weibull_shift: return "weibull";
        case Family::lognormal_type_shift: return "lognormal_type";
        case Family::custom: return "custom";
    }
    return "?";
}

class DistributionSpec {
  public:
    static DistributionSpec pareto_shift(double alpha, double drift_c, double L_const = 1.0) {
        if (!(alpha > 1.0))
            throw InfiniteMoment("pareto_shift: alpha must exceed 1 for a finite mean, got " +
                                 std::to_string(alpha));
        if (!(drift_c > 0.0)) throw DomainError("pareto_shift: drift_c must be positive");
        if (!(L_const > 0.0)) throw DomainError("pareto_shift: L must be positive");
        DistributionSpec d;
        d.family_ = Family::pareto_shift;
        d.alpha_ = alpha;
        d.c_ = drift_c;
        d.L_const_ = L_const;
        d.claim_min_ = std::pow(L_const, 1.0 / alpha);
        d.mean_ = d.claim_min_ * alpha / (alpha - 1.0) - drift_c;
        d.finish_construction();
        return d;
    }

    static DistributionSpec pareto_shift(double alpha, double drift_c,
                                         std::function<double(double)> slowly_varying) {
        if (!(alpha > 1.0))
            throw InfiniteMoment("pareto_shift: alpha must exceed 1 for a finite mean");
        if (!(drift_c > 0.0)) throw DomainError("pareto_shift: drift_c must be positive");
        if (!slowly_varying) throw DomainError("pareto_shift: null slowly varying callable");
        DistributionSpec d;
        d.family_ = Family::pareto_shift;
        d.alpha_ = alpha;
        d.c_ = drift_c;
        d.L_func_ = std::move(slowly_varying);
        d.claim_min_ = d.solve_claim_min();
        d.mean_ = d.mean_by_quadrature();
        d.finish_construction();
        return d;
    }

    static DistributionSpec weibull_shift(double xi, double drift_c) {
        if (!(xi > 0.0 && xi < 1.0))
            throw DomainError("weibull_shift: xi must lie in (0,1), got " + std::to_string(xi));
        if (!(drift_c > 0.0)) throw DomainError("weibull_shift: drift_c must be positive");
        DistributionSpec d;
        d.family_ = Family::weibull_shift;
        d.xi_ = xi;
        d.c_ = drift_c;
        d.claim_min_ = 0.0;
        d.mean_ = d.mean_by_quadrature();
        d.finish_construction();
        return d;
    }

    static DistributionSpec lognormal_type_shift(double xi, double drift_c) {
        if (!(xi > 1.0))
            throw DomainError("lognormal_type_shift: xi must exceed 1, got " +
                              std::to_string(xi));
        if (!(drift_c > 0.0))
            throw DomainError("lognormal_type_shift: drift_c must be positive");
        DistributionSpec d;
        d.family_ = Family::lognormal_type_shift;
        d.xi_ = xi;
        d.c_ = drift_c;
        d.claim_min_ = 1.0;
        d.mean_ = d.mean_by_quadrature();
        d.finish_construction();
        return d;
    }

    // Tabulated survival function of X itself. Knots must start at tail 1 (the
    // support infimum), decrease strictly, and stay positive; between knots the
    // tail is log-linear in x, and beyond the last knot the final slope continues
    // (an exponential tail). Heavy-tailedness cannot be verified from a finite
    // table; the flag records the caller's assertion.
    static DistributionSpec custom(std::vector<std::pair<double, double>> tail_knots,
                                   bool heavy_tail_assumed = true) {
        if (tail_knots.size() < 2) throw DomainError("custom: need at least two knots");
        DistributionSpec d;
        d.family_ = Family::custom;
        d.c_ = 0.0;
        d.heavy_tail_assumed_ = heavy_tail_assumed;
        d.knot_x_.reserve(tail_knots.size());
        d.knot_logt_.reserve(tail_knots.size());
        if (tail_knots.front().second != 1.0)
            throw DomainError("custom: first knot must have tail exactly 1");
        double prev_x = -std::numeric_limits<double>::infinity();
        double prev_t = 2.0;
        for (const auto& [x, t] : tail_knots) {
            if (!std::isfinite(x) || !(x > prev_x))
                throw DomainError("custom: knot abscissae must be finite and strictly increasing");
            if (!(t > 0.0 && t <= 1.0 && t < prev_t))
                throw DomainError("custom: tails must be in (0,1] and strictly decreasing");
            d.knot_x_.push_back(x);
            d.knot_logt_.push_back(std::log(t));
            prev_x = x;
            prev_t = t;
        }
        d.claim_min_ = d.knot_x_.front();  // support of X directly (c = 0)
        d.mean_ = d.mean_by_quadrature();
        d.finish_construction();
        return d;
    }

    Family family() const { return family_; }
    double drift_c() const { return c_; }
    double alpha() const {
        if (family_ != Family::pareto_shift)
            throw DomainError("alpha is defined for the pareto family only");
        return alpha_;
    }
    double xi() const {
        if (family_ != Family::weibull_shift && family_ != Family::lognormal_type_shift)
            throw DomainError("xi is defined for the weibull/lognormal families only");
        return xi_;
    }
    bool has_function_L() const { return static_cast<bool>(L_func_); }
    double pareto_L() const { return L_const_; }
    bool heavy_tail_assumed() const { return heavy_tail_assumed_; }
    double mean() const { return mean_; }

    // Essential infimum of X.
    double support_min() const { return claim_min_ - c_; }

    // P(X > x).
    double tail(double x) const { return std::exp(log_tail(x)); }

    // log P(X > x), exact 0 at/below the support infimum.
    double log_tail(double x) const {
        const double z = x + c_;  // claim coordinate
        switch (family_) {
            case Family::pareto_shift: {
                if (z <= claim_min_) return 0.0;
                const double lt = L_func_ ? std::log(L_func_(z)) - alpha_ * std::log(z)
                                          : std::log(L_const_) - alpha_ * std::log(z);
                return std::min(0.0, lt);
            }
            case Family::weibull_shift:
                return z <= 0.0 ? 0.0 : -std::pow(z, xi_);
            case Family::lognormal_type_shift:
                return z <= 1.0 ? 0.0 : -std::pow(std::log(z), xi_);
            case Family::custom:
                return custom_log_tail(x);
        }
        return 0.0;
    }

    // Hazard exponent q(x) = -log P(X > x).
    double hazard(double x) const { return -log_tail(x); }

    // Smallest x0 from which the hazard exponent is concave.
    double hazard_concave_from() const {
        switch (family_) {
            case Family::pareto_shift:
            case Family::weibull_shift:
                return support_min();
            case Family::lognormal_type_shift:
                // (log z)^xi is concave in z for log z >= xi - 1.
                return std::max(support_min(), std::exp(xi_ - 1.0) - c_);
            case Family::custom:
                return custom_concave_from();
        }
        return support_min();
    }

    // Inverse survival function: the x with P(X > x) = u, u in (0,1].
    double quantile(double u) const {
        if (!(u > 0.0 && u <= 1.0))
            throw DomainError("quantile: u must lie in (0,1], got " + std::to_string(u));
        switch (family_) {
            case Family::pareto_shift:
                if (L_func_) return invert_tail_numeric(u);
                return claim_min_ * std::pow(u, -1.0 / alpha_) - c_;
            case Family::weibull_shift:
                return std::pow(-std::log(u), 1.0 / xi_) - c_;
            case Family::lognormal_type_shift:
                return std::exp(std::pow(-std::log(u), 1.0 / xi_)) - c_;
            case Family::custom:
                return custom_quantile(u);
        }
        return 0.0;
    }

    double sample(RngStream& rng) const { return quantile(rng.next_unit()); }

  private:
    DistributionSpec() = default;

    void finish_construction() {
        if (!std::isfinite(mean_))
            throw InfiniteMoment("distribution mean is not finite");
        if (!(mean_ < 0.0))
            throw DomainError("increment mean must be strictly negative, got " +
                              std::to_string(mean_) +
                              " (raise drift_c or shrink the claim scale)");
    }

    double mean_by_quadrature() const {
        const double lo = support_min();
        const double pos = integrate_to_inf([this](double x) { return tail(x); }, 0.0);
        double neg = 0.0;
        if (lo < 0.0)
            neg = integrate([this](double x) { return 1.0 - tail(x); }, lo, 0.0);
        return pos - neg;
    }

    double solve_claim_min() const {
        // Largest z with L(z) z^-alpha >= 1, located in log z by bisection.
        auto f = [this](double t) {
            const double z = std::exp(t);
            return std::log(L_func_(z)) - alpha_ * t;  // log of tail candidate
        };
        double lo = -64.0, hi = 64.0;
        if (f(lo) < 0.0)
            throw DomainError("pareto_shift: slowly varying factor leaves no unit-tail region");
        while (f(hi) >= 0.0) {
            hi *= 2.0;
            if (hi > 1e4) throw DomainError("pareto_shift: tail never drops below 1");
        }
        return std::exp(bisect(f, lo, hi, 1e-15));
    }

    double invert_tail_numeric(double u) const {
        if (u == 1.0) return support_min();
        const double lq = std::log(u);
        auto f = [this, lq](double t) { return log_tail(std::exp(t) - c_) - lq; };
        double lo = std::log(claim_min_);
        double hi = std::max(lo + 1.0, std::log(claim_min_ + 1.0));
        while (f(hi) > 0.0) {
            hi += std::max(1.0, hi);
            if (hi > 1e6) throw SolverFailure("quantile: tail inversion bracket overflow");
        }
        return std::exp(bisect(f, lo, hi, 1e-14)) - c_;
    }

    double custom_log_tail(double x) const {
        if (x <= knot_x_.front()) return 0.0;
        const auto it = std::upper_bound(knot_x_.begin(), knot_x_.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - knot_x_.begin());
        const std::size_t i = std::min(j - 1, knot_x_.size() - 2);  // segment index
        const double slope = (knot_logt_[i + 1] - knot_logt_[i]) / (knot_x_[i + 1] - knot_x_[i]);
        return knot_logt_[i] + slope * (x - knot_x_[i]);
    }

    double custom_quantile(double u) const {
        const double lu = std::log(u);
        if (lu >= 0.0) return knot_x_.front();
        // knot_logt_ decreases strictly; find the segment containing lu.
        const auto it = std::lower_bound(knot_logt_.begin(), knot_logt_.end(), lu,
                                         [](double stored, double v) { return stored > v; });
        const std::size_t j = static_cast<std::size_t>(it - knot_logt_.begin());
        const std::size_t i = std::min(std::max<std::size_t>(j, 1) - 1, knot_x_.size() - 2);
        const double slope = (knot_logt_[i + 1] - knot_logt_[i]) / (knot_x_[i + 1] - knot_x_[i]);
        return knot_x_[i] + (lu - knot_logt_[i]) / slope;
    }

    double custom_concave_from() const {
        // Hazard slopes are -(log-tail slopes) > 0; concavity needs them non-increasing.
        // Walk back from the end while that holds.
        const std::size_t n = knot_x_.size();
        std::size_t first = 0;
        for (std::size_t i = n - 2; i >= 1; --i) {
            const double s_prev = -(knot_logt_[i] - knot_logt_[i - 1]) / (knot_x_[i] - knot_x_[i - 1]);
            const double s_next = -(knot_logt_[i + 1] - knot_logt_[i]) / (knot_x_[i + 1] - knot_x_[i]);
            if (s_prev < s_next) {  // convex kink at knot i
                first = i;
                break;
            }
        }
        return knot_x_[first];
    }

    Family family_ = Family::custom;
    double alpha_ = 0, xi_ = 0, c_ = 0;
    double L_const_ = 1.0;
    std::function<double(double)> L_func_;
    double claim_min_ = 0;  // essential infimum of the claim B (or of X for custom)
    double mean_ = 0;
    bool heavy_tail_assumed_ = true;
    std::vector<double> knot_x_, knot_logt_;
};

}  // namespace suptail
