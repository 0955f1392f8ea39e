#pragma once

// Excess-of-loss re-insurance cascade: ruin probabilities for the net walk
// B_i * 1{B_i < a x} - 1 with Pareto claims, the finite-horizon lower bound,
// the simulation-plus-certificate upper-bound decomposition, and the limiting
// constant of the x^{-(alpha-1) ceil(1/a)} power law.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suptail/bounds.hpp"
#include "suptail/distribution.hpp"
#include "suptail/errors.hpp"
#include "suptail/lundberg.hpp"
#include "suptail/moments.hpp"
#include "suptail/montecarlo.hpp"
#include "suptail/rng.hpp"

namespace suptail {

// Claim/retention model: claims B with P(B > z) = scale * z^{-alpha} on
// [scale^{1/alpha}, inf), premium 1 per unit time (per-step increment B - 1),
// retention level a*x proportional to the ruin level x.  The horizon
// multiplier T is used by the finite-horizon functional P_{a,T}.
class RuinModel {
  public:
    RuinModel(double alpha, double claim_scale, double a,
              std::optional<double> horizon_T = std::nullopt,
              double premium_rate = 1.0)
        : walk_(DistributionSpec::pareto_shift(alpha, 1.0, claim_scale)),
          claim_scale_(claim_scale),
          a_(a),
          premium_rate_(premium_rate) {
        if (!(a > 0.0)) throw DomainError("retention fraction a must be positive");
        if (!(premium_rate > 0.0)) throw DomainError("premium rate must be positive");
        const double inv = 1.0 / a;
        const double nearest = std::round(inv);
        integer_retention_ = std::abs(inv - nearest) < 1e-9 * std::max(1.0, inv);
        k_ = integer_retention_ ? static_cast<int>(nearest)
                                : static_cast<int>(std::ceil(inv));
        x_min_component_ = 1.0 - (k_ - 1) * a_;
        // Default horizon: beyond the cutoff at which the certificate tail term
        // of the decomposition decays faster than the leading power law, using
        // the default exponent beta = (1+alpha)/2, i.e. T = 2*a*k + 1.
        horizon_T_ = horizon_T ? *horizon_T : 2.0 * a_ * k_ + 1.0;
        if (!(horizon_T_ > 0.0)) throw DomainError("horizon multiplier T must be positive");
    }

    double alpha() const { return walk_.alpha(); }
    double claim_scale() const { return claim_scale_; }
    double a() const { return a_; }
    double horizon_T() const { return horizon_T_; }
    double premium_rate() const { return premium_rate_; }
    int k() const { return k_; }
    bool integer_retention() const { return integer_retention_; }
    double x_min_component() const { return x_min_component_; }

    // Walk of net increments X = B - 1 (no retention applied).
    const DistributionSpec& walk_spec() const { return walk_; }

    double claim_min() const { return walk_.support_min() + 1.0; }
    double claim_tail(double z) const { return walk_.tail(z - 1.0); }
    double claim_quantile(double u) const { return walk_.quantile(u) + 1.0; }
    double sample_claim(RngStream& rng) const { return claim_quantile(rng.next_unit()); }

  private:
    DistributionSpec walk_;
    double claim_scale_;
    double a_;
    double premium_rate_;
    double horizon_T_;
    int k_;
    bool integer_retention_;
    double x_min_component_;
};

namespace reinsure_detail {

// sup_{t in [0,T]} sum_i x_i 1{u_i <= t} - t for one packet of claim fractions
// x_i arriving at times u_i.  Between arrivals the expression decreases
// linearly, so the supremum is attained just after one of the arrival times.
inline double packet_supremum(const std::vector<double>& x, const std::vector<double>& u) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < u.size(); ++j) {
        double s = -u[j];
        for (std::size_t i = 0; i < x.size(); ++i)
            if (u[i] <= u[j]) s += x[i];
        best = std::max(best, s);
    }
    return best;
}

}  // namespace reinsure_detail

// P_a(x) = P(sup_n sum_{i<=n} [B_i 1{B_i < a x} - 1] > x) by regenerative
// simulation: the net walk is dominated by the y-truncated walk with y = a*x,
// whose Lundberg exponent calibrates the give-up barrier exactly as in the
// plain supremum-tail estimator.
inline MCEstimate ruin_prob_mc(const RuinModel& model, double x,
                               std::uint64_t n_paths, double eps,
                               std::uint64_t seed, int workers = 1,
                               std::uint64_t step_cap = 1000000000ull) {
    if (!(x > 0.0)) throw DomainError("ruin level x must be positive");
    if (n_paths == 0) throw DomainError("n_paths must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    if (workers < 1) throw DomainError("workers must be >= 1");

    const double y = model.a() * x;
    const TruncatedWalkModel dominating(model.walk_spec(), y);
    const double gamma = dominating.gamma();
    const double barrier = std::ceil(std::log(1.0 / eps) / gamma);

    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t hits = mc_detail::count_hits(
        n_paths, seed, workers, [&](RngStream& rng) {
            double s = 0.0, runmax = 0.0;
            std::uint64_t steps = 0;
            while (runmax <= x && s >= runmax - barrier) {
                if (steps >= step_cap)
                    throw BudgetExceeded("per-path step budget exhausted in ruin_prob_mc");
                const double b = model.claim_quantile(rng.next_unit());
                s += (b < y ? b : 0.0) - 1.0;
                ++steps;
                if (s > runmax) runmax = s;
            }
            return runmax > x;
        });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    MCEstimate est;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(n_paths);
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_paths));
    est.n_paths = n_paths;
    est.seed = seed;
    est.barrier_B = barrier;
    est.truncation_error_bound = std::exp(-gamma * barrier);
    est.wall_time_s = wall;
    return est;
}

// P_{a,T}(x) = P(sup_{n <= T x} sum_{i<=n} (B_i - 1) >= x, all B_i < a x):
// exactly floor(T x) steps, no truncation inside the sum (the joint event
// already confines every claim below a x), weak inequality at the level.
inline MCEstimate finite_horizon_ruin_mc(const RuinModel& model, double x,
                                         std::uint64_t n_paths, std::uint64_t seed,
                                         int workers = 1) {
    if (!(x > 0.0)) throw DomainError("ruin level x must be positive");
    if (n_paths == 0) throw DomainError("n_paths must be positive");
    if (workers < 1) throw DomainError("workers must be >= 1");

    const double y = model.a() * x;
    const std::uint64_t n_steps =
        static_cast<std::uint64_t>(std::floor(model.horizon_T() * x));

    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t hits = mc_detail::count_hits(
        n_paths, seed, workers, [&](RngStream& rng) {
            double s = 0.0, runmax = 0.0;
            for (std::uint64_t i = 0; i < n_steps; ++i) {
                const double b = model.claim_quantile(rng.next_unit());
                if (b >= y) return false;
                s += b - 1.0;
                if (s > runmax) runmax = s;
            }
            return runmax >= x;
        });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    MCEstimate est;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(n_paths);
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_paths));
    est.n_paths = n_paths;
    est.seed = seed;
    est.barrier_B = 0.0;
    est.truncation_error_bound = 0.0;
    est.wall_time_s = wall;
    return est;
}

// P(all of floor(T x) claims stay below a x) -- the survival factor dividing
// the finite-horizon estimate in the upper-bound decomposition.
inline double horizon_survival_factor(const RuinModel& model, double x) {
    if (!(x > 0.0)) throw DomainError("ruin level x must be positive");
    const double steps = std::floor(model.horizon_T() * x);
    return std::pow(1.0 - model.claim_tail(model.a() * x), steps);
}

// Certified decomposition P_a(x) <= P_{a,T}(x) / P(all claims < a x)
// + 2 P(M(a x) > T x / 2), with the last term bounded by the power-moment
// certificate at exponent beta in (1, alpha).
struct UpperBoundDecomposition {
    MCEstimate finite_horizon;
    double correction;  // P(all floor(T x) claims < a x)
    double tail_term;   // 2 * certified bound on P(M(a x) > T x / 2)
    double beta;

    double rhs() const { return finite_horizon.p_hat / correction + tail_term; }
};

inline UpperBoundDecomposition upper_bound_decomposition(
    const RuinModel& model, double x, std::uint64_t n_paths, std::uint64_t seed,
    int workers = 1, std::optional<double> beta = std::nullopt) {
    const double alpha = model.alpha();
    const double beta_eff = beta ? *beta : 0.5 * (1.0 + alpha);
    if (!(beta_eff > 1.0 && beta_eff < alpha))
        throw DomainError("decomposition exponent beta must lie in (1, alpha)");

    const MomentSet moments = compute_moments(model.walk_spec(), beta_eff);
    const Theorem1Certificate cert = theorem1_certificate(moments);
    // Throws ThresholdViolation unless a x clears the certificate threshold.
    const double tail = 2.0 * theorem1_bound(cert, 0.5 * model.horizon_T() * x,
                                             model.a() * x);

    UpperBoundDecomposition out;
    out.finite_horizon = finite_horizon_ruin_mc(model, x, n_paths, seed, workers);
    out.correction = horizon_survival_factor(model, x);
    out.tail_term = tail;
    out.beta = beta_eff;
    return out;
}

// Limiting constant C of P_a(x) ~ C (scale * x^{-(alpha-1)})^k, k = ceil(1/a):
//   C = int_{u in [0,T]^k, x in (0,inf)^k} alpha^k prod_i x_i^{-1-alpha}
//       1{sup_{t in [0,T]} sum_i x_i 1{u_i <= t} - t >= 1, max_i x_i <= a} du dx.
// Feasibility forces every component into [1-(k-1)a, a], so the power-law
// factor is sampled there by inverse CDF and the leftover mass enters as an
// importance weight; arrival times are uniform on [0,T].
inline MCEstimate estimate_constant_C(const RuinModel& model, double T,
                                      std::uint64_t n_samples, std::uint64_t seed,
                                      int workers = 1) {
    if (model.integer_retention())
        throw DegenerateRetention("limiting constant vanishes when 1/a is an integer");
    if (!(T > 1.0 + model.a()))
        throw DomainError("constant estimation requires horizon T > 1 + a");
    if (n_samples == 0) throw DomainError("n_samples must be positive");
    if (workers < 1) throw DomainError("workers must be >= 1");

    const double alpha = model.alpha();
    const double a = model.a();
    const int k = model.k();
    const double x_min = model.x_min_component();
    const double mass = std::pow(x_min, -alpha) - std::pow(a, -alpha);
    const double weight = std::pow(mass * T, k);

    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t hits = mc_detail::count_hits(
        n_samples, seed, workers, [&](RngStream& rng) {
            std::vector<double> xs(k), us(k);
            for (int i = 0; i < k; ++i) {
                xs[i] = std::pow(std::pow(x_min, -alpha) - rng.next_unit() * mass,
                                 -1.0 / alpha);
                us[i] = T * rng.next_unit();
            }
            return reinsure_detail::packet_supremum(xs, us) >= 1.0;
        });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const double q = static_cast<double>(hits) / static_cast<double>(n_samples);
    MCEstimate est;
    est.p_hat = weight * q;
    est.std_err = weight * std::sqrt(q * (1.0 - q) / static_cast<double>(n_samples));
    est.n_paths = n_samples;
    est.seed = seed;
    est.barrier_B = 0.0;
    est.truncation_error_bound = 0.0;
    est.wall_time_s = wall;
    return est;
}

// Least-squares slope of log P_{a,T}(x) against log x over a geometric level
// grid; the power law predicts -(alpha - 1) * ceil(1/a).
inline double asymptotic_slope_check(const RuinModel& model,
                                     const std::vector<double>& x_grid,
                                     std::uint64_t n_paths, std::uint64_t seed,
                                     int workers = 1) {
    if (x_grid.size() < 4)
        throw DomainError("slope check needs a geometric grid with >= 4 levels");
    for (double x : x_grid)
        if (!(x > 0.0)) throw DomainError("slope-check levels must be positive");
    const double ratio = x_grid[1] / x_grid[0];
    for (std::size_t i = 0; i + 1 < x_grid.size(); ++i)
        if (std::abs(x_grid[i + 1] / x_grid[i] - ratio) > 1e-9 * ratio)
            throw DomainError("slope-check grid must be geometric");

    std::vector<double> lx, lp;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const std::uint64_t point_seed = seed ^ (0x9e3779b97f4a7c15ull * (i + 1));
        const MCEstimate est =
            finite_horizon_ruin_mc(model, x_grid[i], n_paths, point_seed, workers);
        if (!(est.p_hat > 0.0) || est.std_err > 0.3 * est.p_hat)
            throw InsufficientSignal("relative error above 30% at level x=" +
                                     std::to_string(x_grid[i]));
        lx.push_back(std::log(x_grid[i]));
        lp.push_back(std::log(est.p_hat));
    }

    double mx = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        mp += lp[i];
    }
    mx /= static_cast<double>(lx.size());
    mp /= static_cast<double>(lp.size());
    double sxx = 0.0, sxp = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxp += (lx[i] - mx) * (lp[i] - mp);
    }
    return sxp / sxx;
}

}  // namespace suptail
