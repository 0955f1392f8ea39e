#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "suptail/bounds.hpp"
#include "suptail/errors.hpp"
#include "suptail/moments.hpp"
#include "suptail/quadrature.hpp"
#include "suptail/reinsure.hpp"
#include "suptail/rng.hpp"

using Catch::Approx;
using namespace suptail;

namespace {

// Reference cascade: Pareto claims with P(B > z) = 0.125 z^{-3} on [0.5, inf),
// E[B] = 0.75, net drift -0.25.
RuinModel reference_model(double a) { return RuinModel(3.0, 0.125, a); }

// Closed form of the limiting constant for single-packet retention (k = 1,
// horizon long enough that the time constraint is not binding): one claim of
// size x arriving at time u crosses level 1 iff x - u >= 1, so
//   C = int_0^{a-1} [(1+u)^{-alpha} - a^{-alpha}] du
//     = (1 - a^{1-alpha})/(alpha-1) - a^{-alpha} (a - 1).
double constant_k1_closed(double alpha, double a) {
    return (1.0 - std::pow(a, 1.0 - alpha)) / (alpha - 1.0) -
           std::pow(a, -alpha) * (a - 1.0);
}

}  // namespace

TEST_CASE("retention model derived quantities") {
    const RuinModel m = reference_model(0.7);
    CHECK(m.alpha() == 3.0);
    CHECK(m.claim_scale() == 0.125);
    CHECK(m.a() == 0.7);
    CHECK(m.premium_rate() == 1.0);
    CHECK(m.k() == 2);
    CHECK_FALSE(m.integer_retention());
    CHECK(m.x_min_component() == Approx(0.3).epsilon(1e-14));
    CHECK(m.horizon_T() == Approx(3.8).epsilon(1e-14));

    CHECK(m.claim_min() == Approx(0.5).epsilon(1e-14));
    CHECK(m.walk_spec().support_min() == Approx(-0.5).epsilon(1e-14));
    CHECK(m.walk_spec().mean() == Approx(-0.25).epsilon(1e-12));
    CHECK(m.claim_tail(2.0) == Approx(0.125 / 8.0).epsilon(1e-14));
    CHECK(m.claim_tail(m.claim_quantile(0.37)) == Approx(0.37).epsilon(1e-12));
    RngStream rng(9, 0);
    for (int i = 0; i < 50; ++i) CHECK(m.sample_claim(rng) >= 0.5);

    const RuinModel single(3.0, 0.125, 1.5);
    CHECK(single.k() == 1);
    CHECK(single.x_min_component() == Approx(1.0).epsilon(1e-14));
    CHECK(single.horizon_T() == Approx(4.0).epsilon(1e-14));

    const RuinModel wide(2.2, std::pow(0.5, 2.2), 1.5);
    CHECK(wide.horizon_T() == Approx(4.0).epsilon(1e-14));
    CHECK(wide.claim_min() == Approx(0.5).epsilon(1e-12));

    const RuinModel fine(3.0, 0.125, 0.3);
    CHECK(fine.k() == 4);  // 1/0.3 = 3.33..
    CHECK(fine.x_min_component() == Approx(0.1).epsilon(1e-12));

    const RuinModel half(3.0, 0.125, 0.5);
    CHECK(half.k() == 2);
    CHECK(half.integer_retention());
    const RuinModel tenth(3.0, 0.125, 0.1);
    CHECK(tenth.k() == 10);  // float noise in 1/0.1 must not bump ceil to 11
    CHECK(tenth.integer_retention());

    // Packet count and component floor across the retention range.
    for (int i = 1; i < 500; ++i) {
        const double a = 0.02 * i + 0.003;
        const RuinModel r(3.0, 0.125, a);
        const int k = r.k();
        CHECK(k * a >= 1.0 - 1e-9);
        CHECK((k - 1) * a < 1.0);
        CHECK(r.x_min_component() > 0.0);
        CHECK(r.x_min_component() <= 1.0);
        if (!r.integer_retention()) CHECK(r.x_min_component() < a + 1e-12);
    }

    CHECK_THROWS_AS(RuinModel(3.0, 1.0, 0.7), DomainError);   // E[B] = 1.5 >= premium
    CHECK_THROWS_AS(RuinModel(3.0, 0.125, -1.0), DomainError);
    CHECK_THROWS_AS(RuinModel(3.0, 0.125, 0.7, 0.0), DomainError);
    CHECK_THROWS_AS(RuinModel(3.0, 0.125, 0.7, std::nullopt, 0.0), DomainError);
}

TEST_CASE("ruin probability vanishes when the retention sits below every claim") {
    const RuinModel m = reference_model(0.7);
    // a*x = 0.35 < 0.5 = smallest claim: every increment is -1.
    const MCEstimate est = ruin_prob_mc(m, 0.5, 500, 1e-8, 42);
    CHECK(est.p_hat == 0.0);
    CHECK(est.std_err == 0.0);
    CHECK(est.barrier_B > 0.0);
}

TEST_CASE("ruin estimates decrease along a level grid") {
    // Single-packet retention keeps signal at desk scale: one large claim can
    // cross the level, so p(x) ~ C (L x^{-2}) with hundreds of hits at x = 3.
    const RuinModel m(3.0, 0.125, 1.5);
    const std::vector<double> xs = {3.0, 6.0, 12.0};
    std::vector<double> p;
    for (double x : xs) p.push_back(ruin_prob_mc(m, x, 200000, 1e-8, 777).p_hat);
    CHECK(p[0] > 1e-4);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) CHECK(p[i] >= p[i + 1]);

    // Fractional retention at spec scale: the truncation at a*x caps each step
    // at a*x - 1, so these levels are far into the decayed regime.
    const RuinModel frac = reference_model(0.7);
    std::vector<double> q;
    for (double x : {20.0, 40.0, 80.0})
        q.push_back(ruin_prob_mc(frac, x, 20000, 1e-8, 778).p_hat);
    for (std::size_t i = 0; i + 1 < q.size(); ++i) CHECK(q[i] >= q[i + 1]);
}

TEST_CASE("ruin estimator argument validation") {
    const RuinModel m = reference_model(0.7);
    CHECK_THROWS_AS(ruin_prob_mc(m, -1.0, 100, 1e-8, 1), DomainError);
    CHECK_THROWS_AS(ruin_prob_mc(m, 4.0, 0, 1e-8, 1), DomainError);
    CHECK_THROWS_AS(ruin_prob_mc(m, 4.0, 100, 0.0, 1), DomainError);
    CHECK_THROWS_AS(ruin_prob_mc(m, 4.0, 100, 1e-8, 1, 0), DomainError);
    CHECK_THROWS_AS(ruin_prob_mc(m, 4.0, 100, 1e-8, 1, 1, 3), BudgetExceeded);
}

TEST_CASE("finite-horizon event matches a pre-generated claim-matrix evaluation") {
    const RuinModel m(3.0, 0.125, 1.5);
    const double x = 4.0;
    const double y = 1.5 * x;
    const std::uint64_t n = 50000, seed = 5150;
    const std::uint64_t n_steps =
        static_cast<std::uint64_t>(std::floor(m.horizon_T() * x));
    REQUIRE(n_steps == 16);

    const MCEstimate est = finite_horizon_ruin_mc(m, x, n, seed);

    // Independent evaluation: draw the whole claim matrix up front (same
    // per-path streams), then test the joint event with vector operations.
    std::uint64_t hits = 0;
    for (std::uint64_t p = 0; p < n; ++p) {
        RngStream rng(seed, p);
        std::vector<double> claims(n_steps);
        for (auto& b : claims) b = m.claim_quantile(rng.next_unit());
        const bool below = std::all_of(claims.begin(), claims.end(),
                                       [&](double b) { return b < y; });
        double s = 0.0, runmax = 0.0;
        for (double b : claims) {
            s += b - 1.0;
            runmax = std::max(runmax, s);
        }
        if (below && runmax >= x) ++hits;
    }
    CHECK(est.p_hat == static_cast<double>(hits) / static_cast<double>(n));
    CHECK(est.p_hat > 0.0);
    CHECK(est.barrier_B == 0.0);
    CHECK(est.truncation_error_bound == 0.0);

    // Worker partitioning must not change anything.
    const MCEstimate est3 = finite_horizon_ruin_mc(m, x, n, seed, 3);
    CHECK(est3.p_hat == est.p_hat);
    CHECK(est3.std_err == est.std_err);
}

TEST_CASE("horizon shorter than one step gives exact zero") {
    const RuinModel m(3.0, 0.125, 0.7, 0.2);  // T*x = 0.8 -> zero steps
    const MCEstimate est = finite_horizon_ruin_mc(m, 4.0, 100, 3);
    CHECK(est.p_hat == 0.0);
}

TEST_CASE("finite-horizon estimate sits below the full ruin estimate") {
    const RuinModel m(3.0, 0.125, 1.5);
    const double x = 4.0;
    const MCEstimate fh = finite_horizon_ruin_mc(m, x, 200000, 314);
    const MCEstimate full = ruin_prob_mc(m, x, 200000, 1e-8, 315);
    CHECK(fh.p_hat > 0.0);
    CHECK(fh.p_hat <= full.p_hat + 3.0 * (fh.std_err + full.std_err));
}

TEST_CASE("decomposition recombines certified pieces") {
    const RuinModel m = reference_model(0.7);

    // Hand-derived exponent-2 certificate for the net walk X = B - 1:
    // mu = -1/4, E[(X^+)^2] = E[(X^-)^2] = 1/8, so K = (1 + e^2)/16,
    // L = 1/8, and log y_beta = 3/2 + e^{-2}.
    const MomentSet ms = compute_moments(m.walk_spec(), 2.0);
    CHECK(ms.mu == Approx(-0.25).epsilon(1e-12));
    CHECK(ms.mu_beta_plus == Approx(0.125).epsilon(1e-12));
    CHECK(ms.mu_beta_minus == Approx(0.125).epsilon(1e-12));
    const Theorem1Certificate cert = theorem1_certificate(ms);
    CHECK(cert.K == Approx((1.0 + std::exp(2.0)) / 16.0).epsilon(1e-12));
    CHECK(cert.L == Approx(0.125).epsilon(1e-12));
    CHECK(cert.y_beta == Approx(std::exp(1.5 + std::exp(-2.0))).epsilon(1e-12));

    const double x = 12.0;  // a*x = 8.4 clears y_beta ~ 5.13
    const UpperBoundDecomposition dec = upper_bound_decomposition(m, x, 200000, 888);

    CHECK(dec.beta == Approx(2.0));
    const double steps = std::floor(3.8 * x);
    CHECK(dec.correction ==
          Approx(std::pow(1.0 - 0.125 * std::pow(8.4, -3.0), steps)).epsilon(1e-12));
    CHECK(dec.tail_term ==
          Approx(2.0 * std::exp(-(3.8 * x / 2.0) / 8.4 * std::log(8.4))).epsilon(1e-12));
    CHECK(dec.tail_term ==
          Approx(2.0 * theorem1_bound(cert, 3.8 * x / 2.0, 8.4)).epsilon(1e-12));
    CHECK(dec.rhs() == dec.finite_horizon.p_hat / dec.correction + dec.tail_term);

    const MCEstimate full = ruin_prob_mc(m, x, 100000, 1e-8, 999);
    CHECK(full.p_hat <=
          dec.rhs() + 3.0 * (full.std_err + dec.finite_horizon.std_err / dec.correction));

    // Below the certificate threshold the decomposition must refuse.
    CHECK_THROWS_AS(upper_bound_decomposition(m, 6.0, 100, 1), ThresholdViolation);
    // Exponent overrides: must stay inside (1, alpha); a larger exponent
    // raises the certificate threshold, so x = 12 no longer qualifies.
    CHECK_THROWS_AS(upper_bound_decomposition(m, x, 100, 1, 1, 3.0), DomainError);
    CHECK_THROWS_AS(upper_bound_decomposition(m, x, 100, 1, 1, 1.0), DomainError);
    CHECK_THROWS_AS(upper_bound_decomposition(m, x, 100, 1, 1, 2.5), ThresholdViolation);
    const UpperBoundDecomposition wide = upper_bound_decomposition(m, 60.0, 20000, 31, 1, 2.5);
    CHECK(wide.beta == Approx(2.5));
    CHECK(wide.tail_term > 0.0);
    CHECK(wide.rhs() > 0.0);
}

TEST_CASE("survival correction approaches one from below") {
    const RuinModel m = reference_model(0.7);
    double prev = 0.0;
    for (double x : {12.0, 24.0, 48.0, 96.0}) {
        const double f = horizon_survival_factor(m, x);
        CHECK(f < 1.0);
        CHECK(f > prev);
        prev = f;
    }
    CHECK(prev > 0.999);
}

TEST_CASE("constant estimate matches quadrature for single-packet retention") {
    const double alpha = 3.0, a = 1.5, T = 3.0;
    const double closed = constant_k1_closed(alpha, a);
    CHECK(closed == Approx(7.0 / 54.0).epsilon(1e-14));

    // Independent two-dimensional quadrature of the same integral.
    const double quad = integrate(
        [&](double u) {
            return integrate([&](double x) { return alpha * std::pow(x, -1.0 - alpha); },
                             1.0 + u, a);
        },
        0.0, a - 1.0);
    CHECK(quad == Approx(closed).epsilon(1e-10));

    const RuinModel m(alpha, 0.125, a);
    const MCEstimate est = estimate_constant_C(m, T, 300000, 4242);
    CHECK(est.std_err < 1.2e-3);
    CHECK(std::abs(est.p_hat - closed) <= 3.0 * est.std_err);
}

TEST_CASE("constant estimate does not depend on the horizon") {
    const RuinModel m(3.0, 0.125, 1.5);
    const MCEstimate c1 = estimate_constant_C(m, 1.0 + 1.5 + 0.5, 300000, 11);
    const MCEstimate c2 = estimate_constant_C(m, 1.0 + 1.5 + 2.0, 300000, 12);
    const double sigma = std::hypot(c1.std_err, c2.std_err);
    CHECK(std::abs(c1.p_hat - c2.p_hat) <= 3.0 * sigma);
}

TEST_CASE("constant is strictly positive for fractional 1/a") {
    const RuinModel m = reference_model(0.7);
    const MCEstimate est = estimate_constant_C(m, m.horizon_T(), 1000000, 1337);
    CHECK(est.p_hat > 5.0 * est.std_err);
    CHECK(est.std_err > 0.0);
}

TEST_CASE("constant estimation rejects degenerate setups") {
    const RuinModel half(3.0, 0.125, 0.5);
    CHECK_THROWS_AS(estimate_constant_C(half, 3.0, 100, 1), DegenerateRetention);
    const RuinModel m = reference_model(0.7);
    CHECK_THROWS_AS(estimate_constant_C(m, 1.65, 100, 1), DomainError);  // needs T > 1.7
    CHECK_THROWS_AS(estimate_constant_C(m, 3.0, 0, 1), DomainError);
    CHECK_NOTHROW(estimate_constant_C(m, 1.75, 100, 1));
}

TEST_CASE("packet supremum agrees with dense time grids") {
    const double a = 0.7, T = 3.8, x_min = 0.3;
    const int k = 2, grid_n = 1000;
    const double step = T / grid_n;
    RngStream rng(313, 0);
    int disagreements = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<double> xs(k), us(k);
        for (int i = 0; i < k; ++i) {
            xs[i] = x_min + (a - x_min) * rng.next_unit();
            us[i] = T * rng.next_unit();
        }
        const double jump = reinsure_detail::packet_supremum(xs, us);
        const double sup_cont = std::max(0.0, jump);  // t = 0 contributes 0
        double dense = 0.0;
        for (int j = 0; j <= grid_n; ++j) {
            const double t = j * step;
            double v = -t;
            for (int i = 0; i < k; ++i)
                if (us[i] <= t) v += xs[i];
            dense = std::max(dense, v);
        }
        CHECK(dense <= sup_cont + 1e-12);
        CHECK(sup_cont - dense <= step + 1e-12);
        const bool hit_jump = jump >= 1.0;
        const bool hit_dense = dense >= 1.0;
        if (hit_jump != hit_dense) {
            ++disagreements;  // only possible just above the threshold
            CHECK(sup_cont >= 1.0);
            CHECK(sup_cont <= 1.0 + step + 1e-12);
        }
    }
    CHECK(disagreements <= 30);
}

TEST_CASE("slope of the finite-horizon power law") {
    // Heavier tail (alpha = 2.2) so the asymptotic regime carries signal at
    // desk scale; predicted slope -(alpha-1) k = -1.2 for a = 1.5.
    const RuinModel m(2.2, std::pow(0.5, 2.2), 1.5);
    const double slope = asymptotic_slope_check(m, {8.0, 16.0, 32.0, 64.0}, 200000, 606);
    CHECK(slope == Approx(-1.2).margin(0.35));
}

TEST_CASE("slope check validation and signal requirements") {
    const RuinModel m(3.0, 0.125, 1.5);
    CHECK_THROWS_AS(asymptotic_slope_check(m, {50.0, 100.0, 200.0, 400.0}, 2000, 1),
                    InsufficientSignal);
    CHECK_THROWS_AS(asymptotic_slope_check(m, {10.0, 20.0, 30.0, 40.0}, 100, 1),
                    DomainError);
    CHECK_THROWS_AS(asymptotic_slope_check(m, {8.0, 16.0, 32.0}, 100, 1), DomainError);
    CHECK_THROWS_AS(asymptotic_slope_check(m, {-8.0, 16.0, -32.0, 64.0}, 100, 1),
                    DomainError);
}
