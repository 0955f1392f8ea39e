#pragma once

// Path simulation for the supremum tail P(M(y) > x) with a certified
// truncation-error budget.
//
// Each path runs the truncated walk until it either exceeds the largest
// requested level (success) or falls a barrier B below its own running
// maximum (declared failure).  Restarting the exponential bound at the
// running maximum shows a declared-failure path still exceeds the level with
// probability at most e^{-gamma(y) B}, so B = ceil(log(1/eps)/gamma(y)) keeps
// the one-sided bias of p_hat within eps.
//
// Every path owns the counter-based stream (seed, path index), which makes
// the estimate bit-identical for any worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "suptail/errors.hpp"
#include "suptail/lundberg.hpp"
#include "suptail/rng.hpp"

namespace suptail {

struct MCEstimate {
    double p_hat = 0;
    double std_err = 0;
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
    double barrier_B = 0;
    double truncation_error_bound = 0;
    double wall_time_s = 0;
};

namespace mc_detail {

// Runs one path and returns its supremum, which settles every level at or
// below x_max: the path succeeds for level x exactly when the supremum
// exceeds x.  A success for x_max stops the walk early; so does a drop of B
// below the running maximum.
inline double path_supremum(const DistributionSpec& spec, double y, double x_max, double B,
                            std::uint64_t step_cap, RngStream& rng) {
    double s = 0.0, runmax = 0.0;
    std::uint64_t steps = 0;
    while (runmax <= x_max && s >= runmax - B) {
        if (steps >= step_cap)
            throw BudgetExceeded("path exceeded " + std::to_string(step_cap) +
                                 " steps without resolving; drift may be too close to 0");
        s += std::min(spec.sample(rng), y);
        ++steps;
        if (s > runmax) runmax = s;
    }
    return runmax;
}

// Counts paths satisfying a Bernoulli predicate, one counter-based stream per
// path, with the same worker-invariant partitioning as the grid estimator.
template <class Pred>
std::uint64_t count_hits(std::uint64_t n_paths, std::uint64_t seed, int workers,
                         Pred&& pred) {
    const int W = static_cast<int>(std::min<std::uint64_t>(std::max(workers, 1), n_paths));
    std::vector<std::uint64_t> hits(W, 0);
    std::vector<std::exception_ptr> failures(W);
    auto run_range = [&](int w, std::uint64_t lo, std::uint64_t hi) {
        try {
            for (std::uint64_t p = lo; p < hi; ++p) {
                RngStream rng(seed, p);
                if (pred(rng)) ++hits[w];
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };
    if (W == 1) {
        run_range(0, 0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(W);
        for (int w = 0; w < W; ++w)
            pool.emplace_back(run_range, w, n_paths * w / W, n_paths * (w + 1) / W);
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    return total;
}

}  // namespace mc_detail

inline std::vector<MCEstimate> estimate_sup_tail_grid(const TruncatedWalkModel& model,
                                                      const std::vector<double>& xs,
                                                      std::uint64_t n_paths, double eps,
                                                      std::uint64_t seed, int workers = 1,
                                                      std::uint64_t step_cap = 1000000000ull) {
    if (xs.empty()) throw DomainError("estimate_sup_tail_grid: no levels given");
    if (n_paths == 0) throw DomainError("estimate_sup_tail_grid: n_paths must be positive");
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("estimate_sup_tail_grid: eps must lie in (0,1)");
    if (workers < 1) throw DomainError("estimate_sup_tail_grid: workers must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    const double gamma = model.gamma();
    const double B = std::ceil(std::log(1.0 / eps) / gamma);
    const double trunc_bound = std::exp(-gamma * B);
    const double x_max = *std::max_element(xs.begin(), xs.end());
    const DistributionSpec& spec = model.spec();
    const double y = model.y();

    const int W = static_cast<int>(std::min<std::uint64_t>(workers, n_paths));
    std::vector<std::vector<std::uint64_t>> counts(W, std::vector<std::uint64_t>(xs.size(), 0));
    std::vector<std::exception_ptr> failures(W);

    auto run_range = [&](int w, std::uint64_t lo, std::uint64_t hi) {
        try {
            auto& local = counts[w];
            for (std::uint64_t p = lo; p < hi; ++p) {
                RngStream rng(seed, p);
                const double sup = mc_detail::path_supremum(spec, y, x_max, B, step_cap, rng);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    if (sup > xs[i]) ++local[i];
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };

    if (W == 1) {
        run_range(0, 0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(W);
        for (int w = 0; w < W; ++w) {
            const std::uint64_t lo = n_paths * w / W, hi = n_paths * (w + 1) / W;
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<MCEstimate> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::uint64_t hits = 0;
        for (int w = 0; w < W; ++w) hits += counts[w][i];
        MCEstimate& e = out[i];
        e.p_hat = static_cast<double>(hits) / static_cast<double>(n_paths);
        e.std_err = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n_paths));
        e.n_paths = n_paths;
        e.seed = seed;
        e.barrier_B = B;
        e.truncation_error_bound = trunc_bound;
        e.wall_time_s = wall;
    }
    return out;
}

inline MCEstimate estimate_sup_tail(const TruncatedWalkModel& model, double x,
                                    std::uint64_t n_paths, double eps, std::uint64_t seed,
                                    int workers = 1,
                                    std::uint64_t step_cap = 1000000000ull) {
    return estimate_sup_tail_grid(model, {x}, n_paths, eps, seed, workers, step_cap)[0];
}

}  // namespace suptail
