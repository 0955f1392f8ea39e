#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "suptail/errors.hpp"

namespace suptail {

struct QuadOptions {
    double abs_tol = 1e-12;
    // Relative floor so integrals much larger than 1 terminate at machine precision
    // instead of chasing an absolute tolerance below one ulp.
    double rel_tol = 1e-14;
    int max_segments = 4000;
};

namespace quad_detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15 tables).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a = 0, b = 0, value = 0, error = 0;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F&& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    double resabs = std::fabs(resk);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    // |K - G| tracks the coarse rule's error, which dominates the Kronrod error:
    // a conservative per-panel estimate. Floored at round-off level.
    p.error = std::max(std::fabs((resk - resg) * h),
                       std::fabs(resabs * h) * 5e-16);
    return p;
}

}  // namespace quad_detail

// Adaptive Gauss-Kronrod integration of f over [a, b]. Optional interior
// breakpoints seed the initial panel set (useful when the integrand has known
// structure, e.g. endpoint peaks with a flat trough between them).
template <class F>
double integrate(F&& f, double a, double b, const QuadOptions& opts = {},
                 std::span<const double> breakpoints = {}) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw DomainError("integrate: empty interval");
    }
    std::vector<double> edges{a};
    for (double t : breakpoints)
        if (t > a && t < b) edges.push_back(t);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::priority_queue<quad_detail::Panel> heap;
    double total = 0, err = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto p = quad_detail::gk15(f, edges[i], edges[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int n_panels = static_cast<int>(heap.size());
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
        if (n_panels >= opts.max_segments)
            throw QuadratureFailure("integrate: tolerance not reached after " +
                                    std::to_string(n_panels) + " panels");
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureFailure("integrate: panel underflow before tolerance met");
        auto left = quad_detail::gk15(f, worst.a, mid);
        auto right = quad_detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n_panels;
    }
    return total;
}

// Integral of f over [a, inf) for integrands that eventually decay at least
// geometrically on doubling panels (polynomial decay x^-p with p > 1, or faster).
// Panels [x, 2x] are added until a geometric-extrapolation bound on the remainder
// drops below tolerance.
template <class F>
double integrate_to_inf(F&& f, double a, const QuadOptions& opts = {}) {
    if (a < 0) throw DomainError("integrate_to_inf: negative start not supported");
    QuadOptions panel_opts = opts;
    panel_opts.abs_tol = opts.abs_tol * 0.25;

    double b = std::max(1.0, 2.0 * a);
    double total = integrate(f, a, b, panel_opts);
    double prev_seg = std::fabs(total);
    const int max_doublings = 1200;
    for (int i = 0; i < max_doublings; ++i) {
        const double seg = integrate(f, b, 2.0 * b, panel_opts);
        total += seg;
        b *= 2.0;
        const double seg_abs = std::fabs(seg);
        // Remainder estimate: geometric continuation with observed panel ratio.
        double ratio = prev_seg > 0 ? seg_abs / prev_seg : 0.0;
        ratio = std::min(ratio, 0.98);
        const double remainder = seg_abs * ratio / (1.0 - ratio);
        prev_seg = seg_abs;
        if (remainder < std::max(opts.abs_tol * 0.25, opts.rel_tol * std::fabs(total)) &&
            seg_abs < std::max(opts.abs_tol * 0.25, opts.rel_tol * std::fabs(total)))
            return total;
    }
    throw QuadratureFailure("integrate_to_inf: no convergence after doubling panels");
}

}  // namespace suptail
