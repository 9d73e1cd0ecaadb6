#pragma once

// Adaptive Gauss-Kronrod driver with a global error budget, and an
// oscillatory tail integrator that accelerates per-half-period sums.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_sum.h>

#include "fracdiff/errors.hpp"

namespace fracdiff {

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    double l1 = 0.0;  // integral of |f|, the roundoff scale
    int panels = 0;
    bool converged = false;
};

namespace detail {

template <class T>
struct Panel {
    double a, b;
    T value;
    double error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk_panel(F& f, double a, double b) {
    double err = 0.0, l1 = 0.0;
    const T v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
    return {a, b, v, err, l1};
}

} // namespace detail

// Integrates f over [a, b] by bisecting the panel with the largest error
// until the summed error estimate meets max(abs_tol, rel_tol*|I|) or hits
// the roundoff floor set by the integral of |f|.
template <class F>
auto integrate_adaptive(F f, double a, double b, double abs_tol, double rel_tol, int initial_panels = 1,
                        int max_panels = 4000) {
    using T = decltype(f(a));
    QuadResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double err = 0.0, l1 = 0.0;
    const int n0 = std::max(1, initial_panels);
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        auto p = detail::gk_panel<T>(f, lo, hi);
        total += p.value;
        err += p.error;
        l1 += p.l1;
        heap.push(p);
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (true) {
        const double target = std::max(abs_tol, rel_tol * std::abs(total));
        if (err <= target) {
            out.converged = true;
            break;
        }
        if (err <= 50.0 * eps * l1) {  // roundoff-limited; further bisection cannot help
            out.converged = true;
            break;
        }
        if (static_cast<int>(heap.size()) >= max_panels) break;
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gk_panel<T>(f, worst.a, mid);
        auto right = detail::gk_panel<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        if (!(std::isfinite(err))) break;
    }
    // Recompute sums from scratch to shed drift from the running updates.
    T v{};
    double e = 0.0, m = 0.0;
    out.panels = static_cast<int>(heap.size());
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        m += heap.top().l1;
        heap.pop();
    }
    out.value = v;
    out.error = std::max(e, 10.0 * eps * m);
    out.l1 = m;
    return out;
}

// Integral over the whole real line of a function that decays in both
// directions: a central window split at `center` (which may be a kink), then
// fixed-width chunks added outward on each side until two consecutive chunks
// are negligible.
template <class F>
QuadResult<double> integrate_real_line(F f, double center, double half_width, double chunk, double abs_tol,
                                       double rel_tol, int max_chunks = 60) {
    auto out = integrate_adaptive(f, center - half_width, center, 0.1 * abs_tol, 0.1 * rel_tol, 2);
    const auto right = integrate_adaptive(f, center, center + half_width, 0.1 * abs_tol, 0.1 * rel_tol, 2);
    out.value += right.value;
    out.error += right.error;
    out.l1 += right.l1;
    out.panels += right.panels;
    out.converged = out.converged && right.converged;
    for (int side = -1; side <= 1; side += 2) {
        double edge = center + side * half_width;
        int quiet = 0;
        for (int k = 0; k < max_chunks && quiet < 2; ++k) {
            const double a = side < 0 ? edge - chunk : edge;
            const double b = side < 0 ? edge : edge + chunk;
            auto r = integrate_adaptive(f, a, b, 0.1 * abs_tol, 0.1 * rel_tol, 2);
            out.value += r.value;
            out.error += r.error;
            out.l1 += r.l1;
            out.panels += r.panels;
            out.converged = out.converged && r.converged;
            edge = side < 0 ? a : b;
            quiet = r.l1 <= 0.01 * std::max(abs_tol, rel_tol * std::abs(out.value)) ? quiet + 1 : 0;
        }
        if (quiet < 2) out.converged = false;
    }
    return out;
}

// Sum of a series whose terms alternate and decay slowly, accelerated by the
// Levin u-transform. Returns the accelerated sum and its error estimate.
struct SeriesAccel {
    double sum = 0.0;
    double error = 0.0;
};

inline SeriesAccel levin_sum(const std::vector<double>& terms) {
    SeriesAccel out;
    if (terms.empty()) return out;
    if (terms.size() < 3) {
        for (double t : terms) out.sum += t;
        out.error = std::abs(terms.back());
        return out;
    }
    gsl_sum_levin_u_workspace* w = gsl_sum_levin_u_alloc(terms.size());
    double sum = 0.0, abserr = 0.0;
    gsl_sum_levin_u_accel(terms.data(), terms.size(), w, &sum, &abserr);
    gsl_sum_levin_u_free(w);
    out.sum = sum;
    out.error = abserr;
    return out;
}

// Integral of f over [a, inf) where f oscillates with half-period close to
// `half_period` beyond a. Successive half-period integrals are accelerated.
template <class F>
QuadResult<double> integrate_oscillatory_tail(F f, double a, double half_period, double abs_tol, double rel_tol,
                                              int max_terms = 60) {
    QuadResult<double> out;
    std::vector<double> terms;
    double plain = 0.0, l1 = 0.0;
    double prev_accel = 0.0;
    int stable = 0;
    for (int k = 0; k < max_terms; ++k) {
        const double lo = a + k * half_period;
        auto r = integrate_adaptive(f, lo, lo + half_period, 0.1 * abs_tol, 0.1 * rel_tol);
        terms.push_back(r.value);
        plain += r.value;
        l1 += r.l1;
        out.panels += r.panels;
        if (std::abs(r.value) < 1e-3 * abs_tol && r.l1 < 1e-3 * abs_tol) {
            out.value = plain;
            out.error = std::abs(r.value);
            out.l1 = l1;
            out.converged = true;
            return out;
        }
        if (terms.size() >= 8) {
            auto acc = levin_sum(terms);
            const double tol = std::max(abs_tol, rel_tol * std::abs(acc.sum));
            if (std::abs(acc.sum - prev_accel) < tol && acc.error < 10.0 * tol) {
                if (++stable >= 2) {
                    out.value = acc.sum;
                    out.error = std::max(acc.error, std::abs(acc.sum - prev_accel));
                    out.l1 = l1;
                    out.converged = true;
                    return out;
                }
            } else {
                stable = 0;
            }
            prev_accel = acc.sum;
        }
    }
    auto acc = levin_sum(terms);
    out.value = acc.sum;
    out.error = std::max(acc.error, std::abs(acc.sum - prev_accel));
    out.l1 = l1;
    out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(acc.sum));
    return out;
}

} // namespace fracdiff
