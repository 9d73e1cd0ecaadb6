#pragma once

// Two-parameter Mittag-Leffler function E_{rho,mu}(z) = sum z^n / Gamma(rho n + mu).
// Small arguments use the power series. Larger arguments with -z in the sector
// |arg(-z)| < (2 - rho) pi/2 go through the Fox H representation
// E_{rho,mu}(-w) = H^{1,1}_{1,2}[w].

#include <cmath>
#include <complex>
#include <limits>

#include "fracdiff/errors.hpp"
#include "fracdiff/foxh.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff {

struct MittagLefflerParams {
    double rho = 1.0;
    double mu = 1.0;

    void validate() const {
        if (!(rho > 0) || !std::isfinite(rho))
            detail::fail(ErrorKind::validation, "mittag_leffler: rho must be positive, got ", rho);
        if (!std::isfinite(mu)) detail::fail(ErrorKind::validation, "mittag_leffler: mu must be finite");
    }
};

struct MittagLefflerConfig {
    double switch_radius = 5.0;  // series below, H route above (negative real axis)
    double rel_tol = 1e-12;     // target used to choose between series and H route
    double accept_tol = 1e-9;   // series result still returned when no H route applies
    int max_terms = 200000;
};

struct MLSeries {
    cplx value;
    double est_error;  // absolute, from rounding in the partial sums
    int terms;
};

// Power series with compensated summation. The error estimate is the
// rounding bound eps * sum |t_n| (4 + |log t_n| + |log Gamma|) plus the first
// neglected term.
inline MLSeries mittag_leffler_series(const MittagLefflerParams& prm, cplx z, int max_terms = 200000) {
    prm.validate();
    if (z == cplx(0.0)) return {rgamma(prm.mu), 0.0, 1};
    const double lr = std::log(std::abs(z));
    const double ph = std::arg(z);
    cplx sum = 0.0, comp = 0.0;
    double abs_sum = 0.0, last = 0.0;
    int small = 0, n = 0;
    for (; n < max_terms; ++n) {
        const double g = prm.rho * n + prm.mu;
        double mag = 0.0, lt_used = 0.0;
        cplx t = 0.0;
        if (!detail::is_nonpositive_integer(g)) {
            int sg = 1;
            const double lg = log_gamma(g, &sg);
            const double lt = n * lr - lg;
            if (lt > 709.0) detail::fail(ErrorKind::non_convergence, "mittag_leffler: series term overflow at n=", n);
            mag = std::exp(lt);
            lt_used = std::abs(lt) + std::abs(lg);
            t = std::polar(mag, n * ph) * double(sg);
        }
        const cplx s2 = sum + t;
        // Neumaier compensation per component
        auto fix = [](double a, double b, double s) {
            return std::abs(a) >= std::abs(b) ? (a - s) + b : (b - s) + a;
        };
        comp += cplx(fix(sum.real(), t.real(), s2.real()), fix(sum.imag(), t.imag(), s2.imag()));
        sum = s2;
        abs_sum += mag * (4.0 + std::abs(lt_used));
        last = mag;
        // Terms decay monotonically once rho*n exceeds log|z| growth; require a run of negligible terms.
        const bool past_peak = n * prm.rho > 2.0 + std::pow(std::abs(z), 1.0 / prm.rho);
        if (past_peak && mag <= 1e-18 * std::abs(sum + comp)) {
            if (++small >= 3) break;
        } else if (past_peak && mag == 0.0 && abs_sum == 0.0) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    const cplx v = sum + comp;
    if (n >= max_terms)
        detail::fail(ErrorKind::non_convergence, "mittag_leffler: series did not converge in ", max_terms, " terms");
    const double err = std::numeric_limits<double>::epsilon() * abs_sum + last;
    return {v, err, n + 1};
}

// E_{rho,mu}(-x) for x > 0 through the H representation.
inline EvalResult mittag_leffler_hroute(const MittagLefflerParams& prm, double x, const EvalConfig& cfg = {}) {
    prm.validate();
    if (!(x > 0)) detail::fail(ErrorKind::validation, "mittag_leffler_hroute: x must be positive");
    if (!(prm.rho < 2.0))
        detail::fail(ErrorKind::precondition, "mittag_leffler_hroute: requires rho < 2 (a* = 2 - rho > 0)");
    return evaluate(mittag_leffler_spec(prm.rho, prm.mu), x, cfg);
}

inline cplx mittag_leffler(const MittagLefflerParams& prm, cplx z, const MittagLefflerConfig& cfg = {}) {
    prm.validate();
    if (z == cplx(0.0)) return rgamma(prm.mu);
    const bool negative_real = z.imag() == 0.0 && z.real() < 0.0;
    const double az = std::abs(z);
    if (negative_real && prm.rho < 2.0) {
        if (az <= cfg.switch_radius) {
            const auto s = mittag_leffler_series(prm, z, cfg.max_terms);
            if (s.est_error <= cfg.rel_tol * std::abs(s.value)) return s.value.real();
        }
        EvalConfig hc;
        hc.rel_tol = std::max(cfg.rel_tol, 1e-13);
        return mittag_leffler_hroute(prm, -z.real(), hc).value;
    }
    // Off the real axis the H route takes w = -z inside the sector |arg w| < (2 - rho) pi/2,
    // kept 0.02 rad away from its edge so the contour integrand still decays.
    const bool h_route = prm.rho < 2.0 && std::abs(std::arg(-z)) < 0.5 * (2.0 - prm.rho) * std::numbers::pi - 0.02;
    auto via_h = [&] {
        EvalConfig hc;
        hc.rel_tol = std::max(cfg.rel_tol, 1e-13);
        return contour_complex(mittag_leffler_spec(prm.rho, prm.mu), -z, hc);
    };
    if (h_route && az > cfg.switch_radius) return via_h();
    const auto s = mittag_leffler_series(prm, z, cfg.max_terms);
    const bool accurate = s.est_error <= cfg.rel_tol * std::abs(s.value) ||
                          s.est_error <= 1e3 * std::numeric_limits<double>::epsilon() * std::abs(s.value);
    if (!accurate && h_route) return via_h();
    if (!accurate && !(s.est_error <= cfg.accept_tol * std::abs(s.value)))
        detail::fail(ErrorKind::non_convergence, "mittag_leffler: series loses accuracy at |z|=", az,
                     " (estimated relative error ", s.est_error / std::abs(s.value), ") and no H route applies");
    if (z.imag() == 0.0) return s.value.real();
    return s.value;
}

inline double mittag_leffler(double rho, double mu, double x, const MittagLefflerConfig& cfg = {}) {
    return mittag_leffler(MittagLefflerParams{rho, mu}, cplx(x, 0.0), cfg).real();
}

// log E_{rho,mu}(x) for x >= 0 large enough that the value may overflow.
inline double log_mittag_leffler_positive(double rho, double mu, double x, int max_terms = 2000000) {
    MittagLefflerParams{rho, mu}.validate();
    if (!(x >= 0)) detail::fail(ErrorKind::validation, "log_mittag_leffler_positive: x must be >= 0");
    if (x == 0.0) {
        const double r = rgamma(mu);
        if (!(r > 0)) detail::fail(ErrorKind::precondition, "log_mittag_leffler_positive: 1/Gamma(mu) <= 0");
        return std::log(r);
    }
    // log-sum-exp over the terms, anchored at the running maximum.
    const double lx = std::log(x);
    double mx = -std::numeric_limits<double>::infinity();
    double acc = 0.0;  // sum of sign * exp(lt - mx)
    int small = 0;
    for (int n = 0; n < max_terms; ++n) {
        const double g = rho * n + mu;
        if (detail::is_nonpositive_integer(g)) continue;
        int sg = 1;
        const double lt = n * lx - log_gamma(g, &sg);
        if (lt > mx) {
            acc = acc * std::exp(mx - lt) + sg;
            mx = lt;
        } else {
            acc += sg * std::exp(lt - mx);
        }
        if (lt < mx - 45.0 && n * rho > std::pow(x, 1.0 / rho)) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
    }
    if (!(acc > 0)) detail::fail(ErrorKind::precondition, "log_mittag_leffler_positive: nonpositive sum");
    return mx + std::log(acc);
}

} // namespace fracdiff
