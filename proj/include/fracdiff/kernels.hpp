#pragma once

// Fundamental solutions Z, Y, Z* of the space-time fractional diffusion
// equation, their Fourier symbols, symmetric stable densities, and the
// independent quadrature oracles used to check them.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "fracdiff/errors.hpp"
#include "fracdiff/foxh.hpp"
#include "fracdiff/mittag_leffler.hpp"
#include "fracdiff/parallel.hpp"
#include "fracdiff/quadrature.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff {

struct FracParams {
    double alpha = 2.0;
    double beta = 1.0;
    int d = 1;
    double nu = 1.0;
    double lambda = 1.0;  // noise strength; used only by the SPDE layer

    void validate() const {
        if (!(alpha > 0 && alpha <= 2)) detail::fail(ErrorKind::validation, "alpha must lie in (0,2], got ", alpha);
        if (!(beta > 0.5 && beta < 2)) detail::fail(ErrorKind::validation, "beta must lie in (1/2,2), got ", beta);
        if (d < 1) detail::fail(ErrorKind::validation, "d must be a positive integer, got ", d);
        if (!(nu > 0) || !std::isfinite(nu)) detail::fail(ErrorKind::validation, "nu must be positive, got ", nu);
        if (!std::isfinite(lambda)) detail::fail(ErrorKind::validation, "lambda must be finite");
    }
    int ceil_beta() const { return beta <= 1.0 ? 1 : 2; }
};

enum class KernelKind { Z, Y, Zstar };

inline const char* to_string(KernelKind k) {
    switch (k) {
    case KernelKind::Z: return "Z";
    case KernelKind::Y: return "Y";
    case KernelKind::Zstar: return "Zstar";
    }
    return "?";
}

inline KernelKind parse_kernel(const std::string& s) {
    if (s == "z" || s == "Z") return KernelKind::Z;
    if (s == "y" || s == "Y") return KernelKind::Y;
    if (s == "zstar" || s == "Zstar" || s == "z*" || s == "Z*") return KernelKind::Zstar;
    detail::fail(ErrorKind::validation, "unknown kernel '", s, "' (expected z, y or zstar)");
}

// Surface area of the unit sphere in R^d.
inline double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / gamma_fn(0.5 * d); }

namespace detail {

inline void require_zstar(KernelKind k, const FracParams& p) {
    if (k == KernelKind::Zstar && !(p.beta > 1.0))
        fail(ErrorKind::precondition, "Zstar is defined only for beta in (1,2), got beta=", p.beta);
}

// Power of t in front of the H-function.
inline double time_power(KernelKind k, const FracParams& p) {
    switch (k) {
    case KernelKind::Z: return p.ceil_beta() - 1.0;
    case KernelKind::Y: return p.beta - 1.0;
    case KernelKind::Zstar: return 0.0;
    }
    return 0.0;
}

// H-argument is scale * r^alpha; returns log(scale).
inline double log_argument_scale(const FracParams& p, double t) {
    return -(p.alpha - 1.0) * std::numbers::ln2 - std::log(p.nu) - p.beta * std::log(t);
}

// Limit of r^{-d} H(c r^alpha) as r -> 0 from the zero expansion of H.
inline double origin_limit(const HFunctionSpec& h, int d, double alpha, double log_c, const char* what) {
    const double target = d / alpha;
    const auto terms = zero_expansion(h, 60);
    double acc = 0.0;
    for (const auto& t : terms) {
        if (t.order <= 0) continue;
        if (t.coeffs[0] == 0.0 && t.coeffs[1] == 0.0 && t.coeffs[2] == 0.0) continue;
        const double tol = 1e-9 * std::max(1.0, target);
        if (t.exponent < target - tol)
            fail(ErrorKind::singular, what, " is singular at the origin (leading exponent ", t.exponent, " < d/alpha = ",
                 target, ")");
        if (std::abs(t.exponent - target) <= tol) {
            if (t.coeffs[1] != 0.0 || t.coeffs[2] != 0.0)
                fail(ErrorKind::singular, what, " has a logarithmic singularity at the origin");
            acc += t.coeffs[0];
        }
    }
    return acc * std::exp(target * log_c);
}

} // namespace detail

inline HFunctionSpec kernel_spec(KernelKind k, const FracParams& p) {
    p.validate();
    detail::require_zstar(k, p);
    double top = 1.0;
    switch (k) {
    case KernelKind::Z: top = p.ceil_beta(); break;
    case KernelKind::Y: top = p.beta; break;
    case KernelKind::Zstar: top = 1.0; break;
    }
    return make_spec(2, 1, {{1.0, 1.0}, {top, p.beta}}, {{0.5 * p.d, 0.5 * p.alpha}, {1.0, 1.0}, {1.0, 0.5 * p.alpha}});
}

inline double kernel_argument(const FracParams& p, double t, double r) {
    return std::exp(p.alpha * std::log(r) + detail::log_argument_scale(p, t));
}

inline EvalResult kernel_eval(KernelKind k, const FracParams& p, double t, double r, const EvalConfig& cfg = {}) {
    const auto h = kernel_spec(k, p);
    if (!(t > 0) || !std::isfinite(t)) detail::fail(ErrorKind::validation, "kernel: t must be positive, got ", t);
    if (!(r >= 0) || !std::isfinite(r)) detail::fail(ErrorKind::validation, "kernel: r must be >= 0, got ", r);
    const double log_pref = -0.5 * p.d * std::log(std::numbers::pi) + detail::time_power(k, p) * std::log(t);
    const double log_c = detail::log_argument_scale(p, t);
    const double lx = p.alpha * std::log(r) + log_c;
    if (r == 0.0 || lx < -700.0) {
        EvalResult out;
        out.value = std::exp(log_pref) * detail::origin_limit(h, p.d, p.alpha, log_c, to_string(k));
        out.route = Route::series_zero;
        return out;
    }
    auto res = evaluate(h, std::exp(lx), cfg);
    const double pref = std::exp(log_pref - p.d * std::log(r));
    res.value *= pref;
    res.est_error *= pref;
    return res;
}

inline double z_kernel(const FracParams& p, double t, double r, const EvalConfig& cfg = {}) {
    return kernel_eval(KernelKind::Z, p, t, r, cfg).value;
}
inline double y_kernel(const FracParams& p, double t, double r, const EvalConfig& cfg = {}) {
    return kernel_eval(KernelKind::Y, p, t, r, cfg).value;
}
inline double zstar_kernel(const FracParams& p, double t, double r, const EvalConfig& cfg = {}) {
    return kernel_eval(KernelKind::Zstar, p, t, r, cfg).value;
}

// Fourier symbol of each kernel at |xi|.
inline double fourier_kernel(KernelKind k, const FracParams& p, double t, double xi) {
    p.validate();
    detail::require_zstar(k, p);
    if (!(t > 0)) detail::fail(ErrorKind::validation, "fourier_kernel: t must be positive");
    if (!(xi >= 0)) detail::fail(ErrorKind::validation, "fourier_kernel: |xi| must be >= 0");
    const double x = -0.5 * p.nu * std::pow(t, p.beta) * std::pow(xi, p.alpha);
    switch (k) {
    case KernelKind::Z: return std::pow(t, p.ceil_beta() - 1.0) * mittag_leffler(p.beta, p.ceil_beta(), x);
    case KernelKind::Y: return std::pow(t, p.beta - 1.0) * mittag_leffler(p.beta, p.beta, x);
    case KernelKind::Zstar: return mittag_leffler(p.beta, 1.0, x);
    }
    return 0.0;
}

// Spherically symmetric alpha-stable law with characteristic function exp(-|xi|^alpha).
inline HFunctionSpec stable_spec(double alpha, int d) {
    if (!(alpha > 0 && alpha <= 2)) detail::fail(ErrorKind::validation, "stable: alpha must lie in (0,2]");
    if (d < 1) detail::fail(ErrorKind::validation, "stable: d must be >= 1");
    return make_spec(1, 1, {{1.0, 1.0}}, {{0.5 * d, 0.5 * alpha}, {1.0, 0.5 * alpha}});
}

inline double stable_density(double alpha, int d, double r, const EvalConfig& cfg = {}) {
    const auto h = stable_spec(alpha, d);
    if (!(r >= 0)) detail::fail(ErrorKind::validation, "stable: r must be >= 0");
    const double log_c = -alpha * std::numbers::ln2;  // (r/2)^alpha
    const double lpi = -0.5 * d * std::log(std::numbers::pi);
    if (r == 0.0) return std::exp(lpi) * detail::origin_limit(h, d, alpha, log_c, "stable density");
    return std::exp(lpi - d * std::log(r)) * eval(h, std::exp(alpha * std::log(r) + log_c), cfg);
}

// ---- independent checks ----

struct OracleConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_tail_terms = 80;
};

// d-dimensional radial inverse Fourier transform of the kernel's symbol:
//   f(r) = (2 pi)^{-d/2} r^{1-d/2} int_0^inf F(k) J_{d/2-1}(r k) k^{d/2} dk.
inline QuadResult<double> inverse_fourier_oracle(KernelKind k, const FracParams& p, double t, double r,
                                                 const OracleConfig& oc = {}) {
    p.validate();
    detail::require_zstar(k, p);
    if (!(r > 0)) detail::fail(ErrorKind::validation, "inverse_fourier_oracle: r must be positive");
    const double eta = 0.5 * p.d - 1.0;
    auto radial = [&](double kk) {
        if (kk <= 0.0) return 0.0;
        const double x = r * kk;
        double jk;
        if (p.d == 1) jk = std::sqrt(2.0 / (std::numbers::pi * r)) * std::cos(x);  // J_{-1/2}(x) k^{1/2}
        else jk = bessel_j(eta, x) * std::pow(kk, 0.5 * p.d);
        return fourier_kernel(k, p, t, kk) * jk;
    };
    // Split where the symbol has reached its algebraic tail, aligned to a zero of the Bessel factor.
    const double half = std::numbers::pi / r;
    const double k_shape = std::pow(60.0 / (p.nu * std::pow(t, p.beta)), 1.0 / p.alpha);
    const double phase0 = (0.5 * eta + 0.75) * std::numbers::pi / r;
    const double k0 = phase0 + half * std::ceil(std::max(0.0, k_shape - phase0) / half + 2.0);
    const int panels = static_cast<int>(std::ceil(k0 / half));
    auto head = integrate_adaptive(radial, 0.0, k0, oc.abs_tol, oc.rel_tol, panels, 20000);
    auto tail = integrate_oscillatory_tail(radial, k0, half, oc.abs_tol, oc.rel_tol, oc.max_tail_terms);
    const double scale = std::pow(2.0 * std::numbers::pi, -0.5 * p.d) * std::pow(r, 1.0 - 0.5 * p.d);
    QuadResult<double> out;
    out.value = scale * (head.value + tail.value);
    out.error = scale * (head.error + tail.error);
    out.l1 = scale * (head.l1 + tail.l1);
    out.panels = head.panels + tail.panels;
    out.converged = head.converged && tail.converged;
    if (!out.converged)
        detail::fail(ErrorKind::non_convergence, "inverse_fourier_oracle: quadrature did not converge (error ",
                     out.error, ")");
    return out;
}

// Integral of the kernel over R^d by radial quadrature in log r.
inline QuadResult<double> kernel_mass(KernelKind k, const FracParams& p, double t, double tol = 1e-9,
                                      const EvalConfig& cfg = {}) {
    const auto h = kernel_spec(k, p);
    if (!(t > 0)) detail::fail(ErrorKind::validation, "kernel_mass: t must be positive");
    // With X = c r^alpha, r^{d-1} dr r^{-d} = dX/(alpha X), so the mass is
    // S_{d-1} pi^{-d/2} t^{c0} / alpha * int H(e^v) dv.
    auto f = [&](double v) { return eval(h, std::exp(v), cfg); };
    // Split at log(delta): when alpha = beta the integrand has a kink there.
    auto res = integrate_real_line(f, std::log(radius_scale(h)), 6.0, 6.0, 0.1 * tol, 0.1 * tol);
    const double factor = sphere_area(p.d) * std::pow(std::numbers::pi, -0.5 * p.d) *
                          std::pow(t, detail::time_power(k, p)) / p.alpha;
    res.value *= factor;
    res.error *= factor;
    res.l1 *= factor;
    return res;
}

// Kernel at t = 1 sampled on a log-r grid, with self-similar rescaling
// K(t, r) = t^{c - beta d/alpha} K(1, r t^{-beta/alpha}) for other times.
class RadialProfile {
public:
    RadialProfile(KernelKind k, const FracParams& p, double v_lo = -25.0, double v_hi = 15.0, int n = 1601,
                  const EvalConfig& cfg = {})
        : kind_(k), p_(p), v_lo_(v_lo), v_hi_(v_hi), h_((v_hi - v_lo) / (n - 1)) {
        p.validate();
        detail::require_zstar(k, p);
        std::vector<double> w(n);
        parallel_for(n, [&](std::size_t i) {
            const double v = v_lo + h_ * i;
            w[i] = kernel_eval(k, p, 1.0, std::exp(v), cfg).value * std::exp(p.d * v);
        });
        hi_value_ = w.back();
        lo_value_ = w.front();
        auto slope = [&](double a, double b) {
            if (a == 0.0 || b == 0.0 || (a > 0) != (b > 0)) return 0.0;
            return std::log(std::abs(b / a));
        };
        lo_slope_ = std::max(0.0, slope(w[static_cast<std::size_t>(1.0 / h_)], w[0]) * -1.0);
        hi_slope_ = std::min(0.0, slope(w[n - 1 - static_cast<std::size_t>(1.0 / h_)], w[n - 1]));
        spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(w.begin(), w.end(), v_lo, h_);
    }

    // K(1, e^v) e^{d v}, with exponential extrapolation outside the grid.
    double weighted(double v) const {
        if (v < v_lo_) return lo_value_ * std::exp(lo_slope_ * (v - v_lo_));
        if (v > v_hi_) return hi_value_ * std::exp(hi_slope_ * (v - v_hi_));
        return spline_(v);
    }

    double at(double t, double r) const {
        const double sc = std::pow(t, p_.beta / p_.alpha);
        const double rr = r / sc;
        const double c = detail::time_power(kind_, p_) - p_.beta * p_.d / p_.alpha;
        return std::pow(t, c) * weighted(std::log(rr)) * std::pow(rr, -p_.d);
    }

    double v_lo() const { return v_lo_; }
    double v_hi() const { return v_hi_; }
    const FracParams& params() const { return p_; }

private:
    KernelKind kind_;
    FracParams p_;
    double v_lo_, v_hi_, h_;
    double lo_value_ = 0, hi_value_ = 0, lo_slope_ = 0, hi_slope_ = 0;
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

// Grunwald-Letnikov estimate of the Riemann-Liouville derivative of order q
// at t of a function vanishing at 0, Richardson-extrapolated over h, h/2, h/4.
struct RLEstimate {
    double value;
    double error;
};

inline RLEstimate rl_derivative_numeric(const std::function<double(double)>& f, double t, double q, int base_steps = 256) {
    if (!(q > 0 && q < 1)) detail::fail(ErrorKind::validation, "rl_derivative_numeric: order must lie in (0,1)");
    const int nf = 4 * base_steps;
    const double hf = t / nf;
    std::vector<double> vals(nf + 1, 0.0);
    parallel_for(nf, [&](std::size_t j) { vals[j] = f(t - hf * j); });  // vals[nf] = f(0) = 0
    std::vector<double> w(nf + 1);
    w[0] = 1.0;
    for (int j = 1; j <= nf; ++j) w[j] = w[j - 1] * (j - 1 - q) / j;
    auto gl = [&](int stride) {
        const int n = nf / stride;
        const double h = hf * stride;
        double s = 0.0;
        for (int j = 0; j <= n; ++j) s += w[j] * vals[j * stride];
        return s * std::pow(h, -q);
    };
    const double d1 = gl(4), d2 = gl(2), d4 = gl(1);
    const double r1 = 2 * d2 - d1, r2 = 2 * d4 - d2;
    const double r = (4 * r2 - r1) / 3.0;
    return {r, std::abs(r - r2)};
}

// D^{ceil(beta)-beta} in t of Z(t, r), compared against Y(t, r).
struct RLLink {
    double derivative;
    double y_value;
    double error;
};

inline RLLink rl_link(const FracParams& p, double t, double r, int base_steps = 256, const EvalConfig& cfg = {}) {
    p.validate();
    const double q = p.ceil_beta() - p.beta;
    if (q == 0.0) return {z_kernel(p, t, r, cfg), y_kernel(p, t, r, cfg), 0.0};
    auto f = [&](double s) { return s <= 0.0 ? 0.0 : z_kernel(p, s, r, cfg); };
    const auto est = rl_derivative_numeric(f, t, q, base_steps);
    return {est.value, y_kernel(p, t, r, cfg), est.error};
}

// ---- nonnegativity classification ----

enum class NonnegCase { certified_nonneg, certified_conditional, unknown };

inline const char* to_string(NonnegCase c) {
    switch (c) {
    case NonnegCase::certified_nonneg: return "certified_nonneg";
    case NonnegCase::certified_conditional: return "certified_conditional";
    case NonnegCase::unknown: return "unknown";
    }
    return "?";
}

struct NonnegClass {
    NonnegCase status = NonnegCase::unknown;  // for Z and Y
    bool zstar_certified = false;
    std::string regime;
};

inline NonnegClass nonnegativity_case(const FracParams& p) {
    p.validate();
    NonnegClass c;
    if (p.beta <= 1.0) {
        c.status = NonnegCase::certified_nonneg;
        c.regime = "beta in (1/2,1], any d";
    } else if (p.alpha == 2.0 && (p.d == 2 || p.d == 3)) {
        c.status = NonnegCase::certified_nonneg;
        c.regime = "beta in (1,2), alpha=2, d in {2,3}";
    } else if (p.d == 1 && p.alpha >= p.beta) {
        c.status = NonnegCase::certified_nonneg;
        c.zstar_certified = true;
        c.regime = "beta in (1,2), d=1, alpha in [beta,2]";
    } else if (p.d == 1 && p.alpha <= 1.0) {
        // Known from earlier one-dimensional work, not from the theorems implemented here.
        c.status = NonnegCase::certified_conditional;
        c.regime = "beta in (1,2), d=1, alpha in (0,1] (external result)";
    } else {
        c.regime = "not covered";
    }
    return c;
}

// ---- envelope bound ----

// 1 / (|x|^{alpha+d} + |x|^{d - zeta alpha})
inline double theta_weight(double alpha, int d, double zeta, double x) {
    const double ax = std::abs(x);
    return 1.0 / (std::pow(ax, alpha + d) + std::pow(ax, d - zeta * alpha));
}

struct Envelope {
    double zeta = 0.0;
    double constant = 0.0;  // max |Y(1,y)| / Theta(y) over the calibration grid
    double argmax = 0.0;
    int grid_points = 0;
};

inline void check_zeta(const FracParams& p, double zeta) {
    const double hi = std::min(p.d / p.alpha, 2.0);
    if (!(zeta > 0 && zeta < hi))
        detail::fail(ErrorKind::validation, "zeta must lie in (0, min(d/alpha,2)) = (0,", hi, "), got ", zeta);
}

inline Envelope calibrate_envelope(const FracParams& p, double zeta, int points = 121, double y_lo = 1e-6,
                                   double y_hi = 1e6, const EvalConfig& cfg = {}) {
    p.validate();
    check_zeta(p, zeta);
    std::vector<double> ratio(points);
    parallel_for(points, [&](std::size_t i) {
        const double y = y_lo * std::pow(y_hi / y_lo, double(i) / (points - 1));
        ratio[i] = std::abs(y_kernel(p, 1.0, y, cfg)) / theta_weight(p.alpha, p.d, zeta, y);
    });
    Envelope e;
    e.zeta = zeta;
    e.grid_points = points;
    for (int i = 0; i < points; ++i)
        if (ratio[i] > e.constant) {
            e.constant = ratio[i];
            e.argmax = y_lo * std::pow(y_hi / y_lo, double(i) / (points - 1));
        }
    return e;
}

inline double envelope_bound(const FracParams& p, const Envelope& env, double t, double r) {
    check_zeta(p, env.zeta);
    const double sc = std::pow(t, p.beta / p.alpha);
    return env.constant * std::pow(t, p.beta - 1.0 - p.beta * p.d / p.alpha) *
           theta_weight(p.alpha, p.d, env.zeta, r / sc);
}

inline double envelope_bound(const FracParams& p, double zeta, double t, double r) {
    return envelope_bound(p, calibrate_envelope(p, zeta), t, r);
}

// ---- initial data and Duhamel ----

// Values on the uniform one-dimensional grid x0 + i*dx.
struct SampledProfile {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<double> values;
};

struct InitialData {
    enum class Kind { constant, sampled } kind = Kind::constant;
    std::vector<double> constants;        // u_0 [, u_1]
    std::vector<SampledProfile> sampled;  // u_0 [, u_1]

    static InitialData constant(double u0) { return {Kind::constant, {u0}, {}}; }
    static InitialData constant_pair(double u0, double u1) { return {Kind::constant, {u0, u1}, {}}; }
    static InitialData from_samples(std::vector<SampledProfile> s) { return {Kind::sampled, {}, std::move(s)}; }

    int count() const { return kind == Kind::constant ? static_cast<int>(constants.size()) : static_cast<int>(sampled.size()); }
};

struct FieldValue {
    double value = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline void check_initial(const FracParams& p, const InitialData& init) {
    if (init.count() != p.ceil_beta())
        fail(ErrorKind::validation, "initial data: expected ", p.ceil_beta(), " functions for beta=", p.beta, ", got ",
             init.count());
    if (init.kind == InitialData::Kind::sampled) {
        if (p.d != 1) fail(ErrorKind::validation, "sampled initial data are supported for d=1 only");
        for (const auto& s : init.sampled) {
            if (s.values.size() < 2 || !(s.dx > 0)) fail(ErrorKind::validation, "sampled initial data: bad grid");
            for (double v : s.values)
                if (!std::isfinite(v)) fail(ErrorKind::validation, "sampled initial data must be finite");
        }
    }
}

// Trapezoid convolution of a sampled profile with a kernel in d = 1.
inline double convolve_samples(const SampledProfile& s, KernelKind k, const FracParams& p, double t, double x,
                               const EvalConfig& cfg) {
    const std::size_t n = s.values.size();
    std::vector<double> terms(n);
    parallel_for(n, [&](std::size_t i) {
        if (s.values[i] == 0.0) return;
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        const double y = s.x0 + s.dx * i;
        terms[i] = w * s.values[i] * kernel_eval(k, p, t, std::abs(x - y), cfg).value;
    });
    double acc = 0.0;
    for (double v : terms) acc += v;
    return acc * s.dx;
}

} // namespace detail

// The part of the solution driven by the initial data.
inline FieldValue j0_field(const FracParams& p, const InitialData& init, double t, double x,
                           const EvalConfig& cfg = {}) {
    p.validate();
    detail::check_initial(p, init);
    if (!(t > 0)) detail::fail(ErrorKind::validation, "j0_field: t must be positive");
    FieldValue out;
    if (p.ceil_beta() == 2 && !nonnegativity_case(p).zstar_certified)
        out.warnings.push_back("Zstar is required for beta > 1 but its nonnegativity is not certified here");
    if (init.kind == InitialData::Kind::constant) {
        // Masses: int Z = t^{ceil(beta)-1}, int Zstar = 1.
        out.value = p.ceil_beta() == 1 ? init.constants[0] : init.constants[0] + t * init.constants[1];
        return out;
    }
    if (p.ceil_beta() == 1) {
        out.value = detail::convolve_samples(init.sampled[0], KernelKind::Z, p, t, x, cfg);
    } else {
        out.value = detail::convolve_samples(init.sampled[1], KernelKind::Z, p, t, x, cfg) +
                    detail::convolve_samples(init.sampled[0], KernelKind::Zstar, p, t, x, cfg);
    }
    return out;
}

// J0 plus the space-time convolution of a forcing term with Y (d = 1).
// Uses Y(tau, y) = tau^{beta-1-beta/alpha} Y(1, y tau^{-beta/alpha}) and tau = u^{1/beta}.
inline FieldValue duhamel_solve(const FracParams& p, const InitialData& init,
                                const std::function<double(double, double)>& forcing, double t, double x,
                                double tol = 1e-8, const EvalConfig& cfg = {}) {
    auto out = j0_field(p, init, t, x, cfg);
    if (!forcing) return out;
    if (p.d != 1) detail::fail(ErrorKind::validation, "duhamel_solve: forcing is supported for d=1 only");
    const RadialProfile prof(KernelKind::Y, p, -25.0, 12.0, 1501, cfg);
    auto inner = [&](double u) {
        const double tau = std::pow(u, 1.0 / p.beta);
        const double s = t - tau;
        const double spread = std::pow(u, 1.0 / p.alpha);
        auto g = [&](double v) {
            const double w = std::exp(v);
            return prof.weighted(v) * (forcing(s, x - spread * w) + forcing(s, x + spread * w));
        };
        return integrate_adaptive(g, prof.v_lo(), prof.v_hi(), 0.1 * tol, 0.1 * tol, 16).value;
    };
    const auto outer = integrate_adaptive(inner, 0.0, std::pow(t, p.beta), tol, tol, 4);
    if (!outer.converged) detail::fail(ErrorKind::non_convergence, "duhamel_solve: time quadrature did not converge");
    out.value += outer.value / p.beta;
    return out;
}

} // namespace fracdiff
