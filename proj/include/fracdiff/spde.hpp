#pragma once

// Noise models, Dalang-type conditions, existence certificates and moment
// bounds for the stochastic fractional diffusion equation with Gaussian noise
// that is Riesz or white in space.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_hyperg.h>

#include "fracdiff/errors.hpp"
#include "fracdiff/kernels.hpp"
#include "fracdiff/mittag_leffler.hpp"
#include "fracdiff/parallel.hpp"
#include "fracdiff/quadrature.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff {

using Rational = boost::multiprecision::cpp_rational;

// ---- noise ----

enum class TemporalKind { dirac, riesz_time, custom };
enum class SpatialKind { white, riesz };

inline const char* to_string(TemporalKind k) {
    switch (k) {
    case TemporalKind::dirac: return "dirac";
    case TemporalKind::riesz_time: return "riesz_time";
    case TemporalKind::custom: return "custom";
    }
    return "?";
}
inline const char* to_string(SpatialKind k) { return k == SpatialKind::white ? "white" : "riesz"; }

struct NoiseSpec {
    TemporalKind temporal = TemporalKind::dirac;
    double time_exponent = 0.5;                   // gamma(t) = |t|^{-time_exponent} for riesz_time
    std::function<double(double)> gamma;          // custom covariance in time
    std::function<double(double)> gamma_integral; // t -> int_0^t gamma
    std::string custom_label = "custom";
    SpatialKind spatial = SpatialKind::white;
    double kappa = 0.0;      // Lambda(x) = |x|^{-kappa} for riesz
    double lambda_sq = 1.0;  // multiplies Lambda

    static NoiseSpec white_noise() { return {}; }
    static NoiseSpec riesz(double kappa, TemporalKind tk = TemporalKind::dirac, double time_exponent = 0.5) {
        NoiseSpec n;
        n.spatial = SpatialKind::riesz;
        n.kappa = kappa;
        n.temporal = tk;
        n.time_exponent = time_exponent;
        return n;
    }
    NoiseSpec& with_custom_time(std::function<double(double)> g, std::function<double(double)> gi,
                                std::string label = "custom") {
        temporal = TemporalKind::custom;
        gamma = std::move(g);
        gamma_integral = std::move(gi);
        custom_label = std::move(label);
        return *this;
    }

    void validate(int d) const {
        if (!(lambda_sq > 0) || !std::isfinite(lambda_sq))
            detail::fail(ErrorKind::validation, "noise: lambda^2 must be positive");
        if (spatial == SpatialKind::riesz && !(kappa > 0 && kappa < d))
            detail::fail(ErrorKind::validation, "noise: Riesz exponent kappa must lie in (0,d)=(0,", d, "), got ", kappa);
        if (temporal == TemporalKind::riesz_time && !(time_exponent > 0 && time_exponent < 1))
            detail::fail(ErrorKind::validation, "noise: temporal Riesz exponent must lie in (0,1), got ", time_exponent);
        if (temporal == TemporalKind::custom) {
            if (!gamma || !gamma_integral)
                detail::fail(ErrorKind::validation, "noise: custom temporal covariance needs gamma and its integral");
            for (double s : {1e-3, 0.1, 0.5, 1.0, 2.0, 10.0})
                if (!(gamma(s) >= 0)) detail::fail(ErrorKind::validation, "noise: custom gamma must be nonnegative");
        }
    }
};

// C_t = 2 int_0^t gamma. The delta-correlated case is flagged and uses 1.
struct CtValue {
    double value = 0.0;
    bool dirac = false;
    double time_power = std::numeric_limits<double>::quiet_NaN();  // C_t proportional to t^time_power, if known
};

inline CtValue ct_constant(const NoiseSpec& noise, double t) {
    if (!(t > 0)) detail::fail(ErrorKind::validation, "ct_constant: t must be positive");
    CtValue c;
    switch (noise.temporal) {
    case TemporalKind::dirac:
        c.value = 1.0;
        c.dirac = true;
        c.time_power = 0.0;
        break;
    case TemporalKind::riesz_time: {
        const double b = noise.time_exponent;
        if (!(b > 0 && b < 1)) detail::fail(ErrorKind::validation, "ct_constant: temporal exponent must lie in (0,1)");
        c.value = 2.0 * std::pow(t, 1.0 - b) / (1.0 - b);
        c.time_power = 1.0 - b;
        break;
    }
    case TemporalKind::custom:
        if (!noise.gamma_integral) detail::fail(ErrorKind::validation, "ct_constant: custom gamma needs its integral");
        c.value = 2.0 * noise.gamma_integral(t);
        if (!std::isfinite(c.value) || c.value < 0)
            detail::fail(ErrorKind::precondition, "ct_constant: gamma is not integrable on [0,", t, "]");
        break;
    }
    return c;
}

// ---- Dalang-type conditions ----

struct DalangResult {
    bool holds = false;
    Rational required;   // d for white noise, kappa for Riesz
    Rational available;  // 2 alpha - alpha/beta, or alpha (2 ceil(beta) - 1)/beta when smoothed
    std::string condition;
};

inline Rational dalang_exponent(const Rational& alpha, const Rational& beta, bool smoothed) {
    const int cb = beta <= 1 ? 1 : 2;
    if (smoothed) return Rational(alpha * (2 * cb - 1) / beta);
    return Rational(2 * alpha - alpha / beta);
}

// Exact comparison in rational arithmetic.
inline DalangResult dalang_check_exact(SpatialKind spatial, const Rational& alpha, const Rational& beta, int d,
                                       const Rational& kappa, bool smoothed) {
    if (!(alpha > 0) || !(beta > 0) || d < 1) detail::fail(ErrorKind::validation, "dalang_check: bad parameters");
    DalangResult r;
    r.available = dalang_exponent(alpha, beta, smoothed);
    r.required = spatial == SpatialKind::white ? Rational(d) : kappa;
    r.holds = r.required < r.available;
    r.condition = spatial == SpatialKind::white ? (smoothed ? "d < alpha(2ceil(beta)-1)/beta" : "d < 2alpha - alpha/beta")
                                                : (smoothed ? "kappa < alpha(2ceil(beta)-1)/beta"
                                                            : "kappa < 2alpha - alpha/beta");
    return r;
}

// Doubles convert to rationals exactly, so the comparison has no rounding.
inline DalangResult dalang_check(const NoiseSpec& noise, const FracParams& p, bool smoothed) {
    p.validate();
    noise.validate(p.d);
    return dalang_check_exact(noise.spatial, Rational(p.alpha), Rational(p.beta), p.d, Rational(noise.kappa), smoothed);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Factor multiplying Lambda: the noise's own lambda^2 times the strength carried by the PDE parameters.
inline double covariance_scale(const FracParams& p, const NoiseSpec& noise) {
    return noise.lambda_sq * p.lambda * p.lambda;
}

// Exponent of p in the moment upper bound, (2 alpha beta - beta kappa)/(2 alpha beta - alpha - beta kappa),
// with beta replaced by ceil(beta) in the alpha terms for the smoothed equation.
inline Rational p_exponent_exact(const Rational& alpha, const Rational& beta, const Rational& kappa, bool smoothed) {
    const Rational b = smoothed ? Rational(beta <= 1 ? 1 : 2) : beta;
    const Rational den = 2 * alpha * b - alpha - beta * kappa;
    if (den <= 0) detail::fail(ErrorKind::precondition, "p exponent: denominator is not positive");
    return Rational((2 * alpha * b - beta * kappa) / den);
}

// ---- constants ----

// Fourier transform of |x|^{-kappa} is c_kappa |xi|^{kappa-d}.
inline double riesz_fourier_constant(int d, double kappa) {
    if (!(kappa > 0 && kappa < d)) detail::fail(ErrorKind::validation, "riesz constant: kappa must lie in (0,d)");
    return std::pow(2.0, d - kappa) * std::pow(std::numbers::pi, 0.5 * d) * gamma_fn(0.5 * (d - kappa)) /
           gamma_fn(0.5 * kappa);
}

namespace detail {

// int_0^inf g(x) x^{power-1} dx by quadrature in log x.
template <class G>
QuadResult<double> mellin_quadrature(G g, double power, double tol) {
    auto f = [&](double u) {
        const double x = std::exp(u);
        const double v = g(x);
        return v == 0.0 ? 0.0 : v * std::exp(power * u);
    };
    auto r = integrate_real_line(f, 0.0, 6.0, 6.0, tol, tol, 80);
    if (!r.converged || !std::isfinite(r.value))
        fail(ErrorKind::non_convergence, "quadrature of a Mittag-Leffler integral did not converge");
    return r;
}

} // namespace detail

// C_{nu,beta} = int_0^inf (1/beta) v^{1-1/beta} E_{beta,beta}(-nu v/2)^2 dv; finite only for beta > 1/2.
inline double c_nu_beta(double nu, double beta, double tol = 1e-9) {
    if (!(beta > 0.5)) detail::fail(ErrorKind::precondition, "C_{nu,beta} diverges at zero for beta <= 1/2 (beta=", beta, ")");
    auto g = [&](double v) {
        const double e = mittag_leffler(beta, beta, -0.5 * nu * v);
        return e * e / beta;
    };
    return detail::mellin_quadrature(g, 2.0 - 1.0 / beta, tol).value;
}

// C~ = int_{R^d} E_{beta,beta}(-|xi|^alpha)^2 |xi|^{kappa-d} d xi.
inline double c_tilde(const FracParams& p, double kappa, double tol = 1e-9) {
    auto g = [&](double x) {
        const double e = mittag_leffler(p.beta, p.beta, -x);
        return e * e;
    };
    return sphere_area(p.d) / p.alpha * detail::mellin_quadrature(g, kappa / p.alpha, tol).value;
}

// C-bar = int_{R^d} E_{beta,ceil(beta)}(-|eta|^alpha) |eta|^{kappa-d} d eta (unsquared, as stated).
inline double c_bar(const FracParams& p, double kappa, double tol = 1e-9) {
    // E_{beta,m}(-x) ~ x^{-1}/Gamma(m-beta) unless beta = m, so the integral needs kappa < alpha.
    if (p.beta != 1.0 && !(kappa < p.alpha))
        detail::fail(ErrorKind::precondition, "C-bar diverges at infinity: needs kappa < alpha (kappa=", kappa,
                     ", alpha=", p.alpha, ")");
    auto g = [&](double x) { return mittag_leffler(p.beta, p.ceil_beta(), -x); };
    return sphere_area(p.d) / p.alpha * detail::mellin_quadrature(g, kappa / p.alpha, tol).value;
}

// int_0^inf w^{2(ceil(beta)-1)} E_{beta,ceil(beta)}(-nu w^beta |xi|^alpha / 2)^2 dw.
inline double smoothed_constant(const FracParams& p, double xi, double tol = 1e-10) {
    p.validate();
    if (!(p.beta <= 1.0 || p.beta > 1.5))
        detail::fail(ErrorKind::precondition, "smoothed_constant: beta must lie in (1/2,1] or (3/2,2), got ", p.beta);
    if (!(xi > 0)) detail::fail(ErrorKind::validation, "smoothed_constant: |xi| must be positive");
    const int m = p.ceil_beta();
    const double a = 0.5 * p.nu * std::pow(xi, p.alpha);
    auto g = [&](double w) {
        const double e = mittag_leffler(p.beta, m, -a * std::pow(w, p.beta));
        return e * e;
    };
    // Center the log grid where the argument is of order one.
    const double center = -std::log(a) / p.beta;
    auto f = [&](double u) {
        const double w = std::exp(u);
        return g(w) * std::exp((2.0 * m - 1.0) * u);
    };
    auto r = integrate_real_line(f, center, 6.0, 6.0, tol, tol, 80);
    if (!r.converged) detail::fail(ErrorKind::non_convergence, "smoothed_constant: quadrature did not converge");
    return r.value;
}

// int over the ordered simplex of [(t-s_n)(s_n-s_{n-1})...(s_2-s_1)]^h.
inline double simplex_integral(double h, int n, double t) {
    if (!(h > -1)) detail::fail(ErrorKind::validation, "simplex_integral: h must exceed -1, got ", h);
    if (n < 1) detail::fail(ErrorKind::validation, "simplex_integral: n must be positive");
    if (!(t >= 0)) detail::fail(ErrorKind::validation, "simplex_integral: t must be >= 0");
    const double e = n * (1.0 + h);
    if (t == 0.0) return 0.0;
    return std::exp(n * log_gamma(1.0 + h, nullptr) - log_gamma(e + 1.0, nullptr) + e * std::log(t));
}

struct ThetaExponents {
    double theta_moment;  // beta - 1/2 - beta kappa/(2 alpha)
    double theta_series;  // beta - 1 - beta kappa/(2 alpha)
};

inline ThetaExponents theta_exponents(const FracParams& p, double kappa) {
    p.validate();
    if (!(kappa > 0 && kappa < p.d)) detail::fail(ErrorKind::validation, "theta_exponents: kappa must lie in (0,d)");
    const double shift = p.beta * kappa / (2.0 * p.alpha);
    return {p.beta - 0.5 - shift, p.beta - 1.0 - shift};
}

// ---- sup of |J0| ----

struct HatCt {
    double value = 0.0;
    bool grid_sup = false;  // true when taken over sampled points only
};

inline HatCt c_hat_t(const FracParams& p, const InitialData& init, double t, const EvalConfig& cfg = {}) {
    p.validate();
    detail::check_initial(p, init);
    HatCt out;
    if (init.kind == InitialData::Kind::constant) {
        // J0 is affine in s, so the sup over [0,t] sits at an endpoint.
        const double u0 = init.constants[0];
        const double u1 = p.ceil_beta() == 2 ? init.constants[1] : 0.0;
        out.value = std::max(std::abs(u0), std::abs(u0 + t * u1));
        return out;
    }
    out.grid_sup = true;
    const auto& grid = init.sampled[0];
    const std::size_t n = grid.values.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 16);
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; i += stride) xs.push_back(grid.x0 + grid.dx * i);
    for (const auto& s : init.sampled)
        for (double v : s.values) out.value = std::max(out.value, std::abs(v));  // s -> 0 limit
    for (int k = 1; k <= 4; ++k)
        for (double x : xs) out.value = std::max(out.value, std::abs(j0_field(p, init, t * k / 4.0, x, cfg).value));
    return out;
}

// ---- existence certificate ----

enum class CertStatus { certified, not_found, precondition_failed };

inline const char* to_string(CertStatus s) {
    switch (s) {
    case CertStatus::certified: return "certified";
    case CertStatus::not_found: return "not_found";
    case CertStatus::precondition_failed: return "precondition_failed";
    }
    return "?";
}

struct ExistenceCertificate {
    CertStatus status = CertStatus::precondition_failed;
    double n_cutoff = std::numeric_limits<double>::quiet_NaN();
    double c_n = std::numeric_limits<double>::quiet_NaN();
    double d_n = std::numeric_limits<double>::quiet_NaN();
    double contraction = std::numeric_limits<double>::quiet_NaN();
    double c_star = std::numeric_limits<double>::quiet_NaN();
    double c_beta = std::numeric_limits<double>::quiet_NaN();
    double c_nu_beta = std::numeric_limits<double>::quiet_NaN();
    double c_t = std::numeric_limits<double>::quiet_NaN();
    bool c_t_dirac = false;
    std::string message;
};

// Mass of the spectral measure outside and inside the ball of radius N:
//   C_N = int_{|xi|>=N} mu(dxi)/|xi|^e,  D_N = mu{|xi| <= N}.
struct SpectralTail {
    double c_n, d_n;
};

inline SpectralTail spectral_tail(const NoiseSpec& noise, double scale, int d, double e, double N) {
    const double s = sphere_area(d) * scale;
    if (noise.spatial == SpatialKind::white) return {s * std::pow(N, d - e) / (e - d), s * std::pow(N, d) / d};
    const double ck = riesz_fourier_constant(d, noise.kappa) * s;
    return {ck * std::pow(N, noise.kappa - e) / (e - noise.kappa), ck * std::pow(N, noise.kappa) / noise.kappa};
}

inline ExistenceCertificate existence_certificate(const NoiseSpec& noise, const FracParams& p, double t) {
    ExistenceCertificate cert;
    if (!(p.beta > 0.5)) {
        cert.message = "C_{nu,beta} diverges at zero: requires beta > 1/2";
        return cert;
    }
    p.validate();
    noise.validate(p.d);
    if (!(t > 0)) detail::fail(ErrorKind::validation, "existence_certificate: t must be positive");
    const auto nn = nonnegativity_case(p);
    if (nn.status != NonnegCase::certified_nonneg) {
        cert.message = std::string("nonnegativity of Y is not certified (") + nn.regime + ")";
        return cert;
    }
    const auto dal = dalang_check(noise, p, false);
    if (!dal.holds) {
        cert.message = "Dalang condition fails: " + dal.condition;
        return cert;
    }
    const auto ct = ct_constant(noise, t);
    cert.c_t = ct.value;
    cert.c_t_dirac = ct.dirac;
    cert.c_beta = std::pow(gamma_fn(p.beta), -2.0);
    cert.c_nu_beta = c_nu_beta(p.nu, p.beta);
    cert.c_star = std::max(cert.c_beta, cert.c_nu_beta);
    const double e = to_double(dal.available);
    const double scale = covariance_scale(p, noise);
    auto contraction = [&](double N) { return 2.0 * cert.c_star * cert.c_t * spectral_tail(noise, scale, p.d, e, N).c_n; };
    double hi = 1.0;
    if (!(contraction(hi) < 1.0)) {
        double lo = hi;
        while (!(contraction(hi) < 1.0)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) {
                cert.status = CertStatus::not_found;
                cert.message = "contraction stays >= 1 for N up to 1e300";
                return cert;
            }
        }
        for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
            const double mid = std::sqrt(lo * hi);
            (contraction(mid) < 1.0 ? hi : lo) = mid;
        }
    }
    const auto tail = spectral_tail(noise, scale, p.d, e, hi);
    cert.n_cutoff = hi;
    cert.c_n = tail.c_n;
    cert.d_n = tail.d_n;
    cert.contraction = contraction(hi);
    cert.status = CertStatus::certified;
    if (ct.dirac) cert.message = "delta-correlated time: C_t taken as 1";
    return cert;
}

// ---- moment bounds ----

// u_0 = 1, and u_1 = 0 when beta > 1.
inline InitialData unit_initial_data(const FracParams& p) {
    return p.ceil_beta() == 1 ? InitialData::constant(1.0) : InitialData::constant_pair(1.0, 0.0);
}

struct MomentReport {
    std::string kind;  // "upper" or "smoothed"
    double c_t = 0.0;
    bool c_t_dirac = false;
    double c_hat_t = 0.0;
    bool c_hat_grid_sup = false;
    double c_kappa = 0.0;  // includes lambda^2
    double c_star = 0.0;
    double c_tilde = 0.0;
    double theta_t = 0.0;
    double p_exponent = 0.0;
    double t_exponent_base = 0.0;  // power of theta_t
    double t_exponent = std::numeric_limits<double>::quiet_NaN();  // total power of t when C_t is a power of t
    double upper_bound_log = 0.0;  // log of the bound with the unspecified constant C set to 1
    std::optional<double> lower_bound_log;
};

namespace detail {

inline void require_riesz(const NoiseSpec& noise, const char* what) {
    if (noise.spatial != SpatialKind::riesz)
        fail(ErrorKind::precondition, what, ": requires Riesz spatial covariance");
}

inline void require_cases(const FracParams& p, const char* what) {
    if (nonnegativity_case(p).status != NonnegCase::certified_nonneg)
        fail(ErrorKind::precondition, what, ": (alpha,beta,d) is not in one of the three certified regimes");
}

} // namespace detail

// u_0^2 sum_n K^n t^{n rho}/Gamma(n rho + 1) = u_0^2 E_rho(K t^rho).
struct LowerSeries {
    double rho = 0.0;
    double k = 0.0;
    std::vector<double> partial_sums;
    double value = 0.0;
};

inline LowerSeries lower_series(double u0, double k, double rho, double t, int n_max = 100000) {
    LowerSeries s;
    s.rho = rho;
    s.k = k;
    if (t == 0.0) {
        s.partial_sums = {u0 * u0};
        s.value = u0 * u0;
        return s;
    }
    const double lx = std::log(k) + rho * std::log(t);
    double sum = 0.0, comp = 0.0;
    int small = 0;
    for (int n = 0; n < n_max; ++n) {
        const double term = u0 * u0 * std::exp(n * lx - log_gamma(n * rho + 1.0, nullptr));
        const double s2 = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - s2) + term : (term - s2) + sum;
        sum = s2;
        s.partial_sums.push_back(sum + comp);
        const bool past_peak = n * rho > 1.0 + std::exp(lx / rho);
        small = (past_peak && term <= 1e-17 * (sum + comp)) ? small + 1 : 0;
        if (small >= 3) break;
    }
    s.value = sum + comp;
    return s;
}

inline double moment_lower_bound(const FracParams& p, const NoiseSpec& noise, double u0, double t) {
    p.validate();
    noise.validate(p.d);
    detail::require_riesz(noise, "moment_lower_bound");
    if (noise.temporal != TemporalKind::dirac)
        detail::fail(ErrorKind::precondition, "moment_lower_bound: requires delta-correlated time");
    if (!(u0 > 0)) detail::fail(ErrorKind::validation, "moment_lower_bound: u0 must be positive");
    if (!(t >= 0)) detail::fail(ErrorKind::validation, "moment_lower_bound: t must be >= 0");
    const double kappa = noise.kappa;
    const double rho = 2.0 * p.beta - 1.0 - p.beta * kappa / p.alpha;
    if (!(rho > 0)) detail::fail(ErrorKind::precondition, "moment_lower_bound: requires kappa < 2alpha - alpha/beta");
    const double k = covariance_scale(p, noise) * riesz_fourier_constant(p.d, kappa) * c_tilde(p, kappa) *
                     std::pow(4.0 * std::numbers::pi, -p.d) * gamma_fn(rho) * std::pow(2.0 / p.nu, kappa / p.alpha);
    return lower_series(u0, k, rho, t).value;
}

inline MomentReport moment_upper_bound(const FracParams& p, const NoiseSpec& noise, double pw, double t,
                                       std::optional<InitialData> init_opt = std::nullopt) {
    const InitialData init = init_opt ? *init_opt : unit_initial_data(p);
    p.validate();
    noise.validate(p.d);
    detail::require_riesz(noise, "moment_upper_bound");
    detail::require_cases(p, "moment_upper_bound");
    const double kappa = noise.kappa;
    const double thr = 2.0 * p.alpha - p.alpha / p.beta;
    if (!(kappa < std::min(thr, double(p.d))))
        detail::fail(ErrorKind::precondition, "moment_upper_bound: requires kappa < min(2alpha - alpha/beta, d) = ",
                     std::min(thr, double(p.d)));
    if (!(pw >= 1)) detail::fail(ErrorKind::validation, "moment_upper_bound: p must be >= 1");
    if (!(t > 0)) detail::fail(ErrorKind::validation, "moment_upper_bound: t must be positive");
    MomentReport r;
    r.kind = "upper";
    const auto ct = ct_constant(noise, t);
    r.c_t = ct.value;
    r.c_t_dirac = ct.dirac;
    const auto ch = c_hat_t(p, init, t);
    r.c_hat_t = ch.value;
    r.c_hat_grid_sup = ch.grid_sup;
    r.c_kappa = covariance_scale(p, noise) * riesz_fourier_constant(p.d, kappa);
    r.c_star = gamma_fn(2.0 * p.beta - 1.0 - p.beta * kappa / p.alpha);
    r.c_tilde = c_tilde(p, kappa);
    r.theta_t = r.c_kappa * r.c_t * r.c_tilde * r.c_star * std::pow(2.0 / p.nu, kappa / p.alpha) *
                std::pow(2.0 * std::numbers::pi, -p.d);
    const double den = 2.0 * p.alpha * p.beta - p.alpha - p.beta * kappa;
    r.p_exponent = (2.0 * p.alpha * p.beta - p.beta * kappa) / den;
    r.t_exponent_base = p.alpha / den;
    if (std::isfinite(ct.time_power)) r.t_exponent = 1.0 + ct.time_power * r.t_exponent_base;
    r.upper_bound_log = pw * std::log(r.c_hat_t) + t * std::pow(r.theta_t, r.t_exponent_base) * std::pow(pw, r.p_exponent);
    if (noise.temporal == TemporalKind::dirac && init.kind == InitialData::Kind::constant && init.constants[0] > 0 &&
        (p.ceil_beta() == 1 || init.constants[1] == 0.0)) {
        const double rho = 2.0 * p.beta - 1.0 - p.beta * kappa / p.alpha;
        const double k = r.c_kappa * r.c_tilde * std::pow(4.0 * std::numbers::pi, -p.d) * r.c_star *
                         std::pow(2.0 / p.nu, kappa / p.alpha);
        const double u0 = init.constants[0];
        r.lower_bound_log = 2.0 * std::log(u0) + log_mittag_leffler_positive(rho, 1.0, k * std::pow(t, rho));
    }
    return r;
}

inline MomentReport smoothed_moment_bounds(const FracParams& p, const NoiseSpec& noise, double pw, double t,
                                           std::optional<InitialData> init_opt = std::nullopt) {
    const InitialData init = init_opt ? *init_opt : unit_initial_data(p);
    p.validate();
    noise.validate(p.d);
    detail::require_riesz(noise, "smoothed_moment_bounds");
    detail::require_cases(p, "smoothed_moment_bounds");
    const double kappa = noise.kappa;
    if (!(kappa < std::min(p.alpha / p.beta, double(p.d))))
        detail::fail(ErrorKind::precondition, "smoothed_moment_bounds: requires kappa < min(alpha/beta, d) = ",
                     std::min(p.alpha / p.beta, double(p.d)));
    if (!(pw >= 1)) detail::fail(ErrorKind::validation, "smoothed_moment_bounds: p must be >= 1");
    if (!(t > 0)) detail::fail(ErrorKind::validation, "smoothed_moment_bounds: t must be positive");
    const int m = p.ceil_beta();
    MomentReport r;
    r.kind = "smoothed";
    const auto ct = ct_constant(noise, t);
    r.c_t = ct.value;
    r.c_t_dirac = ct.dirac;
    const auto ch = c_hat_t(p, init, t);
    r.c_hat_t = ch.value;
    r.c_hat_grid_sup = ch.grid_sup;
    r.c_kappa = covariance_scale(p, noise) * riesz_fourier_constant(p.d, kappa);
    r.c_star = gamma_fn(2.0 * m - 1.0 - p.beta * kappa / p.alpha);
    r.c_tilde = c_bar(p, kappa);
    r.theta_t = r.c_kappa * r.c_t * r.c_tilde * r.c_star * std::pow(2.0 / p.nu, kappa / p.alpha);
    const double den = 2.0 * p.alpha * m - p.alpha - p.beta * kappa;
    r.p_exponent = (2.0 * p.alpha * m - p.beta * kappa) / den;
    r.t_exponent_base = p.alpha / den;
    if (std::isfinite(ct.time_power)) r.t_exponent = 1.0 + ct.time_power * r.t_exponent_base;
    r.upper_bound_log = pw * std::log(r.c_hat_t) + t * std::pow(r.theta_t, r.t_exponent_base) * std::pow(pw, r.p_exponent);
    if (noise.temporal == TemporalKind::dirac && init.kind == InitialData::Kind::constant && init.constants[0] > 0 &&
        (m == 1 || init.constants[1] == 0.0)) {
        const double rho = 2.0 * p.beta - 1.0 - p.beta * kappa / p.alpha;
        if (rho > 0) {
            const double k = r.c_kappa * r.c_tilde * std::pow(4.0 * std::numbers::pi, -p.d) * r.c_star *
                             std::pow(2.0 / p.nu, kappa / p.alpha);
            r.lower_bound_log = 2.0 * std::log(init.constants[0]) + log_mittag_leffler_positive(rho, 1.0, k * std::pow(t, rho));
        }
    }
    return r;
}

// ---- Riesz convolution check ----

namespace detail {

// Angular part of int_{S^{d-1}} int_{S^{d-1}} |r1 w1 - r2 w2|^{-kappa} dw1 dw2, given diff = |r1 - r2|.
inline double angular_kernel(int d, double kappa, double r1, double r2, double diff) {
    const double sum = r1 + r2;
    if (d == 1) return 2.0 * (std::pow(diff, -kappa) + std::pow(sum, -kappa));
    if (d == 3) {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        if (std::abs(kappa - 2.0) < 1e-12) return 8.0 * pi2 * std::log(sum / diff) / (r1 * r2);
        return 8.0 * pi2 * (std::pow(sum, 2.0 - kappa) - std::pow(diff, 2.0 - kappa)) / ((2.0 - kappa) * r1 * r2);
    }
    // int_0^pi (r1^2 + r2^2 - 2 r1 r2 cos th)^{-kappa/2} sin^{d-2} th d th in Euler form.
    const double h = 0.5 * (d - 1.0);
    const double x = 1.0 - (diff / sum) * (diff / sum);
    const double pre = sphere_area(d) * sphere_area(d - 1) * std::pow(2.0, d - 2.0) * std::pow(sum, -kappa) *
                       boost::math::beta(h, h);
    gsl_sf_result res;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_sf_hyperg_2F1_e(0.5 * kappa, h, d - 1.0, x, &res);
    gsl_set_error_handler(old);
    if (status == GSL_SUCCESS && std::isfinite(res.val)) return pre * res.val;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double w) { return std::pow(w * (1.0 - w), h - 1.0) * std::pow(1.0 - x * w, -0.5 * kappa); };
    return pre * ts.integrate(f, 0.0, 1.0) / boost::math::beta(h, h);
}

// int P(v) A(e^v, a) dv over [lo, hi], where A(r, a) is the spherical average
// of |r w - a e|^{-kappa} times the sphere area. A is singular at v = log a, so
// the range is split there and tanh-sinh is fed the exact distance to it.
template <class P>
double radial_against_point(P prof, int d, double kappa, double a, double lo, double hi, double tol) {
    if (a == 0.0) {
        auto f = [&](double v) { return prof(v) * sphere_area(d) * std::exp(-kappa * v); };
        return integrate_adaptive(f, lo, hi, 0.0, tol, 8).value;
    }
    // dist_v = |v - log a|; |e^v - a| = max(e^v, a)(1 - e^{-dist_v}) without cancellation
    auto kernel = [&](double v, double dist_v) {
        const double r = std::exp(v);
        const double diff = std::max(r, a) * -std::expm1(-dist_v);
        return prof(v) * angular_kernel(d, kappa, r, a, diff) / sphere_area(d);
    };
    // Integrate in the distance to the singular point so samples near it keep full precision.
    boost::math::quadrature::tanh_sinh<double> ts(12);
    const double c = std::log(a);
    double total = 0.0;
    auto piece = [&](double from, double to, int side) {  // distances in [from, to] on one side of c
        if (to <= from) return 0.0;
        auto f = [&](double dist) { return kernel(c + side * dist, dist); };
        double acc = 0.0;
        if (from == 0.0) {
            from = std::min(to, 0.5);
            acc += ts.integrate(f, 0.0, from, tol);
        }
        if (to > from) acc += integrate_adaptive(f, from, to, 0.0, tol, 4).value;
        return acc;
    };
    total += piece(std::max(0.0, c - hi), c - lo, -1);
    total += piece(std::max(0.0, lo - c), hi - c, +1);
    return total;
}

} // namespace detail

struct RieszCheck {
    double measured = 0.0;
    double bound = 0.0;
    double theta = 0.0;      // theta_series
    double zeta = 0.0;       // envelope exponent used for the bound
    double c_envelope = 0.0; // sup |Y(1,y)|/Theta(y)
    double theta_l1 = 0.0;   // int Theta
    double theta_sup = 0.0;  // sup_a int |z-a|^{-kappa} Theta(z) dz (grid sup)
};

struct RieszConfig {
    double tol = 1e-7;
    int profile_points = 1601;
    double inner_step = 0.1;
};

// Precomputed pieces of the check that depend only on (params, kappa).
class RieszChecker {
public:
    RieszChecker(const FracParams& p, double kappa, const RieszConfig& rc = {})
        : p_(p), kappa_(kappa), rc_(rc),
          profile_(KernelKind::Y, p, -40.0 / p.alpha, 30.0 / p.alpha, rc.profile_points) {
        if (!(kappa > 0 && kappa < std::min(2.0 * p.alpha, double(p.d))))
            detail::fail(ErrorKind::precondition, "riesz_convolution_check: requires 0 < kappa < min(2alpha, d)");
        zeta_ = 0.5 * (kappa / p.alpha + std::min(p.d / p.alpha, 2.0));
        env_ = calibrate_envelope(p, zeta_);
        theta_l1_ = sphere_area(p.d) * std::numbers::pi /
                    (p.alpha * (1.0 + zeta_) * std::sin(std::numbers::pi * zeta_ / (1.0 + zeta_)));
        // Theta(e^v) e^{dv}
        auto w = [&](double v) { return 1.0 / (std::exp(p_.alpha * v) + std::exp(-zeta_ * p_.alpha * v)); };
        const double lo = -60.0 / (zeta_ * p.alpha), hi = 60.0 / p.alpha;
        std::vector<double> as{0.0};
        for (int i = 0; i <= 24; ++i) as.push_back(std::pow(10.0, -3.0 + 0.25 * i));
        std::vector<double> vals(as.size());
        parallel_for(as.size(), [&](std::size_t i) {
            vals[i] = detail::radial_against_point(w, p_.d, kappa_, as[i], lo, hi, 1e-8);
        });
        theta_sup_ = 0.0;
        for (double v : vals) theta_sup_ = std::max(theta_sup_, v);

        // inner(u) = S_{d-1} int P(w) A(e^u, e^w)/S_{d-1} dw on a grid wide enough for |log(s/r)| <= 10
        inner_lo_ = profile_.v_lo() - 8.0;
        const double inner_hi = profile_.v_hi() + 8.0;
        const int n = static_cast<int>(std::ceil((inner_hi - inner_lo_) / rc.inner_step)) + 1;
        inner_step_ = (inner_hi - inner_lo_) / (n - 1);
        auto prof = [&](double v) { return std::abs(profile_.weighted(v)); };
        std::vector<double> g(n);
        parallel_for(n, [&](std::size_t i) {
            g[i] = sphere_area(p_.d) * detail::radial_against_point(prof, p_.d, kappa_, std::exp(inner_lo_ + i * inner_step_),
                                                                    profile_.v_lo(), profile_.v_hi(), rc_.tol);
        });
        inner_table_ = std::move(g);
    }

    double theta_series() const { return p_.beta - 1.0 - p_.beta * kappa_ / (2.0 * p_.alpha); }

    // int int |Y(s,x)| |Y(r,y)| |x-y|^{-kappa} dx dy. With P the weighted profile at
    // time 1 and A the angular kernel, homogeneity A(l r1, l r2) = l^{-kappa} A(r1, r2)
    // reduces the inner radial integral to inner_(v1 - shift_r) times e^{-kappa shift_r}.
    double measured(double s, double r) const {
        const double shift_s = p_.beta / p_.alpha * std::log(s);
        const double shift_r = p_.beta / p_.alpha * std::log(r);
        const double amp = std::pow(s * r, p_.beta - 1.0) * std::exp(-kappa_ * shift_r);
        auto outer = [&](double v1) { return std::abs(profile_.weighted(v1 - shift_s)) * inner(v1 - shift_r); };
        const auto res = integrate_adaptive(outer, profile_.v_lo() + shift_s, profile_.v_hi() + shift_s, 0.0,
                                            rc_.tol, 16);
        return amp * res.value;
    }

    RieszCheck check(double s, double r) const {
        if (!(s > 0 && r > 0)) detail::fail(ErrorKind::validation, "riesz_convolution_check: s and r must be positive");
        RieszCheck c;
        c.theta = theta_series();
        c.zeta = zeta_;
        c.c_envelope = env_.constant;
        c.theta_l1 = theta_l1_;
        c.theta_sup = theta_sup_;
        c.measured = measured(s, r);
        c.bound = env_.constant * env_.constant * theta_sup_ * theta_l1_ * std::pow(s * r, c.theta);
        return c;
    }

private:
    FracParams p_;
    double kappa_;
    RieszConfig rc_;
    RadialProfile profile_;
    double zeta_ = 0.0;
    Envelope env_;
    double theta_l1_ = 0.0, theta_sup_ = 0.0;
    double inner_lo_ = 0.0, inner_step_ = 1.0;
    std::vector<double> inner_table_;

    // Cubic interpolation in the inner table (Catmull-Rom); flat outside.
    double inner(double u) const {
        const int n = static_cast<int>(inner_table_.size());
        const double x = (u - inner_lo_) / inner_step_;
        if (x <= 0) return inner_table_.front();
        if (x >= n - 1) return inner_table_.back();
        const int i = std::min(static_cast<int>(x), n - 2);
        const double f = x - i;
        const double y0 = inner_table_[std::max(i - 1, 0)], y1 = inner_table_[i], y2 = inner_table_[i + 1],
                     y3 = inner_table_[std::min(i + 2, n - 1)];
        return y1 + 0.5 * f * (y2 - y0 + f * (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3 + f * (3.0 * (y1 - y2) + y3 - y0)));
    }
};

inline RieszCheck riesz_convolution_check(const FracParams& p, double kappa, double s, double r,
                                          const RieszConfig& rc = {}) {
    p.validate();
    return RieszChecker(p, kappa, rc).check(s, r);
}

// ---- chaos second moment ----

struct ChaosCalibration {
    double constant = 0.0;  // max measured/(s r)^theta over the grid
    std::string grid_id;
};

inline constexpr const char* chaos_grid_id = "sr-log2-5x5";

inline ChaosCalibration calibrate_chaos_constant(const FracParams& p, double kappa, const RieszConfig& rc = {}) {
    const RieszChecker chk(p, kappa, rc);
    const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) pts.emplace_back(grid[i], grid[j]);
    std::vector<double> ratio(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
        const auto [s, r] = pts[k];
        ratio[k] = chk.measured(s, r) / std::pow(s * r, chk.theta_series());
    });
    ChaosCalibration c;
    c.grid_id = chaos_grid_id;
    for (double v : ratio) c.constant = std::max(c.constant, v);
    return c;
}

// theta_series > -1/2, decided exactly: equivalent to kappa < 2 alpha - alpha/beta.
inline bool chaos_series_converges(const FracParams& p, double kappa) {
    p.validate();
    return dalang_check_exact(SpatialKind::riesz, Rational(p.alpha), Rational(p.beta), p.d, Rational(kappa), false).holds;
}

struct ChaosSeries {
    bool converges = false;
    double theta_series = 0.0;
    double constant = 0.0;  // calibrated C, times lambda^2
    std::string grid_id;
    double c_t = 0.0;
    bool c_t_dirac = false;
    double c_hat_t = 0.0;
    double argument = 0.0;  // Gamma(2 theta + 1) C C_t t^{2 theta + 1}
    std::vector<double> partial_sums;
    double closed_form = std::numeric_limits<double>::quiet_NaN();  // c_hat^2 E_{2theta+1}(argument)
    std::vector<double> lower_partial_sums;                          // delta-correlated case only
    double lower_closed_form = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

inline ChaosSeries chaos_second_moment(const FracParams& p, const NoiseSpec& noise, const InitialData& init, double t,
                                       int n_max, const RieszConfig& rc = {}) {
    p.validate();
    noise.validate(p.d);
    detail::require_riesz(noise, "chaos_second_moment");
    if (!(t > 0)) detail::fail(ErrorKind::validation, "chaos_second_moment: t must be positive");
    if (n_max < 0) detail::fail(ErrorKind::validation, "chaos_second_moment: n_max must be >= 0");
    ChaosSeries out;
    const double kappa = noise.kappa;
    out.theta_series = theta_exponents(p, kappa).theta_series;
    const double rho = 2.0 * out.theta_series + 1.0;
    if (!chaos_series_converges(p, kappa)) {
        out.converges = false;
        out.note = "theta_series <= -1/2 (kappa >= 2alpha - alpha/beta): the series bound diverges";
        return out;
    }
    const auto ct = ct_constant(noise, t);
    out.c_t = ct.value;
    out.c_t_dirac = ct.dirac;
    out.c_hat_t = c_hat_t(p, init, t).value;
    const auto cal = calibrate_chaos_constant(p, kappa, rc);
    out.constant = covariance_scale(p, noise) * cal.constant;
    out.grid_id = cal.grid_id;
    out.argument = gamma_fn(rho) * out.constant * out.c_t * std::pow(t, rho);
    const double c2 = out.c_hat_t * out.c_hat_t;
    const double la = std::log(out.argument);
    double sum = 0.0, comp = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double term = c2 * std::exp(n * la - log_gamma(rho * n + 1.0, nullptr));
        const double s2 = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - s2) + term : (term - s2) + sum;
        sum = s2;
        out.partial_sums.push_back(sum + comp);
    }
    out.converges = true;  // ratio of consecutive terms -> 0 since rho > 0
    out.closed_form = c2 * mittag_leffler(rho, 1.0, out.argument);
    if (noise.temporal == TemporalKind::dirac && init.kind == InitialData::Kind::constant && init.constants[0] > 0 &&
        (p.ceil_beta() == 1 || init.constants[1] == 0.0)) {
        const double lrho = 2.0 * p.beta - 1.0 - p.beta * kappa / p.alpha;
        const double k = covariance_scale(p, noise) * riesz_fourier_constant(p.d, kappa) * c_tilde(p, kappa) *
                         std::pow(4.0 * std::numbers::pi, -p.d) * gamma_fn(lrho) * std::pow(2.0 / p.nu, kappa / p.alpha);
        const double u0 = init.constants[0];
        double ls = 0.0;
        const double lk = std::log(k) + lrho * std::log(t);
        for (int n = 0; n <= n_max; ++n) {
            ls += u0 * u0 * std::exp(n * lk - log_gamma(lrho * n + 1.0, nullptr));
            out.lower_partial_sums.push_back(ls);
        }
        out.lower_closed_form = u0 * u0 * mittag_leffler(lrho, 1.0, k * std::pow(t, lrho));
    }
    if (ct.dirac) out.note = "delta-correlated time: C_t taken as 1";
    return out;
}

} // namespace fracdiff
