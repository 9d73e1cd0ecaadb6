#pragma once

// Gamma family on real and complex arguments, and Bessel J.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "fracdiff/errors.hpp"

namespace fracdiff {

using cplx = std::complex<double>;

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_p = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline constexpr double half_log_two_pi = 0.91893853320467274178;

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

// sin(pi x) with argument reduction so that integers give exact zeros.
inline double sin_pi(double x) {
    double r = x - 2.0 * std::nearbyint(0.5 * x);  // r in [-1, 1]
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

inline double cos_pi(double x) { return sin_pi(x + 0.5); }

inline double lgamma_lanczos(double x) {  // x >= 0.5
    const double zm1 = x - 1.0;
    double a = lanczos_p[0];
    for (int k = 1; k < 9; ++k) a += lanczos_p[k] / (zm1 + k);
    const double t = zm1 + lanczos_g + 0.5;
    return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(a);
}

inline cplx lgamma_lanczos(cplx z) {  // Re z >= 0.5
    const cplx zm1 = z - 1.0;
    cplx a = lanczos_p[0];
    for (int k = 1; k < 9; ++k) a += lanczos_p[k] / (zm1 + double(k));
    const cplx t = zm1 + lanczos_g + 0.5;
    return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(a);
}

// log(sin(pi z)) without overflow for large |Im z|.
inline cplx log_sin_pi(cplx z) {
    const double y = z.imag();
    if (std::abs(y) < 1.0) return std::log(std::sin(std::numbers::pi * z));
    if (y < 0.0) return std::conj(log_sin_pi(std::conj(z)));
    const cplx i(0.0, 1.0);
    const cplx w = std::exp(2.0 * std::numbers::pi * i * z);  // |w| < e^{-2 pi}
    return -std::numbers::pi * i * z + std::log(1.0 - w) + std::log(cplx(0.0, 0.5));
}

inline cplx cot_pi(cplx z) {
    const double y = z.imag();
    if (std::abs(y) < 1.0) {
        const cplx s = std::sin(std::numbers::pi * z);
        return std::cos(std::numbers::pi * z) / s;
    }
    if (y < 0.0) return std::conj(cot_pi(std::conj(z)));
    const cplx w = std::exp(cplx(0.0, 2.0 * std::numbers::pi) * z);
    return cplx(0.0, -1.0) * (1.0 + w) / (1.0 - w);
}

inline double digamma_asymptotic(double x) {
    const double x2 = 1.0 / (x * x);
    const double series =
        x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132 - x2 * (691.0 / 32760 - x2 / 12))))));
    return std::log(x) - 0.5 / x - series;
}

inline cplx digamma_asymptotic(cplx z) {
    const cplx z2 = 1.0 / (z * z);
    const cplx series =
        z2 * (1.0 / 12 - z2 * (1.0 / 120 - z2 * (1.0 / 252 - z2 * (1.0 / 240 - z2 * (1.0 / 132 - z2 * (691.0 / 32760 - z2 / 12.0))))));
    return std::log(z) - 0.5 / z - series;
}

} // namespace detail

// log|Gamma(x)| for real x; *sign receives the sign of Gamma(x).
inline double log_gamma(double x, int* sign) {
    if (!std::isfinite(x)) detail::fail(ErrorKind::validation, "log_gamma: non-finite argument");
    if (detail::is_nonpositive_integer(x))
        detail::fail(ErrorKind::pole, "log_gamma: pole of gamma at ", x);
    if (x >= 0.5) {
        if (sign) *sign = 1;
        return detail::lgamma_lanczos(x);
    }
    const double s = detail::sin_pi(x);
    if (sign) *sign = s > 0 ? 1 : -1;
    return std::log(std::numbers::pi) - std::log(std::abs(s)) - detail::lgamma_lanczos(1.0 - x);
}

// Logarithm of Gamma on the complex plane; exp(log_gamma(z)) == Gamma(z).
inline cplx log_gamma(cplx z) {
    if (z.imag() == 0.0) {
        int sign = 1;
        const double lg = log_gamma(z.real(), &sign);
        return {lg, sign > 0 ? 0.0 : std::numbers::pi};
    }
    if (z.real() >= 0.5) return detail::lgamma_lanczos(z);
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) - detail::lgamma_lanczos(1.0 - z);
}

inline double gamma_fn(double x) {
    int sign = 1;
    const double lg = log_gamma(x, &sign);
    return sign * std::exp(lg);
}

// 1/Gamma(x), zero at the poles of Gamma.
inline double rgamma(double x) {
    if (detail::is_nonpositive_integer(x)) return 0.0;
    int sign = 1;
    const double lg = log_gamma(x, &sign);
    return sign * std::exp(-lg);
}

inline double digamma(double x) {
    if (detail::is_nonpositive_integer(x))
        detail::fail(ErrorKind::pole, "digamma: pole at ", x);
    double acc = 0.0;
    if (x < 0.5) {
        // psi(x) = psi(1-x) - pi cot(pi x)
        acc -= std::numbers::pi * detail::cos_pi(x) / detail::sin_pi(x);
        x = 1.0 - x;
    }
    while (x < 8.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    return acc + detail::digamma_asymptotic(x);
}

inline cplx digamma(cplx z) {
    if (z.imag() == 0.0) return digamma(z.real());
    cplx acc = 0.0;
    if (z.real() < 0.5) {
        acc -= std::numbers::pi * detail::cot_pi(z);
        z = 1.0 - z;
    }
    while (z.real() < 8.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    return acc + detail::digamma_asymptotic(z);
}

// Bessel function of the first kind for order eta >= -1/2 and x >= 0.
inline double bessel_j(double eta, double x) {
    if (!(eta >= -0.5)) detail::fail(ErrorKind::validation, "bessel_j: order must be >= -1/2, got ", eta);
    if (!(x >= 0.0)) detail::fail(ErrorKind::validation, "bessel_j: argument must be >= 0, got ", x);
    if (x == 0.0) return eta == 0.0 ? 1.0 : (eta == -0.5 ? INFINITY : 0.0);
    return boost::math::cyl_bessel_j(eta, x);
}

} // namespace fracdiff
