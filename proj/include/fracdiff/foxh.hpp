#pragma once

// Fox H-functions of a positive real argument: parameter blocks, pole
// analysis, Mellin-Barnes contour quadrature, residue expansions at zero and
// infinity, and the symbolic transform algebra.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "fracdiff/errors.hpp"
#include "fracdiff/quadrature.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff {

// One gamma argument pair: Gamma(coef + scale*s) or Gamma(1 - coef - scale*s).
struct HPair {
    double coef = 0.0;
    double scale = 1.0;
};

inline bool operator==(const HPair& x, const HPair& y) { return x.coef == y.coef && x.scale == y.scale; }

struct HFunctionSpec {
    int m = 0, n = 0, p = 0, q = 0;
    std::vector<HPair> upper;  // (a_i, alpha_i), length p
    std::vector<HPair> lower;  // (b_j, beta_j), length q
};

inline bool operator==(const HFunctionSpec& x, const HFunctionSpec& y) {
    return x.m == y.m && x.n == y.n && x.p == y.p && x.q == y.q && x.upper == y.upper && x.lower == y.lower;
}

struct HCharacteristics {
    double a_star = 0.0;
    double delta = 0.0;
    double mu = 0.0;
};

struct EvalConfig {
    double contour_halfheight = 16.0;
    int quadrature_points = 128;  // Kronrod nodes in the initial partition of the contour
    int series_terms = 200;       // pole layers enumerated per gamma factor
    double abs_tol = 1e-30;
    double rel_tol = 1e-10;
    double collision_tol = 1e-9;
    double switch_radius = 1.0;
    double resonance_gap = 1e-6;  // distinct poles closer than this force the contour route
    bool cross_check = false;     // evaluate the contour as well and compare

    void validate() const {
        if (!(contour_halfheight > 0) || !(abs_tol > 0) || !(rel_tol > 0) || !(collision_tol > 0) ||
            !(switch_radius > 0) || !(resonance_gap > 0))
            detail::fail(ErrorKind::validation, "EvalConfig: tolerances, radii and heights must be positive");
        if (quadrature_points < 32) detail::fail(ErrorKind::validation, "EvalConfig: quadrature_points must be >= 32");
        if (series_terms < 1) detail::fail(ErrorKind::validation, "EvalConfig: series_terms must be >= 1");
    }
};

enum class Route { contour, series_zero, series_infinity };

inline const char* to_string(Route r) {
    switch (r) {
    case Route::contour: return "contour";
    case Route::series_zero: return "series_zero";
    case Route::series_infinity: return "series_infinity";
    }
    return "unknown";
}

struct EvalResult {
    double value = 0.0;
    Route route = Route::contour;
    double est_error = 0.0;
    std::vector<std::string> warnings;
};

struct PoleOrigin {
    int index;  // 0-based parameter index within its row
    int layer;  // l or k
};

struct Pole {
    double location;
    int order;            // number of coinciding poles of the same row
    int effective_order;  // order of the integrand after cancellation by denominator zeros
    std::vector<PoleOrigin> origins;
};

struct PoleTable {
    std::vector<Pole> lower_poles;  // descending location
    std::vector<Pole> upper_poles;  // ascending location
    int cutoff = 0;
};

namespace detail {

inline constexpr double pole_tol_default = 1e-9;

struct GammaFactor {
    double c, k;  // Gamma(c + k s)
    bool numer;
};

inline std::vector<GammaFactor> gamma_factors(const HFunctionSpec& h) {
    std::vector<GammaFactor> f;
    f.reserve(h.p + h.q);
    for (int j = 0; j < h.q; ++j) {
        if (j < h.m) f.push_back({h.lower[j].coef, h.lower[j].scale, true});
        else f.push_back({1.0 - h.lower[j].coef, -h.lower[j].scale, false});
    }
    for (int i = 0; i < h.p; ++i) {
        if (i < h.n) f.push_back({1.0 - h.upper[i].coef, -h.upper[i].scale, true});
        else f.push_back({h.upper[i].coef, h.upper[i].scale, false});
    }
    return f;
}

inline cplx log_mellin(const std::vector<GammaFactor>& fs, cplx s) {
    cplx acc = 0.0;
    for (const auto& f : fs) {
        const cplx lg = log_gamma(f.c + f.k * s);
        acc += f.numer ? lg : -lg;
    }
    return acc;
}

// Poles x1/w1 and x2/w2 (same sign convention) coincide up to tol.
inline bool same_pole(double x1, double w1, double x2, double w2, double tol) {
    const double u = w2 * x1, v = w1 * x2;
    return std::abs(u - v) <= tol * std::max({1.0, std::abs(u), std::abs(v)});
}

struct RawPole {
    double loc;
    double x, w;  // loc = sign * x / w
    int index, layer;
};

struct PoleGroup {
    double loc;
    std::vector<PoleOrigin> origins;
};

// Lower poles -(b_j + l)/beta_j for j < m (descending) or upper poles
// (1 - a_i + k)/alpha_i for i < n (ascending), grouped by coincidence.
inline std::vector<PoleGroup> enumerate_poles(const HFunctionSpec& h, bool lower, int layers, double tol,
                                              double* complete_bound) {
    std::vector<RawPole> raw;
    const int count = lower ? h.m : h.n;
    double bound = lower ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) {
        const HPair pr = lower ? h.lower[i] : h.upper[i];
        for (int l = 0; l <= layers; ++l) {
            const double x = lower ? pr.coef + l : 1.0 - pr.coef + l;
            const double loc = lower ? -x / pr.scale : x / pr.scale;
            raw.push_back({loc, x, pr.scale, i, l});
        }
        const double last = lower ? -(pr.coef + layers) / pr.scale : (1.0 - pr.coef + layers) / pr.scale;
        bound = lower ? std::max(bound, last) : std::min(bound, last);
    }
    if (complete_bound) *complete_bound = bound;
    std::sort(raw.begin(), raw.end(), [lower](const RawPole& u, const RawPole& v) {
        return lower ? u.loc > v.loc : u.loc < v.loc;
    });
    std::vector<PoleGroup> groups;
    const RawPole* head = nullptr;
    for (const auto& r : raw) {
        if (head && same_pole(head->x, head->w, r.x, r.w, tol)) {
            groups.back().origins.push_back({r.index, r.layer});
            continue;
        }
        groups.push_back({r.loc, {{r.index, r.layer}}});
        head = &r;
    }
    return groups;
}

inline double harmonic(int l) {
    double s = 0.0;
    for (int i = 1; i <= l; ++i) s += 1.0 / i;
    return s;
}

inline double harmonic2(int l) {
    double s = 0.0;
    for (int i = 1; i <= l; ++i) s += 1.0 / (double(i) * i);
    return s;
}

// Residue of H(s) z^{-s} at s0, written as
//   sign * exp(log_amp) * z^{-s0} * (poly[0] + poly[1] log z + poly[2] log^2 z).
struct Residue {
    double location = 0.0;
    int order = 0;  // effective order; 0 means the residue vanishes
    double log_amp = 0.0;
    int sign = 1;
    std::array<double, 3> poly{1.0, 0.0, 0.0};

    double magnitude(double z) const {
        if (order <= 0) return 0.0;
        const double L = std::log(z);
        const double pm = std::abs(poly[0]) + std::abs(poly[1] * L) + std::abs(poly[2] * L * L);
        return std::exp(log_amp - location * L) * pm;
    }
    double value(double z) const {
        if (order <= 0) return 0.0;
        const double L = std::log(z);
        const double pv = poly[0] + poly[1] * L + poly[2] * L * L;
        return sign * std::exp(log_amp - location * L) * pv;
    }
};

inline Residue residue_at(const std::vector<GammaFactor>& fs, double s0) {
    Residue r;
    r.location = s0;
    int n_num = 0, n_den = 0;
    double log_a = 0.0, phi1 = 0.0, phi2 = 0.0;
    int sign = 1;
    constexpr double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    for (const auto& f : fs) {
        const double arg0 = f.c + f.k * s0;
        const double nearest = std::nearbyint(arg0);
        const bool singular = nearest <= 0.0 && std::abs(arg0 - nearest) <= 1e-7 * std::max(1.0, std::abs(arg0));
        if (singular) {
            const int l = static_cast<int>(-nearest);
            const double log_fact = std::lgamma(l + 1.0);
            const int s = ((l % 2) ? -1 : 1) * (f.k > 0 ? 1 : -1);
            const double d1 = f.k * digamma(l + 1.0);
            const double d2 = f.k * f.k * (zeta2 + harmonic2(l));
            if (f.numer) {
                ++n_num;
                log_a += -std::log(std::abs(f.k)) - log_fact;
                phi1 += d1;
                phi2 += d2;
            } else {
                ++n_den;
                log_a += std::log(std::abs(f.k)) + log_fact;
                phi1 -= d1;
                phi2 -= d2;
            }
            sign *= s;
        } else {
            int gs = 1;
            const double lg = log_gamma(arg0, &gs);
            const double d1 = f.k * digamma(arg0);
            const double d2 = f.k * f.k * boost::math::trigamma(arg0);
            if (f.numer) {
                log_a += lg;
                phi1 += d1;
                phi2 += d2;
            } else {
                log_a -= lg;
                phi1 -= d1;
                phi2 -= d2;
            }
            sign *= gs;
        }
    }
    const int order = n_num - n_den;
    if (order <= 0) {
        r.order = 0;
        return r;
    }
    if (order > 3) fail(ErrorKind::pole, "pole of order ", order, " at s=", s0, " is not supported (max 3)");
    r.order = order;
    r.log_amp = log_a;
    r.sign = sign;
    phi2 *= 0.5;
    if (order == 1) r.poly = {1.0, 0.0, 0.0};
    else if (order == 2) r.poly = {phi1, -1.0, 0.0};
    else r.poly = {phi2 + 0.5 * phi1 * phi1, -phi1, 0.5};
    return r;
}

inline bool near_zero(double x) { return std::abs(x) <= 1e-12; }

} // namespace detail

// Characteristic sums of a parameter block.
inline HCharacteristics characteristics(const HFunctionSpec& h) {
    HCharacteristics c;
    double sa = 0.0, sb = 0.0, salpha = 0.0, sbeta = 0.0;
    for (int i = 0; i < h.p; ++i) {
        c.a_star += (i < h.n ? 1.0 : -1.0) * h.upper[i].scale;
        sa += h.upper[i].coef;
        salpha += h.upper[i].scale;
    }
    for (int j = 0; j < h.q; ++j) {
        c.a_star += (j < h.m ? 1.0 : -1.0) * h.lower[j].scale;
        sb += h.lower[j].coef;
        sbeta += h.lower[j].scale;
    }
    c.delta = sbeta - salpha;
    c.mu = sb - sa + 0.5 * (h.p - h.q);
    return c;
}

// prod beta_j^beta_j / prod alpha_i^alpha_i, the radius of convergence scale.
inline double radius_scale(const HFunctionSpec& h) {
    double lg = 0.0;
    for (const auto& b : h.lower) lg += b.scale * std::log(b.scale);
    for (const auto& a : h.upper) lg -= a.scale * std::log(a.scale);
    return std::exp(lg);
}

inline HFunctionSpec make_spec(int m, int n, std::vector<HPair> upper, std::vector<HPair> lower,
                               double collision_tol = detail::pole_tol_default) {
    const int p = static_cast<int>(upper.size()), q = static_cast<int>(lower.size());
    if (m < 0 || n < 0) detail::fail(ErrorKind::validation, "make_spec: m and n must be nonnegative");
    if (m > q) detail::fail(ErrorKind::validation, "make_spec: m=", m, " exceeds q=", q);
    if (n > p) detail::fail(ErrorKind::validation, "make_spec: n=", n, " exceeds p=", p);
    for (const auto& pr : upper)
        if (!std::isfinite(pr.coef) || !(pr.scale > 0) || !std::isfinite(pr.scale))
            detail::fail(ErrorKind::validation, "make_spec: upper pair needs finite coef and positive scale");
    for (const auto& pr : lower)
        if (!std::isfinite(pr.coef) || !(pr.scale > 0) || !std::isfinite(pr.scale))
            detail::fail(ErrorKind::validation, "make_spec: lower pair needs finite coef and positive scale");
    HFunctionSpec h{m, n, p, q, std::move(upper), std::move(lower)};
    // Lower poles run to -inf, upper poles to +inf; they can only meet in the
    // window between the smallest upper pole and the largest lower pole.
    for (int j = 0; j < m; ++j) {
        const auto& b = h.lower[j];
        for (int i = 0; i < n; ++i) {
            const auto& a = h.upper[i];
            const double top = -b.coef / b.scale;
            const double bottom = (1.0 - a.coef) / a.scale;
            if (top < bottom - 1e-12) continue;
            const double span = top - bottom;
            const int lmax = static_cast<int>(std::min(1e6, std::ceil(span * b.scale) + 1));
            for (int l = 0; l <= lmax; ++l) {
                // k with (1 - a + k)/alpha == -(b + l)/beta
                const double kf = -(b.coef + l) * a.scale / b.scale - (1.0 - a.coef);
                const int k = static_cast<int>(std::nearbyint(kf));
                if (k < 0) break;
                if (detail::same_pole(-(b.coef + l), b.scale, 1.0 - a.coef + k, a.scale, collision_tol))
                    detail::fail(ErrorKind::pole, "make_spec: lower pole (j=", j + 1, ", l=", l,
                                 ") collides with upper pole (i=", i + 1, ", k=", k, ") at s=",
                                 (1.0 - a.coef + k) / a.scale);
            }
        }
    }
    return h;
}

inline HFunctionSpec make_spec(int m, int n, int p, int q, std::vector<HPair> upper, std::vector<HPair> lower,
                               double collision_tol = detail::pole_tol_default) {
    if (p != static_cast<int>(upper.size()) || q != static_cast<int>(lower.size()))
        detail::fail(ErrorKind::validation, "make_spec: p,q (", p, ",", q, ") do not match row lengths (",
                     upper.size(), ",", lower.size(), ")");
    return make_spec(m, n, std::move(upper), std::move(lower), collision_tol);
}

inline PoleTable pole_table(const HFunctionSpec& h, int layers, double collision_tol = detail::pole_tol_default) {
    if (layers < 1) detail::fail(ErrorKind::validation, "pole_table: layers must be >= 1");
    PoleTable t;
    t.cutoff = layers;
    const auto fs = detail::gamma_factors(h);
    for (int side = 0; side < 2; ++side) {
        const bool lower = side == 0;
        double bound = 0.0;
        const auto groups = detail::enumerate_poles(h, lower, layers, collision_tol, &bound);
        for (const auto& g : groups) {
            if (lower ? g.loc < bound - 1e-12 : g.loc > bound + 1e-12) break;
            const auto res = detail::residue_at(fs, g.loc);
            Pole pl{g.loc, static_cast<int>(g.origins.size()), res.order, g.origins};
            (lower ? t.lower_poles : t.upper_poles).push_back(pl);
        }
    }
    return t;
}

// Terms of the residue expansion at zero: H(z) ~ sum z^{exponent}(c0 + c1 log z + c2 log^2 z).
struct ExpansionTerm {
    double exponent;
    int order;
    std::array<double, 3> coeffs;
};

inline std::vector<ExpansionTerm> zero_expansion(const HFunctionSpec& h, int max_terms,
                                                 double collision_tol = detail::pole_tol_default) {
    std::vector<ExpansionTerm> out;
    const auto fs = detail::gamma_factors(h);
    double bound = 0.0;
    const auto groups = detail::enumerate_poles(h, true, std::max(max_terms, 4), collision_tol, &bound);
    for (const auto& g : groups) {
        if (g.loc < bound - 1e-12 || static_cast<int>(out.size()) >= max_terms) break;
        const auto r = detail::residue_at(fs, g.loc);
        std::array<double, 3> c{0.0, 0.0, 0.0};
        if (r.order > 0) {
            const double a = r.sign * std::exp(r.log_amp);
            for (int i = 0; i < 3; ++i) c[i] = a * r.poly[i];
        }
        out.push_back({-g.loc, r.order, c});
    }
    return out;
}

// Vertical line Re s = gamma separating the two pole families.
struct ContourLine {
    double gamma, lower, upper;
};

inline ContourLine contour_line(const HFunctionSpec& h) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < h.m; ++j) lo = std::max(lo, -h.lower[j].coef / h.lower[j].scale);
    for (int i = 0; i < h.n; ++i) hi = std::min(hi, (1.0 - h.upper[i].coef) / h.upper[i].scale);
    if (!(lo < hi))
        detail::fail(ErrorKind::precondition, "contour: no admissible vertical line (largest lower pole ", lo,
                     " >= smallest upper pole ", hi, ")");
    if (hi - lo < 1e-6)
        detail::fail(ErrorKind::pole, "contour: poles at ", lo, " and ", hi, " are too close to place a line");
    double g = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) g = 0.5 * (lo + hi);
    else if (std::isfinite(lo)) g = lo + 0.5;
    else if (std::isfinite(hi)) g = hi - 0.5;
    return {g, lo, hi};
}

namespace detail {

template <class Integrand>
auto contour_integrate(Integrand f, double t0, const EvalConfig& cfg, bool full_line, double* err_out) {
    using T = decltype(f(0.0));
    const int panels = std::max(1, (cfg.quadrature_points + 30) / 31);
    const double qrel = 0.25 * cfg.rel_tol, qabs = 0.25 * cfg.abs_tol;
    auto r = full_line ? integrate_adaptive(f, -t0, t0, qabs, qrel, 2 * panels)
                       : integrate_adaptive(f, 0.0, t0, qabs, qrel, panels);
    T total = r.value;
    double err = r.error;
    double T_hi = t0;
    while (true) {
        auto tail = integrate_adaptive(f, T_hi, 2 * T_hi, qabs, qrel, panels);
        total += tail.value;
        err += tail.error;
        if (full_line) {
            auto left = integrate_adaptive(f, -2 * T_hi, -T_hi, qabs, qrel, panels);
            total += left.value;
            err += left.error;
            tail.l1 += left.l1;
        }
        T_hi *= 2;
        if (tail.l1 <= 0.1 * (cfg.rel_tol * std::abs(total) + cfg.abs_tol)) {
            err += tail.l1;
            break;
        }
        if (T_hi > 1e5)
            fail(ErrorKind::non_convergence, "contour: tail did not decay below tolerance by |Im s| = ", T_hi);
    }
    *err_out = err;
    return total;
}

// When one pole family is empty the line may move freely to that side. Moving
// it to the real saddle of |H(s) z^{-s}| keeps the integrand on the scale of
// the result, which avoids cancellation for exponentially small values.
inline double saddle_abscissa(const std::vector<GammaFactor>& fs, const ContourLine& line, double lz) {
    const bool right = !std::isfinite(line.upper) && lz > 0.0;
    const bool left = !std::isfinite(line.lower) && lz < 0.0;
    if (!right && !left) return line.gamma;
    const double dir = right ? 1.0 : -1.0;
    auto phi = [&](double g) { return log_mellin(fs, cplx(g, 0.0)).real() - g * lz; };
    double best = line.gamma, step = 0.5;
    int iters = 0;
    while (iters++ < 60 && std::abs(best) < 1e6 && phi(best + dir * step) < phi(best)) {
        best += dir * step;
        step *= 2.0;
    }
    if (best == line.gamma) return line.gamma;
    double a = best - dir * 0.5 * step, b = best + dir * step;
    if (dir < 0) std::swap(a, b);
    if (right) a = std::max(a, line.gamma);
    else b = std::min(b, line.gamma);
    return boost::math::tools::brent_find_minima(phi, a, b, 30).first;
}

} // namespace detail

// Mellin-Barnes integral along Re s = gamma, using conjugate symmetry.
inline EvalResult contour(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    cfg.validate();
    if (!(z > 0) || !std::isfinite(z)) detail::fail(ErrorKind::validation, "contour: z must be positive, got ", z);
    const auto ch = characteristics(h);
    if (!(ch.a_star > 0))
        detail::fail(ErrorKind::precondition, "contour: requires a* > 0, got a*=", ch.a_star);
    const auto line = contour_line(h);
    const auto fs = detail::gamma_factors(h);
    const double lz = std::log(z);
    const double gamma = detail::saddle_abscissa(fs, line, lz);
    auto f = [&](double tau) {
        const cplx s(gamma, tau);
        const cplx e = detail::log_mellin(fs, s) - s * lz;
        if (e.real() < -700.0) return 0.0;
        return std::exp(e.real()) * std::cos(e.imag()) / std::numbers::pi;
    };
    double err = 0.0;
    const double v = detail::contour_integrate(f, cfg.contour_halfheight, cfg, false, &err);
    return {v, Route::contour, err, {}};
}

// Full-line version keeping the imaginary part, for symmetry checks.
inline cplx contour_complex(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    cfg.validate();
    if (!(z > 0)) detail::fail(ErrorKind::validation, "contour: z must be positive");
    const auto ch = characteristics(h);
    if (!(ch.a_star > 0)) detail::fail(ErrorKind::precondition, "contour: requires a* > 0");
    const auto line = contour_line(h);
    const auto fs = detail::gamma_factors(h);
    const double lz = std::log(z);
    const double gamma = detail::saddle_abscissa(fs, line, lz);
    auto f = [&](double tau) {
        const cplx s(gamma, tau);
        const cplx e = detail::log_mellin(fs, s) - s * lz;
        if (e.real() < -700.0) return cplx(0.0);
        return std::exp(e) / (2.0 * std::numbers::pi);
    };
    double err = 0.0;
    return detail::contour_integrate(f, cfg.contour_halfheight, cfg, true, &err);
}

// Complex argument w with |arg w| < a* pi/2; the integrand decays like
// exp(-(a* pi/2 - |arg w|)|tau|).
inline cplx contour_complex(const HFunctionSpec& h, cplx w, const EvalConfig& cfg = {}) {
    cfg.validate();
    if (w == cplx(0.0) || !std::isfinite(std::abs(w))) detail::fail(ErrorKind::validation, "contour: w must be nonzero and finite");
    const auto ch = characteristics(h);
    if (!(ch.a_star > 0)) detail::fail(ErrorKind::precondition, "contour: requires a* > 0");
    const double sector = 0.5 * ch.a_star * std::numbers::pi;
    if (!(std::abs(std::arg(w)) < sector))
        detail::fail(ErrorKind::precondition, "contour: |arg w| = ", std::abs(std::arg(w)), " must be below a* pi/2 = ", sector);
    const auto line = contour_line(h);
    const auto fs = detail::gamma_factors(h);
    const cplx lw = std::log(w);
    auto f = [&](double tau) {
        const cplx s(line.gamma, tau);
        const cplx e = detail::log_mellin(fs, s) - s * lw;
        if (e.real() < -700.0) return cplx(0.0);
        return std::exp(e) / (2.0 * std::numbers::pi);
    };
    double err = 0.0;
    return detail::contour_integrate(f, cfg.contour_halfheight, cfg, true, &err);
}

inline double eval_contour(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    return contour(h, z, cfg).value;
}

namespace detail {

// Bound on what is left after summing the residues on one side of the line
// Re s = c:  |remainder| <= z^{-c} / pi * int_0^inf |H(c + i tau)| d tau.
// The integrand decays once a* > 0; +inf if the integral does not settle.
inline double line_remainder(const std::vector<GammaFactor>& fs, double c, double z) {
    auto f = [&](double tau) {
        const double e = log_mellin(fs, cplx(c, tau)).real();
        return e < -700.0 ? 0.0 : std::exp(e);
    };
    double total = 0.0, lo = 0.0, width = 4.0;
    for (int i = 0; i < 30; ++i) {
        const auto r = integrate_adaptive(f, lo, lo + width, 0.0, 1e-4, 2, 200);
        if (!std::isfinite(r.value)) return std::numeric_limits<double>::infinity();
        total += r.value;
        lo += width;
        if (i >= 1 && r.value <= 1e-6 * total) return std::exp(-c * std::log(z)) * total / std::numbers::pi;
        width *= 2.0;
    }
    return std::numeric_limits<double>::infinity();
}

struct SeriesOutcome {
    EvalResult result;
    bool near_resonance = false;
};

inline SeriesOutcome sum_series(const HFunctionSpec& h, double z, const EvalConfig& cfg, bool at_zero) {
    cfg.validate();
    if (!(z > 0) || !std::isfinite(z)) fail(ErrorKind::validation, "series: z must be positive, got ", z);
    const auto ch = characteristics(h);
    const double dscale = radius_scale(h);
    bool convergent;
    if (at_zero) convergent = ch.delta > 1e-12 || (near_zero(ch.delta) && z < dscale);
    else convergent = ch.delta < -1e-12 || (near_zero(ch.delta) && z > dscale);
    if (!convergent) {
        if (near_zero(ch.delta))
            fail(ErrorKind::non_convergence, "series: Delta=0 and z is outside the disc of convergence");
        if (!(ch.a_star > 0))
            fail(ErrorKind::precondition, "series: asymptotic expansion needs a* > 0, got ", ch.a_star);
    }
    SeriesOutcome out;
    out.result.route = at_zero ? Route::series_zero : Route::series_infinity;
    const auto fs = gamma_factors(h);
    double bound = 0.0;
    const auto groups = enumerate_poles(h, at_zero, cfg.series_terms, cfg.collision_tol, &bound);

    double sum = 0.0, comp = 0.0, abs_sum = 0.0;
    double last_mag = 0.0, prev_mag = std::numeric_limits<double>::infinity();
    int small_run = 0, nonzero = 0;
    bool done = false;
    double prev_loc = std::numeric_limits<double>::quiet_NaN();
    double summed_loc = std::numeric_limits<double>::quiet_NaN();  // last pole included in the sum
    double next_loc = std::numeric_limits<double>::quiet_NaN();    // first pole left out
    for (const auto& g : groups) {
        next_loc = g.loc;
        if (at_zero ? g.loc < bound - 1e-12 : g.loc > bound + 1e-12) break;
        if (std::isfinite(prev_loc) && std::abs(g.loc - prev_loc) < cfg.resonance_gap * std::max(1.0, std::abs(g.loc))) {
            out.near_resonance = true;
            std::ostringstream os;
            os << "near-resonant poles at s=" << prev_loc << " and s=" << g.loc;
            out.result.warnings.push_back(os.str());
        }
        prev_loc = g.loc;
        const auto r = residue_at(fs, g.loc);
        if (r.order <= 0) {
            summed_loc = g.loc;
            next_loc = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        if (!at_zero && r.order > 1)
            fail(ErrorKind::pole, "series at infinity: coincident upper poles at s=", g.loc, " are not supported");
        const double t = (at_zero ? 1.0 : -1.0) * r.value(z);
        const double mag = r.magnitude(z);
        if (!std::isfinite(t)) break;
        ++nonzero;
        if (!convergent && nonzero > 2 && mag > prev_mag && mag > last_mag) break;  // past the smallest term
        summed_loc = g.loc;
        next_loc = std::numeric_limits<double>::quiet_NaN();
        // Neumaier compensated summation.
        const double s2 = sum + t;
        comp += std::abs(sum) >= std::abs(t) ? (sum - s2) + t : (t - s2) + sum;
        sum = s2;
        // exp() of the log-amplitude amplifies its rounding by the size of the exponent.
        abs_sum += std::abs(t) * (4.0 + std::abs(r.log_amp) + std::abs(g.loc * std::log(z)));
        prev_mag = last_mag;
        last_mag = mag;
        const double target = 0.01 * (cfg.rel_tol * std::abs(sum + comp) + cfg.abs_tol);
        small_run = mag <= target ? small_run + 1 : 0;
        if (small_run >= 3) {
            done = true;
            break;
        }
    }
    const double value = sum + comp;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double err = eps * abs_sum;
    if (convergent) {
        err += done ? last_mag : std::max(last_mag, std::numeric_limits<double>::min()) * 1e6;
        if (!done && nonzero == 0) err = 0.0;  // empty expansion of a convergent series
    } else {
        // The divergent tail is bounded by the integral on a line between the
        // last pole summed and the first one left out.
        if (std::isnan(summed_loc)) {
            err = std::numeric_limits<double>::infinity();
        } else {
            if (std::isnan(next_loc))
                for (const auto& g : groups)
                    if (at_zero ? g.loc < summed_loc : g.loc > summed_loc) {
                        next_loc = g.loc;
                        break;
                    }
            const double next = std::isnan(next_loc) ? summed_loc + (at_zero ? -1.0 : 1.0) : next_loc;
            err += line_remainder(fs, 0.5 * (summed_loc + next), z);
        }
    }
    out.result.value = value;
    out.result.est_error = err;
    return out;
}

} // namespace detail

// Residue expansion at zero with its error estimate.
inline EvalResult series_zero(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    return detail::sum_series(h, z, cfg, true).result;
}

inline EvalResult series_infinity(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    return detail::sum_series(h, z, cfg, false).result;
}

inline double eval_series_zero(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    const auto r = series_zero(h, z, cfg);
    if (!(r.est_error <= cfg.rel_tol * std::abs(r.value) + cfg.abs_tol))
        detail::fail(ErrorKind::non_convergence, "series at zero: error estimate ", r.est_error,
                     " exceeds tolerance at z=", z);
    return r.value;
}

inline double eval_series_infinity(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    const auto r = series_infinity(h, z, cfg);
    if (!(r.est_error <= cfg.rel_tol * std::abs(r.value) + cfg.abs_tol))
        detail::fail(ErrorKind::non_convergence, "series at infinity: error estimate ", r.est_error,
                     " exceeds tolerance at z=", z);
    return r.value;
}

// Picks a series when it meets tolerance and falls back to the contour.
inline EvalResult evaluate(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) {
    cfg.validate();
    if (!(z > 0) || !std::isfinite(z)) detail::fail(ErrorKind::validation, "eval: z must be positive, got ", z);
    std::vector<std::string> notes;
    std::string series_failure;
    if (z != cfg.switch_radius) {
        try {
            auto s = detail::sum_series(h, z, cfg, z < cfg.switch_radius);
            notes = s.result.warnings;
            const bool ok = s.result.est_error <= cfg.rel_tol * std::abs(s.result.value) + cfg.abs_tol;
            if (ok && !s.near_resonance) {
                if (cfg.cross_check && characteristics(h).a_star > 0) {
                    const auto c = contour(h, z, cfg);
                    const double gap = std::abs(c.value - s.result.value);
                    if (gap > 10.0 * (cfg.rel_tol * std::abs(c.value) + cfg.abs_tol) + c.est_error)
                        detail::fail(ErrorKind::disagreement, "eval: series (", s.result.value, ") and contour (",
                                     c.value, ") disagree at z=", z);
                }
                return s.result;
            }
            std::ostringstream os;
            os << to_string(s.result.route) << " rejected (error estimate " << s.result.est_error << ")";
            series_failure = os.str();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::validation) throw;
            series_failure = e.what();
        }
    }
    if (!(characteristics(h).a_star > 0)) {
        detail::fail(ErrorKind::non_convergence, "eval: no route converged at z=", z,
                     series_failure.empty() ? "" : "; ", series_failure);
    }
    auto c = contour(h, z, cfg);
    c.warnings = notes;
    if (!series_failure.empty()) c.warnings.push_back(series_failure);
    return c;
}

inline double eval(const HFunctionSpec& h, double z, const EvalConfig& cfg = {}) { return evaluate(h, z, cfg).value; }

// ---- transform algebra ----

// A transformed function of a variable t:
//   coefficient * t^{var_power} * H_spec(arg_scale * t^{arg_power}).
struct Rewrite {
    HFunctionSpec spec;
    double coefficient = 1.0;
    double var_power = 0.0;
    double arg_scale = 1.0;
    double arg_power = 1.0;
    std::string rule;

    double apply(double t, const EvalConfig& cfg = {}) const {
        return coefficient * std::pow(t, var_power) * eval(spec, arg_scale * std::pow(t, arg_power), cfg);
    }
};

namespace detail {

inline bool same_pair(const HPair& x, const HPair& y) {
    return std::abs(x.coef - y.coef) <= 1e-12 * std::max(1.0, std::abs(x.coef)) &&
           std::abs(x.scale - y.scale) <= 1e-12 * std::max(1.0, x.scale);
}

inline double min_lower_ratio(const HFunctionSpec& h) {
    double r = std::numeric_limits<double>::infinity();
    for (int j = 0; j < h.m; ++j) r = std::min(r, h.lower[j].coef / h.lower[j].scale);
    return r;
}

inline double min_upper_ratio(const HFunctionSpec& h) {
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < h.n; ++i) r = std::min(r, (1.0 - h.upper[i].coef) / h.upper[i].scale);
    return r;
}

} // namespace detail

// Cancels one gamma pair that appears in both numerator and denominator.
// Tries the first-upper/last-lower form, then the dual, then any matching pair.
inline HFunctionSpec reduce(const HFunctionSpec& h) {
    auto drop = [&](int iu, int jl, int dm, int dn) {
        HFunctionSpec r = h;
        r.upper.erase(r.upper.begin() + iu);
        r.lower.erase(r.lower.begin() + jl);
        r.p -= 1;
        r.q -= 1;
        r.m += dm;
        r.n += dn;
        return r;
    };
    // numerator Gamma(1-a-alpha s) (i < n) against denominator Gamma(1-b-beta s) (j >= m)
    if (h.n >= 1 && h.q > h.m && detail::same_pair(h.upper[0], h.lower[h.q - 1])) return drop(0, h.q - 1, 0, -1);
    // numerator Gamma(b+beta s) (j < m) against denominator Gamma(a+alpha s) (i >= n)
    if (h.m >= 1 && h.p > h.n && detail::same_pair(h.upper[h.p - 1], h.lower[0])) return drop(h.p - 1, 0, -1, 0);
    for (int i = 0; i < h.n; ++i)
        for (int j = h.m; j < h.q; ++j)
            if (detail::same_pair(h.upper[i], h.lower[j])) return drop(i, j, 0, -1);
    for (int i = h.n; i < h.p; ++i)
        for (int j = 0; j < h.m; ++j)
            if (detail::same_pair(h.upper[i], h.lower[j])) return drop(i, j, -1, 0);
    detail::fail(ErrorKind::validation, "reduce: no cancelling parameter pair");
}

// H(1/z) expressed as an H-function of z.
inline HFunctionSpec reciprocal_argument(const HFunctionSpec& h) {
    HFunctionSpec r;
    r.m = h.n;
    r.n = h.m;
    r.p = h.q;
    r.q = h.p;
    for (const auto& b : h.lower) r.upper.push_back({1.0 - b.coef, b.scale});
    for (const auto& a : h.upper) r.lower.push_back({1.0 - a.coef, a.scale});
    return r;
}

// Spec G with k*G(z^k) = H(z).
inline HFunctionSpec power_scale(const HFunctionSpec& h, double k) {
    if (!(k > 0) || !std::isfinite(k)) detail::fail(ErrorKind::validation, "power_scale: k must be positive, got ", k);
    HFunctionSpec r = h;
    for (auto& a : r.upper) a.scale *= k;
    for (auto& b : r.lower) b.scale *= k;
    return r;
}

// Laplace transform of x^w H(a x^sigma), as a function of t.
inline Rewrite laplace_transform_spec(const HFunctionSpec& h, double w, double a, double sigma) {
    const auto ch = characteristics(h);
    if (!(ch.a_star > 0)) detail::fail(ErrorKind::precondition, "laplace: requires a* > 0, got ", ch.a_star);
    if (!(a > 0) || !(sigma > 0)) detail::fail(ErrorKind::validation, "laplace: a and sigma must be positive");
    const double lhs = sigma * detail::min_lower_ratio(h) + w;
    if (!(lhs > -1.0))
        detail::fail(ErrorKind::precondition, "laplace: sigma*min(b_j/beta_j)+w = ", lhs, " must exceed -1");
    Rewrite r;
    r.spec = h;
    r.spec.upper.insert(r.spec.upper.begin(), HPair{-w, sigma});
    r.spec.p += 1;
    r.spec.n += 1;
    r.coefficient = 1.0;
    r.var_power = -(w + 1.0);
    r.arg_scale = a;
    r.arg_power = -sigma;
    r.rule = "t^{-(w+1)} H(a t^{-sigma})";
    return r;
}

// Integral over t of (xt)^w J_eta(a (xt)^sigma) H(b t^tau), as a function of x.
inline Rewrite hankel_transform_spec(const HFunctionSpec& h, double eta, double w, double sigma, double tau,
                                     double a, double b) {
    const auto ch = characteristics(h);
    const bool regime = ch.a_star > 0 || (detail::near_zero(ch.a_star) && detail::near_zero(ch.delta) && ch.mu < -1);
    if (!regime) detail::fail(ErrorKind::precondition, "hankel: requires a* > 0 or a* = Delta = 0 with mu < -1");
    if (!(sigma > 0) || !(tau > 0) || !(a > 0) || !(b > 0))
        detail::fail(ErrorKind::validation, "hankel: sigma, tau, a, b must be positive");
    if (!(eta > -0.5)) detail::fail(ErrorKind::precondition, "hankel: eta must exceed -1/2, got ", eta);
    const double c1 = sigma * eta + w + tau * detail::min_lower_ratio(h);
    if (!(c1 > -1.0)) detail::fail(ErrorKind::precondition, "hankel: sigma*eta+w+tau*min(b/beta) = ", c1, " must exceed -1");
    const double lhs2 = tau * detail::min_upper_ratio(h);
    const double rhs2 = w - sigma / 2.0 + 1.0;
    if (!(lhs2 > rhs2))
        detail::fail(ErrorKind::precondition, "hankel: tau*min((1-a)/alpha) = ", lhs2, " must exceed w-sigma/2+1 = ", rhs2);
    Rewrite r;
    r.spec = h;
    const double shift = 1.0 - (w + 1.0) / (2.0 * sigma);
    const double sc = tau / (2.0 * sigma);
    r.spec.upper.insert(r.spec.upper.begin(), HPair{shift - eta / 2.0, sc});
    r.spec.upper.push_back(HPair{shift + eta / 2.0, sc});
    r.spec.p += 2;
    r.spec.n += 1;
    r.coefficient = 1.0 / (2.0 * sigma) * std::pow(2.0 / a, (w + 1.0) / sigma);
    r.var_power = -1.0;
    r.arg_scale = b * std::pow(2.0 / a, tau / sigma);
    r.arg_power = -tau;
    r.rule = "(2/a)^{(w+1)/sigma} / (2 sigma x) H(b (2/a)^{tau/sigma} x^{-tau})";
    return r;
}

// Riemann-Liouville derivative of order frac_order of t^w H(t^sigma), as a function of x.
inline Rewrite rl_derivative_spec(const HFunctionSpec& h, double frac_order, double w, double sigma) {
    if (!(frac_order > 0 && frac_order < 1))
        detail::fail(ErrorKind::validation, "rl_derivative: order must lie in (0,1), got ", frac_order);
    if (!(sigma > 0)) detail::fail(ErrorKind::validation, "rl_derivative: sigma must be positive");
    const auto ch = characteristics(h);
    if (!(ch.a_star > 0)) detail::fail(ErrorKind::precondition, "rl_derivative: requires a* > 0, got ", ch.a_star);
    const double lhs = sigma * detail::min_lower_ratio(h) + w;
    if (!(lhs > -1.0))
        detail::fail(ErrorKind::precondition, "rl_derivative: sigma*min(b_j/beta_j)+w = ", lhs, " must exceed -1");
    Rewrite r;
    r.spec = h;
    r.spec.upper.insert(r.spec.upper.begin(), HPair{-w, sigma});
    r.spec.lower.push_back(HPair{-w + frac_order, sigma});
    r.spec.p += 1;
    r.spec.q += 1;
    r.spec.n += 1;
    r.coefficient = 1.0;
    r.var_power = w - frac_order;
    r.arg_scale = 1.0;
    r.arg_power = sigma;
    r.rule = "x^{w-order} H(x^sigma)";
    return r;
}

// Spec of the Mellin convolution  int_0^inf H1(z t) H2(x/t) dt/t  as a function of z x.
inline HFunctionSpec convolve_specs(const HFunctionSpec& h1, const HFunctionSpec& h2) {
    const auto c1 = characteristics(h1), c2 = characteristics(h2);
    using detail::near_zero;
    const bool alt[5] = {
        c1.a_star > 0 && c2.a_star >= -1e-12 && !near_zero(c2.delta),
        c1.a_star >= -1e-12 && c2.a_star > 0 && !near_zero(c1.delta),
        near_zero(c1.a_star) && near_zero(c1.delta) && c1.mu < -1 && c2.a_star > 0,
        near_zero(c2.a_star) && near_zero(c2.delta) && c2.mu < -1 && c1.a_star > 0,
        near_zero(c1.a_star) && near_zero(c1.delta) && c1.mu < -1 && near_zero(c2.a_star) && near_zero(c2.delta) &&
            c2.mu < -1,
    };
    if (!(alt[0] || alt[1] || alt[2] || alt[3] || alt[4]))
        detail::fail(ErrorKind::precondition, "convolve: none of the admissibility alternatives holds (a1*=", c1.a_star,
                     ", a2*=", c2.a_star, ", Delta1=", c1.delta, ", Delta2=", c2.delta, ")");
    const double A1 = detail::min_upper_ratio(h1);
    const double B1 = detail::min_lower_ratio(h1);
    double A2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < h2.m; ++j) A2 = std::min(A2, h2.lower[j].coef / h2.lower[j].scale);
    double B2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < h2.n; ++i) B2 = std::min(B2, (1.0 - h2.upper[i].coef) / h2.upper[i].scale);
    const struct {
        const char* name;
        double x, y;
    } ineq[4] = {{"A1+B1>0", A1, B1}, {"A2+B2>0", A2, B2}, {"A1+A2>0", A1, A2}, {"B1+B2>0", B1, B2}};
    for (const auto& c : ineq)
        if (!(c.x + c.y > 0))
            detail::fail(ErrorKind::precondition, "convolve: condition ", c.name, " fails (", c.x, " + ", c.y, ")");
    HFunctionSpec r;
    r.m = h1.m + h2.m;
    r.n = h1.n + h2.n;
    r.p = h1.p + h2.p;
    r.q = h1.q + h2.q;
    r.upper.assign(h1.upper.begin(), h1.upper.begin() + h1.n);
    r.upper.insert(r.upper.end(), h2.upper.begin(), h2.upper.end());
    r.upper.insert(r.upper.end(), h1.upper.begin() + h1.n, h1.upper.end());
    r.lower.assign(h1.lower.begin(), h1.lower.begin() + h1.m);
    r.lower.insert(r.lower.end(), h2.lower.begin(), h2.lower.end());
    r.lower.insert(r.lower.end(), h1.lower.begin() + h1.m, h1.lower.end());
    return r;
}

// ---- named specs ----

// E_{rho,mu}(-x) = H[x].
inline HFunctionSpec mittag_leffler_spec(double rho, double mu) {
    return make_spec(1, 1, {{0.0, 1.0}}, {{0.0, 1.0}, {1.0 - mu, rho}});
}

// (1/beta) z^{b/beta} exp(-z^{1/beta}).
inline HFunctionSpec exponential_spec(double b = 0.0, double beta = 1.0) { return make_spec(1, 0, {}, {{b, beta}}); }

// cos(x) = sqrt(pi) H[x^2/4].
inline HFunctionSpec cosine_spec() { return make_spec(1, 0, {}, {{0.0, 1.0}, {0.5, 1.0}}); }

} // namespace fracdiff
