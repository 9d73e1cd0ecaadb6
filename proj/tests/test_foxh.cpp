#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "fracdiff/foxh.hpp"
#include "fracdiff/kernels.hpp"
#include "fracdiff/quadrature.hpp"

using namespace fracdiff;

namespace {

struct Rng {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double a, double b) { return a + (b - a) * (next() >> 11) * 0x1.0p-53; }
};

const double z_grid[] = {0.25, 0.5, 1.0, 2.0, 4.0};

// Pointwise tolerance of "10x the evaluation tolerance" for a value v.
double tol10(double v, const EvalConfig& cfg = {}) { return 10.0 * (cfg.rel_tol * std::abs(v) + cfg.abs_tol); }

// Where both routes meet tolerance (the series is admissible in the sense used by
// evaluate) they must agree to 10x tolerance; elsewhere to within the stated error bars.
int admissible_pairs = 0;
void expect_routes_agree(const EvalResult& c, const EvalResult& s, const EvalConfig& cfg, const std::string& where) {
    const double gap = std::abs(c.value - s.value);
    const bool series_ok = s.est_error <= cfg.rel_tol * std::abs(s.value) + cfg.abs_tol;
    const bool contour_ok = c.est_error <= cfg.rel_tol * std::abs(c.value) + cfg.abs_tol;
    if (series_ok && contour_ok) {
        ++admissible_pairs;
        EXPECT_LE(gap, tol10(c.value, cfg)) << where;
    } else {
        EXPECT_LE(gap, c.est_error + s.est_error) << where;
    }
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::validation;
}

} // namespace

TEST(MakeSpec, ZKernelShapeIsValid) {
    const double alpha = 1.5, beta = 0.8;
    const int d = 2;
    const auto h = make_spec(2, 1, {{1.0, 1.0}, {1.0, beta}}, {{d / 2.0, alpha / 2}, {1.0, 1.0}, {1.0, alpha / 2}});
    EXPECT_EQ(h.p, 2);
    EXPECT_EQ(h.q, 3);
    EXPECT_EQ(h, kernel_spec(KernelKind::Z, {alpha, beta, d}));
}

TEST(MakeSpec, ShapeErrors) {
    EXPECT_EQ(kind_of([] { make_spec(2, 0, {}, {{0.0, 1.0}}); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { make_spec(0, 1, {}, {{0.0, 1.0}}); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { make_spec(1, 0, 1, 1, {}, {{0.0, 1.0}}); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { make_spec(1, 0, {}, {{0.0, -1.0}}); }), ErrorKind::validation);
}

TEST(MakeSpec, PoleCollision) {
    // Gamma(1 - 1 - s) has poles at s = 0, 1, ...; Gamma(s) at s = 0, -1, ...
    EXPECT_EQ(kind_of([] { make_spec(1, 1, {{1.0, 1.0}}, {{0.0, 1.0}}); }), ErrorKind::pole);
    // Overlapping families: Gamma(-2 + s) has poles at 2, 1, 0, ...; Gamma(1 - 2s) at 1/2, 1, 3/2, ...
    EXPECT_EQ(kind_of([] { make_spec(1, 1, {{0.0, 2.0}}, {{-2.0, 1.0}}); }), ErrorKind::pole);
    // Upper (0,1) against lower (0,1) is separated: poles at 1,2,... and 0,-1,...
    EXPECT_NO_THROW(make_spec(1, 1, {{0.0, 1.0}}, {{0.0, 1.0}}));
}

TEST(Characteristics, Sums) {
    const auto h = make_spec(1, 1, {{0.0, 1.0}}, {{0.0, 1.0}, {0.25, 0.75}});  // E_{0.75,0.75}(-z)
    const auto c = characteristics(h);
    EXPECT_NEAR(c.a_star, 2.0 - 0.75, 1e-15);
    EXPECT_NEAR(c.delta, 0.75, 1e-15);
    EXPECT_NEAR(c.mu, 0.0 + 0.25 - 0.0 + (0 - 1) * 0.5, 1e-15);
}

TEST(Eval, Examples) {
    EXPECT_NEAR(eval(exponential_spec(), 1.0), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(eval(mittag_leffler_spec(1.0, 1.0), 2.0), std::exp(-2.0), 1e-12);
}

TEST(Eval, ExponentialSeriesAtInfinityIsEmpty) {
    const auto h = exponential_spec();
    EXPECT_TRUE(pole_table(h, 5).upper_poles.empty());
    const auto r = evaluate(h, 50.0);
    EXPECT_LT(std::abs(r.value), 1e-20);
    EXPECT_NEAR(r.value, std::exp(-50.0), 1e-8 * std::exp(-50.0));
}

TEST(Eval, YKernelDecaysLikeInverseZ) {
    // For alpha < 2 the bound is attained; at alpha = 2 the decay is exponential.
    const auto h = kernel_spec(KernelKind::Y, {1.5, 0.8, 1});
    const double a = eval(h, 1e3) * 1e3, b = eval(h, 1e4) * 1e4;
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(b / a, 1.0, 0.05);
}

TEST(Eval, RoutesAgreeInOverlap) {
    // Delta > 0: the zero series converges everywhere, so it and the contour are both admissible.
    Rng rng{21};
    const EvalConfig cfg;
    for (int i = 0; i < 25; ++i) {
        const double rho = rng.uniform(0.3, 1.7), mu = rng.uniform(0.5, 3.0);
        const auto h = mittag_leffler_spec(rho, mu);
        for (double z : z_grid) {
            const auto c = contour(h, z, cfg);
            const auto s = series_zero(h, z, cfg);
            expect_routes_agree(c, s, cfg, "rho=" + std::to_string(rho) + " mu=" + std::to_string(mu) + " z=" + std::to_string(z));
        }
    }
    // Delta < 0: the series at infinity converges.
    for (int i = 0; i < 10; ++i) {
        const double rho = rng.uniform(0.3, 1.7), mu = rng.uniform(0.5, 3.0);
        const auto h = reciprocal_argument(mittag_leffler_spec(rho, mu));
        for (double z : z_grid) {
            const auto c = contour(h, z, cfg);
            const auto s = series_infinity(h, z, cfg);
            expect_routes_agree(c, s, cfg, "rho=" + std::to_string(rho) + " mu=" + std::to_string(mu) + " z=" + std::to_string(z));
        }
    }
    EXPECT_GT(admissible_pairs, 120);
}

TEST(Eval, ContourImaginaryPartVanishes) {
    EvalConfig cfg;
    cfg.abs_tol = 1e-14;
    for (const auto& h : {kernel_spec(KernelKind::Z, {2.0, 0.8, 1}), mittag_leffler_spec(0.6, 1.3), exponential_spec()})
        for (double z : z_grid) EXPECT_LE(std::abs(contour_complex(h, z, cfg).imag()), 10.0 * cfg.abs_tol) << z;
}

TEST(Eval, ComplexArgumentMatchesExponential) {
    const auto h = exponential_spec();
    for (double ph : {-1.2, -0.5, 0.0, 0.7, 1.3}) {
        const cplx w = std::polar(3.0, ph);
        EXPECT_LE(std::abs(contour_complex(h, w) - std::exp(-w)), 1e-10 * std::abs(std::exp(-w))) << ph;
    }
    EXPECT_EQ(kind_of([&] { contour_complex(h, std::polar(1.0, 1.6)); }), ErrorKind::precondition);
}

TEST(Eval, RejectsNonpositiveArgument) {
    EXPECT_EQ(kind_of([] { eval(exponential_spec(), 0.0); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { eval(exponential_spec(), -1.0); }), ErrorKind::validation);
}

TEST(PoleTable, ResonanceSplitsUnderPerturbation) {
    // Z kernel with d = alpha = 1: Gamma(1/2 + s/2) and Gamma(1 + s) share poles at s = -1, -3, ...
    const auto res = pole_table(kernel_spec(KernelKind::Z, {1.0, 0.8, 1}), 6);
    ASSERT_FALSE(res.lower_poles.empty());
    EXPECT_NEAR(res.lower_poles[0].location, -1.0, 1e-12);
    EXPECT_EQ(res.lower_poles[0].order, 2);

    const auto split = pole_table(kernel_spec(KernelKind::Z, {1.0 + 1e-6, 0.8, 1}), 6);
    int near_minus_one = 0;
    for (const auto& p : split.lower_poles) {
        if (std::abs(p.location + 1.0) < 1e-5) {
            ++near_minus_one;
            EXPECT_EQ(p.order, 1);
        }
    }
    EXPECT_EQ(near_minus_one, 2);
}

TEST(Transforms, ReduceCancelsPair) {
    // H^{1,1}_{1,2}[z | (0,1); (0,1),(0,1)] reduces to exp(-z).
    const auto h = make_spec(1, 1, {{0.0, 1.0}}, {{0.0, 1.0}, {0.0, 1.0}});
    const auto r = reduce(h);
    EXPECT_EQ(r, exponential_spec());
    for (double z : z_grid) EXPECT_NEAR(eval(h, z), eval(r, z), tol10(eval(r, z)));
    EXPECT_EQ(kind_of([] { reduce(exponential_spec()); }), ErrorKind::validation);
}

TEST(Transforms, ReciprocalArgument) {
    const auto h = mittag_leffler_spec(0.7, 1.2);
    const auto g = reciprocal_argument(h);
    for (double z : z_grid) {
        const double want = eval(h, 1.0 / z);
        EXPECT_NEAR(eval(g, z), want, tol10(want) + 1e-14) << z;
    }
    EXPECT_EQ(reciprocal_argument(g), h);
}

TEST(Transforms, PowerScale) {
    const auto h = mittag_leffler_spec(0.8, 1.1);
    EXPECT_EQ(power_scale(h, 1.0), h);
    for (double k : {0.5, 2.0, 3.0}) {
        const auto g = power_scale(h, k);
        const auto ch = characteristics(h), cg = characteristics(g);
        EXPECT_NEAR(cg.a_star, k * ch.a_star, 1e-14);
        EXPECT_NEAR(cg.delta, k * ch.delta, 1e-14);
        for (double z : z_grid) {
            const double want = eval(h, z);
            EXPECT_NEAR(k * eval(g, std::pow(z, k)), want, tol10(want)) << "k=" << k << " z=" << z;
        }
    }
    EXPECT_EQ(kind_of([&] { power_scale(h, 0.0); }), ErrorKind::validation);
}

TEST(Transforms, ReciprocalSwapsMuSense) {
    // mu is built from b - a; swapping rows maps (a, b) -> (1-b, 1-a), so mu' = mu + (q - p)... checked by sums.
    const auto h = make_spec(1, 1, {{0.3, 0.9}}, {{0.1, 1.1}, {0.4, 0.6}});
    const auto g = reciprocal_argument(h);
    const auto ch = characteristics(h), cg = characteristics(g);
    double sum_b = 0.0, sum_a = 0.0;
    for (const auto& b : h.lower) sum_b += b.coef;
    for (const auto& a : h.upper) sum_a += a.coef;
    EXPECT_NEAR(ch.mu, sum_b - sum_a + (h.p - h.q) / 2.0, 1e-14);
    double gb = 0.0, ga = 0.0;
    for (const auto& b : g.lower) gb += b.coef;
    for (const auto& a : g.upper) ga += a.coef;
    EXPECT_NEAR(cg.mu, gb - ga + (g.p - g.q) / 2.0, 1e-14);
    EXPECT_NEAR(cg.a_star, ch.a_star, 1e-14);
    EXPECT_NEAR(cg.delta, -ch.delta, 1e-14);
}

TEST(Transforms, LaplaceOfExponential) {
    // int_0^inf e^{-tx} e^{-x} dx = 1/(1+t)
    const auto rw = laplace_transform_spec(exponential_spec(), 0.0, 1.0, 1.0);
    for (double t : z_grid) EXPECT_NEAR(rw.apply(t), 1.0 / (1.0 + t), tol10(1.0 / (1.0 + t))) << t;
}

TEST(Transforms, LaplaceAgainstQuadrature) {
    const auto h = mittag_leffler_spec(0.7, 1.0);
    const double w = 0.5, a = 1.5, sigma = 0.7;
    const auto rw = laplace_transform_spec(h, w, a, sigma);
    for (double t : z_grid) {
        auto f = [&](double x) { return x <= 0 ? 0.0 : std::pow(x, w) * std::exp(-t * x) * eval(h, a * std::pow(x, sigma)); };
        double q = 0.0, lo = 0.0;
        for (double hi = 0.5; lo < 80.0 / t; lo = hi, hi *= 2) q += integrate_adaptive(f, lo, hi, 1e-14, 1e-11).value;
        EXPECT_NEAR(rw.apply(t), q, 1e-8 * std::abs(q)) << t;
    }
}

TEST(Transforms, HankelOfExponential) {
    // int_0^inf J_0(a x t) e^{-t} dt = 1/sqrt(1 + (a x)^2)
    const double a = 1.3;
    const auto rw = hankel_transform_spec(exponential_spec(), 0.0, 0.0, 1.0, 1.0, a, 1.0);
    for (double x : z_grid) {
        const double want = 1.0 / std::sqrt(1.0 + a * a * x * x);
        EXPECT_NEAR(rw.apply(x), want, tol10(want)) << x;
    }
}

TEST(Transforms, RiemannLiouvilleOfExponential) {
    // D^q (t e^{-t}) = sum_k (-1)^k (k+1) x^{k+1-q} / Gamma(k+2-q)
    const double q = 0.3;
    const auto rw = rl_derivative_spec(exponential_spec(), q, 1.0, 1.0);
    for (double x : {0.25, 0.5, 1.0, 2.0}) {
        double want = 0.0;
        for (int k = 0; k < 80; ++k)
            want += (k % 2 ? -1.0 : 1.0) * (k + 1) * std::pow(x, k + 1 - q) * rgamma(k + 2 - q);
        EXPECT_NEAR(rw.apply(x), want, 1e-9 * std::abs(want) + 1e-13) << x;
    }
    EXPECT_EQ(kind_of([] { rl_derivative_spec(exponential_spec(), 1.5, 0.0, 1.0); }), ErrorKind::validation);
}

TEST(Transforms, ConvolutionOfExponentials) {
    // int_0^inf e^{-z t} e^{-x/t} dt/t = 2 K_0(2 sqrt(z x))
    const auto h = convolve_specs(exponential_spec(), exponential_spec());
    EXPECT_EQ(h.m, 2);
    EXPECT_EQ(h.q, 2);
    for (double w : z_grid) {
        const double want = 2.0 * std::cyl_bessel_k(0.0, 2.0 * std::sqrt(w));
        EXPECT_NEAR(eval(h, w), want, tol10(want)) << w;
    }
}

TEST(Transforms, ConvolutionAgainstQuadrature) {
    const auto h1 = mittag_leffler_spec(0.6, 1.0);
    const auto h2 = exponential_spec(0.5, 1.0);
    const auto h = convolve_specs(h1, h2);
    for (double w : {0.5, 1.0, 2.0}) {
        // int_0^inf H1(w t) H2(1/t) dt/t in the log variable
        auto f = [&](double u) { return eval(h1, w * std::exp(u)) * eval(h2, std::exp(-u)); };
        double q = 0.0;
        for (double lo = -40.0; lo < 40.0; lo += 5.0) q += integrate_adaptive(f, lo, lo + 5.0, 1e-15, 1e-11).value;
        EXPECT_NEAR(eval(h, w), q, 1e-8 * std::abs(q)) << w;
    }
}

TEST(Transforms, ConvolutionPreconditions) {
    // Two specs with a* < 0 admit none of the alternatives.
    const auto bad = make_spec(0, 0, {{0.0, 1.0}, {0.0, 1.0}}, {{0.0, 1.0}});
    EXPECT_EQ(kind_of([&] { convolve_specs(bad, bad); }), ErrorKind::precondition);
}

TEST(Expansion, LeadingTermAtResonance) {
    // Order-2 pole at s = -1 produces a z log z term in the expansion at zero.
    const auto terms = zero_expansion(kernel_spec(KernelKind::Z, {1.0, 0.8, 1}), 4);
    bool found = false;
    for (const auto& t : terms)
        if (std::abs(t.exponent - 1.0) < 1e-12) {
            found = true;
            EXPECT_EQ(t.order, 2);
            EXPECT_NE(t.coeffs[1], 0.0);
        }
    EXPECT_TRUE(found);
}
