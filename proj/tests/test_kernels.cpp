#include <cmath>
#include <cstdint>
#include <numbers>

#include <gtest/gtest.h>

#include "fracdiff/kernels.hpp"

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
    int pick(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

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

TEST(ZKernel, OriginExamples) {
    EXPECT_LE(rel(z_kernel({2.0, 1.0, 1, 1.0}, 1.0, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi)), 1e-10);
    EXPECT_LE(rel(z_kernel({1.0, 1.0, 1, 2.0}, 1.0, 0.0), 1.0 / std::numbers::pi), 1e-10);
}

TEST(ZKernel, HeatReduction) {
    for (int d = 1; d <= 3; ++d)
        for (double nu : {1.0, 2.0})
            for (double t : {0.5, 1.0, 2.0})
                for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
                    const double want = std::pow(2.0 * std::numbers::pi * nu * t, -0.5 * d) * std::exp(-r * r / (2.0 * nu * t));
                    EXPECT_LE(rel(z_kernel({2.0, 1.0, d, nu}, t, r), want), 1e-6) << d << " " << nu << " " << t << " " << r;
                }
}

TEST(ZKernel, CauchyReduction) {
    for (double t : {0.5, 1.0, 2.0})
        for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const double c = 0.5 * t;
            const double want = c / (std::numbers::pi * (c * c + r * r));
            EXPECT_LE(rel(z_kernel({1.0, 1.0, 1, 1.0}, t, r), want), 1e-6) << t << " " << r;
        }
}

TEST(ZKernel, StableReductionAtBetaOne) {
    // Symbol exp(-(nu t/2)|xi|^alpha): Z(t, r) = c^{-d/alpha} p(r c^{-1/alpha}), c = nu t / 2.
    Rng rng{31};
    for (int i = 0; i < 20; ++i) {
        const double alpha = rng.uniform(0.6, 2.0), nu = rng.uniform(0.5, 2.0), t = rng.uniform(0.3, 3.0);
        const int d = rng.pick(1, 3);
        const double r = rng.uniform(0.1, 5.0);
        const double c = 0.5 * nu * t;
        const double want = std::pow(c, -d / alpha) * stable_density(alpha, d, r * std::pow(c, -1.0 / alpha));
        EXPECT_LE(rel(z_kernel({alpha, 1.0, d, nu}, t, r), want), 1e-6) << alpha << " " << d << " " << r;
    }
}

TEST(StableDensity, Examples) {
    EXPECT_LE(rel(stable_density(2.0, 1, 0.0), 1.0 / std::sqrt(4.0 * std::numbers::pi)), 1e-10);
    EXPECT_LE(rel(stable_density(1.0, 1, 1.0), 1.0 / (2.0 * std::numbers::pi)), 1e-10);
    for (double r : {0.0, 0.3, 2.0, 7.0}) EXPECT_LE(rel(stable_density(1.0, 1, r), 1.0 / (std::numbers::pi * (1 + r * r))), 1e-9);
}

TEST(Kernels, SelfSimilarity) {
    Rng rng{32};
    for (int i = 0; i < 30; ++i) {
        const double alpha = rng.uniform(0.8, 2.0), beta = rng.uniform(0.55, 1.95);
        const int d = rng.pick(1, 3);
        const FracParams p{alpha, beta, d, rng.uniform(0.5, 2.0)};
        const double t = rng.uniform(0.2, 5.0), r = rng.uniform(0.2, 4.0);
        const double scaled = std::pow(t, p.ceil_beta() - 1 - beta * d / alpha) * z_kernel(p, 1.0, r / std::pow(t, beta / alpha));
        const double direct = z_kernel(p, t, r);
        EXPECT_NEAR(direct, scaled, 1e-8 * std::abs(direct) + 1e-14) << alpha << " " << beta << " " << d;
    }
}

TEST(Kernels, FourierConsistencySample) {
    const FracParams p{1.5, 0.75, 2};
    for (auto k : {KernelKind::Z, KernelKind::Y}) {
        const double direct = kernel_eval(k, p, 1.0, 1.0).value;
        const double oracle = inverse_fourier_oracle(k, p, 1.0, 1.0).value;
        EXPECT_NEAR(direct, oracle, 1e-5) << to_string(k);
    }
    const FracParams q{2.0, 1.5, 3};
    EXPECT_NEAR(zstar_kernel(q, 0.5, 0.5), inverse_fourier_oracle(KernelKind::Zstar, q, 0.5, 0.5).value, 1e-5);
}

TEST(Kernels, Masses) {
    const FracParams p{1.5, 0.75, 2};
    const double t = 1.7;
    EXPECT_NEAR(kernel_mass(KernelKind::Z, p, t).value, 1.0, 1e-6);
    EXPECT_NEAR(kernel_mass(KernelKind::Y, p, t).value, std::pow(t, p.beta - 1) / std::tgamma(p.beta), 1e-6);
    const FracParams q{2.0, 1.3, 2};
    EXPECT_NEAR(kernel_mass(KernelKind::Z, q, t).value, t, 1e-6);
    EXPECT_NEAR(kernel_mass(KernelKind::Zstar, q, t).value, 1.0, 1e-6);
}

TEST(Kernels, RiemannLiouvilleLink) {
    const auto l = rl_link({2.0, 0.8, 1}, 1.0, 0.5);
    EXPECT_LE(rel(l.derivative, l.y_value), 1e-3);
}

TEST(Kernels, Errors) {
    EXPECT_EQ(kind_of([] { zstar_kernel({2.0, 0.8, 1}, 1.0, 1.0); }), ErrorKind::precondition);
    EXPECT_EQ(kind_of([] { z_kernel({2.5, 0.8, 1}, 1.0, 1.0); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { z_kernel({2.0, 0.5, 1}, 1.0, 1.0); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { z_kernel({2.0, 0.8, 1}, 0.0, 1.0); }), ErrorKind::validation);
    EXPECT_EQ(kind_of([] { z_kernel({2.0, 0.8, 1}, 1.0, -1.0); }), ErrorKind::validation);
    // Y(t, .) behaves like |x|^{alpha-d} near the origin when d > alpha.
    EXPECT_EQ(kind_of([] { y_kernel({1.0, 0.8, 3}, 1.0, 0.0); }), ErrorKind::singular);
    EXPECT_EQ(kind_of([] { parse_kernel("w"); }), ErrorKind::validation);
}

TEST(Nonnegativity, Classification) {
    EXPECT_EQ(nonnegativity_case({2.0, 0.8, 5}).status, NonnegCase::certified_nonneg);
    const auto b = nonnegativity_case({2.0, 1.5, 3});
    EXPECT_EQ(b.status, NonnegCase::certified_nonneg);
    EXPECT_FALSE(b.zstar_certified);
    EXPECT_EQ(nonnegativity_case({1.2, 1.5, 2}).status, NonnegCase::unknown);
    EXPECT_TRUE(nonnegativity_case({1.8, 1.4, 1}).zstar_certified);
}

TEST(Nonnegativity, RandomCertifiedSetsScanNonnegative) {
    Rng rng{33};
    for (int i = 0; i < 12; ++i) {
        const double beta = rng.uniform(0.55, 1.0), alpha = rng.uniform(0.5, 2.0);
        const FracParams p{alpha, beta, rng.pick(1, 4)};
        ASSERT_EQ(nonnegativity_case(p).status, NonnegCase::certified_nonneg);
        for (int j = 0; j < 20; ++j) {
            const double r = std::pow(10.0, -3.0 + 6.0 * j / 19.0);
            EXPECT_GE(z_kernel(p, 1.0, r), -1e-8) << alpha << " " << beta << " " << r;
            EXPECT_GE(y_kernel(p, 1.0, r), -1e-8) << alpha << " " << beta << " " << r;
        }
    }
}

TEST(Envelope, BoundsYOffGrid) {
    const FracParams p{1.5, 1.25, 2};
    const auto env = calibrate_envelope(p, 1.2);
    EXPECT_GT(env.constant, 0.0);
    for (double t : {0.5, 1.0, 3.0})
        for (int j = 0; j < 37; ++j) {
            const double r = std::pow(10.0, -2.03 + 4.0 * j / 36.0);  // offset from the calibration grid
            EXPECT_LE(std::abs(y_kernel(p, t, r)), 1.02 * envelope_bound(p, env, t, r)) << t << " " << r;
        }
    EXPECT_EQ(kind_of([&] { calibrate_envelope(p, 1.5); }), ErrorKind::validation);
}

TEST(InitialField, ConstantData) {
    EXPECT_DOUBLE_EQ(j0_field({2.0, 0.8, 1}, InitialData::constant(3.0), 2.0, 0.7).value, 3.0);
    // Masses t^{ceil(beta)-1} = t for Z and 1 for Zstar give u0 + t u1.
    EXPECT_DOUBLE_EQ(j0_field({2.0, 1.5, 1}, InitialData::constant_pair(1.0, 2.0), 4.0, 0.0).value, 9.0);
    EXPECT_EQ(kind_of([] { j0_field({2.0, 1.5, 1}, InitialData::constant(1.0), 1.0, 0.0); }), ErrorKind::validation);
}

TEST(InitialField, SampledGaussianUnderHeatFlow) {
    SampledProfile s;
    s.x0 = -10.0;
    s.dx = 0.05;
    for (int i = 0; i <= 400; ++i) {
        const double x = s.x0 + s.dx * i;
        s.values.push_back(std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi));
    }
    const double t = 0.7;
    for (double x : {0.0, 0.8, 2.0}) {
        const double var = 1.0 + t;
        const double want = std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
        EXPECT_NEAR(j0_field({2.0, 1.0, 1}, InitialData::from_samples({s}), t, x).value, want, 1e-6) << x;
    }
}

TEST(Duhamel, ZeroForcingIsInitialField) {
    const FracParams p{2.0, 0.8, 1};
    EXPECT_DOUBLE_EQ(duhamel_solve(p, InitialData::constant(2.0), nullptr, 1.0, 0.0).value, 2.0);
}

TEST(Duhamel, ConstantForcing) {
    // int_0^t int Y(s, y) dy ds = t^beta / Gamma(beta + 1).
    const FracParams p{1.5, 0.8, 1};
    const double t = 1.3;
    const auto u = duhamel_solve(p, InitialData::constant(1.0), [](double, double) { return 1.0; }, t, 0.0);
    EXPECT_NEAR(u.value, 1.0 + std::pow(t, p.beta) / std::tgamma(p.beta + 1.0), 1e-5);
}
