#include <cmath>
#include <cstdint>
#include <numbers>

#include <gtest/gtest.h>

#include "fracdiff/mittag_leffler.hpp"
#include "fracdiff/specfun.hpp"

using namespace fracdiff;

namespace {

constexpr double euler_gamma = 0.57721566490153286061;

// splitmix64; tests draw their own reproducible streams.
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

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

} // namespace

TEST(LogGamma, Examples) {
    EXPECT_NEAR(log_gamma(1.0, nullptr), 0.0, 1e-15);
    EXPECT_NEAR(log_gamma(0.5, nullptr), std::log(std::sqrt(std::numbers::pi)), 1e-13);
    EXPECT_NEAR(log_gamma(5.0, nullptr), std::log(24.0), 1e-13);
}

TEST(LogGamma, MatchesStdLgammaWithSign) {
    Rng rng{11};
    for (int i = 0; i < 500; ++i) {
        double x = rng.uniform(-30.0, 60.0);
        if (x < 0.5 && std::abs(x - std::nearbyint(x)) < 1e-3) continue;
        int sign = 0;
        const double v = log_gamma(x, &sign);
        EXPECT_NEAR(v, std::lgamma(x), 1e-12 * std::max(1.0, std::abs(v))) << x;
        EXPECT_EQ(sign, std::tgamma(x) > 0 ? 1 : -1) << x;
    }
}

TEST(LogGamma, RecurrenceProperty) {
    Rng rng{12};
    for (int i = 0; i < 500; ++i) {
        const double x = rng.uniform(0.05, 40.0);
        EXPECT_NEAR(log_gamma(x + 1.0, nullptr) - log_gamma(x, nullptr), std::log(x), 1e-12 * std::max(1.0, std::log(x + 2)))
            << x;
    }
}

TEST(LogGamma, ComplexRecurrenceProperty) {
    Rng rng{13};
    for (int i = 0; i < 300; ++i) {
        const cplx z{rng.uniform(-8.0, 20.0), rng.uniform(-15.0, 15.0)};
        if (std::abs(z.imag()) < 0.1 && z.real() < 0.5) continue;
        const cplx lhs = std::exp(log_gamma(z + 1.0));
        const cplx rhs = z * std::exp(log_gamma(z));
        EXPECT_LE(std::abs(lhs - rhs) / std::abs(rhs), 1e-12) << z;
    }
}

TEST(GammaFn, PolesAndReciprocal) {
    EXPECT_EQ(rgamma(0.0), 0.0);
    EXPECT_EQ(rgamma(-3.0), 0.0);
    EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-14);
    EXPECT_NEAR(rel(gamma_fn(-2.5), std::tgamma(-2.5)), 0.0, 1e-13);
    EXPECT_NEAR(rel(gamma_fn(10.0), 362880.0), 0.0, 1e-13);
}

TEST(Digamma, Examples) {
    EXPECT_NEAR(digamma(1.0), -euler_gamma, 1e-13);
    EXPECT_NEAR(digamma(2.0), 1.0 - euler_gamma, 1e-13);
    EXPECT_NEAR(digamma(0.5), -euler_gamma - 2.0 * std::numbers::ln2, 1e-13);
}

TEST(Digamma, RecurrenceAndReflection) {
    Rng rng{14};
    for (int i = 0; i < 300; ++i) {
        const double x = rng.uniform(-10.0, 30.0);
        if (std::abs(x - std::nearbyint(x)) < 1e-3) continue;
        EXPECT_NEAR(digamma(x + 1.0) - digamma(x), 1.0 / x, 1e-10 * std::max(1.0, 1.0 / std::abs(x))) << x;
        const double refl = digamma(1.0 - x) - digamma(x);
        EXPECT_NEAR(refl, std::numbers::pi / std::tan(std::numbers::pi * x), 1e-9 * std::max(1.0, std::abs(refl))) << x;
    }
    const cplx z{2.5, 1.5};
    EXPECT_LE(std::abs(digamma(z + 1.0) - digamma(z) - 1.0 / z), 1e-12);
}

TEST(BesselJ, Examples) {
    EXPECT_NEAR(bessel_j(0.5, std::numbers::pi), 0.0, 1e-14);
    EXPECT_NEAR(bessel_j(0.0, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(bessel_j(0.5, std::numbers::pi / 2), 2.0 / std::numbers::pi, 1e-13);
}

TEST(BesselJ, HalfIntegerClosedForm) {
    Rng rng{15};
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(0.01, 60.0);
        EXPECT_NEAR(bessel_j(0.5, x), std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x), 1e-12) << x;
        EXPECT_NEAR(bessel_j(-0.5, x), std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x), 1e-12) << x;
    }
}

TEST(MittagLeffler, Examples) {
    EXPECT_NEAR(mittag_leffler(1.0, 1.0, 1.0), std::numbers::e, 1e-12);
    EXPECT_NEAR(mittag_leffler(0.5, 0.5, 0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
    EXPECT_NEAR(mittag_leffler(0.5, 1.0, -1.0), std::numbers::e * std::erfc(1.0), 1e-12);
}

TEST(MittagLeffler, ExponentialReduction) {
    Rng rng{16};
    for (int i = 0; i < 200; ++i) {
        const cplx z{rng.uniform(-7.0, 7.0), rng.uniform(-7.0, 7.0)};
        if (std::abs(z) > 10.0) continue;
        const cplx v = mittag_leffler({1.0, 1.0}, z);
        EXPECT_LE(std::abs(v - std::exp(z)) / std::abs(std::exp(z)), 1e-10) << z;
    }
}

TEST(MittagLeffler, ErfcIdentity) {
    for (int i = 0; i <= 50; ++i) {
        const double x = 0.1 * i;
        const double want = std::exp(x * x) * std::erfc(x);
        EXPECT_LE(rel(mittag_leffler(0.5, 1.0, -x), want), 1e-8) << x;
    }
}

TEST(MittagLeffler, AtZeroIsReciprocalGamma) {
    Rng rng{17};
    for (int i = 0; i < 100; ++i) {
        const double rho = rng.uniform(0.1, 2.0), mu = rng.uniform(0.1, 4.0);
        const double want = rgamma(mu);
        EXPECT_NEAR(mittag_leffler(rho, mu, 0.0), want, 2.0 * std::numeric_limits<double>::epsilon() * std::abs(want));
    }
}

TEST(MittagLeffler, SeriesAndHRouteAgree) {
    const std::pair<double, double> sets[] = {{0.75, 0.75}, {0.75, 1.0}, {1.5, 2.0}};
    for (const auto& [rho, mu] : sets) {
        for (int i = 0; i <= 18; ++i) {
            const double x = 0.5 + 0.25 * i;
            const double s = mittag_leffler_series({rho, mu}, cplx(-x, 0.0)).value.real();
            const double h = mittag_leffler_hroute({rho, mu}, x).value;
            EXPECT_NEAR(s, h, 1e-8) << rho << " " << mu << " " << x;
        }
    }
}

TEST(MittagLeffler, LogPositiveMatchesDirect) {
    for (double x : {0.5, 2.0, 10.0}) {
        EXPECT_NEAR(log_mittag_leffler_positive(0.8, 0.8, x), std::log(mittag_leffler(0.8, 0.8, x)), 1e-10);
        EXPECT_NEAR(log_mittag_leffler_positive(1.0, 1.0, x), x, 1e-10);
    }
    // Deep in the asymptotic regime E_{rho,mu}(x) ~ x^{(1-mu)/rho} exp(x^{1/rho}) / rho.
    const double x = 400.0;
    const double lead = (1.0 - 0.8) / 0.8 * std::log(x) + std::pow(x, 1.0 / 0.8) - std::log(0.8);
    EXPECT_NEAR(log_mittag_leffler_positive(0.8, 0.8, x), lead, 1e-8 * lead);
}

TEST(MittagLeffler, RejectsInvalidParameters) {
    EXPECT_THROW(mittag_leffler(0.0, 1.0, 1.0), Error);
    EXPECT_THROW(mittag_leffler(-1.0, 1.0, 1.0), Error);
}
