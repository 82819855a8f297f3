#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "boseglow/multiplicity.hpp"
#include "support/frozen.hpp"

using namespace boseglow;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const DerivedParams kUnit = DerivedParams::natural(1.0, 1.0);

} // namespace

TEST(Combinants, FirstIsN0AndSecondMatchesReference) {
    for (double x : {1e-3, 1.0, 30.0, 1e4}) {
        const DerivedParams d = DerivedParams::natural(x, 1.0);
        for (double n0 : {0.01, 0.7, 2.0}) EXPECT_LT(rel(combinants(d, n0, 1).c(1), n0), 1e-12) << x;
    }
    EXPECT_LT(rel(combinants(kUnit, 1.0, 2).c(2), frozen::kC2), 1e-14);
}

TEST(Combinants, ScaleAsPowerOfN0) {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double lambda = u(eng);
        const double n0 = u(eng);
        const CombinantSeries a = combinants(kUnit, n0, 30);
        const CombinantSeries b = combinants(kUnit, lambda * n0, 30);
        for (std::size_t n = 1; n <= 30; ++n) {
            EXPECT_NEAR(b.logC(n) - a.logC(n), static_cast<double>(n) * std::log(lambda), 1e-11);
        }
    }
}

TEST(Combinants, LogFormHandlesLargeOrders) {
    const CombinantSeries c = combinants(DerivedParams::natural(1e3, 1.0), 1.0, 10);
    const double v = c.logC(100000);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LT(v, -1e5);
}

TEST(Combinants, TailBoundIsRigorous) {
    for (double n0 : {0.5, 2.0, 2.5}) {
        const CombinantSeries c = combinants(kUnit, n0, 40);
        CompensatedSum tail;
        for (std::size_t n = 41; n < 20000; ++n) tail += static_cast<double>(n) * c.c(n);
        EXPECT_GE(c.truncationError(), tail.value() * (1.0 - 1e-12)) << n0;
        EXPECT_LT(c.truncationError(), 10.0 * tail.value()) << n0;
    }
}

TEST(Combinants, ToleranceSizesTheSeries) {
    const CombinantSeries c = combinantsToTolerance(kUnit, 1.0, {1e-14, 100000});
    EXPECT_LE(c.truncationError(), 1e-14 * detail::partialMoment(c));
    EXPECT_THROW(combinantsToTolerance(kUnit, 2.5, {1e-14, 20}), TruncationLimit);
}

TEST(Regime, Classifier) {
    EXPECT_EQ(classifyRegime(kUnit, 0.9 * frozen::kNc), Regime::Convergent);
    EXPECT_EQ(classifyRegime(kUnit, frozen::kNc), Regime::Critical);
    EXPECT_EQ(classifyRegime(kUnit, frozen::kNc * (1.0 + 1e-10)), Regime::Critical);
    EXPECT_EQ(classifyRegime(kUnit, 1.1 * frozen::kNc), Regime::Condensed);
    EXPECT_EQ(classifyRegime(kUnit, 0.0), Regime::Convergent);
    EXPECT_EQ(toString(Regime::Condensed), "Condensed");
}

TEST(Regime, Trichotomy) {
    const double nc = kUnit.nc;
    const CombinantSeries below = combinants(kUnit, 0.9 * nc, 1000);
    EXPECT_LT(1000.0 * below.c(1000), 1e-40);
    const CombinantSeries at = combinants(kUnit, nc, 1000);
    EXPECT_NEAR(1000.0 * at.c(1000), 1.0, 1e-6);
    const CombinantSeries above = combinants(kUnit, 1.1 * nc, 1000);
    EXPECT_GT(detail::partialMoment(above), 1e6);
}

TEST(Regime, InclusiveQuantitiesRefuseDivergentMean) {
    const CombinantSeries c = combinants(kUnit, 1.1 * kUnit.nc, 10);
    EXPECT_THROW(meanMultiplicity(c), DivergentMean);
    EXPECT_THROW(multiplicityDistribution(c), DivergentMean);
    EXPECT_THROW(combinantsToTolerance(kUnit, kUnit.nc), DivergentMean);
    EXPECT_TRUE(std::isinf(c.truncationError()));
}

TEST(Multiplicity, MatchesGeneratingFunctionExpansion) {
    const MultiplicityDistribution md = multiplicityDistribution(combinantsToTolerance(kUnit, 1.0));
    EXPECT_LT(rel(md.sumC, frozen::kSumC), 1e-13);
    EXPECT_LT(rel(md.mean, frozen::kMean), 1e-8);
    for (std::size_t n = 0; n < 8; ++n) EXPECT_LT(rel(md.p[n], frozen::kP[n]), 1e-13) << n;
    for (std::size_t n = 0; n < 5; ++n) EXPECT_LT(rel(md.omega(n), frozen::kOmega[n]), 1e-13) << n;
}

TEST(Multiplicity, Normalization) {
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double x = std::exp(std::log(1e-2) + u(eng) * std::log(1e5));
        const DerivedParams d = DerivedParams::natural(x, 1.0);
        const double n0 = (0.02 + 0.93 * u(eng)) * d.nc;
        const MultiplicityDistribution md = multiplicityDistribution(combinantsToTolerance(d, n0));
        EXPECT_NEAR(md.mass(), 1.0, 1e-9) << x << " " << n0;
        EXPECT_LT(rel(md.firstMoment(), md.mean), 1e-8) << x << " " << n0;
        for (double p : md.p) EXPECT_GE(p, 0.0);
    }
}

TEST(Multiplicity, PoissonLimitAtLowDensity) {
    // Far below n_c only C_1 = n0 matters: p_n -> Poisson(n0).
    const double n0 = 1e-4;
    const MultiplicityDistribution md = multiplicityDistribution(combinantsToTolerance(kUnit, n0));
    EXPECT_NEAR(md.p[0], std::exp(-n0), 1e-8);
    EXPECT_LT(rel(md.p[1] / md.p[0], n0), 1e-3);
    EXPECT_LT(rel(md.p[2] / md.p[0], 0.5 * n0 * n0 + frozen::kC2 * n0 * n0), 1e-3);
}

TEST(Multiplicity, ZeroSeedMultiplicity) {
    const MultiplicityDistribution md = multiplicityDistribution(combinants(kUnit, 0.0, 4));
    EXPECT_DOUBLE_EQ(md.p[0], 1.0);
    EXPECT_DOUBLE_EQ(md.mean, 0.0);
}

TEST(Multiplicity, OmegasDefinedAboveCriticalPoint) {
    const std::vector<double> lw = logOmegas(kUnit, 3.0 * kUnit.nc, 50);
    for (double v : lw) EXPECT_TRUE(std::isfinite(v));
    // ω ratios scale as n0^n: ω_n(λ n0) = λ^n ω_n(n0)
    const std::vector<double> base = logOmegas(kUnit, kUnit.nc, 50);
    for (std::size_t n = 0; n <= 50; ++n) EXPECT_NEAR(lw[n] - base[n], n * std::log(3.0), 1e-9 * (1.0 + n));
}
