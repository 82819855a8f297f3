#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "boseglow/params.hpp"
#include "support/frozen.hpp"

using namespace boseglow;

namespace {

ModelParams randomParams(std::mt19937_64& eng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto logUniform = [&](double lo, double hi) { return std::exp(std::log(lo) + u(eng) * std::log(hi / lo)); };
    ModelParams p;
    p.n0 = logUniform(1e-3, 10.0);
    p.R = logUniform(0.1, 20.0);
    p.T = logUniform(10.0, 300.0);
    p.m = logUniform(100.0, 1000.0);
    p.sigma = logUniform(10.0, 1000.0);
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Params, DefaultsMatchReference) {
    const DerivedParams d = derive(ModelParams{});
    EXPECT_NEAR(d.sigmaT2, frozen::kDefaultSigmaT2, 1e-9);
    EXPECT_LT(rel(d.Re2, frozen::kDefaultRe2), 1e-14);
    EXPECT_LT(rel(d.x, frozen::kDefaultX), 1e-14);
    ASSERT_TRUE(d.Te.has_value());
    EXPECT_NEAR(*d.Te, 50414.0 / (2.0 * 139.57), 1e-9);
}

TEST(Params, GammasAtXOne) {
    const Gammas g = gammasFromX(1.0);
    EXPECT_LT(rel(g.plus, frozen::kGammaPlus), 1e-15);
    EXPECT_LT(rel(g.minus, frozen::kGammaMinus), 1e-15);
    const DerivedParams d = DerivedParams::natural(1.0, 1.0);
    EXPECT_LT(rel(d.nc, frozen::kNc), 1e-15);
}

TEST(Params, AlgebraicIdentitiesOnRandomDraws) {
    std::mt19937_64 eng(20240611);
    for (int i = 0; i < 1000; ++i) {
        const DerivedParams d = derive(randomParams(eng));
        const double x = d.x;
        EXPECT_LT(rel(d.gammaPlus * d.gammaMinus, x * x / 4.0), 1e-12);
        EXPECT_LT(rel(d.gammaPlus + d.gammaMinus, 1.0 + x), 1e-12);
        const double s = std::sqrt(d.gammaPlus) - std::sqrt(d.gammaMinus);
        EXPECT_LT(std::abs(s * s - 1.0), 1e-12);
        // both are roots of y^2 - (1+x) y + x^2/4
        for (double y : {d.gammaPlus, d.gammaMinus}) {
            const double res = y * y - (1.0 + x) * y + x * x / 4.0;
            EXPECT_LT(std::abs(res) / std::max(1.0, y * y), 1e-10);
        }
        EXPECT_LT(rel(d.x, d.Re2 * d.sigmaT2 / (kHbarC * kHbarC)), 1e-14);
        EXPECT_GE(d.nc, 1.0);
    }
}

TEST(Params, GammaMinusBelowOneExactlyUpToXFour) {
    EXPECT_GE(gammasFromX(0.5).plus, 1.0);
    for (double x : {0.0, 0.1, 1.0, 3.9, 4.0}) EXPECT_LE(gammasFromX(x).minus, 1.0 + 1e-15) << x;
    EXPECT_NEAR(gammasFromX(4.0).minus, 1.0, 1e-14);
    for (double x : {4.1, 10.0, 1e3}) EXPECT_GT(gammasFromX(x).minus, 1.0) << x;
}

TEST(Params, CriticalMultiplicityIsOneOnlyAtZeroDensity) {
    EXPECT_DOUBLE_EQ(std::pow(gammasFromX(0.0).plus, 1.5), 1.0);
    EXPECT_GT(DerivedParams::natural(1e-6, 1.0).nc, 1.0);
}

TEST(Params, XIncreasesWithRadiusAndTemperature) {
    for (double sigma : {50.0, 150.0, 600.0}) {
        ModelParams p;
        p.sigma = sigma;
        double prev = 0.0;
        for (double R = 0.5; R < 20.0; R *= 1.3) {
            p.R = R;
            const double x = derive(p).x;
            EXPECT_GT(x, prev);
            prev = x;
        }
        p.R = 5.0;
        prev = 0.0;
        for (double T = 10.0; T < 400.0; T *= 1.3) {
            p.T = T;
            const double x = derive(p).x;
            EXPECT_GT(x, prev);
            prev = x;
        }
    }
}

TEST(Params, XHasAMinimumInSigma) {
    // x(σ) = R²σ²/ħc² + 2mTR²/ħc² + mT/σ² is smallest at σ⁴ = mT ħc²/R².
    ModelParams p;
    const double sigmaStar = std::pow(p.m * p.T * kHbarC * kHbarC / (p.R * p.R), 0.25);
    const auto xAt = [&](double s) {
        ModelParams q = p;
        q.sigma = s;
        return derive(q).x;
    };
    EXPECT_GT(xAt(0.5 * sigmaStar), xAt(sigmaStar));
    EXPECT_GT(xAt(2.0 * sigmaStar), xAt(sigmaStar));
    const double expected = 2.0 * std::sqrt(p.m * p.T) * p.R / kHbarC + 2.0 * p.m * p.T * p.R * p.R / (kHbarC * kHbarC);
    EXPECT_LT(rel(xAt(sigmaStar), expected), 1e-12);
}

TEST(Params, NaturalConstructor) {
    const DerivedParams d = DerivedParams::natural(7.5, 2.0);
    EXPECT_DOUBLE_EQ(d.hbarc, 1.0);
    EXPECT_DOUBLE_EQ(d.sigmaT2, 2.0);
    EXPECT_DOUBLE_EQ(d.Re2, 3.75);
    EXPECT_NEAR(d.x, 7.5, 1e-14);
    EXPECT_FALSE(d.Te.has_value());
}

TEST(Params, ValidationNamesTheField) {
    const auto field = [](ModelParams p) {
        try {
            validate(p);
        } catch (const InvalidParameter& e) {
            return e.field();
        }
        return std::string{};
    };
    ModelParams p;
    p.R = -1.0;
    EXPECT_EQ(field(p), "R");
    p = {};
    p.sigma = 0.0;
    EXPECT_EQ(field(p), "sigma");
    p = {};
    p.n0 = -0.1;
    EXPECT_EQ(field(p), "n0");
    p = {};
    p.T = std::nan("");
    EXPECT_EQ(field(p), "T");
    p = {};
    p.m = INFINITY;
    EXPECT_EQ(field(p), "m");
    p = {};
    p.n0 = 0.0;
    EXPECT_EQ(field(p), "");
    EXPECT_THROW(derive(ModelParams{1.0, -5.0}), InvalidParameter);
    EXPECT_THROW(gammasFromX(-1.0), InvalidParameter);
}

TEST(Params, EmissionTimeDoesNotEnter) {
    ModelParams a;
    ModelParams b;
    b.t0 = 12.5;
    EXPECT_EQ(derive(a).x, derive(b).x);
    EXPECT_EQ(derive(a).Re2, derive(b).Re2);
}
