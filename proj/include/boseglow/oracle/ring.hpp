#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <fmt/core.h>

#include "boseglow/error.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/momentum.hpp"
#include "boseglow/params.hpp"

namespace boseglow::oracle {

/// G_n(k₁,k₂) = n₀ⁿ h exp(-a(k₁² + k₂²) + g k₁·k₂), built without the γ± closed form.
struct RingCoefficients {
    std::size_t n = 1;
    double logH = 0.0; ///< log h [log MeV⁻³]
    double a = 0.0;    ///< [MeV⁻²]
    double g = 0.0;    ///< [MeV⁻²]
    double logN0 = 0.0;

    double h() const noexcept { return std::exp(logH); }

    double logValue(const Momentum3& k1, const Momentum3& k2) const noexcept {
        return static_cast<double>(n) * logN0 + logH - a * (norm2(k1) + norm2(k2)) + g * dot(k1, k2);
    }
    double operator()(const Momentum3& k1, const Momentum3& k2) const noexcept {
        return std::exp(logValue(k1, k2));
    }
};

/**
 * Kernels G_1..G_N by repeated Gaussian composition G_n = ∫d³k' G_1(k₁,k') G_{n-1}(k',k₂).
 *
 * Seed (single packet averaged over the source):
 *   G_1 ∝ exp(-K²/σ_T² - c q²),   c = 1/(4σ_T²) + R_e²/2,   K = (k₁+k₂)/2, q = k₁-k₂
 *   ⇒ a₁ = 1/(4σ_T²) + c,   g₁ = 2c - 1/(2σ_T²),   h₁ = (π σ_T²)^{-3/2}.
 *
 * Composing (h_A, a_A, g_A) with (h_B, a_B, g_B), with s = a_A + a_B:
 *   h = h_A h_B (π/s)^{3/2},   g = g_A g_B / (2s),
 *   k₁² coefficient a_A - g_A²/(4s),   k₂² coefficient a_B - g_B²/(4s).
 * The two diagonal coefficients must agree (the kernels commute); a mismatch
 * or a non-integrable form raises NumericalBreakdown.
 */
inline std::vector<RingCoefficients> ringRecursion(const DerivedParams& d, double n0, std::size_t N) {
    if (N < 1) throw InvalidOrder("ring recursion needs N >= 1");
    const double logN0 = n0 > 0.0 ? std::log(n0) : kNegInf;
    const double invS = 1.0 / d.sigmaT2;
    const double c = 0.25 * invS + 0.5 * d.re2Natural();

    std::vector<RingCoefficients> out;
    out.reserve(N);
    RingCoefficients seed;
    seed.n = 1;
    seed.logN0 = logN0;
    seed.a = 0.25 * invS + c;
    seed.g = 2.0 * c - 0.5 * invS;
    seed.logH = -1.5 * std::log(std::numbers::pi * d.sigmaT2);
    out.push_back(seed);

    for (std::size_t n = 2; n <= N; ++n) {
        const RingCoefficients& prev = out.back();
        const double s = seed.a + prev.a;
        const double left = seed.a - seed.g * seed.g / (4.0 * s);
        const double right = prev.a - prev.g * prev.g / (4.0 * s);
        RingCoefficients next;
        next.n = n;
        next.logN0 = logN0;
        next.logH = seed.logH + prev.logH + 1.5 * std::log(std::numbers::pi / s);
        next.g = seed.g * prev.g / (2.0 * s);
        next.a = 0.5 * (left + right);
        if (std::abs(left - right) > 1e-8 * std::max(std::abs(left), std::abs(right))) {
            throw NumericalBreakdown(fmt::format("ring step {}: asymmetric diagonal coefficients {:.17g} vs {:.17g}",
                                                 n, left, right));
        }
        if (!(next.a > 0.0) || !(next.g > 0.0) || !(2.0 * next.a > next.g)) {
            throw NumericalBreakdown(fmt::format("ring step {}: quadratic form lost positivity (a = {:.17g}, g = {:.17g})",
                                                 n, next.a, next.g));
        }
        out.push_back(next);
    }
    return out;
}

} // namespace boseglow::oracle
