#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "boseglow/error.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/momentum.hpp"
#include "boseglow/params.hpp"

namespace boseglow {

/**
 * Two-momentum kernel of order n,
 *
 *   G_n(k₁,k₂) = j_n exp(-(b_n/2)[(γ₊^{n/2}k₁ - γ₋^{n/2}k₂)² + (γ₊^{n/2}k₂ - γ₋^{n/2}k₁)²]),
 *   j_n = n₀ⁿ (b_n/π)^{3/2},   b_n = (γ₊ - γ₋) / (σ_T² (γ₊ⁿ - γ₋ⁿ)).
 *
 * Stored as b_n γ₊ⁿ and τ_n = (γ₋/γ₊)^{n/2}, which stay O(1) for every n,
 * so the exponent reads -(b_n γ₊ⁿ / 2)[|k₁ - τ_n k₂|² + |k₂ - τ_n k₁|²].
 * Equivalently G_n = n₀ⁿ h_n exp(-a_n (k₁² + k₂²) + g_n k₁·k₂).
 */
struct GaussianKernel {
    std::size_t n = 1;
    double logJn = 0.0;    ///< log j_n [log MeV⁻³]
    double logBn = 0.0;    ///< log b_n [log MeV⁻²]
    double bnScaled = 0.0; ///< b_n γ₊ⁿ [MeV⁻²]
    double tau = 0.0;      ///< (γ₋/γ₊)^{n/2}
    double logGpn = 0.0;   ///< log γ₊^{n/2}
    double logGmn = 0.0;   ///< log γ₋^{n/2}
    double logN0 = 0.0;

    double bn() const noexcept { return std::exp(logBn); }
    double gpn() const noexcept { return std::exp(logGpn); }
    double gmn() const noexcept { return std::exp(logGmn); }
    double an() const noexcept { return 0.5 * bnScaled * (1.0 + tau * tau); }
    double gn() const noexcept { return 2.0 * bnScaled * tau; }
    double logHn() const noexcept { return 1.5 * (logBn - std::log(std::numbers::pi)); }
    double hn() const noexcept { return std::exp(logHn()); }

    /// Coefficient of |k|² on the diagonal, b_n (γ₊^{n/2} - γ₋^{n/2})².
    double diagonalRate() const noexcept { return bnScaled * (1.0 - tau) * (1.0 - tau); }

    double logValue(const Momentum3& k1, const Momentum3& k2) const noexcept {
        const double q = norm2(k1 - tau * k2) + norm2(k2 - tau * k1);
        return logJn - 0.5 * bnScaled * q;
    }
    double operator()(const Momentum3& k1, const Momentum3& k2) const noexcept {
        return std::exp(logValue(k1, k2));
    }

    /// Same kernel through (h_n, a_n, g_n).
    double logValueHag(const Momentum3& k1, const Momentum3& k2) const noexcept {
        return static_cast<double>(n) * logN0 + logHn() - an() * (norm2(k1) + norm2(k2)) + gn() * dot(k1, k2);
    }
};

inline GaussianKernel kernel(const DerivedParams& d, double n0, std::size_t n) {
    if (n < 1) throw InvalidOrder("kernel order must be >= 1");
    const double dn = static_cast<double>(n);
    const Gammas g = d.gammas();
    const double logRho = g.minus > 0.0 ? std::log(g.ratio()) : kNegInf;

    GaussianKernel k;
    k.n = n;
    k.logN0 = n0 > 0.0 ? std::log(n0) : kNegInf;
    k.logGpn = 0.5 * dn * std::log(g.plus);
    k.logGmn = g.minus > 0.0 ? 0.5 * dn * std::log(g.minus) : kNegInf;
    k.tau = std::exp(0.5 * dn * logRho);
    // γ₊ - γ₋ = √(1 + 2x)
    const double diff = std::sqrt(1.0 + 2.0 * d.x);
    const double oneMinusRhoN = -std::expm1(dn * logRho);
    k.bnScaled = diff / (d.sigmaT2 * oneMinusRhoN);
    k.logBn = std::log(k.bnScaled) - dn * std::log(g.plus);
    k.logJn = dn * k.logN0 + 1.5 * (k.logBn - std::log(std::numbers::pi));
    return k;
}

} // namespace boseglow
