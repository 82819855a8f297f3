#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include <fmt/core.h>

#include "boseglow/error.hpp"
#include "boseglow/kernel.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/momentum.hpp"
#include "boseglow/multiplicity.hpp"
#include "boseglow/params.hpp"

namespace boseglow {

/// Pair momenta from the mean momentum K and relative momentum Δk = k₁ - k₂.
inline std::pair<Momentum3, Momentum3> pairFromMean(const Momentum3& K, const Momentum3& dk) noexcept {
    return {K + 0.5 * dk, K - 0.5 * dk};
}

/// (0, 0, |k|); the source is spherically symmetric so radial scans use this axis.
constexpr Momentum3 alongZ(double k) noexcept { return {0.0, 0.0, k}; }

struct InclusiveSum {
    double logValue = kNegInf;
    double logTailBound = kNegInf;
    std::size_t terms = 0;

    double value() const noexcept { return std::exp(logValue); }
};

/**
 * G(k₁,k₂) = Σ_n G_n(k₁,k₂), summed until a rigorous tail bound drops below
 * ctl.relTol of the partial sum.
 *
 * Bound: every quadratic form in the series dominates K²/σ_T² + √(1+2x) q²/(4σ_T²)
 * and j_n ≤ [(γ₊ - γ₋)/(π σ_T² (1 - ρ^{N+1}))]^{3/2} (n₀/n_c)ⁿ for n > N.
 */
inline InclusiveSum inclusiveGSum(const DerivedParams& d, double n0, const Momentum3& k1, const Momentum3& k2,
                                  const SeriesControl& ctl = {}) {
    detail::requireConvergent(n0, d.nc, "inclusive G");
    InclusiveSum out;
    if (n0 == 0.0) {
        out.terms = 1;
        return out;
    }
    const Gammas g = d.gammas();
    const double logRho = g.minus > 0.0 ? std::log(g.ratio()) : kNegInf;
    const double logR = std::log(n0 / d.nc);
    const double diff = std::sqrt(1.0 + 2.0 * d.x);
    const Momentum3 K = 0.5 * (k1 + k2);
    const Momentum3 q = k1 - k2;
    const double exponentFloor = norm2(K) / d.sigmaT2 + diff * norm2(q) / (4.0 * d.sigmaT2);
    const double logTolerance = std::log(ctl.relTol);

    LogSumExp acc;
    for (std::size_t n = 1; n <= ctl.maxOrder; ++n) {
        acc.add(kernel(d, n0, n).logValue(k1, k2));
        const double next = static_cast<double>(n + 1);
        const double logJBound = 1.5 * std::log(diff / (std::numbers::pi * d.sigmaT2 * -std::expm1(next * logRho)));
        const double logTail = -exponentFloor + logJBound + next * logR - std::log1p(-std::exp(logR));
        out.logValue = acc.value();
        out.logTailBound = logTail;
        out.terms = n;
        if (logTail <= logTolerance + out.logValue) return out;
    }
    throw TruncationLimit(fmt::format("inclusive G not converged after {} terms", ctl.maxOrder));
}

inline double inclusiveG(const DerivedParams& d, double n0, const Momentum3& k1, const Momentum3& k2,
                         const SeriesControl& ctl = {}) {
    return inclusiveGSum(d, n0, k1, k2, ctl).value();
}

/// Inclusive single-particle spectrum N₁(k) = G(k,k) [MeV⁻³].
inline double inclusiveN1(const DerivedParams& d, double n0, const Momentum3& k, const SeriesControl& ctl = {}) {
    return inclusiveG(d, n0, k, k, ctl);
}

/// C₂ = 1 + G(1,2)G(2,1) / (G(1,1)G(2,2)); the kernel is real and symmetric.
inline double inclusiveC2(const DerivedParams& d, double n0, const Momentum3& k1, const Momentum3& k2,
                          const SeriesControl& ctl = {}) {
    const double l12 = inclusiveGSum(d, n0, k1, k2, ctl).logValue;
    const double l11 = inclusiveGSum(d, n0, k1, k1, ctl).logValue;
    const double l22 = inclusiveGSum(d, n0, k2, k2, ctl).logValue;
    if (l11 == kNegInf || l22 == kNegInf) {
        throw DegenerateDenominator("inclusive single-particle spectrum vanishes");
    }
    return 1.0 + std::exp(2.0 * l12 - l11 - l22);
}

/**
 * Spectra of events with fixed multiplicity n.
 *
 * Holds ω_0..ω_n and the kernels G_1..G_n, so evaluating many momenta reuses
 * them. Fixed-n quantities are finite for any n₀, including above n_c.
 */
class ExclusiveSpectra {
public:
    /// One term (ω_{n-l}/ω_n)[G_m(1,1)G_{l-m}(2,2) + G_m(1,2)G_{l-m}(2,1)] of N₂⁽ⁿ⁾.
    struct PairTerm {
        double logWeight = 0.0;
        std::size_t first = 1;  ///< m
        std::size_t second = 1; ///< l - m
    };

    ExclusiveSpectra(const DerivedParams& d, double n0, std::size_t n) : n_(n) {
        if (n < 1) throw InvalidOrder("exclusive spectra need n >= 1");
        logW_ = logOmegas(d, n0, n);
        if (!std::isfinite(logW_[n])) {
            throw UnderflowRegime(fmt::format("omega_{} underflows (n0 = {:.17g}, x = {:.17g})", n, n0, d.x));
        }
        kernels_.reserve(n);
        for (std::size_t i = 1; i <= n; ++i) kernels_.push_back(kernel(d, n0, i));
        for (std::size_t l = 2; l <= n; ++l) {
            for (std::size_t m = 1; m < l; ++m) terms_.push_back({logRatio(l), m, l - m});
        }
    }

    std::size_t multiplicity() const noexcept { return n_; }
    const GaussianKernel& kernelOf(std::size_t i) const { return kernels_.at(i - 1); }
    const std::vector<PairTerm>& pairTerms() const noexcept { return terms_; }

    /// log(ω_{n-i}/ω_n).
    double logRatio(std::size_t i) const { return logW_.at(n_ - i) - logW_.at(n_); }

    double logN1(const Momentum3& k) const {
        LogSumExp acc;
        for (std::size_t i = 1; i <= n_; ++i) acc.add(logRatio(i) + kernels_[i - 1].logValue(k, k));
        return acc.value();
    }
    double n1(const Momentum3& k) const { return std::exp(logN1(k)); }

    double logN2(const Momentum3& k1, const Momentum3& k2) const {
        requirePair();
        LogSumExp acc;
        for (const PairTerm& t : terms_) {
            const GaussianKernel& a = kernels_[t.first - 1];
            const GaussianKernel& b = kernels_[t.second - 1];
            acc.add(t.logWeight + a.logValue(k1, k1) + b.logValue(k2, k2));
            acc.add(t.logWeight + a.logValue(k1, k2) + b.logValue(k2, k1));
        }
        return acc.value();
    }
    double n2(const Momentum3& k1, const Momentum3& k2) const { return std::exp(logN2(k1, k2)); }

    /// C₂⁽ⁿ⁾ = n/(n-1) N₂⁽ⁿ⁾ / (N₁⁽ⁿ⁾(k₁) N₁⁽ⁿ⁾(k₂)).
    double c2(const Momentum3& k1, const Momentum3& k2) const {
        requirePair();
        const double l1 = logN1(k1);
        const double l2 = logN1(k2);
        if (!std::isfinite(l1) || !std::isfinite(l2)) {
            throw DegenerateDenominator("exclusive single-particle spectrum underflows");
        }
        const double dn = static_cast<double>(n_);
        return dn / (dn - 1.0) * std::exp(logN2(k1, k2) - l1 - l2);
    }

private:
    void requirePair() const {
        if (n_ < 2) throw InvalidOrder(fmt::format("two-particle quantities need n >= 2, got {}", n_));
    }

    std::size_t n_;
    std::vector<double> logW_;
    std::vector<GaussianKernel> kernels_;
    std::vector<PairTerm> terms_;
};

inline double exclusiveN1(const DerivedParams& d, double n0, std::size_t n, const Momentum3& k) {
    return ExclusiveSpectra(d, n0, n).n1(k);
}

inline double exclusiveN2(const DerivedParams& d, double n0, std::size_t n, const Momentum3& k1,
                          const Momentum3& k2) {
    if (n < 2) throw InvalidOrder(fmt::format("two-particle quantities need n >= 2, got {}", n));
    return ExclusiveSpectra(d, n0, n).n2(k1, k2);
}

inline double exclusiveC2(const DerivedParams& d, double n0, std::size_t n, const Momentum3& k1,
                          const Momentum3& k2) {
    if (n < 2) throw InvalidOrder(fmt::format("two-particle quantities need n >= 2, got {}", n));
    return ExclusiveSpectra(d, n0, n).c2(k1, k2);
}

struct SideOut {
    Momentum3 out;  ///< component of Δk along K
    Momentum3 side; ///< component of Δk perpendicular to K
};

inline SideOut sideOutSplit(const Momentum3& K, const Momentum3& dk) {
    const double kk = norm2(K);
    if (kk == 0.0) throw ZeroMeanMomentum("side/out split undefined at K = 0");
    SideOut s;
    s.out = (dot(dk, K) / kk) * K;
    s.side = dk - s.out;
    return s;
}

} // namespace boseglow
