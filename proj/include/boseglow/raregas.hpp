#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string_view>
#include <vector>

#include <fmt/core.h>

#include "boseglow/error.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/momentum.hpp"
#include "boseglow/params.hpp"
#include "boseglow/spectra.hpp"

namespace boseglow {

/// Rare-gas results are flagged valid from this x upwards.
inline constexpr double kRareGasMinX = 100.0;

inline bool rareGasValid(const DerivedParams& d) noexcept { return d.x >= kRareGasMinX; }

/// log of n₀ⁿ n⁻⁴ (2/x)^{3(n-1)/2}.
inline double rareLogCn(const DerivedParams& d, double n0, std::size_t n) {
    if (n < 1) throw InvalidOrder("rare-gas combinant order must be >= 1");
    const double dn = static_cast<double>(n);
    const double logN0Pow = n0 > 0.0 ? dn * std::log(n0) : kNegInf;
    return logN0Pow - 4.0 * std::log(dn) + 1.5 * (dn - 1.0) * std::log(2.0 / d.x);
}

inline double rareCn(const DerivedParams& d, double n0, std::size_t n) { return std::exp(rareLogCn(d, n0, n)); }

/// j_n exp[-n(k₁² + k₂²)/(2σ_T²) - R_e² Δk²/(2n)],  j_n = n^{5/2} C_n / (π σ_T²)^{3/2}.
inline double rareKernelLog(const DerivedParams& d, double n0, std::size_t n, const Momentum3& k1,
                            const Momentum3& k2) {
    const double dn = static_cast<double>(n);
    const double logJ = 2.5 * std::log(dn) + rareLogCn(d, n0, n) - 1.5 * std::log(std::numbers::pi * d.sigmaT2);
    return logJ - dn * (norm2(k1) + norm2(k2)) / (2.0 * d.sigmaT2) - d.re2Natural() * norm2(k1 - k2) / (2.0 * dn);
}

inline double rareKernel(const DerivedParams& d, double n0, std::size_t n, const Momentum3& k1,
                         const Momentum3& k2) {
    return std::exp(rareKernelLog(d, n0, n, k1, k2));
}

/// λ_K = 1 + 2(2x)^{-3/2}[1 - 2^{5/2} exp(-K²/σ_T²)]; independent of n₀ and n.
inline double interceptLambda(const DerivedParams& d, double /*n0*/, double K) {
    const double eps = std::pow(2.0 * d.x, -1.5);
    return 1.0 + 2.0 * eps * (1.0 - std::pow(2.0, 2.5) * std::exp(-K * K / d.sigmaT2));
}

struct RareGasPrediction {
    double lambdaK = 1.0;
    double Rside2 = 0.0; ///< [fm²]
    double Rout2 = 0.0;  ///< [fm²]
    double K = 0.0;      ///< |K| [MeV]
    std::size_t n = 2;
    bool valid = false;          ///< x ≥ kRareGasMinX
    double expansionParameter = 0.0; ///< n (2x)^{-3/2}
};

/**
 * Mean-momentum dependent intercept and radii of the exclusive correlator
 * C₂⁽ⁿ⁾ ≈ 1 + λ_K exp(-R²_{K,s} Δk_s² - R²_{K,o} Δk_o²) at leading order in (2x)^{-3/2}:
 *
 *   R²_{K,s} = R_e² + (2x)^{-3/2}[R_e² - √2 e^{-K²/σ_T²}((n + 2)R_e² + 2/σ_T²)]
 *   R²_{K,o} = R²_{K,s} + (n / x^{3/2})(K²/σ_T⁴) e^{-K²/σ_T²}
 *
 * Radii are returned in fm² (the 1/σ_T² terms carry a factor (ħc)²).
 */
inline RareGasPrediction radiusParams(const DerivedParams& d, double n0, std::size_t n, double K) {
    if (n < 2) throw InvalidOrder(fmt::format("rare-gas radii need n >= 2, got {}", n));
    const double dn = static_cast<double>(n);
    const double eps = std::pow(2.0 * d.x, -1.5);
    const double damp = std::exp(-K * K / d.sigmaT2);
    const double hc2 = d.hbarc * d.hbarc;

    RareGasPrediction p;
    p.K = K;
    p.n = n;
    p.lambdaK = interceptLambda(d, n0, K);
    p.Rside2 = d.Re2 + eps * (d.Re2 - std::numbers::sqrt2 * damp * ((dn + 2.0) * d.Re2 + 2.0 * hc2 / d.sigmaT2));
    p.Rout2 = p.Rside2 + dn / std::pow(d.x, 1.5) * (K * K / (d.sigmaT2 * d.sigmaT2)) * damp * hc2;
    p.valid = rareGasValid(d);
    p.expansionParameter = dn * eps;
    return p;
}

inline RareGasPrediction radiusParams(const DerivedParams& d, double n0, std::size_t n, const Momentum3& K) {
    return radiusParams(d, n0, n, norm(K));
}

/// Gaussian rare-gas correlator at relative momentum components Δk_o, Δk_s [MeV].
inline double rareGasC2(const RareGasPrediction& p, const DerivedParams& d, double dkOut, double dkSide) {
    const double hc2 = d.hbarc * d.hbarc;
    return 1.0 + p.lambdaK * std::exp(-(p.Rside2 * dkSide * dkSide + p.Rout2 * dkOut * dkOut) / hc2);
}

enum class Direction { Side, Out };

inline std::string_view toString(Direction d) noexcept { return d == Direction::Side ? "side" : "out"; }

struct ComparisonGrid {
    std::vector<double> K;  ///< mean momentum magnitudes [MeV]
    std::vector<double> dk; ///< relative momentum magnitudes [MeV]
    bool side = true;
    bool out = true;
};

struct DeviationRow {
    double K = 0.0;
    double dk = 0.0;
    Direction direction = Direction::Side;
    double exact = 0.0;
    double rare = 0.0;
    double absDeviation = 0.0;
    double relDeviation = 0.0;
};

struct DeviationReport {
    std::size_t n = 2;
    double x = 0.0;
    bool valid = false;
    double expansionParameter = 0.0;
    std::vector<RareGasPrediction> predictions; ///< one per grid K
    std::vector<DeviationRow> rows;
    double maxAbsDeviation = 0.0;
    double meanAbsDeviation = 0.0;
    double maxRelDeviation = 0.0;
};

/**
 * Exact exclusive C₂⁽ⁿ⁾ against the rare-gas Gaussian form on a (K, Δk) grid.
 *
 * K points along z; Δk_out along K, Δk_side along x. Runs for any x: outside
 * the validity range the report is produced with valid = false.
 */
inline DeviationReport compareExactVsRare(const DerivedParams& d, double n0, std::size_t n,
                                          const ComparisonGrid& grid) {
    const ExclusiveSpectra exact(d, n0, n);
    DeviationReport rep;
    rep.n = n;
    rep.x = d.x;
    rep.valid = rareGasValid(d);
    rep.expansionParameter = static_cast<double>(n) * std::pow(2.0 * d.x, -1.5);

    CompensatedSum absSum;
    for (double K : grid.K) {
        const RareGasPrediction pred = radiusParams(d, n0, n, K);
        rep.predictions.push_back(pred);
        const Momentum3 Kv = alongZ(K);
        for (Direction dir : {Direction::Side, Direction::Out}) {
            if ((dir == Direction::Side && !grid.side) || (dir == Direction::Out && !grid.out)) continue;
            for (double dk : grid.dk) {
                const Momentum3 dkv = dir == Direction::Side ? Momentum3{dk, 0.0, 0.0} : alongZ(dk);
                const auto [k1, k2] = pairFromMean(Kv, dkv);
                DeviationRow row;
                row.K = K;
                row.dk = dk;
                row.direction = dir;
                row.exact = exact.c2(k1, k2);
                row.rare = dir == Direction::Side ? rareGasC2(pred, d, 0.0, dk) : rareGasC2(pred, d, dk, 0.0);
                row.absDeviation = std::abs(row.exact - row.rare);
                row.relDeviation = row.absDeviation / std::abs(row.exact);
                rep.maxAbsDeviation = std::max(rep.maxAbsDeviation, row.absDeviation);
                rep.maxRelDeviation = std::max(rep.maxRelDeviation, row.relDeviation);
                absSum += row.absDeviation;
                rep.rows.push_back(row);
            }
        }
    }
    if (!rep.rows.empty()) rep.meanAbsDeviation = absSum.value() / static_cast<double>(rep.rows.size());
    return rep;
}

} // namespace boseglow
