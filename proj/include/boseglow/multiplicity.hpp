#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include <fmt/core.h>

#include "boseglow/error.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/params.hpp"

namespace boseglow {

enum class Regime { Convergent, Critical, Condensed };

inline std::string_view toString(Regime r) noexcept {
    switch (r) {
    case Regime::Convergent: return "Convergent";
    case Regime::Critical: return "Critical";
    case Regime::Condensed: return "Condensed";
    }
    return "?";
}

/// Relative half-width of the band around n_c treated as exactly critical.
inline constexpr double kCriticalBand = 1e-9;

struct SeriesControl {
    double relTol = 1e-14;          ///< stop once the tail bound is below relTol * sum
    std::size_t maxOrder = 100000;  ///< hard cap on the number of terms
};

inline Regime classifyRegime(double n0, double nc) noexcept {
    if (std::abs(n0 - nc) <= kCriticalBand * nc) return Regime::Critical;
    return n0 < nc ? Regime::Convergent : Regime::Condensed;
}

/// Convergent below n_c, Critical within the εc band, Condensed above.
inline Regime classifyRegime(const DerivedParams& d, double n0) noexcept {
    return classifyRegime(n0, d.nc);
}

/// log C_n = n log n₀ - log n - 3 log(γ₊^{n/2} - γ₋^{n/2}), overflow-free.
inline double logCombinant(const Gammas& g, double n0, std::size_t n) noexcept {
    const double dn = static_cast<double>(n);
    const double logRatioPow = g.minus > 0.0 ? 0.5 * dn * std::log(g.ratio()) : kNegInf;
    const double logBracket = 0.5 * dn * std::log(g.plus) + std::log1p(-std::exp(logRatioPow));
    const double logN0Pow = n0 > 0.0 ? dn * std::log(n0) : kNegInf;
    return logN0Pow - std::log(dn) - 3.0 * logBracket;
}

/**
 * Combinants C_1..C_N of the multiplicity generating function
 * G(z) = exp(Σ C_n (zⁿ - 1)).
 *
 * Values are held as logs. Orders past N are evaluated on demand from the
 * closed form, so `logC` is valid for every n ≥ 1.
 */
class CombinantSeries {
public:
    CombinantSeries(const Gammas& g, double n0, std::size_t order)
        : gammas_(g), n0_(n0), nc_(std::pow(g.plus, 1.5)) {
        if (order < 1) throw InvalidOrder("combinant series needs N >= 1");
        if (!(n0 >= 0.0)) throw InvalidParameter("n0", "must be >= 0");
        logC_.reserve(order);
        for (std::size_t n = 1; n <= order; ++n) logC_.push_back(logCombinant(g, n0, n));
    }

    std::size_t order() const noexcept { return logC_.size(); }
    double n0() const noexcept { return n0_; }
    double nc() const noexcept { return nc_; }
    const Gammas& gammas() const noexcept { return gammas_; }
    Regime regime() const noexcept { return classifyRegime(n0_, nc_); }

    double logC(std::size_t n) const noexcept {
        return n <= logC_.size() ? logC_[n - 1] : logCombinant(gammas_, n0_, n);
    }
    double c(std::size_t n) const noexcept { return std::exp(logC(n)); }
    std::span<const double> logValues() const noexcept { return logC_; }

    /// Rigorous bound on Σ_{n>N} n C_n; infinite unless n₀ < n_c.
    double truncationError() const noexcept {
        const double r = n0_ / nc_;
        if (regime() != Regime::Convergent) return std::numeric_limits<double>::infinity();
        const double next = static_cast<double>(order() + 1);
        const double rho = gammas_.ratio();
        const double damp = 1.0 - std::pow(rho, 0.5 * next);
        return std::pow(r, next) / (1.0 - r) / (damp * damp * damp);
    }

    CombinantSeries extended(std::size_t order) const { return {gammas_, n0_, order}; }

private:
    Gammas gammas_;
    double n0_;
    double nc_;
    std::vector<double> logC_;
};

inline CombinantSeries combinants(const DerivedParams& d, double n0, std::size_t order) {
    return {d.gammas(), n0, order};
}

namespace detail {

inline void requireConvergent(double n0, double nc, const char* what) {
    const Regime r = classifyRegime(n0, nc);
    if (r != Regime::Convergent) {
        throw DivergentMean(fmt::format("{}: n0 = {:.17g} with n_c = {:.17g} is {}; the mean multiplicity diverges",
                                        what, n0, nc, toString(r)));
    }
}

inline double partialMoment(const CombinantSeries& c) {
    CompensatedSum s;
    for (std::size_t n = 1; n <= c.order(); ++n) s += static_cast<double>(n) * c.c(n);
    return s.value();
}

} // namespace detail

/// Shortest series whose Σ n C_n tail bound is below relTol of the sum.
inline CombinantSeries combinantsToTolerance(const DerivedParams& d, double n0, const SeriesControl& ctl = {}) {
    detail::requireConvergent(n0, d.nc, "combinants");
    // n C_n ≤ r^n (1 - ρ^{n/2})^{-3}: size N from the geometric rate, then verify.
    const double r = n0 / d.nc;
    std::size_t order = 16;
    if (r > 0.0) {
        const double guess = std::log(ctl.relTol * (1.0 - r)) / std::log(r);
        if (guess > static_cast<double>(order)) order = static_cast<std::size_t>(std::ceil(guess)) + 8;
    }
    order = std::min(order, ctl.maxOrder);
    for (;;) {
        CombinantSeries c = combinants(d, n0, order);
        const double sum = detail::partialMoment(c);
        if (c.truncationError() <= ctl.relTol * sum || sum == 0.0) return c;
        if (order >= ctl.maxOrder) {
            throw TruncationLimit(fmt::format("combinant tail still above {:.3g} at N = {}", ctl.relTol, order));
        }
        order = std::min(2 * order, ctl.maxOrder);
    }
}

struct MeanMultiplicity {
    double value = 0.0;
    double tailBound = 0.0;
    std::size_t order = 0;
};

/// ⟨n⟩ = Σ i C_i, with N raised until the tail bound is below 1e-8 of the sum.
inline MeanMultiplicity meanMultiplicity(const CombinantSeries& c, const SeriesControl& ctl = {}) {
    detail::requireConvergent(c.n0(), c.nc(), "meanMultiplicity");
    constexpr double kMeanTol = 1e-8;
    CombinantSeries series = c;
    for (;;) {
        const double sum = detail::partialMoment(series);
        const double tail = series.truncationError();
        if (tail <= kMeanTol * sum || sum == 0.0) return {sum, tail, series.order()};
        if (series.order() >= ctl.maxOrder) {
            throw TruncationLimit(fmt::format("mean multiplicity tail {:.3g} exceeds 1e-8 of the sum at N = {}",
                                              tail, series.order()));
        }
        series = series.extended(std::min(2 * series.order(), ctl.maxOrder));
    }
}

/**
 * log ω_0..log ω_n with ω_k = p_k/p_0, from the compound-Poisson recurrence
 * k ω_k = Σ_{j=1}^{k} j C_j ω_{k-j}. Valid in every regime.
 */
inline std::vector<double> logOmegas(const CombinantSeries& c, std::size_t n) {
    std::vector<double> logJC(n + 1, kNegInf);
    for (std::size_t j = 1; j <= n; ++j) logJC[j] = std::log(static_cast<double>(j)) + c.logC(j);
    std::vector<double> logW(n + 1, kNegInf);
    logW[0] = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        LogSumExp acc;
        for (std::size_t j = 1; j <= k; ++j) acc.add(logJC[j] + logW[k - j]);
        logW[k] = acc.value() - std::log(static_cast<double>(k));
    }
    return logW;
}

inline std::vector<double> logOmegas(const DerivedParams& d, double n0, std::size_t n) {
    return logOmegas(combinants(d, n0, std::max<std::size_t>(n, 1)), n);
}

struct MultiplicityDistribution {
    std::vector<double> p;        ///< p_0..p_N
    std::vector<double> logOmega; ///< log(p_n/p_0)
    double mean = 0.0;            ///< Σ i C_i
    double sumC = 0.0;            ///< Σ C_i, so p_0 = exp(-sumC)
    Regime regime = Regime::Convergent;

    double omega(std::size_t n) const { return std::exp(logOmega.at(n)); }
    double mass() const {
        CompensatedSum s;
        for (double v : p) s += v;
        return s.value();
    }
    double firstMoment() const {
        CompensatedSum s;
        for (std::size_t n = 1; n < p.size(); ++n) s += static_cast<double>(n) * p[n];
        return s.value();
    }
};

/**
 * p_n from the recurrence n p_n = Σ_k k C_k p_{n-k}, p_0 = exp(-Σ C_k).
 *
 * The table is extended until p_n and n p_n fall below 1e-16 of their scale
 * past the mean.
 */
inline MultiplicityDistribution multiplicityDistribution(const CombinantSeries& c, const SeriesControl& ctl = {}) {
    detail::requireConvergent(c.n0(), c.nc(), "multiplicityDistribution");

    // p_0 and the normalisation need Σ C_n to full precision, not just the mean's tolerance.
    CombinantSeries series = c;
    CompensatedSum sumC, sumNC;
    for (std::size_t from = 1;;) {
        for (std::size_t n = from; n <= series.order(); ++n) {
            sumC += series.c(n);
            sumNC += static_cast<double>(n) * series.c(n);
        }
        if (series.truncationError() <= ctl.relTol * sumNC.value() || sumNC.value() == 0.0) break;
        if (series.order() >= ctl.maxOrder) {
            throw TruncationLimit(fmt::format("combinant tail still above {:.3g} at N = {}", ctl.relTol, series.order()));
        }
        from = series.order() + 1;
        series = series.extended(std::min(2 * series.order(), ctl.maxOrder));
    }

    MultiplicityDistribution out;
    out.mean = sumNC.value();
    out.sumC = sumC.value();
    out.regime = Regime::Convergent;

    std::vector<double> logJC{kNegInf};
    out.logOmega.push_back(0.0);
    out.p.push_back(std::exp(-out.sumC));
    std::vector<double> logP{-out.sumC};
    double pMax = out.p[0];

    constexpr double kStop = 1e-16;
    for (std::size_t n = 1;; ++n) {
        if (n > ctl.maxOrder) {
            throw TruncationLimit(fmt::format("p_n table exceeds {} entries", ctl.maxOrder));
        }
        logJC.push_back(std::log(static_cast<double>(n)) + series.logC(n));
        // Run the recurrence on log p_n, which stays O(1) near the peak, so
        // rounding does not scale with log ω_n.
        LogSumExp acc;
        for (std::size_t j = 1; j <= n; ++j) acc.add(logJC[j] + logP[n - j]);
        const double lp = acc.value() - std::log(static_cast<double>(n));
        logP.push_back(lp);
        out.logOmega.push_back(lp + out.sumC);
        const double pn = std::exp(lp);
        out.p.push_back(pn);
        pMax = std::max(pMax, pn);
        const double dn = static_cast<double>(n);
        if (dn > out.mean && pn <= kStop * pMax && dn * pn <= kStop * std::max(out.mean, pMax)) break;
    }
    return out;
}

} // namespace boseglow
