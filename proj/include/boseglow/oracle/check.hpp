#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "boseglow/kernel.hpp"
#include "boseglow/multiplicity.hpp"
#include "boseglow/oracle/montecarlo.hpp"
#include "boseglow/oracle/ring.hpp"
#include "boseglow/oracle/rng.hpp"
#include "boseglow/params.hpp"
#include "boseglow/quadrature.hpp"
#include "boseglow/spectra.hpp"

namespace boseglow::oracle {

struct OrderDeviation {
    std::size_t n = 0;
    double maxRelDeviation = 0.0;
};

/// Momentum pairs with Gaussian components of width σ_T, drawn from a fixed stream.
inline std::vector<std::pair<Momentum3, Momentum3>> randomPairs(const DerivedParams& d, std::size_t count,
                                                                std::uint64_t seed) {
    Engine eng = makeStream(seed, 0);
    std::normal_distribution<double> comp(0.0, std::sqrt(d.sigmaT2));
    std::vector<std::pair<Momentum3, Momentum3>> out(count);
    for (auto& [a, b] : out) {
        a = {comp(eng), comp(eng), comp(eng)};
        b = {comp(eng), comp(eng), comp(eng)};
    }
    return out;
}

/// Ring recursion against the closed-form kernels, pointwise, for n = 1..N.
inline std::vector<OrderDeviation> ringDeviation(const DerivedParams& d, double n0, std::size_t N,
                                                 std::span<const std::pair<Momentum3, Momentum3>> pairs) {
    const std::vector<RingCoefficients> ring = ringRecursion(d, n0, N);
    std::vector<OrderDeviation> out;
    for (std::size_t n = 1; n <= N; ++n) {
        const GaussianKernel g = kernel(d, n0, n);
        OrderDeviation dev{n, 0.0};
        for (const auto& [a, b] : pairs) {
            const double rel = std::abs(std::expm1(ring[n - 1].logValue(a, b) - g.logValue(a, b)));
            dev.maxRelDeviation = std::max(dev.maxRelDeviation, rel);
        }
        out.push_back(dev);
    }
    return out;
}

/// Default Gauss-Hermite scale: between the widths of G_1(k,k) and G_∞(k,k).
inline double bridgeScale(const DerivedParams& d) { return std::sqrt(d.sigmaT2) * std::pow(1.0 + 2.0 * d.x, -0.125); }

/// ∫ d³k G_n(k,k) by tensor Gauss-Hermite against n C_n, n = 1..N.
inline std::vector<OrderDeviation> bridgeDeviation(const DerivedParams& d, double n0, std::size_t N,
                                                   std::size_t order = kDefaultQuadratureOrder) {
    const GaussHermite gh(order, bridgeScale(d));
    const CombinantSeries c = combinants(d, n0, N);
    std::vector<OrderDeviation> out;
    for (std::size_t n = 1; n <= N; ++n) {
        const GaussianKernel g = kernel(d, n0, n);
        const double integral = gh.integrate3([&g](const Momentum3& k) { return g(k, k); });
        const double expected = static_cast<double>(n) * c.c(n);
        out.push_back({n, std::abs(integral / expected - 1.0)});
    }
    return out;
}

struct McComparison {
    McSpectrum mc;
    std::vector<double> exact; ///< N₁⁽ⁿ⁾(k)/n
    std::vector<double> pull;  ///< (mc - exact)/error
    double maxAbsPull = 0.0;
    double peakRelError = 0.0;     ///< bootstrap error / estimate at the peak
    double peakRelDeviation = 0.0; ///< |mc - exact|/exact at the peak
};

/// MC spectrum of the packet ensemble against the analytic exclusive spectrum.
inline McComparison mcCompare(const ModelParams& p, std::size_t n, std::span<const double> kGrid,
                              const McOptions& opt) {
    McComparison c;
    c.mc = mcExclusiveSpectrum(p, n, kGrid, opt);
    const ExclusiveSpectra ex(derive(p), p.n0, n);
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
        const double e = ex.n1(alongZ(kGrid[i])) / static_cast<double>(n);
        c.exact.push_back(e);
        const double pull = (c.mc.density[i] - e) / c.mc.error[i];
        c.pull.push_back(pull);
        c.maxAbsPull = std::max(c.maxAbsPull, std::abs(pull));
    }
    const std::size_t peak = c.mc.peakIndex();
    c.peakRelError = c.mc.error[peak] / c.mc.density[peak];
    c.peakRelDeviation = std::abs(c.mc.density[peak] / c.exact[peak] - 1.0);
    return c;
}

/// Physical parameters with the requested x at fixed m, T and σ, solving for R.
inline ModelParams paramsForX(double x, double m = 139.57, double T = 100.0, double sigma = 300.0, double n0 = 1.0) {
    const double s2 = sigma * sigma;
    const double sT2 = s2 + 2.0 * m * T;
    const double R2 = x * kHbarC * kHbarC / sT2 - kHbarC * kHbarC * m * T / (s2 * sT2);
    if (!(R2 > 0.0)) throw InvalidParameter("x", "not reachable at this m, T, sigma");
    ModelParams p;
    p.n0 = n0;
    p.m = m;
    p.T = T;
    p.sigma = sigma;
    p.R = std::sqrt(R2);
    return p;
}

} // namespace boseglow::oracle
