#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "boseglow/momentum.hpp"
#include "boseglow/multiplicity.hpp"
#include "boseglow/params.hpp"
#include "boseglow/raregas.hpp"
#include "boseglow/spectra.hpp"

namespace boseglow {

/// Evenly spaced values on [lo, hi]; a single point sits at lo.
inline std::vector<double> linspace(double lo, double hi, std::size_t steps) {
    std::vector<double> v;
    v.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        v.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
    }
    return v;
}

/// N₁ (inclusive) or N₁⁽ⁿ⁾ (exclusive) along a radial |k| grid.
struct SpectrumTable {
    std::optional<std::size_t> n; ///< fixed multiplicity, empty for inclusive
    std::vector<double> k;        ///< |k| [MeV]
    std::vector<double> values;   ///< [MeV⁻³]
    std::size_t maxTerms = 0;     ///< longest series used (inclusive only)
};

inline SpectrumTable inclusiveSpectrum(const DerivedParams& d, double n0, const std::vector<double>& kGrid,
                                       const SeriesControl& ctl = {}) {
    SpectrumTable t;
    t.k = kGrid;
    for (double k : kGrid) {
        const InclusiveSum s = inclusiveGSum(d, n0, alongZ(k), alongZ(k), ctl);
        t.values.push_back(s.value());
        t.maxTerms = std::max(t.maxTerms, s.terms);
    }
    return t;
}

inline SpectrumTable exclusiveSpectrum(const DerivedParams& d, double n0, std::size_t n,
                                       const std::vector<double>& kGrid) {
    const ExclusiveSpectra ex(d, n0, n);
    SpectrumTable t;
    t.n = n;
    t.k = kGrid;
    for (double k : kGrid) t.values.push_back(ex.n1(alongZ(k)));
    return t;
}

struct CorrelationPoint {
    double K = 0.0;  ///< |K| [MeV], K along z
    double dk = 0.0; ///< |Δk| [MeV]
    Direction direction = Direction::Side;

    std::pair<Momentum3, Momentum3> momenta() const {
        const Momentum3 dkv = direction == Direction::Side ? Momentum3{dk, 0.0, 0.0} : alongZ(dk);
        return pairFromMean(alongZ(K), dkv);
    }
};

struct CorrelationTable {
    std::optional<std::size_t> n; ///< exclusive multiplicity, empty for inclusive
    std::vector<CorrelationPoint> pairs;
    std::vector<double> values;
};

inline std::vector<CorrelationPoint> correlationGrid(const std::vector<double>& K, const std::vector<double>& dk,
                                                     bool side, bool out) {
    std::vector<CorrelationPoint> pts;
    for (double k : K) {
        for (Direction dir : {Direction::Side, Direction::Out}) {
            if ((dir == Direction::Side && !side) || (dir == Direction::Out && !out)) continue;
            for (double q : dk) pts.push_back({k, q, dir});
        }
    }
    return pts;
}

inline CorrelationTable inclusiveCorrelation(const DerivedParams& d, double n0, std::vector<CorrelationPoint> pts,
                                             const SeriesControl& ctl = {}) {
    CorrelationTable t;
    t.pairs = std::move(pts);
    for (const CorrelationPoint& p : t.pairs) {
        const auto [k1, k2] = p.momenta();
        t.values.push_back(inclusiveC2(d, n0, k1, k2, ctl));
    }
    return t;
}

inline CorrelationTable exclusiveCorrelation(const DerivedParams& d, double n0, std::size_t n,
                                             std::vector<CorrelationPoint> pts) {
    const ExclusiveSpectra ex(d, n0, n);
    CorrelationTable t;
    t.n = n;
    t.pairs = std::move(pts);
    for (const CorrelationPoint& p : t.pairs) {
        const auto [k1, k2] = p.momenta();
        t.values.push_back(ex.c2(k1, k2));
    }
    return t;
}

} // namespace boseglow
