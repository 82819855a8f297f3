#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "boseglow/error.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/momentum.hpp"
#include "boseglow/oracle/permanent.hpp"
#include "boseglow/oracle/rng.hpp"
#include "boseglow/oracle/wavepacket.hpp"
#include "boseglow/params.hpp"

namespace boseglow::oracle {

inline constexpr std::size_t kMinMcSamples = 100000;
inline constexpr std::size_t kMaxMcMultiplicity = 4;

struct McOptions {
    std::size_t samples = 1000000;
    std::optional<std::uint64_t> seed;
    std::size_t streams = 64;          ///< fixed substreams; results do not depend on `threads`
    std::size_t threads = 1;           ///< 0 = hardware concurrency
    std::size_t batchesPerStream = 4;  ///< bootstrap resamples whole batches
    std::size_t bootstrapReplicas = 400;
    std::optional<double> targetRelError; ///< at the spectrum peak
};

struct McSpectrum {
    std::size_t n = 2;
    std::vector<double> k;        ///< |k| grid [MeV]
    std::vector<double> density;  ///< N₁⁽ⁿ⁾(k)/n [MeV⁻³]
    std::vector<double> error;    ///< bootstrap standard error of density
    double meanWeight = 0.0;      ///< ⟨per M⟩ under Π ρ₁, estimates n! ω_n / n₀ⁿ
    double meanWeightError = 0.0;
    double minWeight = 0.0;
    double maxWeight = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t streams = 0;

    std::size_t peakIndex() const {
        return static_cast<std::size_t>(std::distance(density.begin(), std::max_element(density.begin(), density.end())));
    }
};

namespace detail {

struct BatchTally {
    CompensatedSum weight;
    std::vector<CompensatedSum> f;
    std::size_t count = 0;
};

struct StreamResult {
    std::vector<BatchTally> batches;
    double minWeight = std::numeric_limits<double>::infinity();
    double maxWeight = 0.0;
};

using Cplx = std::complex<double>;

inline Cplx minorPermanent(const std::array<Cplx, 16>& m, std::size_t n, std::size_t row, std::size_t col) {
    std::array<Cplx, 9> sub{};
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == row) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != col) sub[idx++] = m[i * n + j];
        }
    }
    return ryserPermanent<Cplx>(std::span<const Cplx>(sub.data(), (n - 1) * (n - 1)), n - 1);
}

inline StreamResult runStream(const ModelParams& p, std::size_t n, std::span<const double> kGrid,
                              std::uint64_t seed, std::size_t stream, std::size_t samples,
                              std::size_t batches) {
    Engine engine = makeStream(seed, stream);
    std::normal_distribution<double> xiDist(0.0, p.R);
    std::normal_distribution<double> piDist(0.0, std::sqrt(p.m * p.T));

    StreamResult res;
    res.batches.resize(batches);
    for (BatchTally& b : res.batches) b.f.resize(kGrid.size());

    std::array<WavePacket, kMaxMcMultiplicity> packets{};
    std::array<Cplx, 16> m{};
    std::array<Cplx, 16> minors{};
    std::array<Cplx, kMaxMcMultiplicity> u{};
    const std::array<Momentum3, 3> axes{Momentum3{1, 0, 0}, Momentum3{0, 1, 0}, Momentum3{0, 0, 1}};

    for (std::size_t s = 0; s < samples; ++s) {
        BatchTally& tally = res.batches[s * batches / samples];
        for (std::size_t i = 0; i < n; ++i) {
            packets[i].xi = {xiDist(engine), xiDist(engine), xiDist(engine)};
            packets[i].pi = {piDist(engine), piDist(engine), piDist(engine)};
        }
        for (std::size_t i = 0; i < n; ++i) {
            m[i * n + i] = 1.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                m[i * n + j] = overlap(packets[i], packets[j], p.sigma, kHbarC);
                m[j * n + i] = std::conj(m[i * n + j]);
            }
        }
        const double w = ryserPermanent<Cplx>(std::span<const Cplx>(m.data(), n * n), n).real();
        res.minWeight = std::min(res.minWeight, w);
        res.maxWeight = std::max(res.maxWeight, w);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) minors[i * n + j] = minorPermanent(m, n, i, j);
        }
        tally.weight += w;
        ++tally.count;

        // ⟨ψ|a†(k)a(k)|ψ⟩ = Σ_ij u_i*(k) u_j(k) per(M without row i, column j)
        for (std::size_t g = 0; g < kGrid.size(); ++g) {
            double acc = 0.0;
            for (const Momentum3& axis : axes) {
                const Momentum3 k = kGrid[g] * axis;
                for (std::size_t j = 0; j < n; ++j) u[j] = amplitude(packets[j], k, p.sigma, kHbarC);
                for (std::size_t i = 0; i < n; ++i) {
                    Cplx row{};
                    for (std::size_t j = 0; j < n; ++j) row += minors[i * n + j] * u[j];
                    acc += (std::conj(u[i]) * row).real();
                }
            }
            tally.f[g] += acc / 3.0;
        }
    }
    return res;
}

} // namespace detail

/**
 * Importance-sampled single-particle spectrum of the n-packet state.
 *
 * Packets are drawn from Π ρ₁ (ξ ~ N(0, R²), π ~ N(0, mT) per axis) and
 * weighted by the overlap permanent. The estimate of N₁⁽ⁿ⁾(|k|)/n is
 * Σ f(k) / (n Σ w), evaluated along the three axes and averaged. Errors come
 * from a bootstrap over batches. Deterministic for fixed (seed, samples,
 * streams, batchesPerStream), for any thread count.
 */
inline McSpectrum mcExclusiveSpectrum(const ModelParams& p, std::size_t n, std::span<const double> kGrid,
                                      const McOptions& opt) {
    validate(p);
    if (!opt.seed) throw SeedRequired("Monte Carlo spectrum needs an explicit seed");
    if (n < 2 || n > kMaxMcMultiplicity) {
        throw InvalidOrder(fmt::format("Monte Carlo spectrum supports n in [2, {}], got {}", kMaxMcMultiplicity, n));
    }
    if (opt.samples < kMinMcSamples) {
        throw InvalidParameter("mc_samples", fmt::format("needs at least {} samples", kMinMcSamples));
    }
    if (opt.streams < 1 || opt.batchesPerStream < 1 || opt.bootstrapReplicas < 2) {
        throw InvalidParameter("mc_streams", "streams, batches and replicas must be positive");
    }
    if (kGrid.empty()) throw InvalidParameter("k_grid", "must not be empty");

    const std::uint64_t seed = *opt.seed;
    const std::size_t streams = opt.streams;
    std::vector<detail::StreamResult> results(streams);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < streams; s = next++) {
            const std::size_t count = opt.samples / streams + (s < opt.samples % streams ? 1 : 0);
            results[s] = detail::runStream(p, n, kGrid, seed, s, count, opt.batchesPerStream);
        }
    };
    std::size_t threads = opt.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : opt.threads;
    threads = std::min(threads, streams);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // Flatten batches in stream order.
    std::vector<double> batchW;
    std::vector<std::size_t> batchN;
    std::vector<std::vector<double>> batchF;
    McSpectrum out;
    out.n = n;
    out.k.assign(kGrid.begin(), kGrid.end());
    out.samples = opt.samples;
    out.seed = seed;
    out.streams = streams;
    out.minWeight = std::numeric_limits<double>::infinity();
    for (const detail::StreamResult& r : results) {
        out.minWeight = std::min(out.minWeight, r.minWeight);
        out.maxWeight = std::max(out.maxWeight, r.maxWeight);
        for (const detail::BatchTally& b : r.batches) {
            if (b.count == 0) continue;
            batchW.push_back(b.weight.value());
            batchN.push_back(b.count);
            std::vector<double> f(kGrid.size());
            for (std::size_t g = 0; g < f.size(); ++g) f[g] = b.f[g].value();
            batchF.push_back(std::move(f));
        }
    }
    const std::size_t nb = batchW.size();
    const double dn = static_cast<double>(n);

    auto estimate = [&](std::span<const std::size_t> idx, std::vector<double>& dens, double& meanW) {
        CompensatedSum w;
        std::size_t count = 0;
        std::vector<CompensatedSum> f(kGrid.size());
        for (std::size_t b : idx) {
            w += batchW[b];
            count += batchN[b];
            for (std::size_t g = 0; g < f.size(); ++g) f[g] += batchF[b][g];
        }
        dens.resize(f.size());
        for (std::size_t g = 0; g < f.size(); ++g) dens[g] = f[g].value() / (dn * w.value());
        meanW = w.value() / static_cast<double>(count);
    };

    std::vector<std::size_t> all(nb);
    for (std::size_t b = 0; b < nb; ++b) all[b] = b;
    estimate(all, out.density, out.meanWeight);

    Engine boot = makeStream(seed, std::uint64_t{1} << 63);
    std::uniform_int_distribution<std::size_t> pick(0, nb - 1);
    std::vector<CompensatedSum> s1(kGrid.size()), s2(kGrid.size());
    CompensatedSum w1, w2;
    std::vector<std::size_t> idx(nb);
    std::vector<double> dens;
    double meanW = 0.0;
    for (std::size_t r = 0; r < opt.bootstrapReplicas; ++r) {
        for (std::size_t& i : idx) i = pick(boot);
        estimate(idx, dens, meanW);
        for (std::size_t g = 0; g < dens.size(); ++g) {
            const double dv = dens[g] - out.density[g];
            s1[g] += dv;
            s2[g] += dv * dv;
        }
        const double dw = meanW - out.meanWeight;
        w1 += dw;
        w2 += dw * dw;
    }
    const double R = static_cast<double>(opt.bootstrapReplicas);
    auto stdev = [R](double a, double b) { return std::sqrt(std::max(0.0, (b - a * a / R) / (R - 1.0))); };
    out.error.resize(kGrid.size());
    for (std::size_t g = 0; g < kGrid.size(); ++g) out.error[g] = stdev(s1[g].value(), s2[g].value());
    out.meanWeightError = stdev(w1.value(), w2.value());

    if (opt.targetRelError) {
        const std::size_t peak = out.peakIndex();
        const double rel = out.error[peak] / out.density[peak];
        if (rel > *opt.targetRelError) {
            throw InsufficientSamples(fmt::format("bootstrap error {:.3g} at the peak exceeds the target {:.3g}",
                                                  rel, *opt.targetRelError));
        }
    }
    return out;
}

} // namespace boseglow::oracle
