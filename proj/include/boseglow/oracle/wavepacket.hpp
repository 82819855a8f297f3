#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "boseglow/error.hpp"
#include "boseglow/momentum.hpp"
#include "boseglow/oracle/permanent.hpp"
#include "boseglow/params.hpp"

namespace boseglow::oracle {

/// Packet centre in space (fm) and in momentum (MeV). Width and emission time are shared.
struct WavePacket {
    Momentum3 xi;
    Momentum3 pi;
};

/**
 * Momentum-space amplitude of a packet at equal emission times,
 * u(k) = (πσ²)^{-3/4} exp(-(k - π)²/(2σ²) - i ξ·(k - π)/ħc).
 */
inline std::complex<double> amplitude(const WavePacket& a, const Momentum3& k, double sigma,
                                      double hbarc = kHbarC) {
    const Momentum3 d = k - a.pi;
    const double mag = std::pow(std::numbers::pi * sigma * sigma, -0.75) * std::exp(-norm2(d) / (2.0 * sigma * sigma));
    return std::polar(mag, -dot(a.xi, d) / hbarc);
}

/**
 * ⟨α_i|α_j⟩ = ∫ d³p u_i*(p) u_j(p), by completing the square:
 *
 *   |⟨α_i|α_j⟩| = exp(-Δπ²/(4σ²) - σ²Δξ²/(4(ħc)²)),
 *   arg⟨α_i|α_j⟩ = [Δξ·P - ξ_i·π_i + ξ_j·π_j]/ħc,   Δξ = ξ_i - ξ_j,  P = (π_i + π_j)/2.
 *
 * The energy phases ω(p)(t - t₀) cancel because all packets share t₀.
 */
inline std::complex<double> overlap(const WavePacket& i, const WavePacket& j, double sigma, double hbarc = kHbarC) {
    const Momentum3 dpi = i.pi - j.pi;
    const Momentum3 dxi = i.xi - j.xi;
    const Momentum3 P = 0.5 * (i.pi + j.pi);
    const double s2 = sigma * sigma;
    const double mag = std::exp(-norm2(dpi) / (4.0 * s2) - s2 * norm2(dxi) / (4.0 * hbarc * hbarc));
    const double phase = (dot(dxi, P) - dot(i.xi, i.pi) + dot(j.xi, j.pi)) / hbarc;
    return std::polar(mag, phase);
}

struct WavePacketConfig {
    std::vector<WavePacket> packets;
    double sigma = 150.0; ///< common momentum width [MeV]
    double hbarc = kHbarC;
    double weight = std::numeric_limits<double>::quiet_NaN(); ///< filled by permanentWeight

    std::size_t size() const noexcept { return packets.size(); }
};

inline SquareMatrix<std::complex<double>> overlapMatrix(const WavePacketConfig& c) {
    const std::size_t n = c.size();
    SquareMatrix<std::complex<double>> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = overlap(c.packets[i], c.packets[j], c.sigma, c.hbarc);
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

/// Σ_σ Π_k ⟨α_k|α_σk⟩, the induced-emission weight; real and in [1, n!].
inline double permanentWeight(const WavePacketConfig& c) {
    if (c.size() > kMaxPermanentSize) {
        throw SizeLimit("permanent weight limited to n <= 10 packets");
    }
    return permanent(overlapMatrix(c)).real();
}

/// Computes the weight and stores it in the config.
inline double assignWeight(WavePacketConfig& c) {
    c.weight = permanentWeight(c);
    return c.weight;
}

} // namespace boseglow::oracle
