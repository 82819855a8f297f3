#pragma once

#include <cmath>

namespace boseglow {

/// Three-momentum in MeV. Also used for packet centres in fm by the oracle.
struct Momentum3 {
    double kx = 0.0;
    double ky = 0.0;
    double kz = 0.0;

    constexpr Momentum3& operator+=(const Momentum3& o) noexcept {
        kx += o.kx;
        ky += o.ky;
        kz += o.kz;
        return *this;
    }
    constexpr Momentum3& operator-=(const Momentum3& o) noexcept {
        kx -= o.kx;
        ky -= o.ky;
        kz -= o.kz;
        return *this;
    }
    constexpr Momentum3& operator*=(double s) noexcept {
        kx *= s;
        ky *= s;
        kz *= s;
        return *this;
    }

    friend constexpr Momentum3 operator+(Momentum3 a, const Momentum3& b) noexcept { return a += b; }
    friend constexpr Momentum3 operator-(Momentum3 a, const Momentum3& b) noexcept { return a -= b; }
    friend constexpr Momentum3 operator*(Momentum3 a, double s) noexcept { return a *= s; }
    friend constexpr Momentum3 operator*(double s, Momentum3 a) noexcept { return a *= s; }
    friend constexpr Momentum3 operator-(const Momentum3& a) noexcept { return {-a.kx, -a.ky, -a.kz}; }
    friend constexpr bool operator==(const Momentum3&, const Momentum3&) = default;

    bool finite() const noexcept { return std::isfinite(kx) && std::isfinite(ky) && std::isfinite(kz); }
};

constexpr double dot(const Momentum3& a, const Momentum3& b) noexcept {
    return a.kx * b.kx + a.ky * b.ky + a.kz * b.kz;
}

constexpr double norm2(const Momentum3& a) noexcept { return dot(a, a); }

inline double norm(const Momentum3& a) noexcept { return std::sqrt(norm2(a)); }

} // namespace boseglow
