#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "boseglow/error.hpp"

namespace boseglow {

/// ħc in MeV·fm. The only place lengths meet momenta.
inline constexpr double kHbarC = 197.327;

/**
 * Physical inputs of the static, non-relativistic source.
 *
 * Momenta, masses and temperatures are in MeV, lengths in fm. Every packet
 * shares the emission time t0, so the energy phases cancel in all overlaps;
 * t0 is carried for provenance and never enters a formula.
 */
struct ModelParams {
    double n0 = 1.0;     ///< mean of the seed Poisson multiplicity
    double R = 5.0;      ///< source radius [fm]
    double T = 100.0;    ///< source temperature [MeV]
    double m = 139.57;   ///< boson mass [MeV]
    double sigma = 150.0; ///< wave-packet momentum width [MeV]
    double t0 = 0.0;     ///< common emission time [fm/c]
};

/// Roots of y^2 - (1 + x) y + x^2/4 = 0, larger first.
struct Gammas {
    double plus = 1.0;
    double minus = 0.0;

    /// γ₋/γ₊, the ratio controlling every subleading term.
    double ratio() const noexcept { return minus / plus; }
};

inline Gammas gammasFromX(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw InvalidParameter("x", "must be finite and non-negative");
    }
    Gammas g;
    g.plus = 0.5 * (1.0 + x + std::sqrt(1.0 + 2.0 * x));
    // γ₊γ₋ = x²/4; avoids the cancellation in (1 + x - √(1+2x))/2 at small x.
    g.minus = 0.25 * x * x / g.plus;
    return g;
}

/// Derived quantities of the analytic solution.
struct DerivedParams {
    double sigmaT2 = 0.0; ///< σ² + 2mT [MeV²]
    double Re2 = 0.0;     ///< effective radius squared [fm²]
    double x = 0.0;       ///< R_e² σ_T² / (ħc)²
    double gammaPlus = 1.0;
    double gammaMinus = 0.0;
    double nc = 1.0;      ///< critical multiplicity γ₊^{3/2}
    std::optional<double> Te; ///< σ_T²/(2m) [MeV]; absent for natural-unit fixtures
    double hbarc = kHbarC;

    Gammas gammas() const noexcept { return {gammaPlus, gammaMinus}; }

    /// R_e² in MeV⁻², the unit used by every momentum-space formula.
    double re2Natural() const noexcept { return Re2 / (hbarc * hbarc); }

    /// Fixture constructor in units where ħc = 1.
    static DerivedParams natural(double x, double sigmaT2);
};

namespace detail {

inline DerivedParams complete(double sigmaT2, double Re2, double hbarc) {
    DerivedParams d;
    d.sigmaT2 = sigmaT2;
    d.Re2 = Re2;
    d.hbarc = hbarc;
    d.x = Re2 * sigmaT2 / (hbarc * hbarc);
    const Gammas g = gammasFromX(d.x);
    d.gammaPlus = g.plus;
    d.gammaMinus = g.minus;
    d.nc = std::pow(g.plus, 1.5);
    return d;
}

inline void requirePositive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(field, "must be finite and > 0");
    }
}

} // namespace detail

inline DerivedParams DerivedParams::natural(double x, double sigmaT2) {
    detail::requirePositive(x, "x");
    detail::requirePositive(sigmaT2, "sigmaT2");
    return detail::complete(sigmaT2, x / sigmaT2, 1.0);
}

inline void validate(const ModelParams& p) {
    if (!(p.n0 >= 0.0) || !std::isfinite(p.n0)) {
        throw InvalidParameter("n0", "must be finite and >= 0");
    }
    detail::requirePositive(p.R, "R");
    detail::requirePositive(p.T, "T");
    detail::requirePositive(p.m, "m");
    detail::requirePositive(p.sigma, "sigma");
    if (!std::isfinite(p.t0)) {
        throw InvalidParameter("t0", "must be finite");
    }
}

/**
 * Effective width, radius and the density parameter x of the wave-packet
 * source.
 *
 *   σ_T² = σ² + 2mT,   R_e² = R² + (ħc)² mT / (σ² σ_T²),   x = R_e² σ_T² / (ħc)²
 *
 * The effective temperature T_e = σ_T²/(2m) together with R → R_e maps the
 * wave-packet model onto the plane-wave ring-algebra model.
 */
inline DerivedParams derive(const ModelParams& p) {
    validate(p);
    const double sigma2 = p.sigma * p.sigma;
    const double sigmaT2 = sigma2 + 2.0 * p.m * p.T;
    const double Re2 = p.R * p.R + kHbarC * kHbarC * p.m * p.T / (sigma2 * sigmaT2);
    DerivedParams d = detail::complete(sigmaT2, Re2, kHbarC);
    d.Te = sigmaT2 / (2.0 * p.m);
    return d;
}

} // namespace boseglow
