#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include <gsl/gsl_integration.h>

#include "boseglow/error.hpp"
#include "boseglow/logmath.hpp"
#include "boseglow/momentum.hpp"

namespace boseglow {

/// Default Gauss-Hermite order per Cartesian axis.
inline constexpr std::size_t kDefaultQuadratureOrder = 64;

/**
 * Gauss-Hermite rule rescaled for plain integrals over the real line,
 *
 *   ∫ f(k) dk ≈ Σ_i w_i f(k_i),   k_i = scale·t_i,   w_i = scale·ω_i·exp(t_i²),
 *
 * exact when f(k)·exp(k²/scale²) is a polynomial of degree < 2·order.
 */
class GaussHermite {
public:
    GaussHermite(std::size_t order, double scale) {
        if (order < 1) throw InvalidParameter("quadrature_order", "must be >= 1");
        if (!(scale > 0.0)) throw InvalidParameter("scale", "must be > 0");
        using Workspace = std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)>;
        Workspace ws(gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, order, 0.0, 1.0, 0.0, 0.0),
                     &gsl_integration_fixed_free);
        if (!ws) throw NumericalBreakdown("GSL could not build the Gauss-Hermite rule");
        const double* t = gsl_integration_fixed_nodes(ws.get());
        const double* w = gsl_integration_fixed_weights(ws.get());
        nodes_.resize(order);
        weights_.resize(order);
        for (std::size_t i = 0; i < order; ++i) {
            nodes_[i] = scale * t[i];
            weights_[i] = scale * std::exp(std::log(w[i]) + t[i] * t[i]);
        }
    }

    std::size_t order() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    template <class F>
    double integrate(F&& f) const {
        CompensatedSum s;
        for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
        return s.value();
    }

    /// ∫ d³k f(k) on the tensor-product grid.
    template <class F>
    double integrate3(F&& f) const {
        CompensatedSum s;
        const std::size_t m = nodes_.size();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double wij = weights_[i] * weights_[j];
                for (std::size_t l = 0; l < m; ++l) {
                    s += wij * weights_[l] * f(Momentum3{nodes_[i], nodes_[j], nodes_[l]});
                }
            }
        }
        return s.value();
    }

    /// ∫ dk₁ dk₂ f(k₁, k₂) over one Cartesian component of each momentum.
    template <class F>
    double integrate2(F&& f) const {
        CompensatedSum s;
        const std::size_t m = nodes_.size();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) s += weights_[i] * weights_[j] * f(nodes_[i], nodes_[j]);
        }
        return s.value();
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

} // namespace boseglow
