#pragma once

#include <array>
#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <fmt/core.h>

#include "boseglow/error.hpp"

namespace boseglow::oracle {

/// Largest matrix the permanent routines accept.
inline constexpr std::size_t kMaxPermanentSize = 10;

/// Dense row-major square matrix.
template <class T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    std::span<const T> data() const noexcept { return data_; }

    /// Copy with row `row` and column `col` removed.
    SquareMatrix minor(std::size_t row, std::size_t col) const {
        SquareMatrix m(n_ - 1);
        for (std::size_t i = 0, mi = 0; i < n_; ++i) {
            if (i == row) continue;
            for (std::size_t j = 0, mj = 0; j < n_; ++j) {
                if (j == col) continue;
                m(mi, mj++) = (*this)(i, j);
            }
            ++mi;
        }
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

/**
 * Ryser's formula with Gray-code column subsets,
 *
 *   per(A) = (-1)ⁿ Σ_{S ⊆ cols} (-1)^{|S|} Π_i Σ_{j∈S} a_ij,
 *
 * over a row-major n×n block. O(2ⁿ n) time, no allocation.
 */
template <class T>
T ryserPermanent(std::span<const T> a, std::size_t n) {
    if (n == 0) return T{1};
    if (n > kMaxPermanentSize) {
        throw SizeLimit(fmt::format("permanent of a {}x{} matrix exceeds the size cap {}", n, n, kMaxPermanentSize));
    }
    std::array<T, kMaxPermanentSize> rowSums{};
    T total{};
    std::uint32_t gray = 0;
    const std::uint32_t subsets = std::uint32_t{1} << n;
    for (std::uint32_t k = 1; k < subsets; ++k) {
        const std::uint32_t next = k ^ (k >> 1);
        const std::uint32_t flipped = next ^ gray;
        const auto col = static_cast<std::size_t>(std::countr_zero(flipped));
        const bool added = (next & flipped) != 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (added) {
                rowSums[i] += a[i * n + col];
            } else {
                rowSums[i] -= a[i * n + col];
            }
        }
        gray = next;
        T prod = rowSums[0];
        for (std::size_t i = 1; i < n; ++i) prod *= rowSums[i];
        // sign (-1)^{n - |S|}
        if (((n - static_cast<std::size_t>(std::popcount(gray))) & 1U) != 0) {
            total -= prod;
        } else {
            total += prod;
        }
    }
    return total;
}

template <class T>
T permanent(const SquareMatrix<T>& m) {
    return ryserPermanent<T>(m.data(), m.size());
}

} // namespace boseglow::oracle
