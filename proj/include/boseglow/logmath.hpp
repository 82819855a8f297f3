#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace boseglow {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
        return *this;
    }
    CompensatedSum& operator+=(const CompensatedSum& o) noexcept {
        *this += o.sum_;
        *this += o.comp_;
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// log(exp(a) + exp(b)) for positive terms held as logs.
inline double logAddExp(double a, double b) noexcept {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// Streaming log-sum-exp; rescales when a larger term arrives.
class LogSumExp {
public:
    void add(double logTerm) noexcept {
        if (logTerm == kNegInf) return;
        if (logTerm <= max_) {
            scaled_ += std::exp(logTerm - max_);
        } else {
            scaled_ = scaled_ * std::exp(max_ - logTerm) + 1.0;
            max_ = logTerm;
        }
    }
    double value() const noexcept {
        return max_ == kNegInf ? kNegInf : max_ + std::log(scaled_);
    }

private:
    double max_ = kNegInf;
    double scaled_ = 0.0;
};

inline double logSumExp(std::span<const double> logs) noexcept {
    double hi = kNegInf;
    for (double v : logs) hi = std::max(hi, v);
    if (hi == kNegInf) return kNegInf;
    CompensatedSum s;
    for (double v : logs) s += std::exp(v - hi);
    return hi + std::log(s.value());
}

} // namespace boseglow
