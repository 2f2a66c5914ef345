/**
 * @file log_value.hpp
 * @brief Log-space accumulation of non-negative quantities.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace spectrum_scope {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)), exact when either side is log(0).
inline double log_add(double a, double b) noexcept {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

/// Two-pass log-sum-exp in index order; empty input gives log(0).
inline double log_sum_exp(std::span<const double> terms) noexcept {
    double top = neg_inf;
    for (double t : terms) top = std::max(top, t);
    if (top == neg_inf) return neg_inf;
    if (top == pos_inf) return pos_inf;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - top);
    return top + std::log(sum);
}

/// Product a*b of a count with a log, using 0 * log(0) = 0.
inline double weighted_log(double count, double log_value) noexcept {
    return count == 0.0 ? 0.0 : count * log_value;
}

/**
 * Natural logarithm of a positive quantity, with log(0) = -inf as the zero
 * sentinel. Addition of LogValues adds the underlying quantities.
 */
class LogValue {
public:
    constexpr LogValue() = default;
    constexpr explicit LogValue(double log_magnitude) : log_(log_magnitude) {}

    static constexpr LogValue zero() { return LogValue{}; }
    static constexpr LogValue one() { return LogValue{0.0}; }
    static LogValue from_linear(double x) { return LogValue{x > 0.0 ? std::log(x) : neg_inf}; }

    constexpr double log() const noexcept { return log_; }
    double value() const noexcept { return std::exp(log_); }
    constexpr bool is_zero() const noexcept { return log_ == neg_inf; }

    LogValue& operator+=(LogValue other) noexcept {
        log_ = log_add(log_, other.log_);
        return *this;
    }
    LogValue& operator*=(LogValue other) noexcept {
        log_ = (is_zero() || other.is_zero()) ? neg_inf : log_ + other.log_;
        return *this;
    }
    friend LogValue operator+(LogValue a, LogValue b) noexcept { return a += b; }
    friend LogValue operator*(LogValue a, LogValue b) noexcept { return a *= b; }

    friend constexpr auto operator<=>(LogValue, LogValue) = default;

private:
    double log_ = neg_inf;
};

}  // namespace spectrum_scope
