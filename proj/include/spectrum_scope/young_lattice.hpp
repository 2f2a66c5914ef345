/**
 * @file young_lattice.hpp
 * @brief Young frames with d rows and N boxes, spectra, and the dimension
 *        formulas of the symmetric and unitary group irreps they label.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectrum_scope/errors.hpp"

namespace spectrum_scope {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Tolerance on the unit sum of a spectrum.
inline constexpr double spectrum_sum_tolerance = 1e-12;

/**
 * Row lengths Y_1 >= ... >= Y_d >= 0 of a Young frame. Trailing zero rows are
 * stored explicitly, so depth() is the dimension d of the one-site space.
 */
class YoungFrame {
public:
    YoungFrame() = default;

    explicit YoungFrame(std::vector<int> rows) : rows_(std::move(rows)) {
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (rows_[j] < 0) throw domain_error("YoungFrame: negative row length");
            if (j > 0 && rows_[j] > rows_[j - 1])
                throw domain_error("YoungFrame: rows must be non-increasing");
        }
        boxes_ = std::accumulate(rows_.begin(), rows_.end(), 0);
    }

    int depth() const noexcept { return static_cast<int>(rows_.size()); }
    int boxes() const noexcept { return boxes_; }
    std::span<const int> rows() const noexcept { return rows_; }
    int operator[](std::size_t j) const { return rows_[j]; }

    int nonzero_rows() const noexcept {
        return static_cast<int>(std::count_if(rows_.begin(), rows_.end(), [](int r) { return r > 0; }));
    }

    /// Same frame padded (or trimmed of zero rows) to exactly d rows.
    YoungFrame with_depth(int d) const {
        if (nonzero_rows() > d) throw domain_error("YoungFrame: more non-zero rows than d");
        std::vector<int> rows(static_cast<std::size_t>(d), 0);
        std::copy_n(rows_.begin(), std::min<std::size_t>(rows_.size(), rows.size()), rows.begin());
        return YoungFrame{std::move(rows)};
    }

    std::string to_string() const {
        std::string out = "(";
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (j) out += ',';
            out += std::to_string(rows_[j]);
        }
        return out + ")";
    }

    friend bool operator==(const YoungFrame& a, const YoungFrame& b) { return a.rows_ == b.rows_; }
    friend auto operator<=>(const YoungFrame& a, const YoungFrame& b) { return a.rows_ <=> b.rows_; }

private:
    std::vector<int> rows_;
    int boxes_ = 0;
};

/**
 * Eigenvalue list in non-increasing order summing to one: a point of the
 * closed ordered simplex. Ties are allowed.
 */
class Spectrum {
public:
    Spectrum() = default;

    explicit Spectrum(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw domain_error("Spectrum: empty");
        double sum = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j) {
            double v = values_[j];
            if (!std::isfinite(v) || v < 0.0) throw domain_error("Spectrum: entries must be finite and >= 0");
            if (j > 0 && v > values_[j - 1]) throw domain_error("Spectrum: entries must be non-increasing");
            sum += v;
        }
        if (std::abs(sum - 1.0) > spectrum_sum_tolerance) throw domain_error("Spectrum: entries must sum to 1");
    }

    /// Sorts into descending order first (the unitary-invariance canonicalization).
    static Spectrum canonical(std::vector<double> values) {
        std::sort(values.begin(), values.end(), std::greater<>{});
        return Spectrum{std::move(values)};
    }

    static Spectrum uniform(int d) {
        if (d < 1) throw domain_error("Spectrum: d must be >= 1");
        return Spectrum{std::vector<double>(static_cast<std::size_t>(d), 1.0 / d)};
    }

    int size() const noexcept { return static_cast<int>(values_.size()); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }

    int support_size() const noexcept {
        return static_cast<int>(std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
    }

    friend bool operator==(const Spectrum&, const Spectrum&) = default;

private:
    std::vector<double> values_;
};

namespace detail {

inline void enumerate_frames_into(std::vector<int>& prefix, int rows_left, int remaining, int cap,
                                  std::vector<YoungFrame>& out) {
    if (rows_left == 0) {
        if (remaining == 0) out.emplace_back(prefix);
        return;
    }
    // The current row must hold at least ceil(remaining / rows_left) boxes.
    int lo = (remaining + rows_left - 1) / rows_left;
    for (int first = std::min(cap, remaining); first >= lo; --first) {
        prefix.push_back(first);
        enumerate_frames_into(prefix, rows_left - 1, remaining - first, first, out);
        prefix.pop_back();
    }
}

}  // namespace detail

/**
 * Every partition of N into at most d parts, each padded to d rows, in
 * lexicographically decreasing order. This is the canonical frame order used
 * by every table and output file.
 */
inline std::vector<YoungFrame> enumerate_frames(int d, int N) {
    if (d < 0 || N < 0) throw domain_error("enumerate_frames: d and N must be >= 0");
    if (d == 0 && N > 0) throw domain_error("enumerate_frames: d = 0 admits no frame with N > 0");
    std::vector<YoungFrame> out;
    std::vector<int> prefix;
    prefix.reserve(static_cast<std::size_t>(d));
    if (d == 0) {
        out.emplace_back(std::vector<int>{});
        return out;
    }
    detail::enumerate_frames_into(prefix, d, N, N, out);
    return out;
}

/// Number of partitions of N into at most d parts, as a 64-bit count.
inline std::uint64_t frame_count(int d, int N) {
    if (d < 0 || N < 0) throw domain_error("frame_count: d and N must be >= 0");
    // p[k][n]: partitions of n into parts of size <= k (conjugate to <= k parts).
    std::vector<std::uint64_t> p(static_cast<std::size_t>(N) + 1, 0);
    p[0] = 1;
    for (int k = 1; k <= d; ++k)
        for (int n = k; n <= N; ++n) p[static_cast<std::size_t>(n)] += p[static_cast<std::size_t>(n - k)];
    return p[static_cast<std::size_t>(N)];
}

namespace detail {

/// Hook lengths of every box, row by row.
inline std::vector<int> hook_lengths(const YoungFrame& y) {
    std::vector<int> hooks;
    hooks.reserve(static_cast<std::size_t>(y.boxes()));
    auto rows = y.rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < rows[i]; ++j) {
            int below = 0;
            for (std::size_t k = i + 1; k < rows.size() && rows[k] > j; ++k) ++below;
            hooks.push_back(rows[i] - j + below);
        }
    }
    return hooks;
}

}  // namespace detail

/// Number of standard tableaux of shape Y, i.e. dim S_Y, by the hook-length formula.
inline BigInt dim_symmetric_irrep(const YoungFrame& y) {
    BigInt numerator = 1;
    for (int k = 2; k <= y.boxes(); ++k) numerator *= k;
    BigInt denominator = 1;
    for (int h : detail::hook_lengths(y)) denominator *= h;
    return numerator / denominator;
}

/// ln dim S_Y in floating point; valid for any N.
/// ln dim S_Y. Hooks cancel against the factors of N! first, so hooks that
/// reproduce 1..N (a single row or column) give exactly 0.
inline double log_dim_symmetric_irrep(const YoungFrame& y) {
    std::vector<int> power(static_cast<std::size_t>(y.boxes()) + 1, 1);
    for (int h : detail::hook_lengths(y)) --power[static_cast<std::size_t>(h)];
    double out = 0.0;
    for (std::size_t k = 2; k < power.size(); ++k)
        if (power[k] != 0) out += power[k] * std::log(static_cast<double>(k));
    return out;
}

/// dim R_Y of the GL(d) irrep with highest weight Y (Weyl dimension formula).
inline BigInt dim_unitary_irrep(const YoungFrame& y, int d) {
    YoungFrame padded = y.with_depth(d);
    BigInt numerator = 1;
    BigInt denominator = 1;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            numerator *= padded[static_cast<std::size_t>(i)] - padded[static_cast<std::size_t>(j)] + j - i;
            denominator *= j - i;
        }
    }
    return numerator / denominator;
}

inline double log_dim_unitary_irrep(const YoungFrame& y, int d) {
    YoungFrame padded = y.with_depth(d);
    double out = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            out += std::log(static_cast<double>(padded[static_cast<std::size_t>(i)] -
                                                padded[static_cast<std::size_t>(j)] + j - i)) -
                   std::log(static_cast<double>(j - i));
    return out;
}

/// (N+1)^(d(d-1)/2): a uniform polynomial upper bound on dim R_Y over frames with N boxes.
inline BigInt dim_poly_bound(int d, int N) {
    if (d < 1 || N < 0) throw domain_error("dim_poly_bound: need d >= 1 and N >= 0");
    return boost::multiprecision::pow(BigInt(N + 1), static_cast<unsigned>(d * (d - 1) / 2));
}

inline double log_dim_poly_bound(int d, int N) {
    if (d < 1 || N < 0) throw domain_error("log_dim_poly_bound: need d >= 1 and N >= 0");
    return 0.5 * d * (d - 1) * std::log(static_cast<double>(N) + 1.0);
}

/// The normalized frame Y/N as an exact rational vector.
inline std::vector<Rational> frame_estimate_exact(const YoungFrame& y) {
    if (y.boxes() == 0) throw domain_error("frame_to_estimate: N = 0 has no estimate");
    std::vector<Rational> out;
    out.reserve(y.rows().size());
    for (int r : y.rows()) out.emplace_back(r, y.boxes());
    return out;
}

/// The spectrum estimate Y/N attached to the frame outcome Y.
inline Spectrum frame_to_estimate(const YoungFrame& y) {
    if (y.boxes() == 0) throw domain_error("frame_to_estimate: N = 0 has no estimate");
    std::vector<double> s;
    s.reserve(y.rows().size());
    for (int r : y.rows()) s.push_back(static_cast<double>(r) / y.boxes());
    return Spectrum{std::move(s)};
}

}  // namespace spectrum_scope
