/**
 * @file sw_measure.hpp
 * @brief Exact Young-frame outcome distribution K_N for rho^{(x)N} and the
 *        probability it assigns to regions of the ordered simplex.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spectrum_scope/errors.hpp"
#include "spectrum_scope/log_value.hpp"
#include "spectrum_scope/schur_eval.hpp"
#include "spectrum_scope/young_lattice.hpp"

namespace spectrum_scope {

inline constexpr int exact_max_d = 4;
inline constexpr int exact_max_n = 400;

/// Parses a decimal literal ("0.1", "-2.5e-3") into the exact rational it denotes.
inline Rational parse_decimal(std::string_view text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
    BigInt digits = 0;
    int scale = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            any_digit = true;
            if (seen_point) --scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw domain_error("parse_decimal: no digits in '" + std::string(text) + "'");
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        int exponent = 0;
        std::size_t start = pos + 1;
        if (start < text.size() && text[start] == '+') ++start;
        auto [end, ec] = std::from_chars(text.data() + start, text.data() + text.size(), exponent);
        if (ec != std::errc{} || end != text.data() + text.size())
            throw domain_error("parse_decimal: bad exponent in '" + std::string(text) + "'");
        scale += exponent;
        pos = text.size();
    }
    if (pos != text.size()) throw domain_error("parse_decimal: trailing characters in '" + std::string(text) + "'");
    Rational out = digits;
    if (scale > 0) out *= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale));
    if (scale < 0) out /= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-scale));
    return negative ? Rational(-out) : out;
}

/// The decimal a double was written from: its shortest round-trip representation, taken exactly.
inline Rational exact_decimal(double x) {
    if (!std::isfinite(x)) throw domain_error("exact_decimal: non-finite value");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return parse_decimal(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

/**
 * A subset Delta of the closed ordered simplex. Regions built from rational
 * data (ball complements, half-spaces) decide frame membership exactly, so an
 * estimate Y/N sitting on the boundary is never misclassified.
 */
class Region {
public:
    enum class Kind { ball_complement, half_space, frame_list, predicate };
    using Predicate = std::function<bool(std::span<const double>)>;

    /// { s : max_j |s_j - center_j| > radius }, the complement of a closed sup-norm ball.
    static Region ball_complement(const Spectrum& center, double radius) {
        if (!(radius >= 0.0)) throw domain_error("Region: radius must be >= 0");
        Region out(Kind::ball_complement);
        out.coefficients_.assign(center.values().begin(), center.values().end());
        out.threshold_ = radius;
        std::vector<Rational> exact;
        for (double c : center.values()) exact.push_back(exact_decimal(c));
        out.set_exact(exact, exact_decimal(radius));
        return out;
    }

    /// { s : normal . s >= offset }.
    static Region half_space(std::vector<double> normal, double offset) {
        Region out(Kind::half_space);
        std::vector<Rational> exact;
        for (double c : normal) exact.push_back(exact_decimal(c));
        out.coefficients_ = std::move(normal);
        out.threshold_ = offset;
        out.set_exact(exact, exact_decimal(offset));
        return out;
    }

    /// The whole simplex in dimension d.
    static Region whole(int d) { return half_space(std::vector<double>(static_cast<std::size_t>(d), 0.0), 0.0); }

    /// The estimates of an explicit list of frames.
    static Region frames(std::vector<YoungFrame> list) {
        Region out(Kind::frame_list);
        std::sort(list.begin(), list.end());
        out.frames_ = std::move(list);
        return out;
    }

    static Region predicate(Predicate test) {
        Region out(Kind::predicate);
        out.predicate_ = std::move(test);
        return out;
    }

    Kind kind() const noexcept { return kind_; }

    /// Whether the interior is dense in the closure; only guaranteed for the analytic kinds.
    bool has_small_boundary() const noexcept { return kind_ == Kind::ball_complement || kind_ == Kind::half_space; }

    std::span<const double> center() const noexcept { return coefficients_; }
    std::span<const double> normal() const noexcept { return coefficients_; }
    double radius() const noexcept { return threshold_; }
    double offset() const noexcept { return threshold_; }

    /// Floating-point membership of an arbitrary point of the simplex.
    bool contains(std::span<const double> s) const {
        switch (kind_) {
            case Kind::ball_complement: {
                check_size(s.size());
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (std::abs(s[j] - coefficients_[j]) > threshold_) return true;
                return false;
            }
            case Kind::half_space: {
                check_size(s.size());
                double dot = 0.0;
                for (std::size_t j = 0; j < s.size(); ++j) dot += coefficients_[j] * s[j];
                return dot >= threshold_;
            }
            case Kind::frame_list:
                return std::any_of(frames_.begin(), frames_.end(), [&](const YoungFrame& y) {
                    if (y.rows().size() != s.size() || y.boxes() == 0) return false;
                    for (std::size_t j = 0; j < s.size(); ++j)
                        if (static_cast<double>(y[j]) / y.boxes() != s[j]) return false;
                    return true;
                });
            case Kind::predicate:
                return predicate_(s);
        }
        return false;
    }

    bool contains(const Spectrum& s) const { return contains(s.values()); }

    /// Membership of the estimate Y/N, exact for the rational kinds.
    bool contains_frame(const YoungFrame& y) const {
        switch (kind_) {
            case Kind::ball_complement: {
                check_size(y.rows().size());
                // |Y_j D - N a_j| > N e   with   center = a / D, radius = e / D.
                for (std::size_t j = 0; j < y.rows().size(); ++j) {
                    BigInt diff = BigInt(y[j]) * exact_denominator_ - BigInt(y.boxes()) * exact_numerators_[j];
                    if (abs(diff) > BigInt(y.boxes()) * exact_threshold_) return true;
                }
                return false;
            }
            case Kind::half_space: {
                check_size(y.rows().size());
                BigInt dot = 0;
                for (std::size_t j = 0; j < y.rows().size(); ++j) dot += exact_numerators_[j] * y[j];
                return dot >= exact_threshold_ * y.boxes();
            }
            case Kind::frame_list:
                return std::binary_search(frames_.begin(), frames_.end(), y);
            case Kind::predicate:
                return predicate_(frame_to_estimate(y).values());
        }
        return false;
    }

private:
    explicit Region(Kind kind) : kind_(kind) {}

    void check_size(std::size_t n) const {
        if (n != coefficients_.size()) throw domain_error("Region: point dimension does not match region");
    }

    void set_exact(const std::vector<Rational>& coefficients, const Rational& threshold) {
        BigInt denominator = boost::multiprecision::denominator(threshold);
        for (const auto& c : coefficients) denominator = boost::multiprecision::lcm(denominator, boost::multiprecision::denominator(c));
        exact_denominator_ = denominator;
        exact_numerators_.clear();
        for (const auto& c : coefficients)
            exact_numerators_.push_back(boost::multiprecision::numerator(c) * (denominator / boost::multiprecision::denominator(c)));
        exact_threshold_ = boost::multiprecision::numerator(threshold) * (denominator / boost::multiprecision::denominator(threshold));
    }

    Kind kind_;
    std::vector<double> coefficients_;
    double threshold_ = 0.0;
    BigInt exact_denominator_ = 1;
    std::vector<BigInt> exact_numerators_;
    BigInt exact_threshold_ = 0;
    std::vector<YoungFrame> frames_;
    Predicate predicate_;
};

/**
 * K_N over frames: log-probability ln s_Y(r) + ln dim S_Y for every frame with
 * d rows and N boxes, in canonical (lexicographically decreasing) order.
 */
class SchurWeylDistribution {
public:
    SchurWeylDistribution(int d, int N, Spectrum r, std::vector<YoungFrame> frames, std::vector<double> log_p)
        : d_(d), n_(N), r_(std::move(r)), frames_(std::move(frames)), log_p_(std::move(log_p)) {}

    int dimension() const noexcept { return d_; }
    int copies() const noexcept { return n_; }
    const Spectrum& spectrum() const noexcept { return r_; }
    std::size_t size() const noexcept { return frames_.size(); }
    std::span<const YoungFrame> frames() const noexcept { return frames_; }
    std::span<const double> log_probabilities() const noexcept { return log_p_; }

    double log_probability(const YoungFrame& y) const {
        auto it = std::lower_bound(frames_.begin(), frames_.end(), y, std::greater<>{});
        if (it == frames_.end() || *it != y) throw domain_error("SchurWeylDistribution: frame " + y.to_string() + " not in support");
        return log_p_[static_cast<std::size_t>(it - frames_.begin())];
    }

    double probability(const YoungFrame& y) const { return std::exp(log_probability(y)); }

    /// ln of the total mass; zero up to rounding.
    double log_total() const { return log_sum_exp(log_p_); }

private:
    int d_;
    int n_;
    Spectrum r_;
    std::vector<YoungFrame> frames_;
    std::vector<double> log_p_;
};

/// Exact outcome distribution tr(rho^{(x)N} P_Y) = s_Y(r) dim S_Y, for d <= 4 and N <= 400.
inline SchurWeylDistribution exact_distribution(int d, int N, const Spectrum& r) {
    if (d != r.size()) throw domain_error("exact_distribution: spectrum has " + std::to_string(r.size()) + " entries, expected d = " + std::to_string(d));
    if (N < 1) throw domain_error("exact_distribution: N must be >= 1");
    if (d > exact_max_d || N > exact_max_n)
        throw resource_error("exact_distribution: limited to d <= 4 and N <= 400 (at most " +
                             std::to_string(frame_count(exact_max_d, exact_max_n)) + " frames); requested d = " +
                             std::to_string(d) + ", N = " + std::to_string(N));
    SchurTable table(r, N);
    std::vector<YoungFrame> frames = enumerate_frames(d, N);
    std::vector<double> log_p;
    log_p.reserve(frames.size());
    for (const auto& y : frames) {
        double s = table.log_value(y);
        log_p.push_back(s == neg_inf ? neg_inf : s + log_dim_symmetric_irrep(y));
    }
    return SchurWeylDistribution(d, N, r, std::move(frames), std::move(log_p));
}

/// ln K_N(Delta), summed in canonical frame order.
inline double region_log_probability(const SchurWeylDistribution& dist, const Region& region) {
    std::vector<double> terms;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (region.contains_frame(dist.frames()[i])) terms.push_back(dist.log_probabilities()[i]);
    return log_sum_exp(terms);
}

/// K_N(Delta): total probability of the frames whose estimate Y/N lies in Delta.
inline double region_probability(const SchurWeylDistribution& dist, const Region& region) {
    return std::exp(region_log_probability(dist, region));
}

inline constexpr double mode_tie_tolerance = 1e-12;

/// Most probable frame. Log-probabilities within 1e-12 of each other count as
/// tied, and a tie goes to the frame that comes first in canonical order.
inline YoungFrame distribution_mode(const SchurWeylDistribution& dist) {
    if (dist.size() == 0) throw domain_error("distribution_mode: empty distribution");
    auto lp = dist.log_probabilities();
    std::size_t best = 0;
    for (std::size_t i = 1; i < lp.size(); ++i)
        if (lp[i] > lp[best] + mode_tie_tolerance) best = i;
    return dist.frames()[best];
}

/// sum_Y f(Y/N) K_N({Y}) for f evaluated on the estimate spectrum.
template <typename Function>
double expectation_of(const SchurWeylDistribution& dist, Function&& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        double lp = dist.log_probabilities()[i];
        if (lp == neg_inf) continue;
        sum += f(frame_to_estimate(dist.frames()[i])) * std::exp(lp);
    }
    return sum;
}

}  // namespace spectrum_scope
