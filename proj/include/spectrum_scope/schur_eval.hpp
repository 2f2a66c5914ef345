/**
 * @file schur_eval.hpp
 * @brief Characters of GL(d) irreps evaluated at a density operator
 *        (Schur polynomials), weight multiplicities, and a symmetric-group
 *        oracle for the frame probability at small N.
 *
 * The primary evaluator sums positive terms only. s_Y(x_1..x_k) is reached
 * from s_mu(x_1..x_{k-1}) by the branching rule over horizontal strips Y/mu,
 * and the strip sum is itself accumulated one box at a time:
 *
 *   V_j(Y) = V_{j+1}(Y) + x_k V_j(Y - e_j)      (when Y_j > Y_{j+1})
 *   V_{k+1}(Y) = s_Y(x_1..x_{k-1}),  s_Y(x_1..x_k) = V_1(Y)
 *
 * where V_j restricts the strip to rows j..k. Each level costs
 * O(k * #partitions) log-additions, so every frame of a given size comes out
 * of one table build.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "spectrum_scope/errors.hpp"
#include "spectrum_scope/log_value.hpp"
#include "spectrum_scope/young_lattice.hpp"

namespace spectrum_scope {

/// Oracle caps: exhaustive enumeration must finish in seconds.
inline constexpr int symmetric_group_oracle_max_n = 8;
inline constexpr int kostka_max_d = 4;
inline constexpr int kostka_max_n = 12;

/**
 * Diagonal density operator diag(exp(h_1), ..., exp(h_d)) given by its log
 * eigenvalues, h non-increasing. A zero eigenvalue is h_j = -inf.
 */
class DiagonalState {
public:
    DiagonalState() = default;

    explicit DiagonalState(std::vector<double> log_eigenvalues) : h_(std::move(log_eigenvalues)) {
        if (h_.empty()) throw domain_error("DiagonalState: empty");
        double sum = 0.0;
        for (std::size_t j = 0; j < h_.size(); ++j) {
            if (std::isnan(h_[j]) || h_[j] == pos_inf) throw domain_error("DiagonalState: invalid log eigenvalue");
            if (j > 0 && h_[j] > h_[j - 1]) throw domain_error("DiagonalState: h must be non-increasing");
            sum += std::exp(h_[j]);
        }
        if (std::abs(sum - 1.0) > spectrum_sum_tolerance) throw domain_error("DiagonalState: trace must be 1");
    }

    static DiagonalState from_spectrum(const Spectrum& r) {
        std::vector<double> h;
        h.reserve(static_cast<std::size_t>(r.size()));
        for (double v : r.values()) h.push_back(v > 0.0 ? std::log(v) : neg_inf);
        return DiagonalState{std::move(h)};
    }

    Spectrum to_spectrum() const {
        std::vector<double> r;
        r.reserve(h_.size());
        for (double v : h_) r.push_back(std::exp(v));
        return Spectrum{std::move(r)};
    }

    int size() const noexcept { return static_cast<int>(h_.size()); }
    std::span<const double> log_eigenvalues() const noexcept { return h_; }

private:
    std::vector<double> h_;
};

/// mu . h with the convention 0 * (-inf) = 0.
inline double weight_dot(std::span<const int> mu, std::span<const double> h) {
    double out = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) out += weighted_log(mu[j], h[j]);
    return out;
}

/**
 * Dense ranking of the partitions of n into at most `parts` parts.
 *
 * Rows 3..parts are laid out in a mixed-radix key; row 2 varies fastest
 * inside each key and row 1 is implied by the sum.
 */
class PartitionLayer {
public:
    PartitionLayer(int parts, int n) : parts_(parts), n_(n) {
        if (parts_ == 0) {
            size_ = (n_ == 0) ? 1 : 0;
            return;
        }
        if (parts_ <= 2) {
            size_ = static_cast<std::size_t>(parts_ == 1 ? 1 : n_ / 2 + 1);
            return;
        }
        std::size_t keys = 1;
        for (int i = 3; i <= parts_; ++i) {
            extents_.push_back(n_ / i + 1);
            keys *= static_cast<std::size_t>(n_ / i + 1);
        }
        offsets_.assign(keys, invalid_offset);
        std::vector<int> tail(extents_.size(), 0);
        std::size_t running = 0;
        for (std::size_t key = 0; key < keys; ++key) {
            decode(key, tail);
            int count = tail_count(tail);
            if (count > 0) {
                offsets_[key] = running;
                running += static_cast<std::size_t>(count);
            }
        }
        size_ = running;
    }

    int parts() const noexcept { return parts_; }
    int boxes() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }

    /// Rank of a partition given as `parts` rows summing to n.
    std::size_t index(std::span<const int> rows) const {
        if (parts_ <= 1) return 0;
        if (parts_ == 2) return static_cast<std::size_t>(rows[1]);
        std::size_t key = 0;
        for (int i = parts_; i >= 3; --i)
            key = key * static_cast<std::size_t>(extents_[static_cast<std::size_t>(i - 3)]) +
                  static_cast<std::size_t>(rows[static_cast<std::size_t>(i - 1)]);
        return offsets_[key] + static_cast<std::size_t>(rows[1] - rows[2]);
    }

    /// Visits every partition with its rank, in rank order.
    template <typename Visitor>
    void for_each(Visitor&& visit) const {
        std::vector<int> rows(static_cast<std::size_t>(parts_), 0);
        if (parts_ == 0) {
            if (n_ == 0) visit(std::span<const int>(rows), std::size_t{0});
            return;
        }
        if (parts_ == 1) {
            rows[0] = n_;
            visit(std::span<const int>(rows), std::size_t{0});
            return;
        }
        if (parts_ == 2) {
            for (int second = 0; 2 * second <= n_; ++second) {
                rows[0] = n_ - second;
                rows[1] = second;
                visit(std::span<const int>(rows), static_cast<std::size_t>(second));
            }
            return;
        }
        std::vector<int> tail(extents_.size(), 0);
        for (std::size_t key = 0; key < offsets_.size(); ++key) {
            if (offsets_[key] == invalid_offset) continue;
            decode(key, tail);
            int tail_sum = std::accumulate(tail.begin(), tail.end(), 0);
            std::copy(tail.begin(), tail.end(), rows.begin() + 2);
            for (int second = tail[0]; 2 * second <= n_ - tail_sum; ++second) {
                rows[1] = second;
                rows[0] = n_ - tail_sum - second;
                visit(std::span<const int>(rows), offsets_[key] + static_cast<std::size_t>(second - tail[0]));
            }
        }
    }

private:
    static constexpr std::size_t invalid_offset = static_cast<std::size_t>(-1);

    void decode(std::size_t key, std::vector<int>& tail) const {
        for (std::size_t i = 0; i < extents_.size(); ++i) {
            tail[i] = static_cast<int>(key % static_cast<std::size_t>(extents_[i]));
            key /= static_cast<std::size_t>(extents_[i]);
        }
    }

    // Number of admissible row-2 values for a tail (rows 3..parts).
    int tail_count(const std::vector<int>& tail) const {
        for (std::size_t i = 1; i < tail.size(); ++i)
            if (tail[i] > tail[i - 1]) return 0;
        int rest = n_ - std::accumulate(tail.begin(), tail.end(), 0);
        if (rest < 0) return 0;
        return std::max(0, rest / 2 - tail[0] + 1);
    }

    int parts_;
    int n_;
    std::size_t size_ = 0;
    std::vector<int> extents_;
    std::vector<std::size_t> offsets_;
};

namespace detail {

/// Log Schur values of all partitions with <= parts rows, sizes 0..N (or only N).
struct SchurLevel {
    int parts = 0;
    std::vector<PartitionLayer> layers;
    std::vector<std::vector<double>> log_values;
};

inline SchurLevel empty_schur_level(int N) {
    SchurLevel level;
    for (int n = 0; n <= N; ++n) {
        level.layers.emplace_back(0, n);
        level.log_values.emplace_back(level.layers.back().size(), 0.0);
    }
    return level;
}

// Adds one variable with log value log_x to a level holding all sizes 0..N.
inline SchurLevel next_schur_level(const SchurLevel& prev, double log_x, int N, bool keep_all_sizes) {
    const int k = prev.parts + 1;
    const auto ku = static_cast<std::size_t>(k);
    SchurLevel out;
    out.parts = k;

    std::vector<std::vector<double>> strip_prev(ku), strip_cur(ku);
    PartitionLayer layer_prev(k, 0);
    std::vector<int> shifted(ku);

    for (int n = 0; n <= N; ++n) {
        PartitionLayer layer(k, n);
        for (auto& v : strip_cur) v.assign(layer.size(), neg_inf);
        const auto& below_layer = prev.layers[static_cast<std::size_t>(n)];
        const auto& below_values = prev.log_values[static_cast<std::size_t>(n)];

        layer.for_each([&](std::span<const int> rows, std::size_t idx) {
            double v = (rows[ku - 1] == 0) ? below_values[below_layer.index(rows.first(ku - 1))] : neg_inf;
            for (std::size_t j = ku; j-- > 0;) {
                int next_row = (j + 1 < ku) ? rows[j + 1] : 0;
                if (rows[j] > next_row) {
                    std::copy(rows.begin(), rows.end(), shifted.begin());
                    --shifted[j];
                    v = log_add(v, log_x + strip_prev[j][layer_prev.index(shifted)]);
                }
                strip_cur[j][idx] = v;
            }
        });

        if (keep_all_sizes || n == N) {
            out.layers.push_back(layer);
            out.log_values.push_back(strip_cur[0]);
        }
        std::swap(strip_prev, strip_cur);
        layer_prev = std::move(layer);
    }
    return out;
}

}  // namespace detail

/**
 * ln s_Y(r) for every frame Y with d = r.size() rows and N boxes, built in one
 * pass of the branching recursion. Immutable after construction.
 */
class SchurTable {
public:
    SchurTable(const Spectrum& r, int N) : depth_(r.size()), boxes_(N), support_(r.support_size()) {
        if (N < 0) throw domain_error("SchurTable: N must be >= 0");
        // Zero eigenvalues sit at the end of a sorted spectrum; they contribute
        // only to frames with more non-zero rows than the support, which vanish.
        detail::SchurLevel level = detail::empty_schur_level(N);
        for (int k = 1; k <= support_; ++k)
            level = detail::next_schur_level(level, std::log(r[static_cast<std::size_t>(k - 1)]), N,
                                             k < support_);
        layer_ = std::move(level.layers.back());
        values_ = std::move(level.log_values.back());
    }

    int depth() const noexcept { return depth_; }
    int boxes() const noexcept { return boxes_; }

    /// ln s_Y(r); -inf when Y has more non-zero rows than r has non-zero entries.
    double log_value(const YoungFrame& y) const {
        if (y.depth() != depth_) throw domain_error("SchurTable: frame depth does not match spectrum dimension");
        if (y.boxes() != boxes_) throw domain_error("SchurTable: frame size does not match table");
        if (y.nonzero_rows() > support_) return neg_inf;
        return values_[layer_.index(y.rows().first(static_cast<std::size_t>(support_)))];
    }

private:
    int depth_;
    int boxes_;
    int support_;
    PartitionLayer layer_{0, 0};
    std::vector<double> values_;
};

/// ln of the character chi_Y(rho) = s_Y(r_1, ..., r_d).
inline LogValue schur_log(const YoungFrame& y, const Spectrum& r) {
    if (y.depth() != r.size()) throw domain_error("schur_log: frame depth does not match spectrum dimension");
    return LogValue{SchurTable(r, y.boxes()).log_value(y)};
}

/// Minimum pairwise gap the determinant-ratio evaluator accepts.
inline constexpr double bialternant_min_gap = 1e-9;

/**
 * ln s_Y(r) as det(r_i^(Y_j + d - j)) / det(r_i^(d - j)). Cross-check only:
 * the ratio cancels catastrophically as eigenvalues approach each other, so
 * near-degenerate or singular spectra are refused with domain_error.
 */
inline LogValue schur_log_bialternant(const YoungFrame& y, const Spectrum& r) {
    const int d = r.size();
    if (y.depth() != d) throw domain_error("schur_log_bialternant: frame depth does not match spectrum dimension");
    for (int i = 0; i < d; ++i) {
        if (r[static_cast<std::size_t>(i)] <= 0.0)
            throw domain_error("schur_log_bialternant: zero eigenvalue, use schur_log");
        if (i > 0 && r[static_cast<std::size_t>(i - 1)] - r[static_cast<std::size_t>(i)] <= bialternant_min_gap)
            throw domain_error("schur_log_bialternant: near-degenerate spectrum, use schur_log");
    }
    const auto du = static_cast<std::size_t>(d);
    std::vector<long double> log_r(du);
    for (std::size_t i = 0; i < du; ++i) log_r[i] = std::log(static_cast<long double>(r[i]));

    // Row i is scaled by r_i^(-Y_d) so the smallest exponent is zero.
    std::vector<int> exponent(du);
    for (std::size_t j = 0; j < du; ++j) exponent[j] = y[j] + d - 1 - static_cast<int>(j);
    std::vector<long double> a(du * du);
    long double log_scale = 0.0L;
    for (std::size_t i = 0; i < du; ++i) {
        log_scale += exponent[du - 1] * log_r[i];
        for (std::size_t j = 0; j < du; ++j) a[i * du + j] = std::exp((exponent[j] - exponent[du - 1]) * log_r[i]);
    }

    long double log_det = 0.0L;
    int sign = 1;
    for (std::size_t c = 0; c < du; ++c) {
        std::size_t pivot = c;
        for (std::size_t i = c + 1; i < du; ++i)
            if (std::abs(a[i * du + c]) > std::abs(a[pivot * du + c])) pivot = i;
        if (a[pivot * du + c] == 0.0L) return LogValue::zero();
        if (pivot != c) {
            for (std::size_t j = 0; j < du; ++j) std::swap(a[c * du + j], a[pivot * du + j]);
            sign = -sign;
        }
        long double p = a[c * du + c];
        if (p < 0) sign = -sign;
        log_det += std::log(std::abs(p));
        for (std::size_t i = c + 1; i < du; ++i) {
            long double f = a[i * du + c] / p;
            for (std::size_t j = c; j < du; ++j) a[i * du + j] -= f * a[c * du + j];
        }
    }
    if (sign < 0) throw domain_error("schur_log_bialternant: negative determinant (cancellation), use schur_log");

    long double log_vandermonde = 0.0L;
    for (std::size_t i = 0; i < du; ++i)
        for (std::size_t j = i + 1; j < du; ++j)
            log_vandermonde += std::log(static_cast<long double>(r[i]) - static_cast<long double>(r[j]));
    return LogValue{static_cast<double>(log_scale + log_det - log_vandermonde)};
}

/// Weight multiplicities m(mu) of the GL(d) irrep with highest weight Y.
struct WeightTable {
    YoungFrame frame;
    int dimension = 0;
    std::map<std::vector<int>, std::uint64_t> entries;
};

namespace detail {

// Gelfand-Tsetlin descent: each interlacing sub-frame removes a horizontal
// strip whose size is the content of the current letter.
inline void collect_weights(std::vector<int>& shape, int level, std::vector<int>& weight,
                            std::map<std::vector<int>, std::uint64_t>& out) {
    if (level == 0) {
        ++out[weight];
        return;
    }
    const auto lu = static_cast<std::size_t>(level);
    std::vector<int> sub(lu - 1);
    const int total = std::accumulate(shape.begin(), shape.begin() + level, 0);
    // Odometer over sub[i] in [shape[i+1], shape[i]].
    for (std::size_t i = 0; i + 1 < lu; ++i) sub[i] = shape[i + 1];
    while (true) {
        int sub_total = std::accumulate(sub.begin(), sub.end(), 0);
        weight[lu - 1] = total - sub_total;
        std::vector<int> next(shape.size(), 0);
        std::copy(sub.begin(), sub.end(), next.begin());
        collect_weights(next, level - 1, weight, out);
        std::size_t i = 0;
        for (; i + 1 < lu; ++i) {
            if (sub[i] < shape[i]) {
                ++sub[i];
                break;
            }
            sub[i] = shape[i + 1];
        }
        if (i + 1 >= lu) break;
    }
}

}  // namespace detail

/**
 * Kostka numbers K_{Y,mu}: semistandard tableaux of shape Y and content mu.
 * Exhaustive, so limited to d <= 4 and N <= 12.
 */
inline WeightTable weight_multiplicities(const YoungFrame& y, int d) {
    if (d > kostka_max_d || y.boxes() > kostka_max_n)
        throw resource_error("weight_multiplicities: enumeration limited to d <= 4 and N <= 12");
    WeightTable table;
    table.frame = y.with_depth(d);
    table.dimension = d;
    std::vector<int> shape(table.frame.rows().begin(), table.frame.rows().end());
    std::vector<int> weight(static_cast<std::size_t>(d), 0);
    detail::collect_weights(shape, d, weight, table.entries);
    return table;
}

/// chi_Y(rho_h) as the weight expansion sum_mu m(mu) exp(mu . h).
inline LogValue character_from_weights(const WeightTable& table, const DiagonalState& h) {
    if (h.size() != table.dimension) throw domain_error("character_from_weights: dimension mismatch");
    std::vector<double> terms;
    terms.reserve(table.entries.size());
    for (const auto& [mu, m] : table.entries)
        terms.push_back(std::log(static_cast<double>(m)) + weight_dot(mu, h.log_eigenvalues()));
    return LogValue{log_sum_exp(terms)};
}

struct CharacterBounds {
    LogValue lower;
    LogValue value;
    LogValue upper;
    bool holds = false;
};

/// Highest-weight sandwich exp(Y.h) <= chi_Y(rho_h) <= dim R_Y exp(Y.h).
inline CharacterBounds character_bounds_check(const YoungFrame& y, const DiagonalState& h) {
    constexpr double slack = 1e-10;
    const int d = h.size();
    YoungFrame frame = y.with_depth(d);
    CharacterBounds out;
    double top = weight_dot(frame.rows(), h.log_eigenvalues());
    out.lower = LogValue{top};
    out.upper = LogValue{top == neg_inf ? neg_inf : top + log_dim_unitary_irrep(frame, d)};
    out.value = schur_log(frame, h.to_spectrum());
    auto below = [](double a, double b) { return a == neg_inf || a <= b + slack * std::max(1.0, std::abs(b)); };
    out.holds = below(out.lower.log(), out.value.log()) && below(out.value.log(), out.upper.log());
    return out;
}

namespace detail {

inline std::vector<int> partition_from_beta(std::vector<int> beta) {
    std::sort(beta.begin(), beta.end(), std::greater<>{});
    std::vector<int> rows(beta.size());
    const int len = static_cast<int>(beta.size());
    for (int i = 0; i < len; ++i) rows[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i)] - (len - 1 - i);
    return rows;
}

// Murnaghan-Nakayama on beta-sets: removing a rim hook of length m moves one
// bead from b to b - m; the leg length is the number of beads jumped over.
inline long long murnaghan_nakayama(const std::vector<int>& beta, std::span<const int> cycles) {
    if (cycles.empty()) return 1;
    const int m = cycles.front();
    long long total = 0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        int target = beta[i] - m;
        if (target < 0 || std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
        int jumped = 0;
        for (int b : beta)
            if (b > target && b < beta[i]) ++jumped;
        std::vector<int> next = beta;
        next[i] = target;
        long long sub = murnaghan_nakayama(next, cycles.subspan(1));
        total += (jumped % 2 == 0) ? sub : -sub;
    }
    return total;
}

}  // namespace detail

/// Symmetric-group character chi^Y at the class with the given cycle type (N <= 8).
inline long long sn_character(const YoungFrame& y, std::vector<int> cycle_type) {
    if (y.boxes() > symmetric_group_oracle_max_n)
        throw resource_error("sn_character: oracle limited to N <= 8");
    std::erase(cycle_type, 0);
    if (std::any_of(cycle_type.begin(), cycle_type.end(), [](int c) { return c < 0; }) ||
        std::accumulate(cycle_type.begin(), cycle_type.end(), 0) != y.boxes())
        throw domain_error("sn_character: cycle type must be a partition of N");
    std::sort(cycle_type.begin(), cycle_type.end(), std::greater<>{});
    const int len = y.depth();
    std::vector<int> beta(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) beta[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + (len - 1 - i);
    return detail::murnaghan_nakayama(beta, cycle_type);
}

/**
 * tr(rho^{(x)N} P_Y) from the central projection P_Y = (f_Y / N!) sum_p chi^Y(p) S_p
 * and tr(rho^{(x)N} S_p) = prod over cycles of p_len(r). Grouping by cycle
 * type gives f_Y * sum_mu chi^Y(mu) p_mu(r) / z_mu. Independent of schur_log.
 */
inline double brute_force_frame_probability(const YoungFrame& y, const Spectrum& r) {
    const int N = y.boxes();
    if (N > symmetric_group_oracle_max_n)
        throw resource_error("brute_force_frame_probability: oracle limited to N <= 8");
    if (y.depth() != r.size()) throw domain_error("brute_force_frame_probability: dimension mismatch");

    std::vector<double> power_sum(static_cast<std::size_t>(N) + 1, 0.0);
    for (int k = 1; k <= N; ++k)
        for (double v : r.values()) power_sum[static_cast<std::size_t>(k)] += std::pow(v, k);

    double sum = 0.0;
    for (const YoungFrame& type : enumerate_frames(std::max(N, 1), N)) {
        std::vector<int> cycles(type.rows().begin(), type.rows().end());
        std::erase(cycles, 0);
        // z_mu = prod_k k^{m_k} m_k!
        double z = 1.0;
        std::map<int, int> mult;
        for (int c : cycles) ++mult[c];
        for (auto [len, count] : mult)
            for (int i = 1; i <= count; ++i) z *= static_cast<double>(len) * i;
        double trace = 1.0;
        for (int c : cycles) trace *= power_sum[static_cast<std::size_t>(c)];
        sum += static_cast<double>(sn_character(y, cycles)) * trace / z;
    }
    return static_cast<double>(dim_symmetric_irrep(y)) * sum;
}

}  // namespace spectrum_scope
