/**
 * @file rsk_sampler.hpp
 * @brief Exact sampling of frame outcomes for large N: the RSK insertion
 *        shape of an i.i.d. word with letter law r is distributed as K_N.
 *
 * Letters are 0-based here: letter j has probability r[j].
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "spectrum_scope/errors.hpp"
#include "spectrum_scope/sw_measure.hpp"
#include "spectrum_scope/young_lattice.hpp"

namespace spectrum_scope {

/**
 * Semistandard tableau over the alphabet {0..d-1}, stored as letter counts per
 * row: each row of a semistandard tableau is a run of repeated letters, so
 * counts(i, j) (j >= i) determines the tableau and insertion costs O(d^2)
 * independently of the number of boxes.
 */
class CompactTableau {
public:
    explicit CompactTableau(int d) : d_(d), counts_(static_cast<std::size_t>(d * d), 0), lengths_(static_cast<std::size_t>(d), 0) {
        if (d < 1) throw domain_error("CompactTableau: d must be >= 1");
    }

    int depth() const noexcept { return d_; }
    std::int64_t count(int row, int letter) const { return counts_[at(row, letter)]; }
    std::int64_t row_length(int row) const { return lengths_[static_cast<std::size_t>(row)]; }

    std::int64_t boxes() const noexcept {
        std::int64_t n = 0;
        for (auto l : lengths_) n += l;
        return n;
    }

    YoungFrame shape() const {
        std::vector<int> rows(lengths_.begin(), lengths_.end());
        return YoungFrame{std::move(rows)};
    }

    /// RSK row insertion: the letter displaces the leftmost strictly larger entry, which moves down a row.
    void insert(int letter) {
        if (letter < 0 || letter >= d_) throw domain_error("CompactTableau: letter out of range");
        int x = letter;
        for (int row = 0; row < d_; ++row) {
            int bumped = -1;
            for (int y = x + 1; y < d_; ++y) {
                if (counts_[at(row, y)] > 0) {
                    bumped = y;
                    break;
                }
            }
            ++counts_[at(row, x)];
            if (bumped < 0) {
                ++lengths_[static_cast<std::size_t>(row)];
                return;
            }
            --counts_[at(row, bumped)];
            x = bumped;
        }
        // Unreachable: letter d-1 never bumps, and row r only holds letters >= r.
        throw domain_error("CompactTableau: insertion fell off the last row");
    }

    /**
     * Column strictness in count form: for consecutive rows i, i+1 and every
     * letter l, #(row i+1 entries <= l) <= #(row i entries < l).
     */
    bool is_semistandard() const {
        for (int i = 0; i + 1 < d_; ++i) {
            std::int64_t upper_below = 0;
            std::int64_t lower_upto = 0;
            for (int l = 0; l < d_; ++l) {
                lower_upto += counts_[at(i + 1, l)];
                if (lower_upto > upper_below) return false;
                upper_below += counts_[at(i, l)];
            }
            if (lengths_[static_cast<std::size_t>(i + 1)] > lengths_[static_cast<std::size_t>(i)]) return false;
        }
        for (int i = 0; i < d_; ++i) {
            std::int64_t len = 0;
            for (int l = 0; l < d_; ++l) len += counts_[at(i, l)];
            if (len != lengths_[static_cast<std::size_t>(i)]) return false;
        }
        return true;
    }

private:
    std::size_t at(int row, int letter) const { return static_cast<std::size_t>(row * d_ + letter); }

    int d_;
    std::vector<std::int64_t> counts_;
    std::vector<std::int64_t> lengths_;
};

inline CompactTableau insert_letter(CompactTableau t, int letter) {
    t.insert(letter);
    return t;
}

struct SamplerConfig {
    int d = 1;
    std::int64_t copies = 0;
    Spectrum spectrum = Spectrum::uniform(1);
    std::uint64_t seed = 0;
    int chains = 1;
};

/// Independent, reproducible generator for one chain: seeded from (seed, chain index).
inline std::mt19937_64 chain_engine(std::uint64_t seed, std::uint64_t chain) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chain), static_cast<std::uint32_t>(chain >> 32)};
    return std::mt19937_64(seq);
}

/// Inverse-CDF letter draw on the sorted spectrum.
class LetterSampler {
public:
    explicit LetterSampler(const Spectrum& r) {
        double acc = 0.0;
        int last_positive = 0;
        for (int j = 0; j < r.size(); ++j) {
            acc += r[static_cast<std::size_t>(j)];
            cumulative_.push_back(acc);
            if (r[static_cast<std::size_t>(j)] > 0.0) last_positive = j;
        }
        // u < 1 always lands on a letter of positive probability.
        for (std::size_t j = static_cast<std::size_t>(last_positive); j < cumulative_.size(); ++j) cumulative_[j] = 1.0;
    }

    template <typename Engine>
    int operator()(Engine& engine) const {
        double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        int j = 0;
        while (u >= cumulative_[static_cast<std::size_t>(j)]) ++j;
        return j;
    }

private:
    std::vector<double> cumulative_;
};

template <typename Engine>
YoungFrame sample_frame(const SamplerConfig& cfg, const LetterSampler& letters, Engine& engine) {
    CompactTableau tableau(cfg.d);
    for (std::int64_t i = 0; i < cfg.copies; ++i) tableau.insert(letters(engine));
    return tableau.shape();
}

inline void check_config(const SamplerConfig& cfg) {
    if (cfg.d != cfg.spectrum.size()) throw domain_error("SamplerConfig: spectrum dimension does not match d");
    if (cfg.copies < 0) throw domain_error("SamplerConfig: N must be >= 0");
    if (cfg.copies > std::numeric_limits<int>::max()) throw resource_error("SamplerConfig: N exceeds frame row range");
    if (cfg.chains < 1) throw domain_error("SamplerConfig: chains must be >= 1");
}

/// One frame: the first draw of chain 0.
inline YoungFrame sample_frame(const SamplerConfig& cfg) {
    check_config(cfg);
    auto engine = chain_engine(cfg.seed, 0);
    return sample_frame(cfg, LetterSampler(cfg.spectrum), engine);
}

using FrameCounts = std::map<YoungFrame, std::uint64_t, std::greater<>>;

/**
 * Frame counts over `samples` draws. Chain c draws the block
 * [samples*c/chains, samples*(c+1)/chains) from its own stream, and chains
 * are spread over `threads` workers; the merge is an integer sum, so the
 * result depends on the config only.
 */
inline FrameCounts sample_counts(const SamplerConfig& cfg, std::uint64_t samples, int threads = 1) {
    check_config(cfg);
    const LetterSampler letters(cfg.spectrum);
    const auto chains = static_cast<std::uint64_t>(cfg.chains);
    std::vector<FrameCounts> per_chain(chains);

    auto run_chain = [&](std::uint64_t c) {
        auto engine = chain_engine(cfg.seed, c);
        std::uint64_t begin = samples * c / chains;
        std::uint64_t end = samples * (c + 1) / chains;
        for (std::uint64_t i = begin; i < end; ++i) ++per_chain[c][sample_frame(cfg, letters, engine)];
    };

    const auto workers = static_cast<std::uint64_t>(std::clamp<std::int64_t>(threads, 1, cfg.chains));
    if (workers == 1) {
        for (std::uint64_t c = 0; c < chains; ++c) run_chain(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        for (std::uint64_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t c = next++; c < chains; c = next++) run_chain(c);
            });
    }

    FrameCounts total;
    for (const auto& counts : per_chain)
        for (const auto& [frame, n] : counts) total[frame] += n;
    return total;
}

struct GoodnessOfFit {
    double total_variation = 0.0;
    double chi_square = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
};

struct EmpiricalDistribution {
    std::uint64_t samples = 0;
    FrameCounts counts;
    std::optional<GoodnessOfFit> fit;

    double frequency(const YoungFrame& y) const {
        auto it = counts.find(y);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
    }
};

/**
 * Total variation and a chi-square statistic against an exact distribution.
 * Frames with expected count >= 5 are their own bins; the rest are pooled,
 * and the pool joins the smallest bin if it is itself below 5.
 */
inline GoodnessOfFit goodness_of_fit(const FrameCounts& counts, std::uint64_t samples, const SchurWeylDistribution& exact) {
    GoodnessOfFit fit;
    const double n = static_cast<double>(samples);
    double tv = 0.0;
    std::vector<std::pair<double, double>> bins;  // (observed, expected)
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const YoungFrame& y = exact.frames()[i];
        double p = std::exp(exact.log_probabilities()[i]);
        auto it = counts.find(y);
        double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        tv += std::abs(observed / n - p);
        if (n * p >= 5.0) {
            bins.emplace_back(observed, n * p);
        } else {
            pooled_obs += observed;
            pooled_exp += n * p;
        }
    }
    for (const auto& [frame, c] : counts)
        if (frame.depth() != exact.dimension() || frame.boxes() != exact.copies())
            throw domain_error("goodness_of_fit: sampled frame outside the exact support");
    fit.total_variation = 0.5 * tv;

    if (pooled_exp >= 5.0 || bins.empty()) {
        if (pooled_exp > 0.0) bins.emplace_back(pooled_obs, pooled_exp);
    } else if (pooled_exp > 0.0) {
        auto smallest = std::min_element(bins.begin(), bins.end(), [](auto& a, auto& b) { return a.second < b.second; });
        smallest->first += pooled_obs;
        smallest->second += pooled_exp;
    }
    for (const auto& [observed, expected] : bins) fit.chi_square += (observed - expected) * (observed - expected) / expected;
    fit.degrees_of_freedom = std::max<int>(0, static_cast<int>(bins.size()) - 1);
    fit.p_value = fit.degrees_of_freedom > 0
                      ? boost::math::gamma_q(0.5 * fit.degrees_of_freedom, 0.5 * fit.chi_square)
                      : 1.0;
    return fit;
}

inline EmpiricalDistribution empirical_distribution(const SamplerConfig& cfg, std::uint64_t samples, int threads = 1,
                                                    const SchurWeylDistribution* exact = nullptr) {
    if (samples < 1) throw domain_error("empirical_distribution: samples must be >= 1");
    EmpiricalDistribution out;
    out.samples = samples;
    out.counts = sample_counts(cfg, samples, threads);
    if (exact) out.fit = goodness_of_fit(out.counts, samples, *exact);
    return out;
}

}  // namespace spectrum_scope
