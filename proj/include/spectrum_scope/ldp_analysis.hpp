/**
 * @file ldp_analysis.hpp
 * @brief Large-deviation quantities of the frame measurement: the relative
 *        entropy rate function, the scaled cumulant generating function, their
 *        Legendre duality, and finite-N decay diagnostics.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "spectrum_scope/errors.hpp"
#include "spectrum_scope/log_value.hpp"
#include "spectrum_scope/schur_eval.hpp"
#include "spectrum_scope/sw_measure.hpp"
#include "spectrum_scope/young_lattice.hpp"

namespace spectrum_scope {

/// I(s) = sum_j s_j (ln s_j - ln r_j), with 0 ln 0 = 0 and +inf off the support of r.
inline double rate(std::span<const double> s, std::span<const double> r) {
    if (s.size() != r.size()) throw domain_error("rate: dimension mismatch");
    double out = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[j] == 0.0) continue;
        if (r[j] == 0.0) return pos_inf;
        out += s[j] * (std::log(s[j]) - std::log(r[j]));
    }
    return out;
}

inline double rate(const Spectrum& s, const Spectrum& r) { return rate(s.values(), r.values()); }

/// c(eta) = ln sum_a r_a exp(eta_a), by log-sum-exp.
inline double cgf(std::span<const double> eta, const Spectrum& r) {
    if (eta.size() != static_cast<std::size_t>(r.size())) throw domain_error("cgf: dimension mismatch");
    std::vector<double> terms;
    terms.reserve(eta.size());
    for (std::size_t j = 0; j < eta.size(); ++j)
        if (r[j] > 0.0) terms.push_back(std::log(r[j]) + eta[j]);
    return log_sum_exp(terms);
}

struct LegendreResult {
    double value = 0.0;
    /// Optimizing eta, normalized to zero sum over the support of s; -inf off it.
    std::vector<double> eta;
    int iterations = 0;
    double gradient_norm = 0.0;
    /// max_j |eta_j - eta*_j| against the analytic optimizer ln(s_j / r_j) (zero-sum gauge).
    double certificate_gap = 0.0;
};

inline constexpr int legendre_max_iterations = 1000;
inline constexpr double legendre_gradient_tolerance = 1e-10;

/**
 * sup_eta (eta . s - c(eta)) by damped Newton ascent on the hyperplane
 * sum eta = 0. Coordinates where s_j = 0 are sent to -inf (the supremum is a
 * limit there), so the ascent runs on the support of s only.
 */
inline LegendreResult legendre_of_cgf(const Spectrum& s, const Spectrum& r, int max_iterations = legendre_max_iterations) {
    const int d = s.size();
    if (r.size() != d) throw domain_error("legendre_of_cgf: dimension mismatch");
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j)
        if (s[j] > 0.0) support.push_back(j);

    LegendreResult out;
    out.eta.assign(static_cast<std::size_t>(d), neg_inf);
    for (std::size_t j : support) {
        if (r[j] == 0.0) {
            out.value = pos_inf;
            return out;
        }
    }

    const std::size_t m = support.size();
    std::vector<double> target(m), log_r(m), eta(m, 0.0), grad(m), q(m), step(m), trial(m);
    for (std::size_t i = 0; i < m; ++i) {
        target[i] = s[support[i]];
        log_r[i] = std::log(r[support[i]]);
    }

    // Objective eta . s - ln sum_S r e^eta and its gradient s - q, q = softmax.
    auto objective = [&](const std::vector<double>& e) {
        std::vector<double> terms(m);
        double dot = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            terms[i] = log_r[i] + e[i];
            dot += e[i] * target[i];
        }
        return dot - log_sum_exp(terms);
    };
    auto gradient = [&](const std::vector<double>& e) {
        std::vector<double> terms(m);
        for (std::size_t i = 0; i < m; ++i) terms[i] = log_r[i] + e[i];
        double norm = log_sum_exp(terms);
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            q[i] = std::exp(terms[i] - norm);
            grad[i] = target[i] - q[i];
            mean += grad[i];
        }
        // Projected onto sum = 0; s itself sums to 1 only up to rounding.
        mean /= static_cast<double>(m);
        double sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) sq += (grad[i] - mean) * (grad[i] - mean);
        return std::sqrt(sq);
    };

    double value = objective(eta);
    double gnorm = gradient(eta);
    int iter = 0;
    while (gnorm > legendre_gradient_tolerance) {
        if (iter >= max_iterations) {
            std::vector<double> last(static_cast<std::size_t>(d), neg_inf);
            for (std::size_t i = 0; i < m; ++i) last[support[i]] = eta[i];
            throw convergence_error("legendre_of_cgf: no convergence after " + std::to_string(iter) +
                                        " iterations (gradient norm " + std::to_string(gnorm) + ")",
                                    std::move(last));
        }
        // Newton direction for the Hessian diag(q) - q q^T restricted to sum = 0:
        // step = g / q shifted to zero mean.
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            step[i] = grad[i] / q[i];
            mean += step[i];
        }
        mean /= static_cast<double>(m);
        double slope = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            step[i] -= mean;
            slope += grad[i] * step[i];
        }
        double t = 1.0;
        double next = value;
        for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = eta[i] + t * step[i];
            next = objective(trial);
            if (next >= value + 1e-4 * t * slope) break;
        }
        if (!(next > value)) break;  // no ascent possible at working precision
        eta = trial;
        value = next;
        gnorm = gradient(eta);
        ++iter;
    }

    out.value = value;
    out.iterations = iter;
    out.gradient_norm = gnorm;
    double optimum_mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) optimum_mean += std::log(target[i]) - log_r[i];
    optimum_mean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.eta[support[i]] = eta[i];
        double analytic = std::log(target[i]) - log_r[i] - optimum_mean;
        out.certificate_gap = std::max(out.certificate_gap, std::abs(eta[i] - analytic));
    }
    if (gnorm > legendre_gradient_tolerance && out.certificate_gap > 1e-6)
        throw convergence_error("legendre_of_cgf: stalled with gradient norm " + std::to_string(gnorm), out.eta);
    return out;
}

/// (1/N) ln sum_Y K_N({Y}) exp(eta . Y).
inline double empirical_cgf(const SchurWeylDistribution& dist, std::span<const double> eta) {
    if (eta.size() != static_cast<std::size_t>(dist.dimension())) throw domain_error("empirical_cgf: dimension mismatch");
    std::vector<double> terms;
    terms.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        double tilt = 0.0;
        for (std::size_t j = 0; j < eta.size(); ++j) tilt += eta[j] * dist.frames()[i][j];
        terms.push_back(dist.log_probabilities()[i] + tilt);
    }
    return log_sum_exp(terms) / dist.copies();
}

inline double empirical_cgf(int d, int N, const Spectrum& r, std::span<const double> eta) {
    return empirical_cgf(exact_distribution(d, N, r), eta);
}

/**
 * (1/N)(ln J - ln J') with J = sum_Y chi_Y(rho_h) e^{eta.Y} dim S_Y and
 * J' = sum_Y e^{(h+eta).Y} dim S_Y. The highest-weight bounds put it in
 * [0, ln p(N) / N].
 */
inline double j_equivalence_gap(const SchurWeylDistribution& dist, std::span<const double> eta) {
    const int d = dist.dimension();
    if (eta.size() != static_cast<std::size_t>(d)) throw domain_error("j_equivalence_gap: dimension mismatch");
    for (std::size_t j = 1; j < eta.size(); ++j)
        if (eta[j] > eta[j - 1]) throw domain_error("j_equivalence_gap: eta must be non-increasing");
    DiagonalState h = DiagonalState::from_spectrum(dist.spectrum());
    std::vector<double> shifted(eta.begin(), eta.end());
    for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] += h.log_eigenvalues()[j];

    std::vector<double> j_terms, jp_terms;
    j_terms.reserve(dist.size());
    jp_terms.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const YoungFrame& y = dist.frames()[i];
        j_terms.push_back(dist.log_probabilities()[i] + weight_dot(y.rows(), eta));
        double top = weight_dot(y.rows(), shifted);
        jp_terms.push_back(top == neg_inf ? neg_inf : top + log_dim_symmetric_irrep(y));
    }
    return (log_sum_exp(j_terms) - log_sum_exp(jp_terms)) / dist.copies();
}

inline double j_equivalence_gap(int d, int N, const Spectrum& r, std::span<const double> eta) {
    return j_equivalence_gap(exact_distribution(d, N, r), eta);
}

struct RegionInfimum {
    double value = 0.0;
    Spectrum minimizer;
};

/// Grid resolution of the multistart seeding, per simplex coordinate.
inline constexpr int infimum_grid_resolution = 200;

/**
 * inf_{s in Delta} I(s) over the closed ordered simplex, or nullopt when no
 * grid point at resolution 1/200 falls in Delta. Seeds are the best grid
 * points; each is refined by a pattern search along e_i - e_j directions that
 * stays inside Delta and the ordered simplex.
 */
inline std::optional<RegionInfimum> try_inf_rate_over_region(const Region& region, const Spectrum& r) {
    const int d = r.size();
    if (region.contains(r)) return RegionInfimum{0.0, r};

    struct Seed {
        double value;
        std::vector<double> point;
    };
    std::vector<Seed> seeds;
    for (const YoungFrame& y : enumerate_frames(d, infimum_grid_resolution)) {
        Spectrum s = frame_to_estimate(y);
        if (!region.contains(s)) continue;
        double v = rate(s.values(), r.values());
        if (v == pos_inf) continue;
        seeds.push_back({v, std::vector<double>(s.values().begin(), s.values().end())});
    }
    if (seeds.empty()) return std::nullopt;

    constexpr std::size_t max_starts = 16;
    std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.value < b.value; });
    if (seeds.size() > max_starts) seeds.resize(max_starts);

    auto admissible = [&](const std::vector<double>& p) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] < 0.0) return false;
            if (j > 0 && p[j] > p[j - 1]) return false;
        }
        return region.contains(std::span<const double>(p));
    };

    Seed best = seeds.front();
    for (Seed seed : seeds) {
        double h = 1.0 / infimum_grid_resolution;
        std::vector<double> trial(seed.point.size());
        // Moves per step size are capped: when the infimum is not attained
        // (Delta open at the minimizer) improvements shrink to rounding noise.
        int moves = 0;
        while (h > 1e-15) {
            bool moved = false;
            for (std::size_t i = 0; i < seed.point.size(); ++i) {
                for (std::size_t j = 0; j < seed.point.size(); ++j) {
                    if (i == j) continue;
                    trial = seed.point;
                    trial[i] += h;
                    trial[j] -= h;
                    if (!admissible(trial)) continue;
                    double v = rate(trial, r.values());
                    if (v < seed.value) {
                        seed.value = v;
                        seed.point = trial;
                        moved = true;
                    }
                }
            }
            if (moved && ++moves < 64) continue;
            h *= 0.5;
            moves = 0;
        }
        if (seed.value < best.value) best = seed;
    }
    // Steps along e_i - e_j keep the coordinate sum at 1 up to rounding, well inside the Spectrum tolerance.
    return RegionInfimum{best.value, Spectrum{best.point}};
}

inline RegionInfimum inf_rate_over_region(const Region& region, const Spectrum& r) {
    auto out = try_inf_rate_over_region(region, r);
    if (!out) throw domain_error("inf_rate_over_region: region is empty at grid resolution 1/200");
    return *out;
}

struct RateSample {
    int copies = 0;
    double probability = 0.0;
    double log_probability = neg_inf;
    /// a_N = -(1/N) ln K_N(Delta); +inf when K_N(Delta) = 0.
    double decay = pos_inf;
    bool infinite = true;
};

struct RateProfile {
    std::vector<RateSample> samples;
    /// inf_Delta I, +inf for an empty region.
    double target = pos_inf;
    std::optional<Spectrum> minimizer;
};

/// a_N for each N in the list, together with the large-deviation target inf_Delta I.
inline RateProfile rate_scan(int d, const Spectrum& r, const Region& region, std::span<const int> copies) {
    if (d != r.size()) throw domain_error("rate_scan: spectrum dimension does not match d");
    RateProfile profile;
    if (auto inf = try_inf_rate_over_region(region, r)) {
        profile.target = inf->value;
        profile.minimizer = inf->minimizer;
    }
    for (int N : copies) {
        RateSample sample;
        sample.copies = N;
        sample.log_probability = region_log_probability(exact_distribution(d, N, r), region);
        sample.probability = std::exp(sample.log_probability);
        sample.infinite = sample.log_probability == neg_inf;
        sample.decay = sample.infinite ? pos_inf : -sample.log_probability / N;
        // -0.0 when Delta holds every frame.
        if (sample.decay == 0.0) sample.decay = 0.0;
        profile.samples.push_back(sample);
    }
    return profile;
}

}  // namespace spectrum_scope
