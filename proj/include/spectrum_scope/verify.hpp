/**
 * @file verify.hpp
 * @brief Self-check suites run by `spectrum_scope verify`: normalization,
 *        Legendre duality, character bounds, the symmetric-group oracle and
 *        sampler equivalence.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spectrum_scope/ldp_analysis.hpp"
#include "spectrum_scope/rsk_sampler.hpp"
#include "spectrum_scope/schur_eval.hpp"
#include "spectrum_scope/sw_measure.hpp"

namespace spectrum_scope {

/// Uniform point of the ordered simplex (sorted normalized exponentials), entries > 0.
template <typename Engine>
Spectrum random_spectrum(Engine& engine, int d) {
    std::vector<double> v(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (double& x : v) {
        double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
        x = -std::log(u);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return Spectrum::canonical(std::move(v));
}

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::quick;
    int threads = 1;
    /// Rate function checked against the Legendre transform; replaceable to exercise failure reporting.
    std::function<double(const Spectrum&, const Spectrum&)> rate_function = [](const Spectrum& s, const Spectrum& r) {
        return rate(s, r);
    };
};

namespace detail {

inline std::string format_sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

inline CheckResult check_normalization(const VerifyOptions& opt) {
    const bool full = opt.level == VerifyLevel::full;
    std::mt19937_64 engine(1001);
    double worst = 0.0;
    for (int d = 2; d <= 4; ++d)
        for (int N = 1; N <= (full ? 60 : 20); ++N)
            for (int k = 0; k < (full ? 20 : 3); ++k)
                worst = std::max(worst, std::abs(std::expm1(exact_distribution(d, N, random_spectrum(engine, d)).log_total())));
    return {"normalization", worst <= 1e-10, "max |sum_Y K_N(Y) - 1| = " + format_sci(worst)};
}

inline CheckResult check_duality(const VerifyOptions& opt) {
    const bool full = opt.level == VerifyLevel::full;
    std::mt19937_64 engine(1002);
    double worst = 0.0;
    int failures = 0;
    for (int k = 0; k < (full ? 200 : 50); ++k) {
        int d = 2 + k % 3;
        Spectrum s = random_spectrum(engine, d);
        Spectrum r = random_spectrum(engine, d);
        try {
            worst = std::max(worst, std::abs(legendre_of_cgf(s, r).value - opt.rate_function(s, r)));
        } catch (const convergence_error&) {
            ++failures;
        }
    }
    return {"duality", worst <= 1e-8 && failures == 0,
            "max |legendre - rate| = " + format_sci(worst) + ", non-converged = " + std::to_string(failures)};
}

inline CheckResult check_bounds(const VerifyOptions& opt) {
    const bool full = opt.level == VerifyLevel::full;
    std::mt19937_64 engine(1003);
    int violations = 0;
    double worst_expansion = 0.0;
    for (int d = 1; d <= 3; ++d) {
        for (int k = 0; k < (full ? 20 : 5); ++k) {
            Spectrum r = random_spectrum(engine, d);
            DiagonalState h = DiagonalState::from_spectrum(r);
            for (int N = 1; N <= (full ? 20 : 10); ++N) {
                SchurTable table(r, N);
                for (const YoungFrame& y : enumerate_frames(d, N)) {
                    auto b = character_bounds_check(y, h);
                    if (!b.holds) ++violations;
                    if (N <= (full ? 10 : 6)) {
                        double expansion = character_from_weights(weight_multiplicities(y, d), h).log();
                        worst_expansion = std::max(worst_expansion, std::abs(expansion - table.log_value(y)));
                    }
                }
            }
        }
    }
    return {"bounds", violations == 0 && worst_expansion <= 1e-10,
            "bound violations = " + std::to_string(violations) + ", max |weight expansion - schur| = " +
                format_sci(worst_expansion)};
}

inline CheckResult check_oracle(const VerifyOptions& opt) {
    const bool full = opt.level == VerifyLevel::full;
    std::mt19937_64 engine(1004);
    double worst = 0.0;
    for (int d = 1; d <= 3; ++d) {
        for (int k = 0; k < (full ? 5 : 2); ++k) {
            Spectrum r = random_spectrum(engine, d);
            for (int N = 1; N <= (full ? 7 : 5); ++N) {
                auto dist = exact_distribution(d, N, r);
                for (std::size_t i = 0; i < dist.size(); ++i)
                    worst = std::max(worst, std::abs(std::exp(dist.log_probabilities()[i]) -
                                                     brute_force_frame_probability(dist.frames()[i], r)));
            }
        }
    }
    return {"oracle", worst <= 1e-10, "max |exact - symmetric group oracle| = " + format_sci(worst)};
}

inline CheckResult check_sampler(const VerifyOptions& opt) {
    const bool full = opt.level == VerifyLevel::full;
    const std::uint64_t samples = full ? 1'000'000 : 100'000;
    struct Case {
        int d, N;
        Spectrum r;
    };
    std::vector<Case> cases{{2, 10, Spectrum{{0.7, 0.3}}}, {3, 8, Spectrum{{0.6, 0.3, 0.1}}}};
    bool ok = true;
    std::string detail;
    std::uint64_t seed = 2001;
    for (const auto& c : cases) {
        auto exact = exact_distribution(c.d, c.N, c.r);
        SamplerConfig cfg{c.d, c.N, c.r, seed++, 8};
        auto fit = *empirical_distribution(cfg, samples, opt.threads, &exact).fit;
        ok = ok && fit.p_value > 0.001;
        detail += "(d=" + std::to_string(c.d) + ",N=" + std::to_string(c.N) + ") p=" + format_sci(fit.p_value) + "; ";
    }
    if (full) {
        Spectrum r{{0.6, 0.3, 0.1}};
        auto exact = exact_distribution(3, 20, r);
        SamplerConfig cfg{3, 20, r, seed++, 8};
        auto fit = *empirical_distribution(cfg, samples, opt.threads, &exact).fit;
        ok = ok && fit.total_variation < 0.01;
        detail += "(d=3,N=20) tv=" + format_sci(fit.total_variation);
    }
    return {"sampler", ok, detail};
}

}  // namespace detail

/// Runs every suite; each result names its invariant and carries a one-line summary.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
    return {detail::check_normalization(opt), detail::check_duality(opt), detail::check_bounds(opt),
            detail::check_oracle(opt), detail::check_sampler(opt)};
}

}  // namespace spectrum_scope
