#include "spectrum_scope/rsk_sampler.hpp"

#include <chrono>
#include <random>

#include <gtest/gtest.h>

namespace spectrum_scope {
namespace test {
namespace {

// Oracle: textbook row insertion on explicit rows of letters.
struct ListTableau {
    std::vector<std::vector<int>> rows;

    void insert(int x) {
        for (auto& row : rows) {
            auto it = std::upper_bound(row.begin(), row.end(), x);
            if (it == row.end()) {
                row.push_back(x);
                return;
            }
            std::swap(*it, x);
        }
        rows.push_back({x});
    }
};

bool same_tableau(const CompactTableau& t, const ListTableau& list) {
    for (int i = 0; i < t.depth(); ++i) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(t.depth()), 0);
        if (static_cast<std::size_t>(i) < list.rows.size())
            for (int x : list.rows[static_cast<std::size_t>(i)]) ++counts[static_cast<std::size_t>(x)];
        for (int l = 0; l < t.depth(); ++l)
            if (t.count(i, l) != counts[static_cast<std::size_t>(l)]) return false;
    }
    return list.rows.size() <= static_cast<std::size_t>(t.depth());
}

TEST(CompactTableauTest, examples) {
    auto one = insert_letter(CompactTableau(3), 0);
    EXPECT_EQ(one.count(0, 0), 1);
    EXPECT_EQ(one.shape(), YoungFrame({1, 0, 0}));

    auto t = insert_letter(CompactTableau(2), 1);
    EXPECT_EQ(t.shape(), YoungFrame({1, 0}));
    t = insert_letter(t, 0);
    EXPECT_EQ(t.shape(), YoungFrame({1, 1}));
    EXPECT_EQ(t.count(0, 0), 1);
    EXPECT_EQ(t.count(1, 1), 1);

    // The largest letter never bumps: it extends row 1.
    auto u = insert_letter(insert_letter(t, 1), 1);
    EXPECT_EQ(u.shape(), YoungFrame({3, 1}));
    EXPECT_THROW(insert_letter(u, 2), domain_error);
    EXPECT_THROW(insert_letter(u, -1), domain_error);
}

TEST(CompactTableauTest, matches_list_insertion_under_fuzzing) {
    std::mt19937_64 engine(41);
    int operations = 0;
    while (operations < 100000) {
        int d = 1 + static_cast<int>(engine() % 6);
        CompactTableau t(d);
        ListTableau list;
        int length = 1 + static_cast<int>(engine() % 400);
        for (int k = 0; k < length; ++k, ++operations) {
            int letter = static_cast<int>(engine() % static_cast<std::uint64_t>(d));
            YoungFrame before = t.shape();
            t.insert(letter);
            list.insert(letter);
            YoungFrame after = t.shape();
            ASSERT_EQ(after.boxes(), before.boxes() + 1);
            int grown = 0;
            for (int i = 0; i < d; ++i) grown += after[static_cast<std::size_t>(i)] != before[static_cast<std::size_t>(i)];
            ASSERT_EQ(grown, 1);
            ASSERT_TRUE(t.is_semistandard());
        }
        ASSERT_TRUE(same_tableau(t, list));
        ASSERT_EQ(t.boxes(), length);
    }
}

TEST(SampleFrameTest, examples) {
    SamplerConfig pure{3, 50, Spectrum({1.0, 0.0, 0.0}), 7, 1};
    EXPECT_EQ(sample_frame(pure), YoungFrame({50, 0, 0}));
    auto counts = sample_counts(pure, 100);
    ASSERT_EQ(counts.size(), 1u);
    EXPECT_EQ(counts.begin()->second, 100u);

    EXPECT_EQ(sample_frame(SamplerConfig{1, 12, Spectrum({1.0}), 3, 1}), YoungFrame({12}));
    EXPECT_EQ(sample_frame(SamplerConfig{2, 0, Spectrum({0.5, 0.5}), 3, 1}), YoungFrame({0, 0}));
}

TEST(SampleFrameTest, config_errors) {
    EXPECT_THROW(sample_frame(SamplerConfig{3, 5, Spectrum({0.5, 0.5}), 1, 1}), domain_error);
    EXPECT_THROW(sample_frame(SamplerConfig{2, -1, Spectrum({0.5, 0.5}), 1, 1}), domain_error);
    EXPECT_THROW(sample_counts(SamplerConfig{2, 5, Spectrum({0.5, 0.5}), 1, 0}, 10), domain_error);
    EXPECT_THROW(empirical_distribution(SamplerConfig{2, 5, Spectrum({0.5, 0.5}), 1, 1}, 0), domain_error);
}

TEST(SampleCountsTest, deterministic_across_runs_and_threads) {
    SamplerConfig cfg{3, 40, Spectrum({0.5, 0.3, 0.2}), 12345, 7};
    auto reference = sample_counts(cfg, 20001, 1);
    EXPECT_EQ(sample_counts(cfg, 20001, 1), reference);
    EXPECT_EQ(sample_counts(cfg, 20001, 3), reference);
    EXPECT_EQ(sample_counts(cfg, 20001, 16), reference);
    std::uint64_t total = 0;
    for (const auto& [frame, n] : reference) total += n;
    EXPECT_EQ(total, 20001u);

    cfg.seed = 12346;
    EXPECT_NE(sample_counts(cfg, 20001, 1), reference);
}

TEST(SampleCountsTest, one_sample_is_a_point_mass) {
    SamplerConfig cfg{2, 9, Spectrum({0.6, 0.4}), 5, 1};
    auto dist = empirical_distribution(cfg, 1);
    ASSERT_EQ(dist.counts.size(), 1u);
    EXPECT_EQ(dist.frequency(dist.counts.begin()->first), 1.0);
    EXPECT_EQ(dist.counts.begin()->first, sample_frame(cfg));
}

TEST(EmpiricalDistributionTest, column_frequency_at_two_copies) {
    SamplerConfig cfg{2, 2, Spectrum({0.5, 0.5}), 99, 4};
    auto dist = empirical_distribution(cfg, 1'000'000, 2);
    EXPECT_NEAR(dist.frequency(YoungFrame({1, 1})), 0.25, 0.0013);
    EXPECT_NEAR(dist.frequency(YoungFrame({1, 1})) + dist.frequency(YoungFrame({2, 0})), 1.0, 1e-15);
}

TEST(EmpiricalDistributionTest, chi_square_agreement_with_exact_law) {
    struct Case {
        int d, N;
        Spectrum r;
    };
    std::uint64_t seed = 500;
    for (const auto& c : {Case{2, 10, Spectrum({0.7, 0.3})}, Case{3, 8, Spectrum({0.6, 0.3, 0.1})}}) {
        auto exact = exact_distribution(c.d, c.N, c.r);
        auto dist = empirical_distribution(SamplerConfig{c.d, c.N, c.r, seed++, 8}, 1'000'000, 2, &exact);
        ASSERT_TRUE(dist.fit);
        EXPECT_GT(dist.fit->p_value, 0.001) << "d=" << c.d << " N=" << c.N;
        EXPECT_GT(dist.fit->degrees_of_freedom, 0);
    }
}

TEST(EmpiricalDistributionTest, total_variation_at_twenty_copies) {
    Spectrum r({0.6, 0.3, 0.1});
    auto exact = exact_distribution(3, 20, r);
    auto dist = empirical_distribution(SamplerConfig{3, 20, r, 77, 8}, 1'000'000, 2, &exact);
    EXPECT_LT(dist.fit->total_variation, 0.01);
}

TEST(EmpiricalDistributionTest, mean_row_length_at_hundred_copies) {
    Spectrum r({0.7, 0.3});
    auto exact = exact_distribution(2, 100, r);
    const double mean = expectation_of(exact, [](const Spectrum& s) { return s[0]; });
    const double second = expectation_of(exact, [](const Spectrum& s) { return s[0] * s[0]; });
    const std::uint64_t samples = 100000;
    auto dist = empirical_distribution(SamplerConfig{2, 100, r, 2024, 4}, samples);
    double empirical = 0.0;
    for (const auto& [frame, n] : dist.counts) empirical += frame[0] / 100.0 * static_cast<double>(n);
    empirical /= static_cast<double>(samples);
    EXPECT_NEAR(empirical, mean, 3.0 * std::sqrt((second - mean * mean) / samples));
}

TEST(GoodnessOfFitTest, exact_counts_and_pooling) {
    auto exact = exact_distribution(2, 2, Spectrum({0.5, 0.5}));
    FrameCounts perfect{{YoungFrame({2, 0}), 750}, {YoungFrame({1, 1}), 250}};
    auto fit = goodness_of_fit(perfect, 1000, exact);
    EXPECT_EQ(fit.chi_square, 0.0);
    EXPECT_EQ(fit.total_variation, 0.0);
    EXPECT_EQ(fit.degrees_of_freedom, 1);
    EXPECT_EQ(fit.p_value, 1.0);

    FrameCounts skewed{{YoungFrame({2, 0}), 700}, {YoungFrame({1, 1}), 300}};
    auto off = goodness_of_fit(skewed, 1000, exact);
    EXPECT_NEAR(off.total_variation, 0.05, 1e-15);
    EXPECT_NEAR(off.chi_square, 50.0 * 50.0 / 750.0 + 50.0 * 50.0 / 250.0, 1e-12);
    // One degree of freedom: Q(1/2, x/2) = erfc(sqrt(x/2)).
    EXPECT_NEAR(off.p_value, std::erfc(std::sqrt(off.chi_square / 2.0)), 1e-15);

    // Expected counts 7.5 and 2.5: the small bin is pooled into the other, leaving no freedom.
    FrameCounts tiny{{YoungFrame({2, 0}), 8}, {YoungFrame({1, 1}), 2}};
    auto pooled = goodness_of_fit(tiny, 10, exact);
    EXPECT_EQ(pooled.degrees_of_freedom, 0);
    EXPECT_EQ(pooled.p_value, 1.0);

    FrameCounts wrong{{YoungFrame({3, 0}), 1}};
    EXPECT_THROW(goodness_of_fit(wrong, 1, exact), domain_error);
}

TEST(SamplerThroughputTest, letters_per_second_is_reported) {
    SamplerConfig cfg{8, 20000, Spectrum::uniform(8), 1, 1};
    auto start = std::chrono::steady_clock::now();
    auto counts = sample_counts(cfg, 20);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double rate = 20.0 * 20000.0 / std::max(seconds, 1e-9);
    RecordProperty("letters_per_second", std::to_string(static_cast<long long>(rate)));
    std::cout << "d=8 sampler throughput: " << rate << " letters/s\n";
    EXPECT_EQ(counts.size() > 0, true);
}

}  // namespace
}  // namespace test
}  // namespace spectrum_scope
