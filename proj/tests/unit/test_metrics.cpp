// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "specsep/error.hpp"
#include "specsep/evaluate.hpp"
#include "specsep/metrics.hpp"

using namespace specsep;

namespace {

double
brute_force_auc(const std::vector<double>& s, const std::vector<int>& y)
{
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return wins / pairs;
}

void
random_problem(std::mt19937_64& gen, std::vector<double>& s,
               std::vector<int>& y, bool coarse)
{
    const std::size_t n = 2 + gen() % 60;
    s.resize(n);
    y.resize(n);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = int(gen() % 2);
        s[i] = coarse ? double(gen() % 5) : d(gen) + 0.2 * y[i];
    }
    y[0] = 0;
    y[1] = 1;
}

}  // namespace

TEST(Auc, HandExample)
{
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    const std::vector<int> y{0, 0, 1, 1};
    EXPECT_EQ(auc_pair_counting(s, y), 0.75);
    EXPECT_EQ(auc_rank(s, y), 0.75);
    EXPECT_EQ(brute_force_auc(s, y), 0.75);
}

TEST(Auc, SeparatedAndTied)
{
    const std::vector<int> y{0, 1, 0, 1};
    EXPECT_EQ(compute_auc(std::vector<double>{0.1, 0.9, 0.2, 0.8}, y), 1.0);
    EXPECT_EQ(compute_auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, y), 0.5);
}

TEST(Auc, PairCountingEqualsRankOnRandomSets)
{
    std::mt19937_64 gen(71);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 1000; ++trial) {
        random_problem(gen, s, y, trial % 3 == 0);
        const double a = auc_pair_counting(s, y);
        ASSERT_EQ(a, auc_rank(s, y)) << trial;
        ASSERT_NEAR(a, brute_force_auc(s, y), 1e-15);
    }
}

TEST(Auc, InvariantToMonotoneTransform)
{
    std::mt19937_64 gen(72);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 50; ++trial) {
        random_problem(gen, s, y, trial % 2 == 0);
        std::vector<double> t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            t[i] = std::exp(3.0 * s[i]) - 7.0;
        EXPECT_EQ(auc_rank(s, y), auc_rank(t, y));
    }
}

TEST(Auc, LabelSwapComplements)
{
    std::mt19937_64 gen(73);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 50; ++trial) {
        random_problem(gen, s, y, trial % 2 == 0);
        std::vector<int> swapped(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            swapped[i] = 1 - y[i];
        EXPECT_NEAR(auc_pair_counting(s, swapped), 1.0 - auc_pair_counting(s, y),
                    1e-15);
    }
}

TEST(Auc, MissingClassIsAnError)
{
    const std::vector<double> s{0.1, 0.2};
    EXPECT_THROW(auc_rank(s, std::vector<int>{1, 1}), Error);
    EXPECT_THROW(auc_pair_counting(s, std::vector<int>{0, 0}), Error);
    EXPECT_THROW(auc_rank(s, std::vector<int>{0}), Error);
}

TEST(Roc, TrapezoidAreaIsAuc)
{
    std::mt19937_64 gen(74);
    std::vector<double> s;
    std::vector<int> y;
    for (int trial = 0; trial < 100; ++trial) {
        random_problem(gen, s, y, trial % 2 == 0);
        auto roc = roc_curve(s, y);
        EXPECT_EQ(roc.front().tpr, 0.0);
        EXPECT_EQ(roc.front().fpr, 0.0);
        EXPECT_EQ(roc.back().tpr, 1.0);
        EXPECT_EQ(roc.back().fpr, 1.0);
        double area = 0.0;
        for (std::size_t i = 1; i < roc.size(); ++i) {
            EXPECT_LT(roc[i].threshold, roc[i - 1].threshold);
            area += 0.5 * (roc[i].tpr + roc[i - 1].tpr)
                    * (roc[i].fpr - roc[i - 1].fpr);
        }
        EXPECT_NEAR(area, brute_force_auc(s, y), 1e-12);
    }
}

TEST(Histogram, CountsEverySample)
{
    std::mt19937_64 gen(75);
    std::vector<double> s;
    std::vector<int> y;
    random_problem(gen, s, y, false);
    auto bins = score_histogram(s, y, 7);
    ASSERT_EQ(bins.size(), 7u);
    int real = 0, fake = 0;
    for (const auto& b : bins) {
        EXPECT_LE(b.lo, b.hi);
        real += b.real_count;
        fake += b.fake_count;
    }
    EXPECT_EQ(real + fake, int(s.size()));
    EXPECT_EQ(fake, int(std::count(y.begin(), y.end(), 1)));
}

TEST(Detectors, RandomScoresGiveChanceAuc)
{
    std::vector<int> y(1000);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = int(i % 2);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const double a = compute_auc(random_scores(1000, seed), y);
        EXPECT_GE(a, 0.45);
        EXPECT_LE(a, 0.55);
    }
}

TEST(Detectors, OracleScoresAreSeparating)
{
    std::vector<SampleManifest> m(6);
    std::vector<int> y;
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i].label = int(i % 3 == 0);
        y.push_back(m[i].label);
    }
    EXPECT_EQ(compute_auc(oracle_scores(m), y), 1.0);
}
