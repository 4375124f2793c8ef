#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "newstox/error.hpp"
#include "newstox/folds.hpp"
#include "newstox/metrics.hpp"
#include "newstox/rng.hpp"
#include "support/oracles.hpp"

using namespace newstox;
namespace nt = newstox::testing;

TEST(Metrics, HandExample) {
  // A=0, B=1, C=2; true (A,A,B,C), predicted (A,B,B,B).
  const std::vector<int> truth = {0, 0, 1, 2}, pred = {0, 1, 1, 1};
  const auto m = compute_metrics(truth, pred, 3);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(m.per_class[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(m.per_class[0].recall, 0.5);
  EXPECT_NEAR(m.per_class[0].f1, 2.0 / 3, 1e-15);
  EXPECT_NEAR(m.per_class[1].precision, 1.0 / 3, 1e-15);
  EXPECT_DOUBLE_EQ(m.per_class[1].recall, 1.0);
  EXPECT_NEAR(m.per_class[1].f1, 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(m.per_class[2].f1, 0.0);
  EXPECT_NEAR(m.macro_f1, (2.0 / 3 + 0.5) / 3, 1e-15);
}

TEST(Metrics, Perfect) {
  const std::vector<int> y = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto m = compute_metrics(y, y, 9);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
}

TEST(Metrics, AllMajorityMacroUsesFullLabelSpace) {
  std::vector<int> truth(317, 0);
  for (int i = 0; i < 96; ++i) truth[static_cast<std::size_t>(i)] = 8;
  for (int i = 96; i < 317; ++i) truth[static_cast<std::size_t>(i)] = i % 8;
  const std::vector<int> pred(317, 8);
  const auto m = compute_metrics(truth, pred, 9);
  const double p = 96.0 / 317;
  EXPECT_NEAR(m.per_class[8].f1, 2 * p / (1 + p), 1e-12);
  EXPECT_NEAR(m.macro_f1, 2 * p / (1 + p) / 9, 1e-12);
  EXPECT_NEAR(100 * m.macro_f1, 5.17, 0.005);
}

TEST(Metrics, MatchesBruteForceOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + rng.index(120);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.index(9));
      p[i] = rng.uniform() < 0.4 ? t[i] : static_cast<int>(rng.index(9));
    }
    const auto m = compute_metrics(t, p, 9);
    const auto o = nt::brute_metrics(t, p, 9);
    EXPECT_NEAR(m.accuracy, o.accuracy, 1e-12);
    EXPECT_NEAR(m.macro_f1, o.macro_f1, 1e-12);
    for (int c = 0; c < 9; ++c) {
      EXPECT_NEAR(m.per_class[static_cast<std::size_t>(c)].f1, o.f1[static_cast<std::size_t>(c)], 1e-12);
      EXPECT_NEAR(m.per_class[static_cast<std::size_t>(c)].precision, o.precision[static_cast<std::size_t>(c)], 1e-12);
      EXPECT_NEAR(m.per_class[static_cast<std::size_t>(c)].recall, o.recall[static_cast<std::size_t>(c)], 1e-12);
    }
    EXPECT_EQ(m.confusion.sum(), static_cast<std::int64_t>(n));
    EXPECT_NEAR(static_cast<double>(m.confusion.trace()) / static_cast<double>(n), m.accuracy, 0.0);
    for (int c = 0; c < 9; ++c)
      EXPECT_EQ(m.confusion.row(c).sum(), static_cast<std::int64_t>(std::count(t.begin(), t.end(), c)));
  }
}

TEST(Metrics, Errors) {
  const std::vector<int> a = {0, 1}, b = {0}, bad = {0, 9}, none;
  EXPECT_THROW(compute_metrics(a, b, 9), ValidationError);
  EXPECT_THROW(compute_metrics(a, bad, 9), ValidationError);
  EXPECT_THROW(compute_metrics(none, none, 9), ValidationError);
}

TEST(Folds, TenArticlesFiveFolds) {
  std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
  const auto f = stratified_folds(y, 5, 42);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(f.test_rows(k).size(), 2u);
}

TEST(Folds, PartitionAndBalance) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 10 + rng.index(300);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.index(9));
    const int k = 2 + static_cast<int>(rng.index(6));
    if (n < static_cast<std::size_t>(k)) continue;
    const auto f = stratified_folds(y, k, static_cast<std::uint64_t>(trial));
    std::set<std::size_t> seen;
    std::size_t min_size = n, max_size = 0;
    for (int j = 0; j < k; ++j) {
      const auto test = f.test_rows(j);
      const auto train = f.train_rows(j);
      EXPECT_EQ(test.size() + train.size(), n);
      for (auto r : test) EXPECT_TRUE(seen.insert(r).second);
      min_size = std::min(min_size, test.size());
      max_size = std::max(max_size, test.size());
      for (int c = 0; c < 9; ++c) {
        const double global = static_cast<double>(std::count(y.begin(), y.end(), c)) / k;
        const auto in_fold = std::count_if(test.begin(), test.end(), [&](auto r) { return y[r] == c; });
        EXPECT_LE(std::abs(static_cast<double>(in_fold) - global), 1.0);
      }
    }
    EXPECT_EQ(seen.size(), n);
    EXPECT_LE(max_size - min_size, 1u);
  }
}

TEST(Folds, ThreeHundredSeventeenSplit) {
  std::vector<int> y;
  for (auto [c, n] : std::vector<std::pair<int, int>>{{0, 60}, {1, 35}, {2, 17}, {3, 52}, {4, 20}, {5, 18}, {6, 11}, {7, 8}, {8, 96}})
    for (int i = 0; i < n; ++i) y.push_back(c);
  const auto f = stratified_folds(y, 5, 42);
  std::vector<std::size_t> sizes;
  for (int k = 0; k < 5; ++k) sizes.push_back(f.test_rows(k).size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{63, 63, 63, 64, 64}));
  EXPECT_TRUE(f.fully_stratified);
}

TEST(Folds, DeterministicAndSeedSensitive) {
  std::vector<int> y(100);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 4);
  EXPECT_EQ(stratified_folds(y, 5, 1).fold_of, stratified_folds(y, 5, 1).fold_of);
  EXPECT_NE(stratified_folds(y, 5, 1).fold_of, stratified_folds(y, 5, 2).fold_of);
  EXPECT_EQ(random_folds(50, 5, 3).fold_of, random_folds(50, 5, 3).fold_of);
}

TEST(Folds, TinyClassesAndErrors) {
  const std::vector<int> y = {0, 0, 0, 0, 0, 0, 1};
  const auto f = stratified_folds(y, 5, 1);
  EXPECT_FALSE(f.fully_stratified);
  EXPECT_THROW(stratified_folds(y, 1, 1), ConfigError);
  EXPECT_THROW(stratified_folds(std::vector<int>{0, 1}, 3, 1), ConfigError);
}
