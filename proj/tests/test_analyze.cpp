#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace scisumm;
using namespace testing_support;

TEST(Align, VerbatimAndBruteForce) {
  std::mt19937_64 rng(8);
  const auto emb = random_table(30, 10, rng);
  std::vector<std::vector<std::string>> src;
  for (int i = 0; i < 10; ++i) src.push_back(random_words(5, 30, rng));
  const auto source = text_of(src);

  const auto exact = align_generated(text_of({src[7], src[2]}), source, emb);
  EXPECT_EQ(exact.indices, (std::vector<std::size_t>{7, 2}));
  EXPECT_EQ(exact.skipped, 0u);

  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<std::string>> sum;
    for (int i = 0; i < 3; ++i) sum.push_back(random_words(4, 30, rng));
    const auto got = align_generated(text_of(sum), source, emb);
    ASSERT_EQ(got.indices.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t best = 0;
      double best_d = 1e300;
      for (std::size_t i = 0; i < src.size(); ++i) {
        const double d =
            std::max(brute_rwmd_directional(sum[k], src[i], emb), brute_rwmd_directional(src[i], sum[k], emb));
        if (d < best_d) best_d = d, best = i;
      }
      EXPECT_EQ(got.indices[k], best);
    }
    // shares the argmin contract with the oracle
    const auto o = oracle(source, text_of(sum), emb);
    std::set<std::size_t> uniq(got.indices.begin(), got.indices.end());
    EXPECT_EQ(o.selected, std::vector<std::size_t>(uniq.begin(), uniq.end()));
  }
}

TEST(Align, IncomparableSkipped) {
  std::mt19937_64 rng(8);
  const auto emb = random_table(5, 4, rng);
  const auto got = align_generated(text_of({{"the"}, {"zzz"}, {"."}}), text_of({{"w1"}}), emb);
  EXPECT_TRUE(got.indices.empty());
  EXPECT_EQ(got.skipped, 3u);
  EXPECT_THROW(align_generated(text_of({{"w1"}}), TokenizedText{}, emb), DataError);
}

TEST(Histogram, AllIndexZero) {
  std::vector<SelectionRecord> sel(50, SelectionRecord{{0}, 17});
  const auto h = selection_histogram(sel, HistogramMode::normalized_position, 20);
  EXPECT_EQ(h.bins[0].mass, 1.0);
  EXPECT_NEAR(h.total(), 1.0, 1e-12);
  const auto a = selection_histogram(sel, HistogramMode::absolute_index, 5);
  EXPECT_EQ(a.bins[0].mass, 50.0);
  EXPECT_EQ(a.total(), 50.0);
}

TEST(Histogram, LeadTenOnHundredSentences) {
  std::vector<SelectionRecord> sel(20, SelectionRecord{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 100});
  const auto h = selection_histogram(sel, HistogramMode::normalized_position, 10);
  EXPECT_EQ(h.bins[0].mass, 1.0);
  for (std::size_t b = 1; b < 10; ++b) EXPECT_EQ(h.bins[b].mass, 0.0);
}

TEST(Histogram, UniformSelectionsChiSquare) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(200, 400);
  std::vector<SelectionRecord> sel;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t n = len(rng);
    sel.push_back({{std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)}, n});
  }
  const auto h = selection_histogram(sel, HistogramMode::normalized_position, 20);
  double chi2 = 0;
  for (const auto& b : h.bins) {
    const double observed = b.mass * 10000, expected = 500;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  EXPECT_LT(chi2, 43.8);  // 99.9th percentile of chi-square with 19 dof
  EXPECT_NEAR(h.total(), 1.0, 1e-9);
}

TEST(Histogram, ErrorsAndMerge) {
  EXPECT_THROW(HistogramAccumulator(HistogramMode::normalized_position, 0), UsageError);
  HistogramAccumulator acc(HistogramMode::normalized_position, 4);
  EXPECT_THROW(acc.add(std::vector<std::size_t>{5}, 5), DataError);
  HistogramAccumulator x(HistogramMode::normalized_position, 4), y(HistogramMode::normalized_position, 4);
  x.add(std::vector<std::size_t>{0, 3}, 4);
  y.add(std::vector<std::size_t>{1}, 4);
  x.merge(y);
  EXPECT_EQ(x.selections(), 3u);
  EXPECT_THROW(x.merge(HistogramAccumulator(HistogramMode::absolute_index, 4)), UsageError);
  const auto csv = to_csv(x.finish());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_start,bin_end,mass");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
