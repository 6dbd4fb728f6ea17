#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "airshed/clustering.hpp"
#include "airshed/error.hpp"
#include "airshed/feature_table.hpp"
#include "airshed/signatures.hpp"
#include "oracles.hpp"

namespace airshed {
namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an airshed::Error";
  return ErrorCode::IoError;
}

FeatureTable standardized_random(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> names;
  std::vector<std::optional<double>> cells;
  for (std::size_t r = 0; r < rows; ++r) {
    names.push_back("region " + std::to_string(100 - r));
    for (int c = 0; c < 6; ++c) cells.emplace_back(normal(rng));
  }
  return standardize(FeatureTable(names, cells)).table;
}

ClusterResult labelled(const FeatureTable& t, std::vector<int> labels) {
  ClusterResult r;
  r.labels = std::move(labels);
  int k = 0;
  for (int l : r.labels) k = std::max(k, l + 1);
  r.k = static_cast<std::size_t>(k);
  r.centers = cluster_means(t.to_matrix(), r.labels, r.k);
  return r;
}

TEST(Signatures, SingleClusterIsZero) {
  const auto t = standardized_random(10, 1);
  const auto report = compute_signatures(t, labelled(t, std::vector<int>(10, 0)));
  ASSERT_EQ(report.signatures.size(), 1u);
  for (double v : report.signatures[0]) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_EQ(report.membership[0].size(), 10u);
  EXPECT_TRUE(std::is_sorted(report.membership[0].begin(), report.membership[0].end()));
}

TEST(Signatures, TwoSingletonsOrderedByMean) {
  const auto t = standardize(FeatureTable({"high", "low"}, {3.0, 1.0, 2.0, 5.0, 1.0, 0.0,
                                                            1.0, 2.0, 0.0, 1.0, 0.0, 1.0}))
                     .table;
  const auto report = compute_signatures(t, labelled(t, {0, 1}));
  EXPECT_EQ(report.cluster_order, (std::vector<std::size_t>{1, 0}));
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_EQ(report.signatures[0][c], *t.cell(1, c));
    EXPECT_EQ(report.signatures[1][c], *t.cell(0, c));
  }
  EXPECT_EQ(report.membership[0], (std::vector<std::string>{"low"}));
  EXPECT_EQ(report.semantic_labels, (std::vector<int>{1, 0}));
  EXPECT_LT(report.signature_level(0), report.signature_level(1));
}

TEST(Signatures, Invariants) {
  const auto t = standardized_random(40, 3);
  std::mt19937_64 rng(4);
  std::vector<int> labels(40);
  for (auto& l : labels) l = static_cast<int>(rng() % 5);
  for (int c = 0; c < 5; ++c) labels[static_cast<std::size_t>(c)] = c;
  const auto report = compute_signatures(t, labelled(t, labels));

  std::vector<std::size_t> order = report.cluster_order;
  std::sort(order.begin(), order.end());
  EXPECT_EQ(order, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  for (std::size_t s = 1; s < 5; ++s)
    EXPECT_LE(report.signature_level(s - 1), report.signature_level(s));

  std::vector<double> weighted(6, 0.0);
  for (std::size_t raw = 0; raw < 5; ++raw) {
    const std::size_t semantic = report.cluster_order[raw];
    std::vector<double> mean(6, 0.0);
    double count = 0;
    for (std::size_t r = 0; r < 40; ++r) {
      if (labels[r] != static_cast<int>(raw)) continue;
      ++count;
      for (std::size_t c = 0; c < 6; ++c) mean[c] += *t.cell(r, c);
    }
    for (std::size_t c = 0; c < 6; ++c) {
      EXPECT_NEAR(report.signatures[semantic][c], mean[c] / count, 1e-12);
      EXPECT_EQ(report.trends[c][semantic], report.signatures[semantic][c]);
      weighted[c] += mean[c];
    }
    EXPECT_EQ(report.membership[semantic].size(), static_cast<std::size_t>(count));
  }
  for (double w : weighted) EXPECT_NEAR(w / 40.0, 0.0, 1e-9);

  std::vector<std::string> all;
  for (const auto& m : report.membership) all.insert(all.end(), m.begin(), m.end());
  std::sort(all.begin(), all.end());
  std::vector<std::string> names = t.row_names();
  std::sort(names.begin(), names.end());
  EXPECT_EQ(all, names);
}

TEST(Signatures, RawRenumberingDoesNotMatter) {
  const auto t = standardized_random(25, 5);
  std::vector<int> labels(25), permuted(25);
  const int perm[4] = {2, 0, 3, 1};
  for (std::size_t r = 0; r < 25; ++r) {
    labels[r] = static_cast<int>(r % 4);
    permuted[r] = perm[r % 4];
  }
  const auto a = compute_signatures(t, labelled(t, labels));
  const auto b = compute_signatures(t, labelled(t, permuted));
  EXPECT_EQ(a.signatures, b.signatures);
  EXPECT_EQ(a.membership, b.membership);
  EXPECT_EQ(a.semantic_labels, b.semantic_labels);
  EXPECT_EQ(a.trends, b.trends);
}

TEST(Signatures, NoiseListedSeparately) {
  const auto t = standardized_random(6, 6);
  const auto report = compute_signatures(t, labelled(t, {0, kNoise, 0, 1, 1, kNoise}));
  EXPECT_EQ(report.noise_members, (std::vector<std::string>{"region 95", "region 99"}));
  EXPECT_EQ(report.semantic_labels[1], kNoise);
  EXPECT_EQ(report.membership.size(), 2u);
}

TEST(Signatures, Errors) {
  const FeatureTable raw({"a", "b"}, std::vector<std::optional<double>>(12, 1.0));
  ClusterResult r;
  r.labels = {0, 0};
  r.k = 1;
  EXPECT_EQ(code_of([&] { compute_signatures(raw, r); }), ErrorCode::NotStandardized);
  const auto t = standardized_random(3, 7);
  EXPECT_EQ(code_of([&] { compute_signatures(t, r); }), ErrorCode::RowMismatch);
}

TEST(AdjustedRandIndex, Examples) {
  EXPECT_EQ(adjusted_rand_index({0, 0, 1, 1}, {0, 0, 1, 1}), 1.0);
  EXPECT_EQ(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
  EXPECT_NEAR(adjusted_rand_index({0, 0, 1, 1}, {0, 1, 0, 1}), -0.5, 1e-12);
  EXPECT_EQ(code_of([] { adjusted_rand_index({0}, {0, 1}); }), ErrorCode::LengthMismatch);
}

TEST(AdjustedRandIndex, MatchesPairCountingAndIsSymmetric) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + trial % 40;
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 4) - 1;
      b[i] = static_cast<int>(rng() % 3);
    }
    const double ari = adjusted_rand_index(a, b);
    EXPECT_NEAR(ari, oracle::pair_count_ari(a, b), 1e-12);
    EXPECT_EQ(ari, adjusted_rand_index(b, a));
    std::vector<int> renamed(n);
    for (std::size_t i = 0; i < n; ++i) renamed[i] = 7 - a[i];
    EXPECT_NEAR(adjusted_rand_index(a, renamed), 1.0, 1e-12);
  }
}

TEST(ComparePartitions, ReportsMovedNames) {
  const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f"};
  ClusterResult x, y;
  x.labels = {0, 0, 0, 1, 1, 1};
  y.labels = {1, 1, 0, 0, 0, 0};
  x.k = y.k = 2;
  const auto cmp = compare_partitions(x, y, names);
  EXPECT_EQ(cmp.differing, (std::vector<std::string>{"c"}));
  EXPECT_LT(cmp.adjusted_rand_index, 1.0);

  const auto same = compare_partitions(x, x, names);
  EXPECT_EQ(same.adjusted_rand_index, 1.0);
  EXPECT_TRUE(same.differing.empty());
}

}  // namespace
}  // namespace airshed
