#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "airshed/error.hpp"
#include "airshed/feature_table.hpp"

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

/// Table whose every column holds `values`.
FeatureTable uniform_columns(const std::vector<double>& values) {
  std::vector<std::string> names;
  std::vector<std::optional<double>> cells;
  for (std::size_t r = 0; r < values.size(); ++r) {
    names.push_back("r" + std::to_string(r));
    for (int c = 0; c < 6; ++c) cells.emplace_back(values[r]);
  }
  return FeatureTable(names, cells);
}

FeatureTable random_table(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> names;
  std::vector<std::optional<double>> cells;
  const double scale[6] = {1e-5, 1e-6, 0.002, 0.5, 0.001, 2e-5};
  const double offset[6] = {4e-5, 0.0, 0.035, -1.2, 0.117, 1e-4};
  for (std::size_t r = 0; r < rows; ++r) {
    names.push_back("region " + std::to_string(r));
    for (int c = 0; c < 6; ++c) cells.emplace_back(offset[c] + scale[c] * normal(rng));
  }
  return FeatureTable(names, cells);
}

TEST(Standardize, ThreeValueColumn) {
  const auto s = standardize(uniform_columns({1, 2, 3}));
  const double z = std::sqrt(1.5);
  for (int c = 0; c < 6; ++c) {
    EXPECT_NEAR(*s.table.cell(0, c), -z, 1e-9);
    EXPECT_NEAR(*s.table.cell(1, c), 0.0, 1e-12);
    EXPECT_NEAR(*s.table.cell(2, c), z, 1e-9);
  }
  EXPECT_NEAR(z, 1.224744871, 1e-9);
  ASSERT_TRUE(s.table.column_stats());
  EXPECT_EQ((*s.table.column_stats())[0].mean, 2.0);
  EXPECT_NEAR((*s.table.column_stats())[0].stddev, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_TRUE(s.constant_columns.empty());
}

TEST(Standardize, ConstantColumnBecomesZeros) {
  const auto s = standardize(uniform_columns({5, 5, 5}));
  for (std::size_t r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c) EXPECT_EQ(s.table.cell(r, c), 0.0);
  EXPECT_EQ(s.constant_columns.size(), 6u);
}

TEST(Standardize, PostConditions) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = standardize(random_table(5 + seed * 7, seed));
    const auto& t = s.table;
    EXPECT_TRUE(t.standardized());
    for (std::size_t c = 0; c < 6; ++c) {
      double mean = 0, sq = 0;
      for (std::size_t r = 0; r < t.rows(); ++r) mean += *t.cell(r, c);
      mean /= static_cast<double>(t.rows());
      for (std::size_t r = 0; r < t.rows(); ++r) sq += (*t.cell(r, c) - mean) * (*t.cell(r, c) - mean);
      EXPECT_NEAR(mean, 0.0, 1e-12);
      EXPECT_NEAR(std::sqrt(sq / static_cast<double>(t.rows())), 1.0, 1e-12);
    }
  }
}

TEST(Standardize, Idempotent) {
  const auto once = standardize(random_table(30, 4));
  const auto twice = standardize(once.table);
  for (std::size_t r = 0; r < 30; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      EXPECT_NEAR(*twice.table.cell(r, c), *once.table.cell(r, c), 1e-12);
}

TEST(Standardize, Errors) {
  EXPECT_EQ(code_of([] { standardize(uniform_columns({1})); }), ErrorCode::TooFewRows);
  FeatureTable with_null({"a", "b"}, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0,
                                      1.0, std::nullopt, 3.0, 4.0, 5.0, 6.0});
  EXPECT_EQ(code_of([&] { standardize(with_null); }), ErrorCode::NullCellsPresent);
}

TEST(DropNullRows, KeepsCompleteRowsInOrder) {
  std::vector<std::optional<double>> cells;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 6; ++c) cells.emplace_back(r * 10 + c);
  cells[1 * 6 + 3] = std::nullopt;
  cells[3 * 6 + 0] = std::nullopt;
  const auto result = drop_null_rows(FeatureTable({"a", "b", "c", "d"}, cells));
  EXPECT_EQ(result.table.row_names(), (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(result.dropped, (std::vector<std::string>{"b", "d"}));
  EXPECT_EQ(result.table.cell(1, 2), 22.0);
  EXPECT_FALSE(result.table.has_nulls());

  const FeatureTable complete({"a", "b"}, std::vector<std::optional<double>>(12, 1.5));
  const auto untouched = drop_null_rows(complete);
  EXPECT_EQ(untouched.table, complete);
  EXPECT_TRUE(untouched.dropped.empty());

  FeatureTable all_null({"x"}, std::vector<std::optional<double>>(6));
  EXPECT_EQ(code_of([&] { drop_null_rows(all_null); }), ErrorCode::EmptyResult);
}

TEST(TableCsv, RoundTrip) {
  auto t = random_table(12, 9);
  std::vector<std::string> names = t.row_names();
  names[3] = "Dadra, Nagar \"Haveli\"";
  std::vector<std::optional<double>> cells;
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < 6; ++c)
      cells.push_back(r == 5 && c == 1 ? std::nullopt : t.cell(r, c));
  const FeatureTable table(names, cells);
  const FeatureTable back = read_table(write_table(table));
  ASSERT_EQ(back.row_names(), table.row_names());
  for (std::size_t r = 0; r < table.rows(); ++r)
    for (std::size_t c = 0; c < 6; ++c) {
      ASSERT_EQ(back.cell(r, c).has_value(), table.cell(r, c).has_value());
      if (table.cell(r, c)) {
        EXPECT_NEAR(*back.cell(r, c), *table.cell(r, c), 1e-11 * std::abs(*table.cell(r, c)));
      }
    }
}

TEST(TableCsv, ParsesScientificNotationRow) {
  const auto t = read_table(
      "region,NO2,SO2,CO,AER_AI,O3,HCHO\n"
      "Anantapur,5.97E-05,4.64E-05,0.035942,-1.11059,0.116844,0.000145\n");
  ASSERT_EQ(t.rows(), 1u);
  EXPECT_EQ(t.row_names()[0], "Anantapur");
  const double expected[6] = {5.97e-05, 4.64e-05, 0.035942, -1.11059, 0.116844, 0.000145};
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(t.cell(0, c), expected[c]);
}

TEST(TableCsv, Errors) {
  EXPECT_EQ(code_of([] { read_table("region,NO2,SO2\n"); }), ErrorCode::HeaderMismatch);
  EXPECT_EQ(code_of([] { read_table("region,NO2,SO2,CO,O3,AER_AI,HCHO\n"); }),
            ErrorCode::HeaderMismatch);
  EXPECT_EQ(code_of([] { read_table("region,NO2,SO2,CO,AER_AI,O3,HCHO\na,1,2,3\n"); }),
            ErrorCode::RaggedRow);
  EXPECT_EQ(code_of([] { read_table("region,NO2,SO2,CO,AER_AI,O3,HCHO\na,1,2,x,4,5,6\n"); }),
            ErrorCode::NonNumericField);
  const auto t = read_table("region,NO2,SO2,CO,AER_AI,O3,HCHO\r\na,1,,3,4,5,6\r\n");
  EXPECT_EQ(t.cell(0, 1), std::nullopt);
  EXPECT_EQ(t.cell(0, 5), 6.0);
}

}  // namespace
}  // namespace airshed
