#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "airshed/matrix.hpp"
#include "airshed/pollutant.hpp"

namespace airshed {

struct ColumnStats {
  double mean = 0.0;
  double stddev = 0.0;  ///< population standard deviation
  friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

/// Regions x pollutants. Columns are always the six canonical pollutants.
class FeatureTable {
 public:
  FeatureTable() = default;
  /// cells is row-major, rows x 6.
  FeatureTable(std::vector<std::string> row_names, std::vector<std::optional<double>> cells);

  std::size_t rows() const noexcept { return row_names_.size(); }
  std::size_t cols() const noexcept { return kCanonicalPollutants.size(); }
  const std::vector<std::string>& row_names() const noexcept { return row_names_; }
  std::span<const Pollutant> columns() const noexcept { return kCanonicalPollutants; }

  std::optional<double> cell(std::size_t row, std::size_t col) const noexcept {
    return cells_[row * cols() + col];
  }
  bool row_has_null(std::size_t row) const noexcept;
  bool has_nulls() const noexcept;

  bool standardized() const noexcept { return column_stats_.has_value(); }
  /// Statistics of the input columns, recorded by standardize().
  const std::optional<std::vector<ColumnStats>>& column_stats() const noexcept {
    return column_stats_;
  }

  /// Throws Error(NullCellsPresent) if any cell is NULL.
  Matrix to_matrix() const;

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

 private:
  friend struct FeatureTableAccess;

  std::vector<std::string> row_names_;
  std::vector<std::optional<double>> cells_;
  std::optional<std::vector<ColumnStats>> column_stats_;
};

struct NullRowDrop {
  FeatureTable table;
  std::vector<std::string> dropped;
};

/// Keeps rows with no NULL cell, in order. Throws Error(EmptyResult) if none remain.
NullRowDrop drop_null_rows(const FeatureTable& table);

struct Standardized {
  FeatureTable table;
  /// Columns with zero spread; mapped to all zeros.
  std::vector<Pollutant> constant_columns;
};

/// z = (x - mean) / sigma per column, population sigma.
Standardized standardize(const FeatureTable& table);

/// CSV with header `region,NO2,SO2,CO,AER_AI,O3,HCHO`; an empty field is NULL.
FeatureTable read_table(std::string_view csv);
/// 12 significant digits, LF line endings; names are quoted when needed.
std::string write_table(const FeatureTable& table);

}  // namespace airshed
