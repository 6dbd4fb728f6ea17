#include "airshed/feature_table.hpp"

#include <fmt/format.h>

#include <cmath>

#include "airshed/error.hpp"
#include "text_util.hpp"

namespace airshed {

struct FeatureTableAccess {
  static void set_stats(FeatureTable& t, std::vector<ColumnStats> stats) {
    t.column_stats_ = std::move(stats);
  }
};

FeatureTable::FeatureTable(std::vector<std::string> row_names,
                           std::vector<std::optional<double>> cells)
    : row_names_(std::move(row_names)), cells_(std::move(cells)) {
  if (cells_.size() != row_names_.size() * cols()) {
    throw Error(ErrorCode::RaggedRow,
                fmt::format("table has {} rows but {} cells", row_names_.size(), cells_.size()));
  }
}

bool FeatureTable::row_has_null(std::size_t row) const noexcept {
  for (std::size_t c = 0; c < cols(); ++c) {
    if (!cell(row, c)) return true;
  }
  return false;
}

bool FeatureTable::has_nulls() const noexcept {
  for (const auto& v : cells_) {
    if (!v) return true;
  }
  return false;
}

Matrix FeatureTable::to_matrix() const {
  if (has_nulls()) throw Error(ErrorCode::NullCellsPresent, "table contains NULL cells");
  std::vector<double> data;
  data.reserve(cells_.size());
  for (const auto& v : cells_) data.push_back(*v);
  return Matrix(rows(), cols(), std::move(data));
}

NullRowDrop drop_null_rows(const FeatureTable& table) {
  std::vector<std::string> names;
  std::vector<std::optional<double>> cells;
  std::vector<std::string> dropped;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.row_has_null(r)) {
      dropped.push_back(table.row_names()[r]);
      continue;
    }
    names.push_back(table.row_names()[r]);
    for (std::size_t c = 0; c < table.cols(); ++c) cells.push_back(table.cell(r, c));
  }
  if (names.empty()) {
    throw Error(ErrorCode::EmptyResult, "every row contains a NULL cell");
  }
  return {FeatureTable(std::move(names), std::move(cells)), std::move(dropped)};
}

Standardized standardize(const FeatureTable& table) {
  if (table.has_nulls()) {
    throw Error(ErrorCode::NullCellsPresent, "cannot standardize a table with NULL cells");
  }
  const std::size_t n = table.rows();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "standardization needs at least 2 rows");

  std::vector<ColumnStats> stats(table.cols());
  std::vector<Pollutant> constant;
  std::vector<std::optional<double>> cells(n * table.cols());
  for (std::size_t c = 0; c < table.cols(); ++c) {
    detail::ShiftedMean mean;
    for (std::size_t r = 0; r < n; ++r) mean.add(*table.cell(r, c));
    const double mu = mean.value();
    // The rounded mean can be off by half an ulp, which is large relative to
    // a tight column's spread; a second pass over the residuals recovers it.
    double residual = 0.0;
    for (std::size_t r = 0; r < n; ++r) residual += *table.cell(r, c) - mu;
    const double correction = residual / static_cast<double>(n);
    std::vector<double> deviation(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      deviation[r] = (*table.cell(r, c) - mu) - correction;
      ss += deviation[r] * deviation[r];
    }
    const double sigma = std::sqrt(ss / static_cast<double>(n));
    stats[c] = {mu + correction, sigma};
    if (sigma == 0.0) constant.push_back(table.columns()[c]);
    for (std::size_t r = 0; r < n; ++r) {
      cells[r * table.cols() + c] = sigma == 0.0 ? 0.0 : deviation[r] / sigma;
    }
  }
  FeatureTable out(table.row_names(), std::move(cells));
  FeatureTableAccess::set_stats(out, std::move(stats));
  return {std::move(out), std::move(constant)};
}

namespace {

// RFC 4180 style field splitting for one line (no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::RaggedRow, fmt::format("line {}: unterminated quote", line_no));
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string expected_header() {
  std::string header = "region";
  for (Pollutant p : kCanonicalPollutants) {
    header += ',';
    header += to_string(p);
  }
  return header;
}

}  // namespace

FeatureTable read_table(std::string_view csv) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = csv.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = eol + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != expected_header()) {
    throw Error(ErrorCode::HeaderMismatch,
                fmt::format("expected header '{}'", expected_header()));
  }

  const std::size_t width = kCanonicalPollutants.size() + 1;
  std::vector<std::string> names;
  std::vector<std::optional<double>> cells;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_csv_line(lines[i], i + 1);
    if (fields.size() != width) {
      throw Error(ErrorCode::RaggedRow, fmt::format("line {}: expected {} fields, got {}", i + 1,
                                                    width, fields.size()));
    }
    names.push_back(std::move(fields[0]));
    for (std::size_t c = 1; c < width; ++c) {
      const std::string_view f = detail::trim(fields[c]);
      if (f.empty()) {
        cells.emplace_back(std::nullopt);
        continue;
      }
      auto v = detail::parse_real(f);
      if (!v) {
        throw Error(ErrorCode::NonNumericField,
                    fmt::format("line {}: '{}' is not a number", i + 1, f));
      }
      cells.emplace_back(*v);
    }
  }
  return FeatureTable(std::move(names), std::move(cells));
}

std::string write_table(const FeatureTable& table) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "{}\n", expected_header());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    fmt::format_to(std::back_inserter(out), "{}", quote_if_needed(table.row_names()[r]));
    for (std::size_t c = 0; c < table.cols(); ++c) {
      out.push_back(',');
      if (auto v = table.cell(r, c)) fmt::format_to(std::back_inserter(out), "{:.12g}", *v);
    }
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

}  // namespace airshed
