#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airshed/pollutant.hpp"

namespace airshed {

/// Placement of a regular lat/lon raster. (0,0) is the lower-left cell.
struct GridGeometry {
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  double x_origin = 0.0;  ///< longitude of the lower-left corner
  double y_origin = 0.0;  ///< latitude of the lower-left corner
  double cell_size = 0.0;

  std::size_t size() const noexcept { return ncols * nrows; }
  double center_x(std::size_t col) const noexcept {
    return x_origin + (static_cast<double>(col) + 0.5) * cell_size;
  }
  double center_y(std::size_t row) const noexcept {
    return y_origin + (static_cast<double>(row) + 0.5) * cell_size;
  }
  /// Same shape and placement, with origins and cell size equal to within
  /// 1e-9 of a cell.
  bool matches(const GridGeometry& other) const noexcept;
};

/// One raster band. Cells are either a finite value or MISSING; MISSING is
/// tracked in a separate mask and never encoded as a number.
class Grid {
 public:
  Grid() = default;
  /// All cells MISSING.
  explicit Grid(GridGeometry geometry);
  /// Throws Error(DimensionMismatch) on a size mismatch and
  /// Error(NonNumericCell) when a present value is not finite.
  Grid(GridGeometry geometry, std::vector<std::optional<double>> cells);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::size_t ncols() const noexcept { return geometry_.ncols; }
  std::size_t nrows() const noexcept { return geometry_.nrows; }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(std::size_t row, std::size_t col) const noexcept {
    return row * geometry_.ncols + col;
  }
  bool is_missing(std::size_t i) const noexcept { return valid_[i] == 0; }
  std::optional<double> at(std::size_t i) const noexcept {
    if (valid_[i] == 0) return std::nullopt;
    return values_[i];
  }
  std::optional<double> at(std::size_t row, std::size_t col) const noexcept {
    return at(index(row, col));
  }
  /// Raw storage; entries under a MISSING mask are unspecified.
  std::span<const double> raw_values() const noexcept { return values_; }

  void set(std::size_t i, double value);
  void set_missing(std::size_t i) noexcept { valid_[i] = 0; values_[i] = 0.0; }

  std::size_t valid_count() const noexcept;

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  GridGeometry geometry_{};
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

struct Scene {
  Pollutant pollutant = Pollutant::NO2;
  std::string date;  ///< YYYY-MM-DD
  Grid data;
  std::optional<Grid> qa;
};

/// Validates the scene invariants: qa georeference equals data and every
/// present qa value lies in [0, 1].
Scene make_scene(Pollutant pollutant, std::string date, Grid data,
                 std::optional<Grid> qa);

/// Keep-if `qa >= threshold`; std::nullopt disables filtering.
struct QaPolicy {
  std::map<Pollutant, std::optional<double>> thresholds;

  static QaPolicy defaults();
  std::optional<double> threshold(Pollutant p) const;
};

constexpr double kDefaultNoData = -9999.0;

/// ESRI ASCII grid. Header keys are case-insensitive; NODATA_value defaults to
/// -9999. The first data row in the text is the top (northernmost) row.
Grid parse_grid(std::string_view text);
Grid read_grid_file(const std::filesystem::path& path);

/// Writes the same format with 9 significant digits, MISSING as NODATA.
std::string serialize_grid(const Grid& grid, double nodata = kDefaultNoData);
void write_grid_file(const std::filesystem::path& path, const Grid& grid);

Grid qa_filter(const Scene& scene, const QaPolicy& policy);

/// Per-cell mean over the non-MISSING values of all inputs.
Grid composite_mean(std::span<const Grid> grids);

/// Parsed `<pollutant>_<YYYY-MM-DD>[_qa].asc` file name.
struct SceneFileName {
  Pollutant pollutant;
  std::string date;
  bool is_qa = false;
};
std::optional<SceneFileName> parse_scene_file_name(std::string_view name);
std::string scene_file_name(Pollutant p, std::string_view date, bool is_qa);

/// Loads every scene file in a directory, pairing data and qa bands. Files
/// that do not follow the naming convention are ignored. Scenes come back
/// sorted by (pollutant, date).
std::vector<Scene> load_scene_directory(const std::filesystem::path& dir);

/// QA-filters and composites scenes per pollutant.
std::map<Pollutant, Grid> composite_scenes(std::span<const Scene> scenes,
                                           const QaPolicy& policy);

}  // namespace airshed
