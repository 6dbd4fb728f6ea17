#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airshed/feature_table.hpp"
#include "airshed/pollutant.hpp"
#include "airshed/raster.hpp"

namespace airshed {

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
  friend bool operator==(const LonLat&, const LonLat&) = default;
};

/// Closed ring: first vertex repeated as last, at least 4 vertices.
using Ring = std::vector<LonLat>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

/// Named administrative area, possibly multi-part.
struct Region {
  std::string name;
  std::vector<Polygon> polygons;
};

struct RegionSet {
  std::vector<Region> regions;
  std::vector<std::string> warnings;
};

/// GeoJSON FeatureCollection of Polygon / MultiPolygon features. Unclosed
/// rings are closed with a warning; self-intersecting rings are rejected.
RegionSet parse_regions(std::string_view geojson, std::string_view name_property = "name");

/// Even-odd crossing test against one ring, with the half-open rule: a point
/// on an edge shared by two rings counts for exactly one of them.
bool point_in_ring(LonLat p, std::span<const LonLat> ring) noexcept;
bool point_in_polygon(LonLat p, const Polygon& polygon) noexcept;
bool point_in_region(LonLat p, const Region& region) noexcept;

/// Indices of the grid cells whose centers fall inside the region, ascending.
std::vector<std::size_t> covered_cells(const GridGeometry& geometry, const Region& region);

/// Mean of non-MISSING cells with centers inside the region; nullopt if none.
std::optional<double> zonal_mean(const Grid& grid, const Region& region);

/// One row per region (input order), canonical pollutant columns.
FeatureTable build_feature_table(const std::map<Pollutant, Grid>& composites,
                                 std::span<const Region> regions);

}  // namespace airshed
