#include "airshed/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "airshed/error.hpp"
#include "airshed/parallel.hpp"
#include "text_util.hpp"

namespace airshed {

namespace {

using nlohmann::json;

double orient(LonLat a, LonLat b, LonLat c) noexcept {
  return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

bool on_segment(LonLat a, LonLat b, LonLat p) noexcept {
  return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
         std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

// Closed-segment intersection, touching included.
bool segments_intersect(LonLat p1, LonLat p2, LonLat q1, LonLat q2) noexcept {
  const int d1 = sign(orient(q1, q2, p1));
  const int d2 = sign(orient(q1, q2, p2));
  const int d3 = sign(orient(p1, p2, q1));
  const int d4 = sign(orient(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

// Sweep over edges sorted by min longitude; only x-overlapping pairs are tested.
bool ring_self_intersects(const Ring& ring) {
  std::vector<LonLat> v;
  v.reserve(ring.size());
  for (const LonLat& p : ring) {
    if (v.empty() || !(v.back() == p)) v.push_back(p);
  }
  if (v.size() > 1 && v.front() == v.back()) v.pop_back();
  const std::size_t m = v.size();
  if (m < 3) return true;

  auto edge = [&](std::size_t i) { return std::pair{v[i], v[(i + 1) % m]}; };

  // Back-tracking spikes between consecutive edges.
  for (std::size_t i = 0; i < m; ++i) {
    const LonLat a = v[i], b = v[(i + 1) % m], c = v[(i + 2) % m];
    if (orient(a, b, c) == 0.0) {
      const double dot = (a.lon - b.lon) * (c.lon - b.lon) + (a.lat - b.lat) * (c.lat - b.lat);
      if (dot > 0.0) return true;
    }
  }

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  auto min_x = [&](std::size_t i) { return std::min(v[i].lon, v[(i + 1) % m].lon); };
  auto max_x = [&](std::size_t i) { return std::max(v[i].lon, v[(i + 1) % m].lon); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return min_x(a) < min_x(b) || (min_x(a) == min_x(b) && a < b);
  });
  for (std::size_t oi = 0; oi < m; ++oi) {
    const std::size_t i = order[oi];
    const double xmax = max_x(i);
    for (std::size_t oj = oi + 1; oj < m && min_x(order[oj]) <= xmax; ++oj) {
      const std::size_t j = order[oj];
      const std::size_t lo = std::min(i, j), hi = std::max(i, j);
      if (hi == lo + 1 || (lo == 0 && hi == m - 1)) continue;  // adjacent
      const auto [p1, p2] = edge(i);
      const auto [q1, q2] = edge(j);
      if (segments_intersect(p1, p2, q1, q2)) return true;
    }
  }
  return false;
}

Ring parse_ring(const json& coords, const std::string& region, std::vector<std::string>& warnings) {
  if (!coords.is_array()) {
    throw Error(ErrorCode::InvalidRing, fmt::format("{}: ring is not an array", region));
  }
  Ring ring;
  ring.reserve(coords.size() + 1);
  for (const json& position : coords) {
    if (!position.is_array() || position.size() < 2 || !position[0].is_number() ||
        !position[1].is_number()) {
      throw Error(ErrorCode::InvalidRing, fmt::format("{}: bad coordinate pair", region));
    }
    const LonLat p{position[0].get<double>(), position[1].get<double>()};
    if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
      throw Error(ErrorCode::InvalidRing, fmt::format("{}: non-finite coordinate", region));
    }
    ring.push_back(p);
  }
  if (!ring.empty() && !(ring.front() == ring.back())) {
    warnings.push_back(fmt::format("{}: ring was not closed; closing it", region));
    ring.push_back(ring.front());
  }
  if (ring.size() < 4) {
    throw Error(ErrorCode::InvalidRing,
                fmt::format("{}: ring has {} vertices, need at least 4", region, ring.size()));
  }
  if (ring_self_intersects(ring)) {
    throw Error(ErrorCode::SelfIntersectingRing, fmt::format("{}: ring self-intersects", region));
  }
  return ring;
}

Polygon parse_polygon(const json& coords, const std::string& region,
                      std::vector<std::string>& warnings) {
  if (!coords.is_array() || coords.empty()) {
    throw Error(ErrorCode::InvalidRing, fmt::format("{}: polygon has no rings", region));
  }
  Polygon polygon;
  polygon.outer = parse_ring(coords[0], region, warnings);
  for (std::size_t i = 1; i < coords.size(); ++i) {
    polygon.holes.push_back(parse_ring(coords[i], region, warnings));
  }
  return polygon;
}

}  // namespace

RegionSet parse_regions(std::string_view geojson, std::string_view name_property) {
  json doc = json::parse(geojson.begin(), geojson.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorCode::NotAFeatureCollection, "input is not a GeoJSON FeatureCollection");
  }

  RegionSet out;
  std::set<std::string> seen;
  const std::string key(name_property);
  std::size_t index = 0;
  for (const json& feature : doc["features"]) {
    ++index;
    const json* props = feature.contains("properties") ? &feature["properties"] : nullptr;
    if (props == nullptr || !props->is_object() || !props->contains(key) ||
        !(*props)[key].is_string() || (*props)[key].get<std::string>().empty()) {
      throw Error(ErrorCode::MissingNameProperty,
                  fmt::format("feature {} has no string property '{}'", index, key));
    }
    Region region;
    region.name = (*props)[key].get<std::string>();
    if (!seen.insert(region.name).second) {
      throw Error(ErrorCode::DuplicateRegionName,
                  fmt::format("duplicate region name '{}'", region.name));
    }

    const json* geometry = feature.contains("geometry") ? &feature["geometry"] : nullptr;
    const std::string type =
        geometry && geometry->is_object() ? geometry->value("type", "") : std::string("null");
    if (type != "Polygon" && type != "MultiPolygon") {
      throw Error(ErrorCode::UnsupportedGeometryType,
                  fmt::format("{}: unsupported geometry type '{}'", region.name, type));
    }
    const json& coords = (*geometry)["coordinates"];
    if (type == "Polygon") {
      region.polygons.push_back(parse_polygon(coords, region.name, out.warnings));
    } else {
      if (!coords.is_array() || coords.empty()) {
        throw Error(ErrorCode::InvalidRing, fmt::format("{}: empty MultiPolygon", region.name));
      }
      for (const json& part : coords) {
        region.polygons.push_back(parse_polygon(part, region.name, out.warnings));
      }
    }
    out.regions.push_back(std::move(region));
  }
  return out;
}

bool point_in_ring(LonLat p, std::span<const LonLat> ring) noexcept {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    LonLat a = ring[i];
    LonLat b = ring[i + 1];
    if ((a.lat > p.lat) == (b.lat > p.lat)) continue;
    // Same arithmetic regardless of traversal direction, so neighbouring
    // rings agree on which side of a shared edge a point lies.
    if (b.lat < a.lat || (b.lat == a.lat && b.lon < a.lon)) std::swap(a, b);
    const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
    if (p.lon < x) inside = !inside;
  }
  return inside;
}

bool point_in_polygon(LonLat p, const Polygon& polygon) noexcept {
  if (!point_in_ring(p, polygon.outer)) return false;
  for (const Ring& hole : polygon.holes) {
    if (point_in_ring(p, hole)) return false;
  }
  return true;
}

bool point_in_region(LonLat p, const Region& region) noexcept {
  for (const Polygon& polygon : region.polygons) {
    if (point_in_polygon(p, polygon)) return true;
  }
  return false;
}

std::vector<std::size_t> covered_cells(const GridGeometry& g, const Region& region) {
  std::vector<std::size_t> cells;
  for (const Polygon& polygon : region.polygons) {
    double min_lon = polygon.outer.front().lon, max_lon = min_lon;
    double min_lat = polygon.outer.front().lat, max_lat = min_lat;
    for (const LonLat& v : polygon.outer) {
      min_lon = std::min(min_lon, v.lon);
      max_lon = std::max(max_lon, v.lon);
      min_lat = std::min(min_lat, v.lat);
      max_lat = std::max(max_lat, v.lat);
    }
    // Candidate index ranges, padded by one cell; membership is decided below.
    auto to_index = [](double v, std::size_t n) -> std::ptrdiff_t {
      if (v < 0.0) return -1;
      if (v >= static_cast<double>(n)) return static_cast<std::ptrdiff_t>(n);
      return static_cast<std::ptrdiff_t>(v);
    };
    const std::ptrdiff_t c0 =
        std::max<std::ptrdiff_t>(0, to_index((min_lon - g.x_origin) / g.cell_size - 0.5, g.ncols) - 1);
    const std::ptrdiff_t c1 = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(g.ncols) - 1,
        to_index((max_lon - g.x_origin) / g.cell_size - 0.5, g.ncols) + 1);
    const std::ptrdiff_t r0 =
        std::max<std::ptrdiff_t>(0, to_index((min_lat - g.y_origin) / g.cell_size - 0.5, g.nrows) - 1);
    const std::ptrdiff_t r1 = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(g.nrows) - 1,
        to_index((max_lat - g.y_origin) / g.cell_size - 0.5, g.nrows) + 1);
    for (std::ptrdiff_t r = r0; r <= r1; ++r) {
      for (std::ptrdiff_t c = c0; c <= c1; ++c) {
        const LonLat center{g.center_x(static_cast<std::size_t>(c)),
                            g.center_y(static_cast<std::size_t>(r))};
        if (point_in_polygon(center, polygon)) {
          cells.push_back(static_cast<std::size_t>(r) * g.ncols + static_cast<std::size_t>(c));
        }
      }
    }
  }
  // Parts of a valid MultiPolygon do not overlap, but be exact about it.
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

namespace {

std::optional<double> mean_over(const Grid& grid, std::span<const std::size_t> cells) {
  detail::ShiftedMean mean;
  for (std::size_t i : cells) {
    if (auto v = grid.at(i)) mean.add(*v);
  }
  if (mean.count() == 0) return std::nullopt;
  return mean.value();
}

}  // namespace

std::optional<double> zonal_mean(const Grid& grid, const Region& region) {
  return mean_over(grid, covered_cells(grid.geometry(), region));
}

FeatureTable build_feature_table(const std::map<Pollutant, Grid>& composites,
                                 std::span<const Region> regions) {
  std::vector<const Grid*> grids;
  for (Pollutant p : kCanonicalPollutants) {
    auto it = composites.find(p);
    if (it == composites.end()) {
      throw Error(ErrorCode::MissingPollutant,
                  fmt::format("no composite for pollutant {}", to_string(p)));
    }
    grids.push_back(&it->second);
  }
  const GridGeometry& geometry = grids.front()->geometry();
  for (const Grid* g : grids) {
    if (!g->geometry().matches(geometry)) {
      throw Error(ErrorCode::GeoreferenceMismatch, "composites do not share georeferencing");
    }
  }

  const std::size_t width = grids.size();
  std::vector<std::optional<double>> cells(regions.size() * width);
  parallel_for(regions.size(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto covered = covered_cells(geometry, regions[r]);
      for (std::size_t c = 0; c < width; ++c) cells[r * width + c] = mean_over(*grids[c], covered);
    }
  });

  std::vector<std::string> names;
  names.reserve(regions.size());
  for (const Region& region : regions) names.push_back(region.name);
  return FeatureTable(std::move(names), std::move(cells));
}

}  // namespace airshed
