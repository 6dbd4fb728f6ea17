#pragma once

// Synthetic scene + boundary generator: square regions laid out on a grid,
// each drawn from one of a few pollution archetypes, observed through several
// noisy scenes per pollutant with missing pixels and qa bands.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "airshed/pollutant.hpp"
#include "airshed/raster.hpp"

namespace fixture {

struct Params {
  std::size_t region_cols = 6;
  std::size_t region_rows = 5;
  std::size_t archetypes = 5;
  std::size_t cells_per_region = 4;  ///< per side
  std::size_t scenes_per_pollutant = 4;
  double missing_fraction = 0.1;
  double region_noise = 0.08;  ///< in archetype units
  double cell_noise = 0.05;
  bool outside_region = false;  ///< add a region with no grid coverage
  std::uint64_t seed = 7;
};

struct Truth {
  std::vector<std::string> names;  ///< in boundary-file order (grid regions only)
  std::vector<int> archetype;      ///< aligned with names
};

inline constexpr double kBase[6] = {5e-5, 5e-5, 0.035, -1.2, 0.117, 1.5e-4};
inline constexpr double kScale[6] = {1e-5, 2e-5, 0.002, 0.05, 0.0005, 2e-5};

inline double archetype_value(std::size_t a, std::size_t p) {
  return 0.35 * static_cast<double>(a) + (p == a % 6 ? 2.5 : 0.0);
}

inline Truth generate(const std::filesystem::path& dir, const Params& params) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "scenes");
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t nregions = params.region_cols * params.region_rows;
  Truth truth;
  std::vector<std::size_t> assignment(nregions);
  for (std::size_t r = 0; r < nregions; ++r) assignment[r] = r % params.archetypes;
  std::shuffle(assignment.begin(), assignment.end(), rng);

  // Per-region latent profile.
  std::vector<std::array<double, 6>> profile(nregions);
  for (std::size_t r = 0; r < nregions; ++r) {
    for (std::size_t p = 0; p < 6; ++p) {
      profile[r][p] = archetype_value(assignment[r], p) + params.region_noise * normal(rng);
    }
  }

  const double cell = 1.0 / static_cast<double>(params.cells_per_region);
  airshed::GridGeometry g;
  g.ncols = params.region_cols * params.cells_per_region;
  g.nrows = params.region_rows * params.cells_per_region;
  g.x_origin = 70.0;
  g.y_origin = 8.0;
  g.cell_size = cell;

  nlohmann::json features = nlohmann::json::array();
  for (std::size_t rr = 0; rr < params.region_rows; ++rr) {
    for (std::size_t rc = 0; rc < params.region_cols; ++rc) {
      const std::size_t r = rr * params.region_cols + rc;
      const std::string name = fmt::format("Region {:02}", r);
      truth.names.push_back(name);
      truth.archetype.push_back(static_cast<int>(assignment[r]));
      const double x0 = g.x_origin + static_cast<double>(rc);
      const double y0 = g.y_origin + static_cast<double>(rr);
      features.push_back({{"type", "Feature"},
                          {"properties", {{"name", name}}},
                          {"geometry",
                           {{"type", "Polygon"},
                            {"coordinates",
                             {{{x0, y0}, {x0 + 1, y0}, {x0 + 1, y0 + 1}, {x0, y0 + 1}, {x0, y0}}}}}}});
    }
  }
  if (params.outside_region) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"name", "Offshore"}}},
                        {"geometry",
                         {{"type", "Polygon"},
                          {"coordinates", {{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}}}}}});
  }
  std::ofstream(dir / "boundaries.geojson")
      << nlohmann::json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) << "\n";

  for (std::size_t p = 0; p < 6; ++p) {
    const airshed::Pollutant pollutant = airshed::kCanonicalPollutants[p];
    const bool has_qa = pollutant != airshed::Pollutant::O3;
    for (std::size_t s = 0; s < params.scenes_per_pollutant; ++s) {
      const std::string date = fmt::format("2019-{:02}-15", s + 1);
      airshed::Grid data(g);
      airshed::Grid qa(g);
      for (std::size_t row = 0; row < g.nrows; ++row) {
        for (std::size_t col = 0; col < g.ncols; ++col) {
          const std::size_t i = row * g.ncols + col;
          const std::size_t r = (row / params.cells_per_region) * params.region_cols +
                                col / params.cells_per_region;
          const double z = profile[r][p] + params.cell_noise * normal(rng);
          if (unit(rng) >= params.missing_fraction) data.set(i, kBase[p] + kScale[p] * z);
          if (unit(rng) >= 0.05) qa.set(i, 0.4 + 0.6 * unit(rng));
        }
      }
      airshed::write_grid_file(dir / "scenes" / airshed::scene_file_name(pollutant, date, false), data);
      if (has_qa) {
        airshed::write_grid_file(dir / "scenes" / airshed::scene_file_name(pollutant, date, true), qa);
      }
    }
  }
  return truth;
}

}  // namespace fixture
