#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "airshed/error.hpp"
#include "airshed/pipeline.hpp"
#include "airshed/signatures.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

namespace airshed {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("airshed_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fixture::Params two_groups() {
  fixture::Params p;
  p.region_cols = 3;
  p.region_rows = 2;
  p.archetypes = 2;
  p.region_noise = 0.02;
  p.seed = 3;
  return p;
}

PipelineConfig config_for(const fs::path& dir) {
  PipelineConfig c;
  c.scenes_dir = dir / "scenes";
  c.boundaries = dir / "boundaries.geojson";
  c.output_dir = dir / "out";
  return c;
}

std::vector<int> labels_in_truth_order(const PipelineSummary& s, const fixture::Truth& truth) {
  std::vector<int> out;
  for (const auto& name : truth.names) out.push_back(s.labels.at(name));
  return out;
}

TEST(Pipeline, TwoGroupsSelectTwoClusters) {
  const fs::path dir = fresh_dir("two_groups");
  const auto truth = fixture::generate(dir, two_groups());
  const auto summary = run_pipeline(config_for(dir));
  EXPECT_EQ(summary.selected_k, 2u);
  EXPECT_EQ(oracle::canonical(labels_in_truth_order(summary, truth)),
            oracle::canonical(truth.archetype));
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_EQ(report["selected_k"], 2);
  for (const char* file : {"table_raw.csv", "table_std.csv", "clusters.csv", "clusters.geojson",
                           "elbow.svg", "silhouette.svg", "signatures.svg", "map.svg",
                           "report.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / file)) << file;
  const auto from_csv = read_labels(slurp(dir / "out" / "clusters.csv"));
  EXPECT_EQ(from_csv, summary.labels);
}

TEST(Pipeline, DbscanFindsTheSameGroups) {
  const fs::path dir = fresh_dir("dbscan");
  const auto truth = fixture::generate(dir, two_groups());
  auto config = config_for(dir);
  config.algorithm = Algorithm::DBSCAN;
  const auto summary = run_pipeline(config);
  EXPECT_TRUE(summary.noise.empty());
  EXPECT_EQ(oracle::canonical(labels_in_truth_order(summary, truth)),
            oracle::canonical(truth.archetype));

  // The same grouping from the from-definition reference on the standardized table.
  const auto table = read_table(slurp(dir / "out" / "table_std.csv"));
  oracle::Points points;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    points.emplace_back();
    for (std::size_t c = 0; c < 6; ++c) points.back().push_back(*table.cell(r, c));
  }
  EXPECT_EQ(oracle::canonical(oracle::naive_dbscan(points, 1.7, 3)),
            oracle::canonical(truth.archetype));
}

TEST(Pipeline, PointGeometryFailsInGeometryStage) {
  const fs::path dir = fresh_dir("point");
  fixture::generate(dir, two_groups());
  std::ofstream(dir / "boundaries.geojson")
      << R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{"name":"P"},)"
      << R"("geometry":{"type":"Point","coordinates":[70.5,8.5]}}]})";
  try {
    run_pipeline(config_for(dir));
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "geometry");
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedGeometryType);
    const auto j = nlohmann::json::parse(error_json(e, e.stage()));
    EXPECT_EQ(j["error"]["stage"], "geometry");
    EXPECT_EQ(j["error"]["exit_code"], 3);
  }
}

TEST(Pipeline, EveryRegionAccountedForAndGeometryPreserved) {
  const fs::path dir = fresh_dir("accounting");
  auto params = two_groups();
  params.outside_region = true;
  fixture::generate(dir, params);
  auto config = config_for(dir);
  config.k = 2;
  const auto summary = run_pipeline(config);
  EXPECT_EQ(summary.dropped, (std::vector<std::string>{"Offshore"}));

  const auto input = nlohmann::json::parse(slurp(dir / "boundaries.geojson"));
  const auto output = nlohmann::json::parse(slurp(dir / "out" / "clusters.geojson"));
  const auto labels = read_labels(slurp(dir / "out" / "clusters.csv"));
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  const auto dropped = report["dropped_rows"].get<std::vector<std::string>>();
  ASSERT_EQ(input["features"].size(), output["features"].size());
  for (std::size_t i = 0; i < input["features"].size(); ++i) {
    const auto& in = input["features"][i];
    const auto& out = output["features"][i];
    EXPECT_EQ(in["geometry"], out["geometry"]);
    const std::string name = in["properties"]["name"];
    EXPECT_EQ(out["properties"]["name"], name);
    const bool labelled = labels.count(name) == 1;
    const bool was_dropped = std::count(dropped.begin(), dropped.end(), name) == 1;
    EXPECT_NE(labelled, was_dropped) << name;
    if (labelled) {
      EXPECT_EQ(out["properties"]["cluster"], labels.at(name));
    } else {
      EXPECT_TRUE(out["properties"]["cluster"].is_null());
    }
  }
}

TEST(Pipeline, RerunIsByteIdentical) {
  const fs::path dir = fresh_dir("rerun");
  fixture::generate(dir, two_groups());
  auto config = config_for(dir);
  run_pipeline(config);
  config.output_dir = dir / "again";
  config.threads = 3;
  run_pipeline(config);
  for (const auto& entry : fs::directory_iterator(dir / "out"))
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "again" / entry.path().filename()))
        << entry.path().filename();
}

TEST(Config, ParsesAndResolvesRelativePaths) {
  const auto c = parse_config(
      R"({"scenes_dir":"scenes","boundaries":"/abs/b.geojson","k_range":[3,9],"algorithm":"ward",)"
      R"("qa_overrides":{"NO2":0.5,"AER_AI":null},"seed":12,"dbscan_eps":2.5})",
      "/base");
  EXPECT_EQ(c.scenes_dir, fs::path("/base/scenes"));
  EXPECT_EQ(c.boundaries, fs::path("/abs/b.geojson"));
  EXPECT_EQ(c.k_min, 3u);
  EXPECT_EQ(c.k_max, 9u);
  EXPECT_EQ(c.algorithm, Algorithm::Ward);
  EXPECT_EQ(c.qa_overrides.at(Pollutant::NO2), 0.5);
  EXPECT_EQ(c.qa_overrides.at(Pollutant::AER_AI), std::nullopt);
  EXPECT_EQ(c.seed, 12u);
  EXPECT_EQ(c.dbscan_eps, 2.5);
  EXPECT_EQ(c.dbscan_min_pts, 3u);
  EXPECT_FALSE(c.k);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  for (const char* text : {R"({"scenes":"x"})", R"({"k":"five"})", R"({"algorithm":"spectral"})",
                           R"({"k_range":[5]})", "[1,2]"}) {
    try {
      parse_config(text, "/");
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigError) << text;
      EXPECT_EQ(static_cast<int>(e.category()), 2);
    }
  }
}

TEST(Labels, RoundTrip) {
  const std::vector<std::string> names = {"A", "B, C", "D"};
  const auto labels = read_labels(write_labels(names, {0, kNoise, 1}));
  EXPECT_EQ(labels.at("B, C"), kNoise);
  EXPECT_EQ(labels.at("D"), 1);
}

}  // namespace
}  // namespace airshed
