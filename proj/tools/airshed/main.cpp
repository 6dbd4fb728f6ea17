// airshed: satellite pollution clustering pipeline.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "airshed/clustering.hpp"
#include "airshed/feature_table.hpp"
#include "airshed/geometry.hpp"
#include "airshed/model_selection.hpp"
#include "airshed/pipeline.hpp"
#include "airshed/raster.hpp"
#include "airshed/signatures.hpp"
#include "airshed/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw airshed::Error(airshed::ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw airshed::Error(airshed::ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

int fail(const airshed::Error& e, std::string_view stage) {
  std::cerr << airshed::error_json(e, stage) << "\n";
  return static_cast<int>(e.category());
}

// "NO2=0.7" or "O3=none"
void apply_qa_override(std::map<airshed::Pollutant, std::optional<double>>& out,
                       const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto p = eq == std::string::npos ? std::nullopt : airshed::parse_pollutant(assignment.substr(0, eq));
  if (!p) throw airshed::Error(airshed::ErrorCode::ConfigError, "bad --qa value '" + assignment + "'");
  const std::string value = assignment.substr(eq + 1);
  if (value == "none") {
    out[*p] = std::nullopt;
    return;
  }
  char* end = nullptr;
  const double t = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || t < 0.0 || t > 1.0) {
    throw airshed::Error(airshed::ErrorCode::ConfigError, "bad --qa threshold '" + assignment + "'");
  }
  out[*p] = t;
}

airshed::Algorithm algorithm_or_throw(const std::string& name) {
  const auto a = airshed::parse_algorithm(name);
  if (!a) throw airshed::Error(airshed::ErrorCode::ConfigError, "unknown algorithm '" + name + "'");
  return *a;
}

struct RunArgs {
  std::string config;
  std::string scenes, boundaries, out, name_property, algorithm;
  std::optional<std::size_t> k, k_min, k_max, min_pts, threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::vector<std::string> qa;
};

int cmd_run(const RunArgs& a) {
  airshed::PipelineConfig config;
  try {
    if (!a.config.empty()) config = airshed::load_config(a.config);
    if (!a.scenes.empty()) config.scenes_dir = a.scenes;
    if (!a.boundaries.empty()) config.boundaries = a.boundaries;
    if (!a.out.empty()) config.output_dir = a.out;
    if (!a.name_property.empty()) config.name_property = a.name_property;
    if (!a.algorithm.empty()) config.algorithm = algorithm_or_throw(a.algorithm);
    if (a.k) config.k = *a.k;
    if (a.k_min) config.k_min = *a.k_min;
    if (a.k_max) config.k_max = *a.k_max;
    if (a.seed) config.seed = *a.seed;
    if (a.eps) config.dbscan_eps = *a.eps;
    if (a.min_pts) config.dbscan_min_pts = *a.min_pts;
    if (a.threads) config.threads = *a.threads;
    for (const auto& q : a.qa) apply_qa_override(config.qa_overrides, q);
  } catch (const airshed::Error& e) {
    return fail(e, "config");
  }
  try {
    const auto summary = airshed::run_pipeline(config);
    json j = {{"selected_k", summary.selected_k},
              {"regions", summary.regions},
              {"dropped", summary.dropped},
              {"noise", summary.noise},
              {"output_dir", config.output_dir.string()}};
    std::cout << j.dump() << "\n";
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
  } catch (const airshed::StageError& e) {
    return fail(e, e.stage());
  }
}

int cmd_composite(const std::string& scenes, const std::string& out,
                  const std::vector<std::string>& qa) {
  try {
    airshed::QaPolicy policy = airshed::QaPolicy::defaults();
    std::map<airshed::Pollutant, std::optional<double>> overrides;
    for (const auto& q : qa) apply_qa_override(overrides, q);
    for (const auto& [p, t] : overrides) policy.thresholds[p] = t;
    const auto loaded = airshed::load_scene_directory(scenes);
    if (loaded.empty()) throw airshed::Error(airshed::ErrorCode::EmptyInput, "no scene files found");
    const auto composites = airshed::composite_scenes(loaded, policy);
    fs::create_directories(out);
    for (const auto& [p, grid] : composites) {
      const fs::path file = fs::path(out) / fmt::format("{}.asc", airshed::to_string(p));
      airshed::write_grid_file(file, grid);
      std::cout << file.string() << "\n";
    }
    return 0;
  } catch (const airshed::Error& e) {
    return fail(e, "composite");
  }
}

int cmd_table(const std::string& composites_dir, const std::string& boundaries,
              const std::string& name_property, const std::string& out) {
  try {
    std::map<airshed::Pollutant, airshed::Grid> composites;
    for (airshed::Pollutant p : airshed::kCanonicalPollutants) {
      const fs::path file = fs::path(composites_dir) / fmt::format("{}.asc", airshed::to_string(p));
      if (fs::exists(file)) composites.emplace(p, airshed::read_grid_file(file));
    }
    const auto regions = airshed::parse_regions(slurp(boundaries), name_property);
    for (const auto& w : regions.warnings) std::cerr << "warning: " << w << "\n";
    const auto table = airshed::build_feature_table(composites, regions.regions);
    spit(out, airshed::write_table(table));
    return 0;
  } catch (const airshed::Error& e) {
    return fail(e, "table");
  }
}

struct ClusterArgs {
  std::string table, out, algorithm = "kmeans";
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  double eps = 1.7;
  std::size_t min_pts = 3;
};

int cmd_cluster(const ClusterArgs& a) {
  try {
    const auto algorithm = algorithm_or_throw(a.algorithm);
    const auto cleaned = airshed::drop_null_rows(airshed::read_table(slurp(a.table)));
    const auto standardized = airshed::standardize(cleaned.table);
    const airshed::Matrix data = standardized.table.to_matrix();
    airshed::ClusterResult result;
    if (algorithm == airshed::Algorithm::DBSCAN) {
      result = airshed::dbscan(data, a.eps, a.min_pts);
    } else {
      if (!a.k) throw airshed::Error(airshed::ErrorCode::ConfigError, "--k is required");
      if (algorithm == airshed::Algorithm::Ward) {
        result = airshed::ward(data, *a.k);
      } else {
        airshed::KMeansOptions options;
        options.seed = a.seed;
        result = airshed::kmeans(data, *a.k, options);
      }
    }
    const auto signatures = airshed::compute_signatures(standardized.table, result);
    spit(a.out, airshed::write_labels(standardized.table.row_names(), signatures.semantic_labels));
    json j = {{"k", result.k}, {"dropped", cleaned.dropped}, {"noise", signatures.noise_members}};
    std::cout << j.dump() << "\n";
    return 0;
  } catch (const airshed::Error& e) {
    return fail(e, "cluster");
  }
}

int cmd_elbow(const std::string& table_path, std::size_t k_min, std::size_t k_max,
              std::uint64_t seed, const std::string& out) {
  try {
    const auto cleaned = airshed::drop_null_rows(airshed::read_table(slurp(table_path)));
    const airshed::Matrix data = airshed::standardize(cleaned.table).table.to_matrix();
    const std::size_t hi = std::min(k_max, data.rows() > 0 ? data.rows() - 1 : 0);
    const auto ks = airshed::k_range(k_min, hi);
    const auto distortion = airshed::sweep(data, ks, airshed::Metric::Distortion, seed);
    const auto silhouette = airshed::sweep(data, ks, airshed::Metric::Silhouette, seed);
    const auto selection = airshed::select_k(distortion, silhouette);
    if (!out.empty()) spit(out, airshed::render_elbow(distortion, &silhouette, selection.k));
    json j = {{"ks", distortion.ks},
              {"distortion", distortion.scores},
              {"silhouette", silhouette.scores},
              {"elbow_k", selection.elbow_k ? json(*selection.elbow_k) : json(nullptr)},
              {"silhouette_best_k", selection.silhouette_best_k},
              {"selected_k", selection.k}};
    std::cout << j.dump() << "\n";
    return 0;
  } catch (const airshed::Error& e) {
    return fail(e, "elbow");
  }
}

int cmd_render(const std::string& boundaries, const std::string& clusters,
               const std::string& name_property, const std::string& out) {
  try {
    const auto regions = airshed::parse_regions(slurp(boundaries), name_property);
    const auto labels = airshed::read_labels(slurp(clusters));
    spit(out, airshed::render_choropleth(regions.regions, labels));
    return 0;
  } catch (const airshed::Error& e) {
    return fail(e, "render");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airshed - cluster regions by satellite pollution signatures"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline");
  run_cmd->add_option("--config", run.config, "JSON config file");
  run_cmd->add_option("--scenes", run.scenes, "Directory of <POLLUTANT>_<YYYY-MM-DD>[_qa].asc files");
  run_cmd->add_option("--boundaries", run.boundaries, "GeoJSON FeatureCollection of regions");
  run_cmd->add_option("--name-property", run.name_property, "Feature property holding the region name");
  run_cmd->add_option("--k", run.k, "Fixed number of clusters (default: elbow selection)");
  run_cmd->add_option("--k-min", run.k_min, "Smallest k in the sweep (default 2)");
  run_cmd->add_option("--k-max", run.k_max, "Largest k in the sweep (default 15)");
  run_cmd->add_option("--algorithm", run.algorithm, "kmeans | ward | dbscan");
  run_cmd->add_option("--seed", run.seed, "K-Means seed");
  run_cmd->add_option("--eps", run.eps, "DBSCAN radius (default 1.7)");
  run_cmd->add_option("--min-pts", run.min_pts, "DBSCAN minimum neighbourhood size (default 3)");
  run_cmd->add_option("--threads", run.threads, "Worker threads");
  run_cmd->add_option("--qa", run.qa, "QA threshold override, e.g. NO2=0.7 or O3=none");
  run_cmd->add_option("--out", run.out, "Output directory");

  std::string scenes, composite_out;
  std::vector<std::string> qa;
  auto* composite_cmd = app.add_subcommand("composite", "QA-filter and composite scenes per pollutant");
  composite_cmd->add_option("--scenes", scenes, "Scene directory")->required();
  composite_cmd->add_option("--qa", qa, "QA threshold override, e.g. NO2=0.7 or O3=none");
  composite_cmd->add_option("--out", composite_out, "Output directory for <POLLUTANT>.asc")->required();

  std::string composites_dir, boundaries, table_out, name_property = "name";
  auto* table_cmd = app.add_subcommand("table", "Zonal means of composites per region");
  table_cmd->add_option("--composites", composites_dir, "Directory of <POLLUTANT>.asc")->required();
  table_cmd->add_option("--boundaries", boundaries, "GeoJSON FeatureCollection")->required();
  table_cmd->add_option("--name-property", name_property, "Feature property holding the region name");
  table_cmd->add_option("--out", table_out, "Output CSV")->required();

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster a feature table");
  cluster_cmd->add_option("--table", cluster.table, "Raw feature table CSV")->required();
  cluster_cmd->add_option("--algorithm", cluster.algorithm, "kmeans | ward | dbscan");
  cluster_cmd->add_option("--k", cluster.k, "Number of clusters (kmeans, ward)");
  cluster_cmd->add_option("--seed", cluster.seed, "K-Means seed");
  cluster_cmd->add_option("--eps", cluster.eps, "DBSCAN radius");
  cluster_cmd->add_option("--min-pts", cluster.min_pts, "DBSCAN minimum neighbourhood size");
  cluster_cmd->add_option("--out", cluster.out, "Output region,label CSV")->required();

  std::string elbow_table, elbow_out;
  std::size_t k_min = 2, k_max = 15;
  std::uint64_t elbow_seed = 0;
  auto* elbow_cmd = app.add_subcommand("elbow", "Sweep k and locate the elbow");
  elbow_cmd->add_option("--table", elbow_table, "Raw feature table CSV")->required();
  elbow_cmd->add_option("--k-min", k_min, "Smallest k");
  elbow_cmd->add_option("--k-max", k_max, "Largest k");
  elbow_cmd->add_option("--seed", elbow_seed, "K-Means seed");
  elbow_cmd->add_option("--out", elbow_out, "Optional SVG plot");

  std::string render_boundaries, render_clusters, render_out, render_name = "name";
  auto* render_cmd = app.add_subcommand("render", "Draw a cluster choropleth");
  render_cmd->add_option("--boundaries", render_boundaries, "GeoJSON FeatureCollection")->required();
  render_cmd->add_option("--clusters", render_clusters, "region,label CSV")->required();
  render_cmd->add_option("--name-property", render_name, "Feature property holding the region name");
  render_cmd->add_option("--out", render_out, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(airshed::ErrorCategory::Config);
  }

  if (*run_cmd) return cmd_run(run);
  if (*composite_cmd) return cmd_composite(scenes, composite_out, qa);
  if (*table_cmd) return cmd_table(composites_dir, boundaries, name_property, table_out);
  if (*cluster_cmd) return cmd_cluster(cluster);
  if (*elbow_cmd) return cmd_elbow(elbow_table, k_min, k_max, elbow_seed, elbow_out);
  if (*render_cmd) return cmd_render(render_boundaries, render_clusters, render_name, render_out);
  return static_cast<int>(airshed::ErrorCategory::Config);
}
