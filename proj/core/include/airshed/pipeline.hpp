#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "airshed/clustering.hpp"
#include "airshed/error.hpp"
#include "airshed/pollutant.hpp"

namespace airshed {

struct PipelineConfig {
  std::filesystem::path scenes_dir;
  std::filesystem::path boundaries;
  std::filesystem::path output_dir = "out";
  std::string name_property = "name";
  std::map<Pollutant, std::optional<double>> qa_overrides;
  std::optional<std::size_t> k;
  std::size_t k_min = 2;
  std::size_t k_max = 15;
  Algorithm algorithm = Algorithm::KMeans;
  double dbscan_eps = 1.7;
  std::size_t dbscan_min_pts = 3;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  ///< 0: AIRSHED_THREADS or hardware concurrency
};

/// JSON config. Relative paths resolve against `base_dir`. Throws
/// Error(ConfigError) on unknown keys or wrong types.
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

/// Error annotated with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineSummary {
  std::size_t selected_k = 0;
  std::size_t regions = 0;
  std::vector<std::string> dropped;
  std::vector<std::string> noise;
  std::map<std::string, int> labels;  ///< region -> semantic label (kNoise for noise)
  std::vector<std::string> warnings;
};

/// composite -> mask -> drop nulls -> standardize -> (sweep + elbow) -> cluster
/// -> signatures, writing every artifact into config.output_dir. Throws StageError.
PipelineSummary run_pipeline(const PipelineConfig& config);

/// `region,label` CSV as written to clusters.csv.
std::string write_labels(const std::vector<std::string>& names, const std::vector<int>& labels);
std::map<std::string, int> read_labels(std::string_view csv);

/// Single-line JSON object describing a failure, for stderr.
std::string error_json(const Error& error, std::string_view stage);

}  // namespace airshed
