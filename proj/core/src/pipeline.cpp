#include "airshed/pipeline.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "airshed/feature_table.hpp"
#include "airshed/geometry.hpp"
#include "airshed/model_selection.hpp"
#include "airshed/raster.hpp"
#include "airshed/signatures.hpp"
#include "airshed/svg.hpp"

namespace airshed {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

template <typename F>
auto run_stage(std::string_view name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(std::string(name), e);
  } catch (const json::exception& e) {
    throw StageError(std::string(name), Error(ErrorCode::ConfigError, e.what()));
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(std::string(name), Error(ErrorCode::IoError, e.what()));
  }
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  return out + "\"";
}

std::string placeholder_svg(std::string_view message) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400.00\" height=\"60.00\" "
      "viewBox=\"0 0 400.00 60.00\" font-family=\"sans-serif\">\n"
      "<text x=\"10.00\" y=\"34.00\" font-size=\"12\" text-anchor=\"start\">{}</text>\n</svg>\n",
      message);
}

}  // namespace

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (Algorithm a : {Algorithm::KMeans, Algorithm::Ward, Algorithm::DBSCAN}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::ConfigError, "config is not a JSON object");
  }
  PipelineConfig config;
  auto path_of = [&](const json& v, std::string_view key) {
    if (!v.is_string()) throw Error(ErrorCode::ConfigError, fmt::format("'{}' must be a string", key));
    std::filesystem::path p = v.get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  auto count_of = [&](const json& v, std::string_view key) -> std::size_t {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(ErrorCode::ConfigError, fmt::format("'{}' must be a non-negative integer", key));
    }
    return v.get<std::size_t>();
  };
  auto real_of = [&](const json& v, std::string_view key) {
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, fmt::format("'{}' must be a number", key));
    return v.get<double>();
  };

  for (const auto& [key, value] : doc.items()) {
    if (key == "scenes_dir") config.scenes_dir = path_of(value, key);
    else if (key == "boundaries") config.boundaries = path_of(value, key);
    else if (key == "output_dir") config.output_dir = path_of(value, key);
    else if (key == "name_property") {
      if (!value.is_string()) throw Error(ErrorCode::ConfigError, "'name_property' must be a string");
      config.name_property = value.get<std::string>();
    } else if (key == "qa_overrides") {
      if (!value.is_object()) throw Error(ErrorCode::ConfigError, "'qa_overrides' must be an object");
      for (const auto& [name, threshold] : value.items()) {
        const auto p = parse_pollutant(name);
        if (!p) throw Error(ErrorCode::ConfigError, fmt::format("unknown pollutant '{}'", name));
        if (threshold.is_null()) {
          config.qa_overrides[*p] = std::nullopt;
          continue;
        }
        const double t = real_of(threshold, name);
        if (t < 0.0 || t > 1.0) {
          throw Error(ErrorCode::ConfigError, fmt::format("qa threshold for {} outside [0,1]", name));
        }
        config.qa_overrides[*p] = t;
      }
    } else if (key == "k") {
      if (!value.is_null()) config.k = count_of(value, key);
    } else if (key == "k_range") {
      if (!value.is_array() || value.size() != 2) {
        throw Error(ErrorCode::ConfigError, "'k_range' must be [min, max]");
      }
      config.k_min = count_of(value[0], "k_range[0]");
      config.k_max = count_of(value[1], "k_range[1]");
    } else if (key == "algorithm") {
      const auto a = value.is_string() ? parse_algorithm(value.get<std::string>()) : std::nullopt;
      if (!a) throw Error(ErrorCode::ConfigError, "'algorithm' must be kmeans, ward or dbscan");
      config.algorithm = *a;
    } else if (key == "dbscan_eps") config.dbscan_eps = real_of(value, key);
    else if (key == "dbscan_min_pts") config.dbscan_min_pts = count_of(value, key);
    else if (key == "seed") config.seed = count_of(value, key);
    else if (key == "threads") config.threads = count_of(value, key);
    else throw Error(ErrorCode::ConfigError, fmt::format("unknown config key '{}'", key));
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path), path.parent_path());
}

std::string write_labels(const std::vector<std::string>& names, const std::vector<int>& labels) {
  if (names.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "names and labels differ");
  std::string csv = "region,label\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    csv += fmt::format("{},{}\n", quote_csv(names[i]), labels[i]);
  }
  return csv;
}

std::map<std::string, int> read_labels(std::string_view csv) {
  std::map<std::string, int> labels;
  std::size_t pos = 0, line_no = 0;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "region,label") throw Error(ErrorCode::HeaderMismatch, "expected 'region,label'");
      continue;
    }
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorCode::RaggedRow, fmt::format("line {}: expected 2 fields", line_no));
    }
    std::string name(line.substr(0, comma));
    if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
      std::string unquoted;
      for (std::size_t i = 1; i + 1 < name.size(); ++i) {
        unquoted.push_back(name[i]);
        if (name[i] == '"') ++i;
      }
      name = std::move(unquoted);
    }
    const std::string_view field = line.substr(comma + 1);
    int label = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), label);
    if (ec != std::errc{} || ptr != field.data() + field.size() || label < kNoise) {
      throw Error(ErrorCode::NonNumericField, fmt::format("line {}: bad label '{}'", line_no, field));
    }
    labels[name] = label;
  }
  return labels;
}

std::string error_json(const Error& error, std::string_view stage) {
  json j;
  j["error"] = {{"stage", stage},
                {"code", to_string(error.code())},
                {"exit_code", static_cast<int>(error.category())},
                {"message", error.what()}};
  return j.dump();
}

PipelineSummary run_pipeline(const PipelineConfig& config) {
  PipelineSummary summary;

  run_stage("config", [&] {
    if (config.k_min < 2 || config.k_max < config.k_min) {
      throw Error(ErrorCode::ConfigError, "k_range must satisfy 2 <= min <= max");
    }
    if (config.scenes_dir.empty() || config.boundaries.empty()) {
      throw Error(ErrorCode::ConfigError, "scenes_dir and boundaries are required");
    }
    if (!std::filesystem::is_directory(config.scenes_dir)) {
      throw Error(ErrorCode::ConfigError, "scenes_dir not found: " + config.scenes_dir.string());
    }
    if (!std::filesystem::is_regular_file(config.boundaries)) {
      throw Error(ErrorCode::ConfigError, "boundaries not found: " + config.boundaries.string());
    }
    std::filesystem::create_directories(config.output_dir);
    return 0;
  });
  const auto& out = config.output_dir;

  const auto scenes = run_stage("scenes", [&] {
    auto loaded = load_scene_directory(config.scenes_dir);
    if (loaded.empty()) throw Error(ErrorCode::EmptyInput, "no scene files found");
    return loaded;
  });

  const auto composites = run_stage("composite", [&] {
    QaPolicy policy = QaPolicy::defaults();
    for (const auto& [p, t] : config.qa_overrides) policy.thresholds[p] = t;
    return composite_scenes(scenes, policy);
  });

  std::string boundaries_text;
  const RegionSet regions = run_stage("geometry", [&] {
    boundaries_text = read_text(config.boundaries);
    return parse_regions(boundaries_text, config.name_property);
  });
  summary.warnings = regions.warnings;
  summary.regions = regions.regions.size();

  const FeatureTable raw = run_stage("table", [&] {
    FeatureTable t = build_feature_table(composites, regions.regions);
    write_text(out / "table_raw.csv", write_table(t));
    return t;
  });

  const auto cleaned = run_stage("standardize", [&] {
    NullRowDrop dropped = drop_null_rows(raw);
    summary.dropped = dropped.dropped;
    Standardized s = standardize(dropped.table);
    for (Pollutant p : s.constant_columns) {
      summary.warnings.push_back(
          fmt::format("column {} is constant; standardized to zeros", to_string(p)));
    }
    write_text(out / "table_std.csv", write_table(s.table));
    return std::pair{std::move(dropped.table), std::move(s.table)};
  });
  const FeatureTable& table = cleaned.first;
  const FeatureTable& standardized = cleaned.second;
  const Matrix data = standardized.to_matrix();
  const std::size_t n = data.rows();

  // ---- model selection
  std::optional<ElbowCurve> distortion_curve, silhouette_curve;
  std::optional<KSelection> selection;
  run_stage("model_selection", [&] {
    const std::size_t k_hi = std::min(config.k_max, n > 0 ? n - 1 : 0);
    const bool feasible = k_hi >= config.k_min && k_hi - config.k_min + 1 >= 3;
    if (!feasible) {
      if (!config.k && config.algorithm != Algorithm::DBSCAN) {
        throw Error(ErrorCode::TooFewPoints,
                    fmt::format("{} regions are too few for a k sweep over [{}, {}]", n,
                                config.k_min, config.k_max));
      }
      summary.warnings.push_back("k sweep skipped: too few regions");
      return 0;
    }
    const auto ks = k_range(config.k_min, k_hi);
    distortion_curve = sweep(data, ks, Metric::Distortion, config.seed, config.threads);
    silhouette_curve = sweep(data, ks, Metric::Silhouette, config.seed, config.threads);
    selection = select_k(*distortion_curve, *silhouette_curve);
    if (!selection->elbow_k) {
      summary.warnings.push_back("distortion curve has no distinct elbow; using silhouette argmax");
    } else if (!selection->elbow_accepted) {
      summary.warnings.push_back(fmt::format(
          "elbow k={} has silhouette {:.4f}, more than {} below the best {:.4f} at k={}; using k={}",
          *selection->elbow_k, selection->silhouette_at_k, kSilhouetteSlack,
          selection->silhouette_best, selection->silhouette_best_k, selection->k));
    }
    return 0;
  });

  const ClusterResult result = run_stage("clustering", [&] {
    switch (config.algorithm) {
      case Algorithm::DBSCAN:
        return dbscan(data, config.dbscan_eps, config.dbscan_min_pts, config.threads);
      case Algorithm::Ward:
        return ward(data, config.k ? *config.k : selection->k);
      case Algorithm::KMeans:
      default: {
        KMeansOptions options;
        options.seed = config.seed;
        options.threads = config.threads;
        return kmeans(data, config.k ? *config.k : selection->k, options);
      }
    }
  });
  summary.selected_k = result.k;

  const SignatureReport signatures =
      run_stage("signatures", [&] { return compute_signatures(standardized, result); });

  std::optional<SilhouetteReport> silhouette_report;
  double distortion = 0.0;
  run_stage("validation", [&] {
    ClusterResult semantic = result;
    semantic.labels = signatures.semantic_labels;
    semantic.centers = cluster_means(data, semantic.labels, semantic.k);
    try {
      silhouette_report = silhouette(data, semantic);
    } catch (const Error& e) {
      summary.warnings.push_back(std::string("silhouette not computed: ") + e.what());
    }
    try {
      distortion = distortion_score(data, semantic);
    } catch (const Error& e) {
      summary.warnings.push_back(std::string("distortion not computed: ") + e.what());
    }
    return 0;
  });

  run_stage("render", [&] {
    for (std::size_t r = 0; r < table.rows(); ++r) {
      summary.labels[table.row_names()[r]] = signatures.semantic_labels[r];
    }
    summary.noise = signatures.noise_members;
    write_text(out / "clusters.csv", write_labels(table.row_names(), signatures.semantic_labels));

    json geo = json::parse(boundaries_text);
    for (json& feature : geo["features"]) {
      const std::string name = feature["properties"][config.name_property].get<std::string>();
      auto it = summary.labels.find(name);
      feature["properties"]["cluster"] = it == summary.labels.end() ? json(nullptr) : json(it->second);
    }
    write_text(out / "clusters.geojson", geo.dump() + "\n");

    const std::optional<std::size_t> marked =
        config.algorithm == Algorithm::DBSCAN ? std::nullopt : std::optional(result.k);
    write_text(out / "elbow.svg",
               distortion_curve ? render_elbow(*distortion_curve, &*silhouette_curve, marked)
                                : placeholder_svg("k sweep not run: too few regions"));
    write_text(out / "silhouette.svg", silhouette_report
                                           ? render_silhouette(*silhouette_report)
                                           : placeholder_svg("silhouette needs two clusters"));
    write_text(out / "signatures.svg", render_signatures(signatures));
    write_text(out / "map.svg", render_choropleth(regions.regions, summary.labels));

    json report;
    report["algorithm"] = to_string(config.algorithm);
    report["seed"] = config.seed;
    report["regions"] = summary.regions;
    report["clustered_rows"] = table.rows();
    report["selected_k"] = result.k;
    if (config.algorithm == Algorithm::DBSCAN) {
      report["k_source"] = "dbscan";
      report["dbscan"] = {{"eps", config.dbscan_eps}, {"min_pts", config.dbscan_min_pts}};
    } else if (config.k) {
      report["k_source"] = "fixed";
    } else {
      report["k_source"] = selection->elbow_accepted ? "elbow" : "silhouette";
    }
    if (distortion_curve) {
      report["sweep"] = {
          {"ks", distortion_curve->ks},
          {"distortion", distortion_curve->scores},
          {"silhouette", silhouette_curve->scores},
          {"elbow_k", selection->elbow_k ? json(*selection->elbow_k) : json(nullptr)},
          {"silhouette_best_k", selection->silhouette_best_k},
          {"silhouette_best", selection->silhouette_best},
          {"silhouette_at_elbow", selection->elbow_k ? json(selection->silhouette_at_k) : json(nullptr)},
      };
    } else {
      report["sweep"] = nullptr;
    }
    report["silhouette_mean"] = silhouette_report ? json(silhouette_report->mean) : json(nullptr);
    report["distortion"] = distortion;
    report["dropped_rows"] = summary.dropped;
    report["noise_members"] = signatures.noise_members;
    report["warnings"] = summary.warnings;
    report["ordering_key"] = "mean of the standardized signature vector (equal pollutant weights)";

    json stats = json::object();
    for (std::size_t c = 0; c < standardized.cols(); ++c) {
      const auto& s = (*standardized.column_stats())[c];
      stats[std::string(to_string(standardized.columns()[c]))] = {{"mean", s.mean},
                                                                  {"stddev", s.stddev}};
    }
    report["column_stats"] = stats;

    json clusters = json::array();
    for (std::size_t c = 0; c < signatures.signatures.size(); ++c) {
      json signature = json::object();
      for (std::size_t j = 0; j < kCanonicalPollutants.size(); ++j) {
        signature[std::string(to_string(kCanonicalPollutants[j]))] = signatures.signatures[c][j];
      }
      clusters.push_back({{"id", c},
                          {"size", signatures.membership[c].size()},
                          {"level", signatures.signature_level(c)},
                          {"members", signatures.membership[c]},
                          {"signature", signature}});
    }
    report["clusters"] = clusters;
    json trends = json::object();
    for (std::size_t j = 0; j < kCanonicalPollutants.size(); ++j) {
      trends[std::string(to_string(kCanonicalPollutants[j]))] = signatures.trends[j];
    }
    report["trends"] = trends;
    write_text(out / "report.json", report.dump(2) + "\n");
    return 0;
  });

  return summary;
}

}  // namespace airshed
