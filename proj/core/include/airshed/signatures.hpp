#pragma once

#include <string>
#include <vector>

#include "airshed/clustering.hpp"
#include "airshed/feature_table.hpp"

namespace airshed {

/// Per-cluster pollution profile, with clusters renumbered so that semantic id
/// 0 has the lowest mean standardized signature.
struct SignatureReport {
  std::vector<std::size_t> cluster_order;       ///< raw id -> semantic id
  std::vector<std::vector<double>> signatures;  ///< semantic id -> per-pollutant mean
  std::vector<std::vector<double>> trends;      ///< pollutant -> value per semantic id
  std::vector<std::vector<std::string>> membership;  ///< semantic id -> sorted names
  std::vector<std::string> noise_members;             ///< sorted
  std::vector<int> semantic_labels;             ///< per row, kNoise kept

  double signature_level(std::size_t semantic_id) const;
};

SignatureReport compute_signatures(const FeatureTable& table, const ClusterResult& result);

struct PartitionComparison {
  double adjusted_rand_index = 0.0;
  /// Names whose cluster in `a`, mapped through the best overlap alignment,
  /// differs from their cluster in `b`.
  std::vector<std::string> differing;
};

/// Labels may include kNoise, which is treated as one more class.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

PartitionComparison compare_partitions(const ClusterResult& a, const ClusterResult& b,
                                       const std::vector<std::string>& names);

}  // namespace airshed
