#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "airshed/matrix.hpp"

namespace airshed {

inline constexpr int kNoise = -1;

enum class Algorithm { KMeans, Ward, DBSCAN };

std::string_view to_string(Algorithm a) noexcept;

struct MergeStep {
  std::size_t cluster_a;  ///< canonical id (lowest member row) of the surviving cluster
  std::size_t cluster_b;  ///< canonical id of the absorbed cluster
  double cost;            ///< Ward merge cost
};

struct ClusterResult {
  Algorithm algorithm = Algorithm::KMeans;
  std::vector<int> labels;  ///< in [0, k) or kNoise
  Matrix centers;           ///< k x d member means
  std::size_t k = 0;
  std::size_t iterations = 0;              ///< K-Means only
  std::vector<double> distortion_trace;    ///< K-Means: mean squared error after each update
  std::vector<MergeStep> merge_history;    ///< Ward only
};

struct KMeansOptions {
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double tol = 1e-6;
  std::size_t threads = 0;  ///< 0: default_thread_count()
};

/// Lloyd iterations from k-means++ seeding. Clusters are numbered by their
/// lowest member row.
ClusterResult kmeans(const Matrix& data, std::size_t k, const KMeansOptions& options = {});

/// Size, mean and within-cluster sum of squares of a point set.
struct ClusterSummary {
  std::size_t size = 0;
  std::vector<double> mean;
  double sse = 0.0;

  static ClusterSummary of(const Matrix& data, const std::vector<std::size_t>& rows);
};

/// Increase in total within-cluster SSE caused by merging A and B.
double ward_merge_cost(const ClusterSummary& a, const ClusterSummary& b);

/// Agglomerative clustering with Ward linkage (Lance-Williams updates).
ClusterResult ward(const Matrix& data, std::size_t k);

/// Density clustering. A point is core when at least min_pts points, itself
/// included, lie within distance <= eps.
ClusterResult dbscan(const Matrix& data, double eps, std::size_t min_pts,
                     std::size_t threads = 0);

/// Member-mean centers for labels in [0, k); kNoise rows are skipped.
Matrix cluster_means(const Matrix& data, const std::vector<int>& labels, std::size_t k);

/// Relabels clusters in order of their first member row; returns the number of clusters.
std::size_t renumber_by_first_member(std::vector<int>& labels);

}  // namespace airshed
