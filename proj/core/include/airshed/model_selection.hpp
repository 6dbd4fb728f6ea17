#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "airshed/clustering.hpp"
#include "airshed/matrix.hpp"

namespace airshed {

enum class Metric { Distortion, Silhouette };

std::string_view to_string(Metric m) noexcept;

struct ElbowCurve {
  std::vector<std::size_t> ks;
  std::vector<double> scores;
  Metric metric = Metric::Distortion;
  /// Distortion: knee of the curve. Silhouette: argmax (smallest k on ties).
  std::optional<std::size_t> elbow_k;
};

struct SilhouetteReport {
  std::vector<std::size_t> rows;          ///< non-noise rows, ascending
  std::vector<double> per_point;          ///< aligned with rows
  std::vector<std::vector<double>> per_cluster;  ///< descending values, by label
  double mean = 0.0;
};

/// Mean squared distance of non-noise points to their cluster centers.
double distortion_score(const Matrix& data, const ClusterResult& result);

/// s = (b - a) / max(a, b) per non-noise point; singleton clusters score 0.
SilhouetteReport silhouette(const Matrix& data, const ClusterResult& result);

/// Inclusive range [first, last] of candidate cluster counts.
std::vector<std::size_t> k_range(std::size_t first, std::size_t last);

/// Runs kmeans at every k with seed ^ k and records the metric.
ElbowCurve sweep(const Matrix& data, const std::vector<std::size_t>& ks, Metric metric,
                 std::uint64_t seed, std::size_t threads = 0);

/// Below this normalized chord distance the curve has no distinct elbow.
inline constexpr double kMinElbowDistance = 0.01;

/// Knee of a decreasing cost curve: the k whose normalized score lies
/// farthest below the chord joining the first and last points.
std::optional<std::size_t> find_elbow(const ElbowCurve& curve);

struct KSelection {
  std::size_t k = 0;
  std::optional<std::size_t> elbow_k;
  std::size_t silhouette_best_k = 0;
  double silhouette_at_k = 0.0;
  double silhouette_best = 0.0;
  bool elbow_accepted = false;
};

/// Silhouette slack within which the distortion elbow is preferred over the
/// silhouette argmax.
inline constexpr double kSilhouetteSlack = 0.02;

/// Takes the distortion elbow when its silhouette is within kSilhouetteSlack of
/// the best one, otherwise the silhouette argmax. Both curves share ks.
KSelection select_k(const ElbowCurve& distortion, const ElbowCurve& silhouette);

}  // namespace airshed
