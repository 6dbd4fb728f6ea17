#include "airshed/model_selection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "airshed/error.hpp"
#include "airshed/parallel.hpp"

namespace airshed {

std::string_view to_string(Metric m) noexcept {
  return m == Metric::Distortion ? "distortion" : "silhouette";
}

double distortion_score(const Matrix& data, const ClusterResult& result) {
  if (result.labels.size() != data.rows()) {
    throw Error(ErrorCode::RowMismatch, "labels do not cover the data");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (result.labels[i] == kNoise) continue;
    sum += squared_distance(data.row(i), result.centers.row(static_cast<std::size_t>(result.labels[i])));
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::AllNoise, "every point is noise");
  return sum / static_cast<double>(count);
}

SilhouetteReport silhouette(const Matrix& data, const ClusterResult& result) {
  if (result.labels.size() != data.rows()) {
    throw Error(ErrorCode::RowMismatch, "labels do not cover the data");
  }
  SilhouetteReport report;
  std::vector<std::size_t> sizes(result.k, 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (result.labels[i] == kNoise) continue;
    report.rows.push_back(i);
    ++sizes[static_cast<std::size_t>(result.labels[i])];
  }
  const auto populated = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
  if (populated < 2) {
    throw Error(ErrorCode::SingleCluster, "silhouette needs at least two clusters");
  }

  const std::size_t m = report.rows.size();
  report.per_point.assign(m, 0.0);
  parallel_for(m, 0, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sums(result.k);
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t i = report.rows[p];
      const auto own = static_cast<std::size_t>(result.labels[i]);
      if (sizes[own] == 1) continue;  // singleton convention: 0
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t j : report.rows) {
        if (j == i) continue;
        sums[static_cast<std::size_t>(result.labels[j])] +=
            std::sqrt(squared_distance(data.row(i), data.row(j)));
      }
      const double a = sums[own] / static_cast<double>(sizes[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < result.k; ++c) {
        if (c == own || sizes[c] == 0) continue;
        b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
      }
      const double denom = std::max(a, b);
      report.per_point[p] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
  });

  report.per_cluster.assign(result.k, {});
  double total = 0.0;
  for (std::size_t p = 0; p < m; ++p) {
    report.per_cluster[static_cast<std::size_t>(result.labels[report.rows[p]])].push_back(
        report.per_point[p]);
    total += report.per_point[p];
  }
  for (auto& values : report.per_cluster) std::sort(values.rbegin(), values.rend());
  report.mean = total / static_cast<double>(m);
  return report;
}

std::vector<std::size_t> k_range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> ks;
  for (std::size_t k = first; k <= last; ++k) ks.push_back(k);
  return ks;
}

namespace {

std::size_t argmax_smallest(const std::vector<std::size_t>& ks, const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return ks[best];
}

}  // namespace

ElbowCurve sweep(const Matrix& data, const std::vector<std::size_t>& ks, Metric metric,
                 std::uint64_t seed, std::size_t threads) {
  if (ks.size() < 3) throw Error(ErrorCode::TooFewPoints, "a sweep needs at least 3 values of k");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0 || (i > 0 && ks[i] <= ks[i - 1])) {
      throw Error(ErrorCode::InvalidParams, "k values must be positive and strictly increasing");
    }
  }
  if (ks.back() > data.rows()) {
    throw Error(ErrorCode::KTooLarge,
                fmt::format("largest k={} exceeds n={}", ks.back(), data.rows()));
  }

  ElbowCurve curve;
  curve.ks = ks;
  curve.metric = metric;
  for (std::size_t k : ks) {
    KMeansOptions options;
    options.seed = seed ^ static_cast<std::uint64_t>(k);
    options.threads = threads;
    const ClusterResult result = kmeans(data, k, options);
    curve.scores.push_back(metric == Metric::Distortion ? distortion_score(data, result)
                                                        : silhouette(data, result).mean);
  }
  curve.elbow_k = metric == Metric::Distortion ? find_elbow(curve)
                                               : std::optional(argmax_smallest(curve.ks, curve.scores));
  return curve;
}

std::optional<std::size_t> find_elbow(const ElbowCurve& curve) {
  const std::size_t m = curve.ks.size();
  if (m < 3 || curve.scores.size() != m) {
    throw Error(ErrorCode::TooFewPoints, "elbow detection needs at least 3 points");
  }
  const auto [lo, hi] = std::minmax_element(curve.scores.begin(), curve.scores.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return std::nullopt;
  const double k0 = static_cast<double>(curve.ks.front());
  const double k_span = static_cast<double>(curve.ks.back()) - k0;

  auto normalized = [&](std::size_t i) { return (curve.scores[i] - *lo) / span; };
  const double y_first = normalized(0);
  const double y_last = normalized(m - 1);

  // Differences within this tolerance are treated as ties (smaller k wins).
  constexpr double kTieTolerance = 1e-12;
  std::optional<std::size_t> best;
  double best_distance = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double x = (static_cast<double>(curve.ks[i]) - k0) / k_span;
    const double chord = y_first + (y_last - y_first) * x;
    const double distance = chord - normalized(i);
    if (distance > best_distance + kTieTolerance) {
      best_distance = distance;
      best = curve.ks[i];
    }
  }
  if (best_distance < kMinElbowDistance) return std::nullopt;
  return best;
}

KSelection select_k(const ElbowCurve& distortion, const ElbowCurve& silhouette) {
  if (distortion.ks != silhouette.ks) {
    throw Error(ErrorCode::InvalidParams, "distortion and silhouette curves use different ks");
  }
  KSelection selection;
  selection.elbow_k = distortion.metric == Metric::Distortion ? find_elbow(distortion)
                                                              : distortion.elbow_k;
  selection.silhouette_best_k = argmax_smallest(silhouette.ks, silhouette.scores);
  selection.silhouette_best = *std::max_element(silhouette.scores.begin(), silhouette.scores.end());
  if (selection.elbow_k) {
    const auto idx = static_cast<std::size_t>(
        std::find(silhouette.ks.begin(), silhouette.ks.end(), *selection.elbow_k) -
        silhouette.ks.begin());
    selection.silhouette_at_k = silhouette.scores[idx];
    selection.elbow_accepted =
        selection.silhouette_at_k >= selection.silhouette_best - kSilhouetteSlack;
  }
  if (selection.elbow_accepted) {
    selection.k = *selection.elbow_k;
  } else {
    selection.k = selection.silhouette_best_k;
    selection.silhouette_at_k = selection.silhouette_best;
  }
  return selection;
}

}  // namespace airshed
