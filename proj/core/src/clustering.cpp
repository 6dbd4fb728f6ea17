#include "airshed/clustering.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "airshed/error.hpp"
#include "airshed/parallel.hpp"

namespace airshed {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::KMeans: return "kmeans";
    case Algorithm::Ward: return "ward";
    case Algorithm::DBSCAN: return "dbscan";
  }
  return "?";
}

Matrix cluster_means(const Matrix& data, const std::vector<int>& labels, std::size_t k) {
  Matrix centers(k, data.cols(), 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (labels[i] == kNoise) continue;
    const auto c = static_cast<std::size_t>(labels[i]);
    auto center = centers.row(c);
    const auto x = data.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) center[j] += x[j];
    ++counts[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : centers.row(c)) v /= static_cast<double>(counts[c]);
  }
  return centers;
}

std::size_t renumber_by_first_member(std::vector<int>& labels) {
  std::vector<int> mapping;
  std::vector<int> seen;
  for (int& label : labels) {
    if (label == kNoise) continue;
    const auto raw = static_cast<std::size_t>(label);
    if (raw >= mapping.size()) mapping.resize(raw + 1, -1);
    if (mapping[raw] < 0) mapping[raw] = static_cast<int>(seen.size()), seen.push_back(label);
    label = mapping[raw];
  }
  return seen.size();
}

// ---------------------------------------------------------------- k-means

namespace {

class UnitSampler {
 public:
  explicit UnitSampler(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, 1) from the top 53 bits; identical on every platform.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::size_t count_distinct_rows(const Matrix& data) {
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ra = data.row(a), rb = data.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

Matrix kmeans_plus_plus(const Matrix& data, std::size_t k, UnitSampler& rng,
                        std::size_t threads) {
  const std::size_t n = data.rows();
  Matrix centers(k, data.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  auto add_center = [&](std::size_t c, std::size_t row) {
    std::copy_n(data.row(row).begin(), data.cols(), centers.row(c).begin());
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        d2[i] = std::min(d2[i], squared_distance(data.row(i), centers.row(c)));
      }
    });
  };

  add_center(0, std::min(n - 1, static_cast<std::size_t>(rng.next() * static_cast<double>(n))));
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double target = rng.next() * total;
    double cumulative = 0.0;
    std::size_t pick = n;
    std::size_t last_positive = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      last_positive = i;
      cumulative += d2[i];
      if (target < cumulative) {
        pick = i;
        break;
      }
    }
    add_center(c, pick < n ? pick : last_positive);
  }
  return centers;
}

double mean_squared_error(const Matrix& data, const std::vector<int>& labels,
                          const Matrix& centers) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    s += squared_distance(data.row(i), centers.row(static_cast<std::size_t>(labels[i])));
  }
  return s / static_cast<double>(data.rows());
}

}  // namespace

ClusterResult kmeans(const Matrix& data, std::size_t k, const KMeansOptions& options) {
  const std::size_t n = data.rows();
  if (k == 0) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
  if (k > n) throw Error(ErrorCode::KTooLarge, fmt::format("k={} exceeds n={}", k, n));
  if (options.max_iter == 0 || !(options.tol >= 0.0)) {
    throw Error(ErrorCode::InvalidParams, "max_iter must be >= 1 and tol >= 0");
  }
  if (count_distinct_rows(data) < k) {
    throw Error(ErrorCode::DegenerateData,
                fmt::format("fewer than k={} distinct points", k));
  }

  UnitSampler rng(options.seed);
  Matrix centers = kmeans_plus_plus(data, k, rng, options.threads);

  ClusterResult result;
  result.algorithm = Algorithm::KMeans;
  result.k = k;
  std::vector<int> labels(n, -1);
  std::vector<int> next(n, 0);

  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < k; ++c) {
          const double d = squared_distance(data.row(i), centers.row(c));
          if (d < best) best = d, best_c = static_cast<int>(c);
        }
        next[i] = best_c;
      }
    });
    if (next == labels) break;
    labels = next;

    Matrix updated = cluster_means(data, labels, k);
    std::vector<std::size_t> counts(k, 0);
    for (int label : labels) ++counts[static_cast<std::size_t>(label)];

    // Reseed empty clusters at the point farthest from its own center.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double worst = -1.0;
      std::size_t far = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        if (counts[own] < 2) continue;
        const double d = squared_distance(data.row(i), updated.row(own));
        if (d > worst) worst = d, far = i;
      }
      const auto donor = static_cast<std::size_t>(labels[far]);
      labels[far] = static_cast<int>(c);
      --counts[donor];
      counts[c] = 1;
      std::copy_n(data.row(far).begin(), data.cols(), updated.row(c).begin());
      const Matrix donor_mean = cluster_means(data, labels, k);
      std::copy_n(donor_mean.row(donor).begin(), data.cols(), updated.row(donor).begin());
    }

    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      movement = std::max(movement, std::sqrt(squared_distance(centers.row(c), updated.row(c))));
    }
    centers = std::move(updated);
    result.iterations = iter;
    result.distortion_trace.push_back(mean_squared_error(data, labels, centers));
    if (movement < options.tol) break;
  }

  // Canonical order: by first member row.
  std::vector<int> raw = labels;
  renumber_by_first_member(labels);
  Matrix ordered(k, data.cols());
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(centers.row(static_cast<std::size_t>(raw[i])).begin(), data.cols(),
                ordered.row(static_cast<std::size_t>(labels[i])).begin());
  }
  result.labels = std::move(labels);
  result.centers = std::move(ordered);
  return result;
}

// ---------------------------------------------------------------- Ward

ClusterSummary ClusterSummary::of(const Matrix& data, const std::vector<std::size_t>& rows) {
  ClusterSummary s;
  s.size = rows.size();
  s.mean.assign(data.cols(), 0.0);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < data.cols(); ++j) s.mean[j] += data(r, j);
  }
  for (double& v : s.mean) v /= static_cast<double>(s.size);
  for (std::size_t r : rows) s.sse += squared_distance(data.row(r), s.mean);
  return s;
}

double ward_merge_cost(const ClusterSummary& a, const ClusterSummary& b) {
  const double na = static_cast<double>(a.size);
  const double nb = static_cast<double>(b.size);
  return na * nb / (na + nb) * squared_distance(a.mean, b.mean);
}

ClusterResult ward(const Matrix& data, std::size_t k) {
  const std::size_t n = data.rows();
  if (k == 0) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
  if (k > n) throw Error(ErrorCode::KTooLarge, fmt::format("k={} exceeds n={}", k, n));

  // cost(i, j) for active slots; slot s always holds the cluster whose lowest
  // member row is s.
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      cost[i * n + j] = cost[j * n + i] = 0.5 * squared_distance(data.row(i), data.row(j));
    }
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::size_t> owner(n);
  std::iota(owner.begin(), owner.end(), 0);

  ClusterResult result;
  result.algorithm = Algorithm::Ward;
  while (active.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t x = 0; x < active.size(); ++x) {
      const std::size_t i = active[x];
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t j = active[y];
        if (cost[i * n + j] < best) best = cost[i * n + j], bi = i, bj = j;
      }
    }
    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t l : active) {
      if (l == bi || l == bj) continue;
      const double nl = static_cast<double>(size[l]);
      const double updated =
          ((ni + nl) * cost[bi * n + l] + (nj + nl) * cost[bj * n + l] - nl * best) /
          (ni + nj + nl);
      cost[bi * n + l] = cost[l * n + bi] = updated;
    }
    size[bi] += size[bj];
    active.erase(std::find(active.begin(), active.end(), bj));
    for (std::size_t& o : owner) {
      if (o == bj) o = bi;
    }
    result.merge_history.push_back({bi, bj, best});
  }

  result.k = active.size();
  result.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.labels[i] = static_cast<int>(
        std::lower_bound(active.begin(), active.end(), owner[i]) - active.begin());
  }
  result.centers = cluster_means(data, result.labels, result.k);
  return result;
}

// ---------------------------------------------------------------- DBSCAN

ClusterResult dbscan(const Matrix& data, double eps, std::size_t min_pts, std::size_t threads) {
  if (!(eps > 0.0) || !std::isfinite(eps) || min_pts == 0) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("dbscan needs eps > 0 and min_pts >= 1 (got {}, {})", eps, min_pts));
  }
  const std::size_t n = data.rows();
  std::vector<std::vector<std::size_t>> neighbors(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::sqrt(squared_distance(data.row(i), data.row(j))) <= eps) neighbors[i].push_back(j);
      }
    }
  });

  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int next_cluster = 0;
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    if (neighbors[i].size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    const int c = next_cluster++;
    labels[i] = c;
    frontier.assign(neighbors[i].begin(), neighbors[i].end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (labels[q] == kNoise) labels[q] = c;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = c;
      if (neighbors[q].size() >= min_pts) {
        frontier.insert(frontier.end(), neighbors[q].begin(), neighbors[q].end());
      }
    }
  }

  ClusterResult result;
  result.algorithm = Algorithm::DBSCAN;
  result.k = static_cast<std::size_t>(next_cluster);
  result.labels = std::move(labels);
  result.centers = cluster_means(data, result.labels, result.k);
  return result;
}

}  // namespace airshed
