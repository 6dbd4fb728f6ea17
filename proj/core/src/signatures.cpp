#include "airshed/signatures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "airshed/error.hpp"

namespace airshed {

double SignatureReport::signature_level(std::size_t semantic_id) const {
  const auto& s = signatures.at(semantic_id);
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

SignatureReport compute_signatures(const FeatureTable& table, const ClusterResult& result) {
  if (!table.standardized()) {
    throw Error(ErrorCode::NotStandardized, "signatures need a standardized table");
  }
  if (table.rows() != result.labels.size()) {
    throw Error(ErrorCode::RowMismatch,
                fmt::format("table has {} rows, clustering has {}", table.rows(),
                            result.labels.size()));
  }
  const std::size_t k = result.k;
  const std::size_t d = table.cols();

  std::vector<std::vector<double>> raw(k, std::vector<double>(d, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (result.labels[r] == kNoise) continue;
    const auto c = static_cast<std::size_t>(result.labels[r]);
    for (std::size_t j = 0; j < d; ++j) raw[c][j] += *table.cell(r, j);
    ++counts[c];
  }
  std::vector<double> level(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::RowMismatch, fmt::format("cluster {} has no members", c));
    }
    for (double& v : raw[c]) v /= static_cast<double>(counts[c]);
    level[c] = std::accumulate(raw[c].begin(), raw[c].end(), 0.0) / static_cast<double>(d);
  }

  std::vector<std::size_t> by_level(k);
  std::iota(by_level.begin(), by_level.end(), 0);
  std::stable_sort(by_level.begin(), by_level.end(),
                   [&](std::size_t a, std::size_t b) { return level[a] < level[b]; });

  SignatureReport report;
  report.cluster_order.resize(k);
  report.signatures.resize(k);
  report.membership.resize(k);
  for (std::size_t semantic = 0; semantic < k; ++semantic) {
    report.cluster_order[by_level[semantic]] = semantic;
    report.signatures[semantic] = raw[by_level[semantic]];
  }
  report.trends.assign(d, std::vector<double>(k));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t s = 0; s < k; ++s) report.trends[j][s] = report.signatures[s][j];
  }
  report.semantic_labels.resize(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const int label = result.labels[r];
    if (label == kNoise) {
      report.semantic_labels[r] = kNoise;
      report.noise_members.push_back(table.row_names()[r]);
      continue;
    }
    const std::size_t semantic = report.cluster_order[static_cast<std::size_t>(label)];
    report.semantic_labels[r] = static_cast<int>(semantic);
    report.membership[semantic].push_back(table.row_names()[r]);
  }
  for (auto& names : report.membership) std::sort(names.begin(), names.end());
  std::sort(report.noise_members.begin(), report.noise_members.end());
  return report;
}

namespace {

// Dense class indices; kNoise becomes an ordinary class.
std::vector<std::size_t> densify(const std::vector<int>& labels, std::size_t& classes) {
  std::map<int, std::size_t> ids;
  for (int l : labels) ids.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : ids) id = next++;
  classes = next;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids[l]);
  return out;
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

// Hungarian algorithm (minimization) on a square cost matrix; returns the
// column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "labelings differ in length");
  const std::size_t n = a.size();
  std::size_t ka = 0, kb = 0;
  const auto da = densify(a, ka);
  const auto db = densify(b, kb);
  std::vector<double> table(ka * kb, 0.0), rows(ka, 0.0), cols(kb, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[da[i] * kb + db[i]] += 1.0;
    rows[da[i]] += 1.0;
    cols[db[i]] += 1.0;
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (double c : table) index += choose2(c);
  for (double r : rows) sum_a += choose2(r);
  for (double c : cols) sum_b += choose2(c);
  const double total = choose2(static_cast<double>(n));
  const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  // Degenerate partitions (all singletons or one block on both sides).
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

PartitionComparison compare_partitions(const ClusterResult& a, const ClusterResult& b,
                                       const std::vector<std::string>& names) {
  if (a.labels.size() != b.labels.size() || names.size() != a.labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "partitions and names differ in length");
  }
  PartitionComparison out;
  out.adjusted_rand_index = adjusted_rand_index(a.labels, b.labels);

  std::size_t ka = 0, kb = 0;
  const auto da = densify(a.labels, ka);
  const auto db = densify(b.labels, kb);
  const std::size_t m = std::max(ka, kb);
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < da.size(); ++i) cost[da[i]][db[i]] -= 1.0;
  const auto match = hungarian(cost);
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (match[da[i]] != db[i]) out.differing.push_back(names[i]);
  }
  return out;
}

}  // namespace airshed
