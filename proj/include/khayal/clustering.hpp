#ifndef KHAYAL_CLUSTERING_HPP
#define KHAYAL_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "khayal/error.hpp"

namespace khayal {

/// Square dissimilarity matrix stored row-major.
struct DistanceMatrix {
  std::size_t size = 0;
  std::vector<double> values;

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : size(n), values(n * n, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * size + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

/// One agglomeration step. Leaves are ids 0..n-1; the cluster created by
/// merge k gets id n + k.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

/// Average-linkage (UPGMA) agglomeration over all items. Among equal
/// distances the pair with the smallest ids merges first. Heights are
/// non-decreasing.
inline std::vector<Merge> average_linkage(const DistanceMatrix& m) {
  const std::size_t n = m.size;
  std::vector<Merge> merges;
  if (n < 2) return merges;

  // Working distances between active clusters, indexed by cluster id.
  const std::size_t total = 2 * n - 1;
  std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = m.at(i, j);
  std::vector<std::size_t> sizes(total, 1);
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  double last = 0.0;
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t x = 0; x < active.size(); ++x)
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double d = dist[active[x]][active[y]];
        if (d < best) {
          best = d;
          bi = x;
          bj = y;
        }
      }
    const std::size_t a = active[bi], b = active[bj];
    const std::size_t id = n + merges.size();
    sizes[id] = sizes[a] + sizes[b];
    last = std::max(last, best);
    merges.push_back({a, b, last, sizes[id]});

    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    const double wa = static_cast<double>(sizes[a]), wb = static_cast<double>(sizes[b]);
    for (std::size_t k : active) {
      const double d = (wa * dist[a][k] + wb * dist[b][k]) / (wa + wb);
      dist[id][k] = dist[k][id] = d;
    }
    active.push_back(id);
  }
  return merges;
}

/// Flat clusters obtained by applying every merge with height <= threshold.
/// Cluster ids are numbered 0.. in order of each cluster's lowest item.
inline std::vector<int> cut_dendrogram(std::size_t n, const std::vector<Merge>& merges, double threshold) {
  std::vector<std::size_t> parent(2 * n, 0);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < merges.size(); ++k) {
    if (merges[k].height > threshold) break;
    const std::size_t id = n + k;
    parent[find(merges[k].left)] = id;
    parent[find(merges[k].right)] = id;
  }
  std::vector<int> labels(n, -1);
  std::vector<std::pair<std::size_t, int>> seen;
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == root; });
    if (it == seen.end()) {
      seen.emplace_back(root, next);
      labels[i] = next++;
    } else {
      labels[i] = it->second;
    }
  }
  return labels;
}

}  // namespace khayal

#endif  // KHAYAL_CLUSTERING_HPP
