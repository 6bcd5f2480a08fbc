/**
 *  Copyright (c) 2026 by Contributors
 * @file synth.cpp
 */
#include "dgnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace dgnn {
namespace {

Matrix random_features(NodeId n, NodeId dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix m(n, dim);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < dim; ++j) m(i, j) = unit(rng);
  return m;
}

Edge random_non_edge(NodeId n, const std::set<Edge>& present, const std::set<Edge>& banned,
                     std::mt19937_64& rng) {
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  while (true) {
    Edge e{pick(rng), pick(rng)};
    if (e.src == e.dst) continue;
    if (present.count(e) || banned.count(e)) continue;
    return e;
  }
}

}  // namespace

DynamicGraph synthesize(const SynthParams& p) {
  check(p.num_nodes > 0, "synthesize: num_nodes must be positive");
  check(p.num_snapshots > 0, "synthesize: T must be positive");
  check(p.avg_degree >= 1.0, "synthesize: avg_degree must be >= 1");
  check(p.feature_dim > 0, "synthesize: feature_dim must be positive");
  auto ratio_ok = [](const ChangeRatio& r) { return r.uniform || (r.value >= 0.0 && r.value <= 1.0); };
  check(ratio_ok(p.edge_change) && ratio_ok(p.feature_change),
        "synthesize: change ratios must lie in [0, 1]");

  std::mt19937_64 rng(derive_seed(p.seed, 0x5eed));
  const auto target_edges = static_cast<EdgeIdx>(std::llround(p.avg_degree * p.num_nodes));
  check(target_edges <= static_cast<EdgeIdx>(p.num_nodes) * (p.num_nodes - 1),
        "synthesize: avg_degree too large for a simple digraph");

  std::set<Edge> edges;
  while (static_cast<EdgeIdx>(edges.size()) < target_edges) {
    edges.insert(random_non_edge(p.num_nodes, edges, {}, rng));
  }
  Matrix feats = random_features(p.num_nodes, p.feature_dim, rng);

  std::vector<Snapshot> snaps;
  snaps.emplace_back(0, p.num_nodes, std::vector<Edge>(edges.begin(), edges.end()), feats);

  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  for (Timestep t = 1; t < p.num_snapshots; ++t) {
    double edge_ratio = p.edge_change.uniform ? unit01(rng) : p.edge_change.value;
    double feat_ratio = p.feature_change.uniform ? unit01(rng) : p.feature_change.value;

    const auto changes = static_cast<EdgeIdx>(
        std::ceil(edge_ratio * static_cast<double>(edges.size())));
    const EdgeIdx n_del = changes / 2;
    const EdgeIdx n_ins = changes - n_del;

    std::vector<Edge> pool(edges.begin(), edges.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    std::set<Edge> removed(pool.begin(), pool.begin() + std::min<EdgeIdx>(n_del, pool.size()));
    for (const Edge& e : removed) edges.erase(e);
    // Deleted edges stay out for this step so insert/delete counts are exact.
    for (EdgeIdx i = 0; i < n_ins; ++i) {
      edges.insert(random_non_edge(p.num_nodes, edges, removed, rng));
    }

    const auto n_feat = static_cast<NodeId>(
        std::ceil(feat_ratio * static_cast<double>(p.num_nodes)));
    std::vector<NodeId> nodes(p.num_nodes);
    for (NodeId i = 0; i < p.num_nodes; ++i) nodes[i] = i;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (NodeId i = 0; i < n_feat; ++i) {
      for (NodeId j = 0; j < p.feature_dim; ++j) feats(nodes[i], j) = unit(rng);
    }

    snaps.emplace_back(t, p.num_nodes, std::vector<Edge>(edges.begin(), edges.end()), feats);
  }
  return DynamicGraph(std::move(snaps));
}

}  // namespace dgnn
