/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/snapshot.hpp
 * @brief Discrete dynamic graph containers: snapshots, deltas, graph views.
 */
#ifndef DGNN_SNAPSHOT_HPP
#define DGNN_SNAPSHOT_HPP

#include <optional>
#include <span>
#include <vector>

#include "dgnn/common.hpp"

namespace dgnn {

// Read-only in-neighbor CSR over the global node universe. Aggregation and
// sampling never need more than this; full snapshots and sampled subgraphs
// both expose one.
struct GraphView {
  NodeId num_nodes = 0;
  EdgeIdx num_edges = 0;
  std::span<const EdgeIdx> in_ptr;   // size num_nodes + 1
  std::span<const NodeId> in_src;    // sources grouped by destination, sorted
  std::span<const double> in_weight; // empty when unweighted

  bool weighted() const { return !in_weight.empty(); }
  std::span<const NodeId> in_neighbors(NodeId v) const {
    return in_src.subspan(in_ptr[v], in_ptr[v + 1] - in_ptr[v]);
  }
  EdgeIdx in_degree(NodeId v) const { return in_ptr[v + 1] - in_ptr[v]; }
  // Weight of edge u->v, 1.0 when unweighted, nullopt when absent.
  std::optional<double> edge_weight(NodeId src, NodeId dst) const;
  bool has_edge(NodeId src, NodeId dst) const { return edge_weight(src, dst).has_value(); }
};

// One timestep of a discrete dynamic graph: sparse directed adjacency plus a
// dense node-feature matrix. Immutable after construction.
class Snapshot {
 public:
  Snapshot() = default;
  // Edges may arrive unsorted; duplicates are rejected. Node ids must lie in
  // [0, num_nodes). Weights, when given, align with `edges` order.
  Snapshot(Timestep t, NodeId num_nodes, std::vector<Edge> edges, Matrix feats,
           std::vector<double> weights = {});

  Timestep t() const { return t_; }
  NodeId num_nodes() const { return num_nodes_; }
  EdgeIdx num_edges() const { return static_cast<EdgeIdx>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }  // sorted (src,dst)
  const Matrix& feats() const { return feats_; }
  NodeId feature_dim() const { return static_cast<NodeId>(feats_.cols()); }

  GraphView view() const;
  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_dst_.data() + out_ptr_[u], static_cast<size_t>(out_ptr_[u + 1] - out_ptr_[u])};
  }
  bool has_edge(NodeId src, NodeId dst) const;

 private:
  Timestep t_ = 0;
  NodeId num_nodes_ = 0;
  std::vector<Edge> edges_;       // sorted by (src, dst)
  std::vector<double> weights_;   // aligned with edges_; empty if unweighted
  Matrix feats_;

  // Derived adjacency indexes.
  std::vector<EdgeIdx> in_ptr_;
  std::vector<NodeId> in_src_;
  std::vector<double> in_weight_;
  std::vector<EdgeIdx> out_ptr_;
  std::vector<NodeId> out_dst_;
};

// Edge-level difference between consecutive snapshots. Deletions carry the
// "previous" feature epoch, insertions the "current" one; feature changes are
// expanded into out-edge delete/insert pairs, so deletions and insertions may
// intersect exactly on edges whose source changed features.
struct DeltaGraph {
  Timestep t = 0;                       // timestep this delta produces
  std::vector<Edge> deletions;          // sorted (src, dst)
  std::vector<Edge> insertions;         // sorted (src, dst)
  std::vector<NodeId> changed_nodes;    // sorted, feature-changed nodes
  Matrix changed_feats;                 // new rows aligned with changed_nodes

  bool empty() const { return deletions.empty() && insertions.empty() && changed_nodes.empty(); }
  EdgeIdx change_count() const {
    return static_cast<EdgeIdx>(deletions.size() + insertions.size());
  }
};

class DynamicGraph {
 public:
  DynamicGraph() = default;
  explicit DynamicGraph(std::vector<Snapshot> snapshots);

  Timestep length() const { return static_cast<Timestep>(snapshots_.size()); }
  NodeId num_nodes() const { return snapshots_.empty() ? 0 : snapshots_.front().num_nodes(); }
  NodeId feature_dim() const { return snapshots_.empty() ? 0 : snapshots_.front().feature_dim(); }
  const Snapshot& snapshot(Timestep t) const { return snapshots_.at(t); }
  // Delta producing snapshot t from t-1; computed once and memoized.
  const DeltaGraph& delta(Timestep t) const;

 private:
  std::vector<Snapshot> snapshots_;
  mutable std::vector<std::optional<DeltaGraph>> deltas_;
};

// Deletions = (prev \ curr) plus prev out-edges of feature-changed nodes;
// insertions = (curr \ prev) plus curr out-edges of feature-changed nodes.
// A node is feature-changed iff any component differs exactly.
DeltaGraph extract_delta(const Snapshot& prev, const Snapshot& curr);

// (|deletions| + |insertions|) / (2 |E(base)|); +inf when base has no edges.
double change_ratio(const DeltaGraph& delta, const Snapshot& base);
double change_ratio(const DeltaGraph& delta, EdgeIdx base_edges);

// Materializes snapshot delta.t by applying the delta to `prev`.
Snapshot apply_delta(const Snapshot& prev, const DeltaGraph& delta);

}  // namespace dgnn

#endif  // DGNN_SNAPSHOT_HPP
