/**
 *  Copyright (c) 2026 by Contributors
 * @file snapshot.cpp
 */
#include "dgnn/snapshot.hpp"

#include <algorithm>
#include <limits>

namespace dgnn {

std::optional<double> GraphView::edge_weight(NodeId src, NodeId dst) const {
  auto row = in_src.subspan(in_ptr[dst], in_ptr[dst + 1] - in_ptr[dst]);
  auto it = std::lower_bound(row.begin(), row.end(), src);
  if (it == row.end() || *it != src) return std::nullopt;
  if (in_weight.empty()) return 1.0;
  return in_weight[in_ptr[dst] + (it - row.begin())];
}

Snapshot::Snapshot(Timestep t, NodeId num_nodes, std::vector<Edge> edges, Matrix feats,
                   std::vector<double> weights)
    : t_(t), num_nodes_(num_nodes), feats_(std::move(feats)) {
  check(num_nodes > 0, "snapshot needs at least one node");
  check(feats_.rows() == num_nodes, "feature rows must equal num_nodes");
  check(weights.empty() || weights.size() == edges.size(),
        "weights must align with edges");

  // Sort edges (and weights) by (src, dst) and reject duplicates.
  std::vector<size_t> order(edges.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return edges[a] < edges[b]; });
  edges_.reserve(edges.size());
  if (!weights.empty()) weights_.reserve(edges.size());
  for (size_t i : order) {
    const Edge& e = edges[i];
    check(e.src >= 0 && e.src < num_nodes && e.dst >= 0 && e.dst < num_nodes,
          "edge endpoint out of range");
    if (!edges_.empty() && edges_.back() == e) fail("duplicate edge in snapshot");
    edges_.push_back(e);
    if (!weights.empty()) weights_.push_back(weights[i]);
  }

  // In-CSR (sources grouped by destination, sorted by source) and out-CSR.
  in_ptr_.assign(num_nodes_ + 1, 0);
  out_ptr_.assign(num_nodes_ + 1, 0);
  for (const Edge& e : edges_) {
    ++in_ptr_[e.dst + 1];
    ++out_ptr_[e.src + 1];
  }
  for (NodeId v = 0; v < num_nodes_; ++v) {
    in_ptr_[v + 1] += in_ptr_[v];
    out_ptr_[v + 1] += out_ptr_[v];
  }
  in_src_.resize(edges_.size());
  if (!weights_.empty()) in_weight_.resize(edges_.size());
  out_dst_.resize(edges_.size());
  std::vector<EdgeIdx> in_fill(in_ptr_.begin(), in_ptr_.end() - 1);
  std::vector<EdgeIdx> out_fill(out_ptr_.begin(), out_ptr_.end() - 1);
  for (size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    EdgeIdx slot = in_fill[e.dst]++;
    in_src_[slot] = e.src;
    if (!weights_.empty()) in_weight_[slot] = weights_[i];
    out_dst_[out_fill[e.src]++] = e.dst;
  }
  // (src,dst)-sorted fill already leaves each in-row sorted by source and each
  // out-row sorted by destination.
}

GraphView Snapshot::view() const {
  GraphView v;
  v.num_nodes = num_nodes_;
  v.num_edges = num_edges();
  v.in_ptr = in_ptr_;
  v.in_src = in_src_;
  v.in_weight = in_weight_;
  return v;
}

bool Snapshot::has_edge(NodeId src, NodeId dst) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{src, dst});
}

DynamicGraph::DynamicGraph(std::vector<Snapshot> snapshots)
    : snapshots_(std::move(snapshots)) {
  check(!snapshots_.empty(), "dynamic graph needs at least one snapshot");
  for (Timestep t = 0; t < length(); ++t) {
    check(snapshots_[t].t() == t, "snapshots must be sorted by t with no gaps");
    check(snapshots_[t].num_nodes() == num_nodes(), "num_nodes must be constant");
    check(snapshots_[t].feature_dim() == feature_dim(), "feature_dim must be constant");
  }
  deltas_.resize(snapshots_.size());
}

const DeltaGraph& DynamicGraph::delta(Timestep t) const {
  check(t >= 1 && t < length(), "delta index out of range");
  if (!deltas_[t]) deltas_[t] = extract_delta(snapshots_[t - 1], snapshots_[t]);
  return *deltas_[t];
}

DeltaGraph extract_delta(const Snapshot& prev, const Snapshot& curr) {
  check(prev.num_nodes() == curr.num_nodes(), "snapshot node counts differ");
  check(prev.t() + 1 == curr.t(), "extract_delta needs consecutive snapshots");
  DeltaGraph d;
  d.t = curr.t();

  std::set_difference(prev.edges().begin(), prev.edges().end(), curr.edges().begin(),
                      curr.edges().end(), std::back_inserter(d.deletions));
  std::set_difference(curr.edges().begin(), curr.edges().end(), prev.edges().begin(),
                      prev.edges().end(), std::back_inserter(d.insertions));

  for (NodeId u = 0; u < prev.num_nodes(); ++u) {
    if (prev.feats().row(u) != curr.feats().row(u)) d.changed_nodes.push_back(u);
  }
  d.changed_feats.resize(static_cast<Eigen::Index>(d.changed_nodes.size()), curr.feature_dim());
  for (size_t i = 0; i < d.changed_nodes.size(); ++i) {
    NodeId u = d.changed_nodes[i];
    d.changed_feats.row(static_cast<Eigen::Index>(i)) = curr.feats().row(u);
    for (NodeId v : prev.out_neighbors(u)) d.deletions.push_back({u, v});
    for (NodeId v : curr.out_neighbors(u)) d.insertions.push_back({u, v});
  }
  auto dedupe = [](std::vector<Edge>& es) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
  };
  dedupe(d.deletions);
  dedupe(d.insertions);
  return d;
}

double change_ratio(const DeltaGraph& delta, EdgeIdx base_edges) {
  if (base_edges <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(delta.change_count()) / (2.0 * static_cast<double>(base_edges));
}

double change_ratio(const DeltaGraph& delta, const Snapshot& base) {
  check(base.t() + 1 == delta.t, "change_ratio base must be the snapshot at delta.t - 1");
  return change_ratio(delta, base.num_edges());
}

Snapshot apply_delta(const Snapshot& prev, const DeltaGraph& delta) {
  std::vector<Edge> edges;
  std::set_difference(prev.edges().begin(), prev.edges().end(), delta.deletions.begin(),
                      delta.deletions.end(), std::back_inserter(edges));
  std::vector<Edge> merged;
  std::set_union(edges.begin(), edges.end(), delta.insertions.begin(), delta.insertions.end(),
                 std::back_inserter(merged));
  Matrix feats = prev.feats();
  for (size_t i = 0; i < delta.changed_nodes.size(); ++i) {
    feats.row(delta.changed_nodes[i]) = delta.changed_feats.row(static_cast<Eigen::Index>(i));
  }
  return Snapshot(delta.t, prev.num_nodes(), std::move(merged), std::move(feats));
}

}  // namespace dgnn
