/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/khop.hpp
 * @brief K-hop computational graphs with optional in-neighbor sampling.
 */
#ifndef DGNN_KHOP_HPP
#define DGNN_KHOP_HPP

#include <vector>

#include "dgnn/snapshot.hpp"

namespace dgnn {

// Per-hop in-neighbor cap; kFullFanout keeps every in-neighbor.
using Fanout = int32_t;
inline constexpr Fanout kFullFanout = -1;

// A graph view that owns its CSR storage (sampled subgraphs).
struct OwnedView {
  NodeId num_nodes = 0;
  std::vector<EdgeIdx> in_ptr;
  std::vector<NodeId> in_src;

  GraphView view() const {
    GraphView v;
    v.num_nodes = num_nodes;
    v.num_edges = static_cast<EdgeIdx>(in_src.size());
    v.in_ptr = in_ptr;
    v.in_src = in_src;
    return v;
  }
};

// Bipartite edge block for one hop: sampled in-edges of every node reachable
// within that many hops from the seeds.
struct HopBlock {
  std::vector<NodeId> destinations;      // sorted
  std::vector<Edge> edges;               // sorted (src, dst); dst in destinations
  std::vector<NodeId> source_nodes() const;
};

struct ComputationalGraph {
  std::vector<NodeId> seed_nodes;        // sorted
  std::vector<HopBlock> hops;            // hops[k]: destinations = k-hop closure
  std::vector<Fanout> fanouts;
  uint64_t sample_seed = 0;

  const HopBlock& deepest() const { return hops.back(); }
  // In-CSR over the global node universe containing the deepest block's edges.
  OwnedView to_view(NodeId num_nodes) const;
};

// Expands the (sampled) k-hop in-neighborhood of `seeds`. Hop k destinations
// are the closure after k hops (seeds for k=1); each destination keeps at most
// fanouts[k] in-neighbors, sampled without replacement with a per-(seed,
// destination, hop) derived stream, so results are pure in the arguments.
ComputationalGraph khop(const Snapshot& snapshot, std::vector<NodeId> seeds,
                        std::vector<Fanout> fanouts, uint64_t seed);

// Minimal per-hop edge additions/removals turning prev_cg into the
// computational graph of `curr` for the same seeds, fanouts and sample seed.
struct CgUpdate {
  struct HopDiff {
    std::vector<Edge> added;
    std::vector<Edge> removed;
  };
  std::vector<HopDiff> hops;
  bool empty() const;
};

CgUpdate khop_delta(const ComputationalGraph& prev_cg, const Snapshot& curr,
                    const DeltaGraph& delta);

ComputationalGraph apply_cg_update(const ComputationalGraph& prev_cg, const CgUpdate& update);

}  // namespace dgnn

#endif  // DGNN_KHOP_HPP
