/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/aggregate.hpp
 * @brief Sparse neighborhood aggregation: from-scratch, incremental, backward.
 *
 * aggregate_incremental derives the aggregation at t from the t-1 result by
 * removing deleted-edge contributions (at previous features) and adding
 * inserted-edge contributions (at current features). sum and mean update
 * additively; max/min track the contributing source per (node, dim) and fall
 * back to a from-scratch pass whenever a recorded contributor is deleted or
 * the change ratio exceeds the configured threshold.
 */
#ifndef DGNN_AGGREGATE_HPP
#define DGNN_AGGREGATE_HPP

#include "dgnn/snapshot.hpp"

namespace dgnn {

enum class AggrKind { kSum, kMean, kMax, kMin };

const char* to_string(AggrKind kind);
AggrKind aggr_kind_from_string(const std::string& s);

struct AggrFn {
  AggrKind kind = AggrKind::kSum;
  // Fixed per-edge weighting (from the graph view) applies to sum/mean only.
  bool edge_weighted = false;
};

struct AggResult {
  Matrix values;            // num_nodes x dim
  AggrKind kind = AggrKind::kSum;
  Vector degree;            // mean only: per-node weight mass (count if unweighted)
  Matrix mean_sums;         // mean only: running numerator, kept for exact updates
  IndexMatrix argext;       // max/min only: contributing source per (node, dim); -1 empty
  Timestep t = 0;
  EdgeIdx num_edges = 0;    // edges of the snapshot this was computed over
  int incremental_depth = 0;

  Eigen::Index size_units() const { return values.size(); }
  bool row_empty(NodeId v) const {
    return argext.size() > 0 ? argext(v, 0) < 0 : false;
  }
  // values with max/min empty-row sentinels replaced by zero.
  Matrix dense_values() const;
};

struct IncrementalOptions {
  double fallback_threshold = 0.5;  // change-ratio cutoff
  int rescratch_period = 64;        // from-scratch every this many chained steps
};

enum class FallbackReason { kNone, kChangeRatio, kDeletedContributor, kRescratchPeriod };

struct IncrementalResult {
  AggResult result;
  bool used_fallback = false;
  FallbackReason reason = FallbackReason::kNone;
};

// values[v] = fn over {w(u,v) * feats[u] : edge u->v}. Zero in-degree rows get
// the identity (0 for sum/mean; +/-inf sentinel with argext -1 for max/min).
AggResult aggregate_scratch(const GraphView& graph, const Matrix& feats, const AggrFn& fn);

IncrementalResult aggregate_incremental(const AggResult& prev, const GraphView& prev_graph,
                                        const GraphView& curr_graph, const Matrix& prev_feats,
                                        const Matrix& curr_feats, const DeltaGraph& delta,
                                        const AggrFn& fn, const IncrementalOptions& opts = {});

// Scatters the upstream gradient to source features. sum routes w*g, mean
// divides by the stored degree, max/min route only to the recorded
// contributor per (node, dim).
Matrix aggregate_backward(const GraphView& graph, const Matrix& upstream, const AggrFn& fn,
                          const AggResult& forward);

}  // namespace dgnn

#endif  // DGNN_AGGREGATE_HPP
