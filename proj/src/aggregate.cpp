/**
 *  Copyright (c) 2026 by Contributors
 * @file aggregate.cpp
 */
#include "dgnn/aggregate.hpp"

#include <cmath>
#include <limits>

namespace dgnn {

const char* to_string(AggrKind kind) {
  switch (kind) {
    case AggrKind::kSum: return "sum";
    case AggrKind::kMean: return "mean";
    case AggrKind::kMax: return "max";
    case AggrKind::kMin: return "min";
  }
  return "?";
}

AggrKind aggr_kind_from_string(const std::string& s) {
  if (s == "sum") return AggrKind::kSum;
  if (s == "mean") return AggrKind::kMean;
  if (s == "max") return AggrKind::kMax;
  if (s == "min") return AggrKind::kMin;
  fail("unknown aggregation kind: " + s);
}

Matrix AggResult::dense_values() const {
  if (argext.size() == 0) return values;
  Matrix out = values;
  for (NodeId v = 0; v < out.rows(); ++v) {
    if (argext(v, 0) < 0) out.row(v).setZero();
  }
  return out;
}

namespace {

void validate_fn(const AggrFn& fn, const GraphView& graph) {
  if (fn.edge_weighted) {
    check(fn.kind == AggrKind::kSum || fn.kind == AggrKind::kMean,
          "fixed per-edge weights apply to sum/mean only");
    check(graph.weighted(), "edge-weighted aggregation over an unweighted view");
  }
}

inline double edge_w(const GraphView& g, const AggrFn& fn, EdgeIdx e) {
  return (fn.edge_weighted && !g.in_weight.empty()) ? g.in_weight[e] : 1.0;
}

}  // namespace

AggResult aggregate_scratch(const GraphView& graph, const Matrix& feats, const AggrFn& fn) {
  check(feats.rows() >= graph.num_nodes, "feature rows must cover all node ids");
  validate_fn(fn, graph);
  const Eigen::Index dim = feats.cols();
  const NodeId n = graph.num_nodes;

  AggResult r;
  r.kind = fn.kind;
  r.num_edges = graph.num_edges;
  const bool extremal = fn.kind == AggrKind::kMax || fn.kind == AggrKind::kMin;
  const double init = fn.kind == AggrKind::kMax ? -std::numeric_limits<double>::infinity()
                     : fn.kind == AggrKind::kMin ? std::numeric_limits<double>::infinity()
                                                 : 0.0;
  r.values = Matrix::Constant(n, dim, init);
  if (extremal) r.argext = IndexMatrix::Constant(n, dim, -1);
  if (fn.kind == AggrKind::kMean) {
    r.degree = Vector::Zero(n);
    r.mean_sums = Matrix::Zero(n, dim);
  }

  for (NodeId v = 0; v < n; ++v) {
    for (EdgeIdx e = graph.in_ptr[v]; e < graph.in_ptr[v + 1]; ++e) {
      const NodeId u = graph.in_src[e];
      switch (fn.kind) {
        case AggrKind::kSum:
          r.values.row(v) += edge_w(graph, fn, e) * feats.row(u);
          break;
        case AggrKind::kMean: {
          const double w = edge_w(graph, fn, e);
          r.mean_sums.row(v) += w * feats.row(u);
          r.degree(v) += w;
          break;
        }
        case AggrKind::kMax:
          for (Eigen::Index d = 0; d < dim; ++d) {
            if (r.argext(v, d) < 0 || feats(u, d) > r.values(v, d)) {
              r.values(v, d) = feats(u, d);
              r.argext(v, d) = u;
            }
          }
          break;
        case AggrKind::kMin:
          for (Eigen::Index d = 0; d < dim; ++d) {
            if (r.argext(v, d) < 0 || feats(u, d) < r.values(v, d)) {
              r.values(v, d) = feats(u, d);
              r.argext(v, d) = u;
            }
          }
          break;
      }
    }
    if (fn.kind == AggrKind::kMean) {
      if (r.degree(v) > 0) {
        r.values.row(v) = r.mean_sums.row(v) / r.degree(v);
      } else {
        r.values.row(v).setZero();
      }
    }
  }
  return r;
}

IncrementalResult aggregate_incremental(const AggResult& prev, const GraphView& prev_graph,
                                        const GraphView& curr_graph, const Matrix& prev_feats,
                                        const Matrix& curr_feats, const DeltaGraph& delta,
                                        const AggrFn& fn, const IncrementalOptions& opts) {
  check(prev.kind == fn.kind, "incremental update must keep the aggregation kind");
  check(prev.t + 1 == delta.t, "incremental update needs the delta for t = prev.t + 1");
  if (fn.kind == AggrKind::kMean) {
    check(prev.degree.size() > 0, "mean update needs the stored degree vector");
  }
  if (fn.kind == AggrKind::kMax || fn.kind == AggrKind::kMin) {
    check(prev.argext.size() > 0, "max/min update needs stored contributor ids");
  }

  auto fallback = [&](FallbackReason why) {
    IncrementalResult out{aggregate_scratch(curr_graph, curr_feats, fn), true, why};
    out.result.t = delta.t;
    return out;
  };

  if (change_ratio(delta, prev.num_edges) > opts.fallback_threshold) {
    return fallback(FallbackReason::kChangeRatio);
  }
  if (opts.rescratch_period > 0 && prev.incremental_depth + 1 >= opts.rescratch_period) {
    return fallback(FallbackReason::kRescratchPeriod);
  }

  const Eigen::Index dim = curr_feats.cols();

  if (fn.kind == AggrKind::kMax || fn.kind == AggrKind::kMin) {
    // A deleted edge that supplied any recorded extremum invalidates the
    // stored result for that node; recompute everything from scratch then.
    for (const Edge& e : delta.deletions) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        if (prev.argext(e.dst, d) == e.src) return fallback(FallbackReason::kDeletedContributor);
      }
    }
    AggResult r = prev;
    r.t = delta.t;
    r.num_edges = curr_graph.num_edges;
    r.incremental_depth = prev.incremental_depth + 1;
    const bool is_max = fn.kind == AggrKind::kMax;
    for (const Edge& e : delta.insertions) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double x = curr_feats(e.src, d);
        if (r.argext(e.dst, d) < 0 || (is_max ? x > r.values(e.dst, d) : x < r.values(e.dst, d))) {
          r.values(e.dst, d) = x;
          r.argext(e.dst, d) = e.src;
        }
      }
    }
    return {std::move(r), false, FallbackReason::kNone};
  }

  AggResult r = prev;
  r.t = delta.t;
  r.num_edges = curr_graph.num_edges;
  r.incremental_depth = prev.incremental_depth + 1;
  Matrix& acc = fn.kind == AggrKind::kMean ? r.mean_sums : r.values;
  for (const Edge& e : delta.deletions) {
    double w = 1.0;
    if (fn.edge_weighted) {
      auto pw = prev_graph.edge_weight(e.src, e.dst);
      check(pw.has_value(), "deleted edge missing from previous view");
      w = *pw;
    }
    acc.row(e.dst) -= w * prev_feats.row(e.src);
    if (fn.kind == AggrKind::kMean) r.degree(e.dst) -= w;
  }
  for (const Edge& e : delta.insertions) {
    double w = 1.0;
    if (fn.edge_weighted) {
      auto cw = curr_graph.edge_weight(e.src, e.dst);
      check(cw.has_value(), "inserted edge missing from current view");
      w = *cw;
    }
    acc.row(e.dst) += w * curr_feats.row(e.src);
    if (fn.kind == AggrKind::kMean) r.degree(e.dst) += w;
  }
  if (fn.kind == AggrKind::kMean) {
    for (NodeId v = 0; v < r.values.rows(); ++v) {
      if (r.degree(v) > 1e-12) {
        r.values.row(v) = r.mean_sums.row(v) / r.degree(v);
      } else {
        r.degree(v) = 0.0;
        r.mean_sums.row(v).setZero();
        r.values.row(v).setZero();
      }
    }
  }
  return {std::move(r), false, FallbackReason::kNone};
}

Matrix aggregate_backward(const GraphView& graph, const Matrix& upstream, const AggrFn& fn,
                          const AggResult& forward) {
  check(upstream.rows() == graph.num_nodes, "upstream gradient row mismatch");
  validate_fn(fn, graph);
  if (fn.kind == AggrKind::kMean) {
    check(forward.degree.size() == graph.num_nodes, "mean backward needs forward degree");
  }
  if (fn.kind == AggrKind::kMax || fn.kind == AggrKind::kMin) {
    check(forward.argext.rows() == graph.num_nodes, "max/min backward needs forward argext");
  }
  Matrix grad = Matrix::Zero(graph.num_nodes, upstream.cols());
  const Eigen::Index dim = upstream.cols();
  for (NodeId v = 0; v < graph.num_nodes; ++v) {
    switch (fn.kind) {
      case AggrKind::kSum:
        for (EdgeIdx e = graph.in_ptr[v]; e < graph.in_ptr[v + 1]; ++e) {
          grad.row(graph.in_src[e]) += edge_w(graph, fn, e) * upstream.row(v);
        }
        break;
      case AggrKind::kMean: {
        if (forward.degree(v) <= 0) break;
        const double inv = 1.0 / forward.degree(v);
        for (EdgeIdx e = graph.in_ptr[v]; e < graph.in_ptr[v + 1]; ++e) {
          grad.row(graph.in_src[e]) += edge_w(graph, fn, e) * inv * upstream.row(v);
        }
        break;
      }
      case AggrKind::kMax:
      case AggrKind::kMin:
        for (Eigen::Index d = 0; d < dim; ++d) {
          const NodeId u = forward.argext(v, d);
          if (u >= 0) grad(u, d) += upstream(v, d);
        }
        break;
    }
  }
  return grad;
}

}  // namespace dgnn
