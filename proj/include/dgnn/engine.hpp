/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/engine.hpp
 * @brief Cache-disciplined aggregation provider shared by all model forwards.
 *
 * Every gate of a cell asks the provider for its aggregation. The provider is
 * plan-aware for the scoring policy: a first-ever computation (hidden
 * aggregations at gate 1, input aggregations of snapshots past the per-batch
 * watermark) is computed and inserted without probing the store, so counted
 * lookups are exactly the genuine reuse opportunities. LRU/LFU baselines run
 * as naive clients: every request probes first and a miss computes + inserts.
 *
 * Input aggregations are computed incrementally whenever the previous
 * snapshot's aggregation is at hand, either from the sequential pipeline
 * register or borrowed (uncounted) from the store.
 */
#ifndef DGNN_ENGINE_HPP
#define DGNN_ENGINE_HPP

#include <memory>
#include <unordered_map>

#include "dgnn/cache.hpp"
#include "dgnn/khop.hpp"
#include "dgnn/windows.hpp"

namespace dgnn {

struct InvocationRecord {
  int layer = 0;
  Timestep t = 0;
  AggKeyKind kind = AggKeyKind::kInput;
  bool incremental = false;
};

struct ExecutionStats {
  int64_t scratch_calls = 0;
  int64_t incremental_calls = 0;
  int64_t fallbacks = 0;
  std::vector<InvocationRecord> invocations;

  int64_t kernel_invocations() const { return scratch_calls + incremental_calls; }
};

class AggProvider {
 public:
  // `store` may be null (caching off). `graph` supplies deltas for the
  // incremental path; it may be null when incremental updates are disabled.
  AggProvider(CacheStore* store, const DynamicGraph* graph, AggrFn fn, bool incremental,
              IncrementalOptions inc_opts = {});

  // Marks the beginning of one cell step; hidden keys produced until the next
  // call share the returned serial.
  int64_t begin_cell_step();

  // First-layer input aggregation of snapshot t for the batch.
  std::shared_ptr<const AggResult> fetch_input(int64_t batch, Timestep t, const GraphView& view,
                                               const Matrix& feats, const ExecContext& ctx);

  // Hidden-state aggregation (previous timestep or previous layer) over the
  // current view; values are step-scoped.
  std::shared_ptr<const AggResult> fetch_hidden(int64_t batch, Timestep t, int layer,
                                                AggKeyKind kind, const GraphView& view,
                                                const Matrix& hidden, const ExecContext& ctx);

  // Aggregation computed outside the cache entirely (stacked pairs past the
  // first operate on intermediate embeddings and are not reusable).
  std::shared_ptr<const AggResult> compute_uncached(int layer, Timestep t, AggKeyKind kind,
                                                    const GraphView& view, const Matrix& feats);

  // Forgets watermarks and the pipeline register (new epoch or new batch).
  void reset_plan_state();

  CacheStore* store() { return store_; }
  const ExecutionStats& stats() const { return stats_; }
  void clear_invocation_log() { stats_.invocations.clear(); }
  const AggrFn& fn() const { return fn_; }

 private:
  std::shared_ptr<const AggResult> compute_input(int64_t batch, Timestep t, const GraphView& view,
                                                 const Matrix& feats);
  std::shared_ptr<const AggResult> compute_scratch(int layer, Timestep t, AggKeyKind kind,
                                                   const GraphView& view, const Matrix& feats);
  bool plan_aware() const { return store_ == nullptr || store_->policy() == CachePolicy::kReinc; }

  CacheStore* store_;
  const DynamicGraph* graph_;
  AggrFn fn_;
  bool incremental_;
  IncrementalOptions inc_opts_;
  ExecutionStats stats_;
  int64_t step_serial_ = 0;

  // Sequential pipeline register: the last two input aggregations per batch.
  struct ChainState {
    std::shared_ptr<const AggResult> curr;  // aggregation of snapshot curr_t
    std::shared_ptr<const AggResult> prev;  // aggregation of snapshot curr_t - 1
    Timestep curr_t = -1;
  };
  std::unordered_map<int64_t, ChainState> chain_;
  std::unordered_map<int64_t, Timestep> watermark_;  // max input t aggregated per batch
};

}  // namespace dgnn

#endif  // DGNN_ENGINE_HPP
