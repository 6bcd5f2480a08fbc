/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/distsim.hpp
 * @brief Simulated multi-worker training: placement schemes, exact
 *        communication accounting, deterministic gradient synchronization.
 *
 * Workers are sequentially interleaved execution contexts; "communication" is
 * byte accounting plus in-process value exchange. Consecutive-block placement
 * keeps every window's snapshots worker-local, so remote-feature and
 * redistribution counters stay at exactly zero. Gradient synchronization sums
 * per-window gradients in global window order and normalizes by the global
 * sample count, which makes final parameters bit-identical for any worker
 * count.
 */
#ifndef DGNN_DISTSIM_HPP
#define DGNN_DISTSIM_HPP

#include "dgnn/train.hpp"

namespace dgnn {

enum class PlacementScheme { kConsecutiveBlock, kNodePartition, kSequencePartition };
enum class OverlapMode { kReplicateOverlap, kRemoteFetch };

PlacementScheme scheme_from_string(const std::string& s);
const char* to_string(PlacementScheme s);
OverlapMode overlap_from_string(const std::string& s);

struct WorkerAssignment {
  Timestep block_begin = 0;   // owned snapshots [begin, end)
  Timestep block_end = 0;
  int64_t window_begin = 0;   // global window indices [begin, end)
  int64_t window_end = 0;
  NodeId node_begin = 0;      // node_partition ranges
  NodeId node_end = 0;
};

struct WorkerPlan {
  PlacementScheme scheme = PlacementScheme::kConsecutiveBlock;
  OverlapMode overlap = OverlapMode::kReplicateOverlap;
  int num_workers = 1;
  Timestep total_snapshots = 0;
  Timestep seq_len = 1;
  Timestep stride = 1;
  Timestep horizon = 0;
  std::vector<WorkerAssignment> workers;
};

// Consecutive-block: valid window starts are split into runs whose counts
// differ by at most one; owned snapshot blocks follow from the runs (disjoint,
// union [0, T)), and each worker additionally replicates (or fetches) the
// first L+H-1 snapshots of the next block. Node partition: balanced
// contiguous node ranges, every worker sees all snapshots. Sequence
// partition: snapshots within each window round-robin across workers.
WorkerPlan plan(PlacementScheme scheme, Timestep total, int num_workers, Timestep seq_len,
                Timestep stride, Timestep horizon, OverlapMode overlap);

struct CommVolume {
  uint64_t remote_features = 0;
  uint64_t intermediate_redistribution = 0;
  uint64_t gradient_sync = 0;
  uint64_t snapshot_fetch = 0;
  uint64_t total() const {
    return remote_features + intermediate_redistribution + gradient_sync + snapshot_fetch;
  }
};

struct CommLedger {
  CommVolume total;
  std::vector<CommVolume> per_worker;
};

// Every worker receives the ordered sum (worker 0 first) divided by the
// worker count; bit-identical across workers by construction.
ParamMap allreduce_sim(const std::vector<ParamMap>& per_worker);

struct DistributedResult {
  std::vector<EpochReport> per_worker;
  CommLedger ledger;
};

class DistSession {
 public:
  DistSession(const DynamicGraph& graph, const ModelConfig& mcfg, const TrainConfig& tcfg,
              const WorkerPlan& plan);

  DistributedResult run_epoch();
  DgnnModel& model() { return model_; }
  const std::vector<SequenceWindow>& windows() const { return windows_; }

 private:
  const DynamicGraph& graph_;
  ModelConfig mcfg_;
  TrainConfig tcfg_;
  WorkerPlan plan_;
  DgnnModel model_;
  std::vector<SequenceWindow> windows_;
  std::vector<std::unique_ptr<CacheStore>> stores_;
  std::vector<std::unique_ptr<AggProvider>> providers_;
  OptimizerState opt_;
  int64_t epoch_index_ = 0;
};

// One epoch of data-parallel training under the plan; model is updated.
DistributedResult run_distributed_epoch(DgnnModel& model, const DynamicGraph& graph,
                                        const WorkerPlan& plan, const ModelConfig& mcfg,
                                        const TrainConfig& tcfg, OptimizerState& opt,
                                        int64_t epoch_index);

}  // namespace dgnn

#endif  // DGNN_DISTSIM_HPP
