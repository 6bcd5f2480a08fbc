/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/train.hpp
 * @brief Training loops (seq-first and node-first), optimizers, epoch metrics.
 */
#ifndef DGNN_TRAIN_HPP
#define DGNN_TRAIN_HPP

#include <memory>
#include <optional>

#include "dgnn/model.hpp"

namespace dgnn {

enum class IterationOrder { kSeqFirst, kNodeFirst };
enum class OptimizerKind { kSgd, kAdam };

IterationOrder iteration_from_string(const std::string& s);
OptimizerKind optimizer_from_string(const std::string& s);

struct TrainConfig {
  int batch_size = 0;  // <= 0 or >= N: one batch of all nodes
  int epochs = 1;
  double lr = 0.01;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  IterationOrder iteration = IterationOrder::kSeqFirst;
  Timestep stride = 1;  // S of the sliding window
  uint64_t seed = 1;
  double fallback_threshold = 0.5;
  int rescratch_period = 64;
  bool incremental = true;
  std::optional<CachePolicy> cache_policy = CachePolicy::kReinc;  // nullopt: off
  double cache_capacity_frac = 1.0;
};

struct EpochReport {
  std::vector<double> sample_losses;  // per (batch, window) in visit order
  double loss = 0.0;                  // epoch mean of sample losses
  double mae = 0.0;                   // identical metric, reported separately
  CacheStats cache;                   // deltas for this epoch
  int64_t kernel_invocations = 0;
  int64_t scratch_calls = 0;
  int64_t incremental_calls = 0;
  int64_t fallbacks = 0;
  int64_t skipped_steps = 0;
  double seconds = 0.0;
  uint64_t comm_bytes = 0;
  std::vector<std::pair<int64_t, int64_t>> visitation;  // (batch index, window index)
};

struct OptimizerState {
  std::map<std::string, Matrix> m;
  std::map<std::string, Matrix> v;
  int64_t step_count = 0;
};

// One parameter update from accumulated gradients. Non-finite gradients skip
// the whole step. An applied step invalidates weight-dependent cache entries.
// Returns false when the step was skipped.
bool optimizer_step(DgnnModel& model, const ParamMap& grads, OptimizerState& state,
                    const TrainConfig& cfg, CacheStore* store);

// Contiguous node ranges; the visit order is a seeded shuffle.
std::vector<std::pair<NodeId, NodeId>> make_batches(NodeId num_nodes, int batch_size,
                                                    uint64_t seed, int64_t epoch_index);

// Materializes the (batch, window) sample: graph views (whole snapshots under
// full fanouts, sampled k-hop subgraphs otherwise) and feature pointers.
SeqSample build_sample(const DynamicGraph& graph, const ModelConfig& mcfg,
                       const SequenceWindow& window, Timestep windows_remaining,
                       int64_t batch_id, std::pair<NodeId, NodeId> node_range, uint64_t seed);

// Capacity baseline: twice the window's first-layer input-aggregation bytes
// (the paired hidden stream coexists with the input stream at equal width).
double cache_data_size_units(const DynamicGraph& graph, const ModelConfig& mcfg);

// Outer loop over node mini-batches, inner loop over all windows.
EpochReport seq_first_epoch(DgnnModel& model, const DynamicGraph& graph,
                            const std::vector<SequenceWindow>& windows, const TrainConfig& cfg,
                            AggProvider& provider, OptimizerState& opt, int64_t epoch_index);

// Outer loop over windows, inner loop over node mini-batches.
EpochReport node_first_epoch(DgnnModel& model, const DynamicGraph& graph,
                             const std::vector<SequenceWindow>& windows, const TrainConfig& cfg,
                             AggProvider& provider, OptimizerState& opt, int64_t epoch_index);

// Convenience holder wiring model, cache store, provider and optimizer state.
class TrainSession {
 public:
  TrainSession(const DynamicGraph& graph, const ModelConfig& mcfg, const TrainConfig& tcfg);

  EpochReport run_epoch();
  std::vector<EpochReport> run();  // tcfg.epochs epochs

  DgnnModel& model() { return model_; }
  AggProvider& provider() { return *provider_; }
  CacheStore* store() { return store_.get(); }
  const std::vector<SequenceWindow>& windows() const { return windows_; }

 private:
  const DynamicGraph& graph_;
  ModelConfig mcfg_;
  TrainConfig tcfg_;
  DgnnModel model_;
  std::vector<SequenceWindow> windows_;
  std::unique_ptr<CacheStore> store_;
  std::unique_ptr<AggProvider> provider_;
  OptimizerState opt_;
  int64_t epoch_index_ = 0;
};

}  // namespace dgnn

#endif  // DGNN_TRAIN_HPP
