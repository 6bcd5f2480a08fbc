/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/model.hpp
 * @brief Stacked and integrated DGNN models with full BPTT.
 *
 * Stacked models alternate GCN and dense recurrent layers; the GCN phase is
 * time-independent and only first-pair input aggregations touch the cache.
 * Integrated models run GraphRNN stacks (encoder plus decoder); every gate
 * routes its aggregations through the provider. The decoder consumes
 * ground-truth features of snapshot start+L+j at step j under teacher forcing
 * and its own fed-back prediction otherwise (feedback is stop-gradient).
 */
#ifndef DGNN_MODEL_HPP
#define DGNN_MODEL_HPP

#include "dgnn/cells.hpp"
#include "dgnn/windows.hpp"

namespace dgnn {

enum class Architecture { kGcrnM1, kCdGcn, kGcrnM2, kTgcn };

Architecture architecture_from_string(const std::string& s);
const char* to_string(Architecture a);
bool is_stacked(Architecture a);
CellKind cell_kind_of(Architecture a);

struct ModelConfig {
  Architecture arch = Architecture::kGcrnM2;
  int layers = 2;  // GraphRNN layers per stack (integrated) or GNN-RNN pairs (stacked)
  Eigen::Index feature_dim = 0;
  Eigen::Index hidden_dim = 16;
  Timestep seq_len = 8;
  Timestep horizon = 1;
  bool teacher_forcing = true;
  AggrFn aggr;
  std::vector<Fanout> fanouts;  // empty or all-full: whole-snapshot views
  uint64_t seed = 1;
};

class DgnnModel {
 public:
  static DgnnModel create(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  int gates() const { return gate_count(cell_kind_of(cfg_.arch)); }

  void visit_params(const std::function<void(const std::string&, Matrix*)>& fn);
  // Deterministic flat copy of all parameters (bitwise comparisons, io).
  std::vector<double> flatten_params();
  void unflatten_params(const std::vector<double>& flat);

  ModelConfig cfg_;
  // Integrated.
  std::vector<CellParams> enc_cells_;
  std::vector<CellParams> dec_cells_;
  // Stacked.
  std::vector<GcnLayer> gcn_;
  std::vector<CellParams> rnn_;
  Linear head_;  // hidden -> feature_dim, shared across horizon steps
};

// One training sample: a window's graph views, feature pointers and the node
// mini-batch it belongs to.
struct SeqSample {
  SequenceWindow window;
  std::vector<GraphView> views;        // L+H views, t = start .. start+L+H-1
  std::vector<std::shared_ptr<OwnedView>> owned;  // backing storage for sampled views
  std::vector<const Matrix*> feats;    // L+H+1 matrices, t = start .. start+L+H
  std::vector<NodeId> seeds;           // loss rows
  int64_t batch_id = 0;
  Timestep windows_remaining = 0;
};

struct IntegratedTape {
  std::vector<std::vector<GraphStepTape>> enc_steps;  // [idx][layer]
  std::vector<std::vector<GraphStepTape>> dec_steps;  // [j][layer]
  std::vector<Matrix> dec_inputs;                     // decoder x operands
  Matrix enc_final_pred;                              // feedback seed when not forced
};

struct StackedTape {
  std::vector<std::vector<GcnTape>> gcn;     // [pair][idx]
  std::vector<std::vector<CellTape>> rnn;    // [pair][idx]
  std::vector<std::vector<Matrix>> rnn_in;   // [pair][idx]
  std::vector<std::vector<Matrix>> h_out;    // [pair][idx] hidden after the step
};

struct ForwardArtifacts {
  std::vector<Matrix> predictions;  // H matrices, num_nodes x feature_dim
  IntegratedTape itape;
  StackedTape stape;
};

// Encoder-decoder forward for integrated models.
ForwardArtifacts seq2seq_forward(DgnnModel& model, const SeqSample& sample, AggProvider& provider);

// GNN-then-RNN forward for stacked models.
ForwardArtifacts stacked_forward(DgnnModel& model, const SeqSample& sample, AggProvider& provider);

ForwardArtifacts model_forward(DgnnModel& model, const SeqSample& sample, AggProvider& provider);

// dpred: per horizon step, gradient of the loss w.r.t. the prediction matrix.
ParamMap model_backward(DgnnModel& model, const SeqSample& sample, const ForwardArtifacts& fwd,
                        const std::vector<Matrix>& dpred);

}  // namespace dgnn

#endif  // DGNN_MODEL_HPP
