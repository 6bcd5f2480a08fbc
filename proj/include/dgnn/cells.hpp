/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/cells.hpp
 * @brief GCN layers and LSTM/GRU cells, in graph (aggregation) and dense form.
 *
 * A GraphRnnCell replaces each gate's two matrix products with graph
 * operations: one over the inputs, one over the hidden state. Every gate asks
 * the provider for its aggregation, so one cell step issues exactly K fetches
 * per side and the aggregation itself is computed once.
 */
#ifndef DGNN_CELLS_HPP
#define DGNN_CELLS_HPP

#include "dgnn/engine.hpp"
#include "dgnn/nn.hpp"

namespace dgnn {

enum class CellKind { kLstm, kGru };
inline int gate_count(CellKind k) { return k == CellKind::kLstm ? 4 : 3; }

// ---------------------------------------------------------------------------
// GCN layer: aggregate -> (optional left-degree normalization) -> linear ->
// activation.

enum class GcnNorm { kNone, kLeftDegree };

struct GcnLayer {
  Linear lin;
  AggrFn aggr;
  Activation act = Activation::kNone;
  GcnNorm norm = GcnNorm::kNone;
};

GcnLayer make_gcn_layer(Eigen::Index in, Eigen::Index out, AggrFn aggr, Activation act,
                        GcnNorm norm, std::mt19937_64& rng);

struct GcnTape {
  std::shared_ptr<const AggResult> agg;
  Matrix normed;  // aggregation after sentinel mapping and normalization
  Matrix out;
};

// Consumes an already-fetched aggregation handle.
GcnTape gcn_apply(const GcnLayer& layer, const GraphView& view,
                  std::shared_ptr<const AggResult> agg);

// Cache-aware convenience: fetches the input aggregation through the provider
// (global level, first layer) and applies the layer.
GcnTape gcn_forward(const GcnLayer& layer, const GraphView& view, const Matrix& feats,
                    AggProvider* provider, int64_t batch, Timestep t, const ExecContext& ctx);

// Returns d(feats); accumulates parameter grads under `prefix`.
Matrix gcn_backward(const GcnLayer& layer, const GraphView& view, const GcnTape& tape,
                    const Matrix& dout, const std::string& prefix, ParamMap* grads);

// ---------------------------------------------------------------------------
// Shared LSTM/GRU gate math over generic operand matrices. X is what the gate
// input weights multiply, Hm what the hidden weights multiply, h_skip the
// ungated previous hidden state (GRU skip path).

struct CellParams {
  CellKind kind = CellKind::kLstm;
  std::vector<Matrix> wx;  // K matrices, in x hidden
  std::vector<Matrix> uh;  // K matrices, hidden x hidden
  std::vector<Matrix> b;   // K bias rows, 1 x hidden
  Eigen::Index in_dim = 0;
  Eigen::Index hidden_dim = 0;

  void init(CellKind k, Eigen::Index in, Eigen::Index hidden, std::mt19937_64& rng);
  void visit_params(const std::string& prefix,
                    const std::function<void(const std::string&, Matrix*)>& fn);
};

struct CellTape {
  std::vector<Matrix> gates;  // LSTM: i,f,g,o; GRU: r,z,n (post-activation)
  Matrix hn;                  // GRU: Hm * Uh_n before the reset product
  Matrix c_prev, c;           // LSTM
  Matrix h_skip;              // GRU skip operand
  Matrix h;
};

CellTape cell_core_forward(const CellParams& p, const Matrix& X, const Matrix& Hm,
                           const Matrix& h_skip, const Matrix* c_prev);

struct CellCoreGrads {
  Matrix dX;
  Matrix dHm;
  Matrix dh_skip;  // GRU only (zero matrix otherwise)
  Matrix dc_prev;  // LSTM only
};

CellCoreGrads cell_core_backward(const CellParams& p, const CellTape& tape, const Matrix& X,
                                 const Matrix& Hm, const Matrix& dh, const Matrix* dc,
                                 const std::string& prefix, ParamMap* grads);

// ---------------------------------------------------------------------------
// Graph cell step: operands come from aggregations fetched per gate.

using GateFetch = std::function<std::shared_ptr<const AggResult>(int gate)>;

struct GraphStepTape {
  std::shared_ptr<const AggResult> agg_x, agg_h;
  Matrix x_dense, h_dense;  // sentinel-mapped aggregation values
  CellTape core;
};

struct GraphStepResult {
  Matrix h;
  Matrix c;  // empty for GRU
  GraphStepTape tape;
};

// fetch_x / fetch_h are called once per gate (1-based); their payloads carry
// the same values, the repetition is the caching discipline.
GraphStepResult graphrnn_step(const CellParams& cell, const GraphView& view,
                              const GateFetch& fetch_x, const GateFetch& fetch_h,
                              const Matrix& h_prev, const Matrix* c_prev);

struct GraphStepGrads {
  Matrix dx;       // gradient w.r.t. the gate-input features (pre-aggregation)
  Matrix dh_prev;
  Matrix dc_prev;  // LSTM only
};

GraphStepGrads graphrnn_step_backward(const CellParams& cell, const GraphView& view,
                                      const GraphStepTape& tape, const Matrix& dh,
                                      const Matrix* dc, const std::string& prefix,
                                      ParamMap* grads);

// ---------------------------------------------------------------------------
// Dense cell step (stacked models): plain matrix products.

struct DenseStepResult {
  Matrix h;
  Matrix c;
  CellTape tape;
};

DenseStepResult dense_cell_step(const CellParams& cell, const Matrix& x, const Matrix& h_prev,
                                const Matrix* c_prev);

struct DenseStepGrads {
  Matrix dx;
  Matrix dh_prev;
  Matrix dc_prev;
};

DenseStepGrads dense_cell_step_backward(const CellParams& cell, const CellTape& tape,
                                        const Matrix& x, const Matrix& h_prev, const Matrix& dh,
                                        const Matrix* dc, const std::string& prefix,
                                        ParamMap* grads);

}  // namespace dgnn

#endif  // DGNN_CELLS_HPP
