/**
 *  Copyright (c) 2026 by Contributors
 * @file model.cpp
 */
#include "dgnn/model.hpp"

namespace dgnn {

Architecture architecture_from_string(const std::string& s) {
  if (s == "gcrn_m1") return Architecture::kGcrnM1;
  if (s == "cd_gcn") return Architecture::kCdGcn;
  if (s == "gcrn_m2") return Architecture::kGcrnM2;
  if (s == "tgcn") return Architecture::kTgcn;
  fail("unknown architecture: " + s);
}

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::kGcrnM1: return "gcrn_m1";
    case Architecture::kCdGcn: return "cd_gcn";
    case Architecture::kGcrnM2: return "gcrn_m2";
    case Architecture::kTgcn: return "tgcn";
  }
  return "?";
}

bool is_stacked(Architecture a) {
  return a == Architecture::kGcrnM1 || a == Architecture::kCdGcn;
}

CellKind cell_kind_of(Architecture a) {
  switch (a) {
    case Architecture::kGcrnM1:
    case Architecture::kGcrnM2: return CellKind::kLstm;
    case Architecture::kCdGcn:
    case Architecture::kTgcn: return CellKind::kGru;
  }
  return CellKind::kLstm;
}

DgnnModel DgnnModel::create(const ModelConfig& cfg) {
  check(cfg.layers >= 1, "model needs at least one layer");
  check(cfg.feature_dim >= 1 && cfg.hidden_dim >= 1, "model dims must be positive");
  DgnnModel m;
  m.cfg_ = cfg;
  std::mt19937_64 rng(derive_seed(cfg.seed, 0x90de1));
  const CellKind kind = cell_kind_of(cfg.arch);
  if (is_stacked(cfg.arch)) {
    Eigen::Index in = cfg.feature_dim;
    for (int p = 0; p < cfg.layers; ++p) {
      m.gcn_.push_back(
          make_gcn_layer(in, cfg.hidden_dim, cfg.aggr, Activation::kRelu, GcnNorm::kNone, rng));
      CellParams cell;
      cell.init(kind, cfg.hidden_dim, cfg.hidden_dim, rng);
      m.rnn_.push_back(std::move(cell));
      in = cfg.hidden_dim;
    }
  } else {
    for (int l = 0; l < cfg.layers; ++l) {
      const Eigen::Index in = l == 0 ? cfg.feature_dim : cfg.hidden_dim;
      CellParams enc, dec;
      enc.init(kind, in, cfg.hidden_dim, rng);
      dec.init(kind, in, cfg.hidden_dim, rng);
      m.enc_cells_.push_back(std::move(enc));
      m.dec_cells_.push_back(std::move(dec));
    }
  }
  m.head_ = make_linear(cfg.hidden_dim, cfg.feature_dim, rng);
  return m;
}

void DgnnModel::visit_params(const std::function<void(const std::string&, Matrix*)>& fn) {
  for (size_t l = 0; l < enc_cells_.size(); ++l) {
    enc_cells_[l].visit_params("enc" + std::to_string(l + 1), fn);
  }
  for (size_t l = 0; l < dec_cells_.size(); ++l) {
    dec_cells_[l].visit_params("dec" + std::to_string(l + 1), fn);
  }
  for (size_t p = 0; p < gcn_.size(); ++p) {
    const std::string prefix = "gcn" + std::to_string(p + 1);
    fn(prefix + "/w", &gcn_[p].lin.weight);
    fn(prefix + "/b", &gcn_[p].lin.bias);
  }
  for (size_t p = 0; p < rnn_.size(); ++p) {
    rnn_[p].visit_params("rnn" + std::to_string(p + 1), fn);
  }
  fn("head/w", &head_.weight);
  fn("head/b", &head_.bias);
}

std::vector<double> DgnnModel::flatten_params() {
  std::vector<double> flat;
  visit_params([&](const std::string&, Matrix* m) {
    flat.insert(flat.end(), m->data(), m->data() + m->size());
  });
  return flat;
}

void DgnnModel::unflatten_params(const std::vector<double>& flat) {
  size_t pos = 0;
  visit_params([&](const std::string&, Matrix* m) {
    check(pos + m->size() <= flat.size(), "parameter buffer too short");
    std::copy(flat.begin() + pos, flat.begin() + pos + m->size(), m->data());
    pos += m->size();
  });
  check(pos == flat.size(), "parameter buffer size mismatch");
}

namespace {

ExecContext make_ctx(const DgnnModel& model, const SeqSample& sample, ModelPart part,
                     Timestep idx, int layer, int gate, AggKeyKind kind) {
  ExecContext ctx;
  ctx.num_layers = model.cfg_.layers;
  ctx.gates = model.gates();
  ctx.gate = gate;
  ctx.seq_len = sample.window.length;
  ctx.stride = sample.window.stride;
  ctx.idx = idx;
  ctx.part = part;
  ctx.layer = layer;
  ctx.teacher_forcing = model.cfg_.teacher_forcing;
  ctx.horizon = sample.window.horizon;
  ctx.windows_remaining = sample.windows_remaining;
  ctx.kind = kind;
  return ctx;
}

// Runs one GraphRNN stack step at (part, pos) over `view`, reading layer-1
// inputs from `x` and updating h/c in place.
void run_stack_step(DgnnModel& model, std::vector<CellParams>& cells, const SeqSample& sample,
                    AggProvider& provider, ModelPart part, Timestep pos, Timestep t,
                    const GraphView& view, const Matrix& x, bool x_is_data,
                    std::vector<Matrix>* h, std::vector<Matrix>* c,
                    std::vector<GraphStepTape>* tapes) {
  const int D = model.cfg_.layers;
  for (int l = 1; l <= D; ++l) {
    provider.begin_cell_step();
    const Matrix& x_src = l == 1 ? x : (*h)[l - 2];
    GateFetch fetch_x = [&](int gate) {
      if (l == 1 && x_is_data) {
        return provider.fetch_input(sample.batch_id, t, view, x_src,
                                    make_ctx(model, sample, part, pos, 1, gate,
                                             AggKeyKind::kInput));
      }
      // Intermediate operands (upper layers, or fed-back predictions) are
      // step-scoped: their values change with the parameters.
      return provider.fetch_hidden(sample.batch_id, t, l, AggKeyKind::kHiddenPrevLayer, view,
                                   x_src,
                                   make_ctx(model, sample, part, pos, l, gate,
                                            AggKeyKind::kHiddenPrevLayer));
    };
    GateFetch fetch_h = [&](int gate) {
      return provider.fetch_hidden(sample.batch_id, t, l, AggKeyKind::kHiddenPrevT, view,
                                   (*h)[l - 1],
                                   make_ctx(model, sample, part, pos, l, gate,
                                            AggKeyKind::kHiddenPrevT));
    };
    Matrix* c_prev = c->empty() ? nullptr : &(*c)[l - 1];
    GraphStepResult step =
        graphrnn_step(cells[l - 1], view, fetch_x, fetch_h, (*h)[l - 1], c_prev);
    (*h)[l - 1] = step.h;
    if (c_prev != nullptr) (*c)[l - 1] = step.c;
    tapes->push_back(std::move(step.tape));
  }
}

}  // namespace

ForwardArtifacts seq2seq_forward(DgnnModel& model, const SeqSample& sample,
                                 AggProvider& provider) {
  const ModelConfig& cfg = model.cfg_;
  check(!is_stacked(cfg.arch), "seq2seq_forward needs an integrated model");
  const Timestep L = sample.window.length;
  const Timestep H = sample.window.horizon;
  check(static_cast<Timestep>(sample.views.size()) == L + H, "sample views must cover L+H steps");
  check(static_cast<Timestep>(sample.feats.size()) == L + H + 1,
        "sample features must cover L+H+1 snapshots");

  const NodeId n = sample.views[0].num_nodes;
  const int D = cfg.layers;
  std::vector<Matrix> h(D, Matrix::Zero(n, cfg.hidden_dim));
  std::vector<Matrix> c;
  if (cell_kind_of(cfg.arch) == CellKind::kLstm) c.assign(D, Matrix::Zero(n, cfg.hidden_dim));

  ForwardArtifacts out;
  out.itape.enc_steps.resize(L);
  for (Timestep idx = 0; idx < L; ++idx) {
    run_stack_step(model, model.enc_cells_, sample, provider, ModelPart::kEncoder, idx,
                   sample.window.snapshot_at(idx), sample.views[idx], *sample.feats[idx], true,
                   &h, &c, &out.itape.enc_steps[idx]);
  }

  if (!cfg.teacher_forcing) out.itape.enc_final_pred = linear_forward(model.head_, h[D - 1]);

  out.itape.dec_steps.resize(H);
  Matrix feedback = out.itape.enc_final_pred;
  for (Timestep j = 0; j < H; ++j) {
    const Timestep t = sample.window.start + L + j;
    const GraphView& view = sample.views[L + j];
    const bool forced = cfg.teacher_forcing;
    const Matrix& x = forced ? *sample.feats[L + j] : feedback;
    out.itape.dec_inputs.push_back(x);
    run_stack_step(model, model.dec_cells_, sample, provider, ModelPart::kDecoder, j, t, view, x,
                   forced, &h, &c, &out.itape.dec_steps[j]);
    Matrix pred = linear_forward(model.head_, h[D - 1]);
    feedback = pred;  // feedback carries no gradient
    out.predictions.push_back(std::move(pred));
  }
  return out;
}

ForwardArtifacts stacked_forward(DgnnModel& model, const SeqSample& sample,
                                 AggProvider& provider) {
  const ModelConfig& cfg = model.cfg_;
  check(is_stacked(cfg.arch), "stacked_forward needs a stacked model");
  const Timestep L = sample.window.length;
  const Timestep H = sample.window.horizon;
  const NodeId n = sample.views[0].num_nodes;
  const int P = cfg.layers;

  ForwardArtifacts out;
  out.stape.gcn.resize(P);
  out.stape.rnn.resize(P);
  out.stape.rnn_in.resize(P);
  out.stape.h_out.resize(P);

  std::vector<Matrix> inputs;  // per t, operand of the current pair's GCN
  for (Timestep idx = 0; idx < L; ++idx) inputs.push_back(*sample.feats[idx]);

  Matrix h_final;
  for (int p = 0; p < P; ++p) {
    // GNN phase: per-timestep, independent of any recurrent state.
    for (Timestep idx = 0; idx < L; ++idx) {
      const Timestep t = sample.window.snapshot_at(idx);
      const GraphView& view = sample.views[idx];
      std::shared_ptr<const AggResult> agg;
      if (p == 0) {
        // Gateless consumer: one lookup per visit, so K = 1.
        ExecContext ctx = make_ctx(model, sample, ModelPart::kEncoder, idx, 1, 1,
                                   AggKeyKind::kInput);
        ctx.gates = 1;
        ctx.num_layers = 1;
        agg = provider.fetch_input(sample.batch_id, t, view, inputs[idx], ctx);
      } else {
        agg = provider.compute_uncached(p + 1, t, AggKeyKind::kHiddenPrevLayer, view,
                                        inputs[idx]);
      }
      out.stape.gcn[p].push_back(gcn_apply(model.gcn_[p], view, agg));
    }
    // RNN phase over the embedding sequence.
    Matrix h = Matrix::Zero(n, cfg.hidden_dim);
    Matrix c = Matrix::Zero(n, cfg.hidden_dim);
    const bool lstm = cell_kind_of(cfg.arch) == CellKind::kLstm;
    for (Timestep idx = 0; idx < L; ++idx) {
      const Matrix& x = out.stape.gcn[p][idx].out;
      out.stape.rnn_in[p].push_back(x);
      DenseStepResult step = dense_cell_step(model.rnn_[p], x, h, lstm ? &c : nullptr);
      h = step.h;
      if (lstm) c = step.c;
      out.stape.rnn[p].push_back(std::move(step.tape));
      out.stape.h_out[p].push_back(h);
      inputs[idx] = h;  // operand for the next pair
    }
    h_final = h;
  }

  Matrix pred = linear_forward(model.head_, h_final);
  for (Timestep j = 0; j < H; ++j) out.predictions.push_back(pred);
  return out;
}

ForwardArtifacts model_forward(DgnnModel& model, const SeqSample& sample, AggProvider& provider) {
  return is_stacked(model.cfg_.arch) ? stacked_forward(model, sample, provider)
                                     : seq2seq_forward(model, sample, provider);
}

namespace {

ParamMap integrated_backward(DgnnModel& model, const SeqSample& sample,
                             const ForwardArtifacts& fwd, const std::vector<Matrix>& dpred) {
  const ModelConfig& cfg = model.cfg_;
  const Timestep L = sample.window.length;
  const Timestep H = sample.window.horizon;
  const NodeId n = sample.views[0].num_nodes;
  const int D = cfg.layers;
  const bool lstm = cell_kind_of(cfg.arch) == CellKind::kLstm;

  ParamMap grads;
  auto add = [&](const std::string& name, const Matrix& g) {
    auto it = grads.find(name);
    if (it == grads.end()) {
      grads[name] = g;
    } else {
      it->second += g;
    }
  };

  std::vector<Matrix> dh(D, Matrix::Zero(n, cfg.hidden_dim));
  std::vector<Matrix> dc(D, Matrix::Zero(n, cfg.hidden_dim));

  for (Timestep j = H - 1; j >= 0; --j) {
    // Head: pred_j = h[D] * W + b.
    const GraphStepTape& top = fwd.itape.dec_steps[j][D - 1];
    add("head/w", top.core.h.transpose() * dpred[j]);
    add("head/b", dpred[j].colwise().sum());
    dh[D - 1] += dpred[j] * model.head_.weight.transpose();

    for (int l = D; l >= 1; --l) {
      const GraphStepTape& tape = fwd.itape.dec_steps[j][l - 1];
      GraphStepGrads g = graphrnn_step_backward(
          model.dec_cells_[l - 1], sample.views[L + j], tape, dh[l - 1],
          lstm ? &dc[l - 1] : nullptr, "dec" + std::to_string(l), &grads);
      dh[l - 1] = std::move(g.dh_prev);
      if (lstm) dc[l - 1] = std::move(g.dc_prev);
      if (l > 1) dh[l - 2] += g.dx;
      // Layer-1 inputs are data or stop-gradient feedback.
    }
  }

  for (Timestep idx = L - 1; idx >= 0; --idx) {
    for (int l = D; l >= 1; --l) {
      const GraphStepTape& tape = fwd.itape.enc_steps[idx][l - 1];
      GraphStepGrads g = graphrnn_step_backward(
          model.enc_cells_[l - 1], sample.views[idx], tape, dh[l - 1],
          lstm ? &dc[l - 1] : nullptr, "enc" + std::to_string(l), &grads);
      dh[l - 1] = std::move(g.dh_prev);
      if (lstm) dc[l - 1] = std::move(g.dc_prev);
      if (l > 1) dh[l - 2] += g.dx;
    }
  }
  return grads;
}

ParamMap stacked_backward(DgnnModel& model, const SeqSample& sample, const ForwardArtifacts& fwd,
                          const std::vector<Matrix>& dpred) {
  const ModelConfig& cfg = model.cfg_;
  const Timestep L = sample.window.length;
  const NodeId n = sample.views[0].num_nodes;
  const int P = cfg.layers;
  const bool lstm = cell_kind_of(cfg.arch) == CellKind::kLstm;

  ParamMap grads;
  auto add = [&](const std::string& name, const Matrix& g) {
    auto it = grads.find(name);
    if (it == grads.end()) {
      grads[name] = g;
    } else {
      it->second += g;
    }
  };

  // All horizon steps share one prediction off the final hidden state.
  Matrix dh_final = Matrix::Zero(n, cfg.hidden_dim);
  const Matrix& h_final = fwd.stape.h_out[P - 1][L - 1];
  for (const Matrix& dp : dpred) {
    add("head/w", h_final.transpose() * dp);
    add("head/b", dp.colwise().sum());
    dh_final += dp * model.head_.weight.transpose();
  }

  // dh_extra[p][t]: gradient flowing into pair p's hidden output at step t
  // from the pair above (or the head for the last pair).
  std::vector<std::vector<Matrix>> dh_extra(
      P, std::vector<Matrix>(L, Matrix::Zero(n, cfg.hidden_dim)));
  dh_extra[P - 1][L - 1] = dh_final;

  for (int p = P - 1; p >= 0; --p) {
    Matrix dh = Matrix::Zero(n, cfg.hidden_dim);
    Matrix dc = Matrix::Zero(n, cfg.hidden_dim);
    for (Timestep idx = L - 1; idx >= 0; --idx) {
      dh += dh_extra[p][idx];
      const Matrix& h_prev = fwd.stape.rnn[p][idx].h_skip;  // state before the step
      DenseStepGrads g = dense_cell_step_backward(
          model.rnn_[p], fwd.stape.rnn[p][idx], fwd.stape.rnn_in[p][idx], h_prev, dh,
          lstm ? &dc : nullptr, "rnn" + std::to_string(p + 1), &grads);
      dh = std::move(g.dh_prev);
      if (lstm) dc = std::move(g.dc_prev);
      Matrix dinput = gcn_backward(model.gcn_[p], sample.views[idx], fwd.stape.gcn[p][idx], g.dx,
                                   "gcn" + std::to_string(p + 1), &grads);
      if (p > 0) dh_extra[p - 1][idx] += dinput;
    }
  }
  return grads;
}

}  // namespace

ParamMap model_backward(DgnnModel& model, const SeqSample& sample, const ForwardArtifacts& fwd,
                        const std::vector<Matrix>& dpred) {
  check(dpred.size() == fwd.predictions.size(), "model_backward: dpred arity mismatch");
  return is_stacked(model.cfg_.arch) ? stacked_backward(model, sample, fwd, dpred)
                                     : integrated_backward(model, sample, fwd, dpred);
}

}  // namespace dgnn
