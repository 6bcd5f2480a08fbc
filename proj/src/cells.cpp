/**
 *  Copyright (c) 2026 by Contributors
 * @file cells.cpp
 */
#include "dgnn/cells.hpp"

namespace dgnn {
namespace {

Matrix sigmoid(const Matrix& m) { return apply_activation(Activation::kSigmoid, m); }
Matrix dtanh(const Matrix& out, const Matrix& dout) {
  return activation_backward(Activation::kTanh, out, dout);
}
Matrix dsigmoid(const Matrix& out, const Matrix& dout) {
  return activation_backward(Activation::kSigmoid, out, dout);
}

void accumulate(ParamMap* grads, const std::string& name, const Matrix& g) {
  auto it = grads->find(name);
  if (it == grads->end()) {
    (*grads)[name] = g;
  } else {
    it->second += g;
  }
}

Matrix left_degree_normalize(const GraphView& view, const Matrix& values) {
  Matrix out = values;
  for (NodeId v = 0; v < view.num_nodes; ++v) {
    const auto deg = static_cast<double>(std::max<EdgeIdx>(view.in_degree(v), 1));
    out.row(v) /= deg;
  }
  return out;
}

}  // namespace

GcnLayer make_gcn_layer(Eigen::Index in, Eigen::Index out, AggrFn aggr, Activation act,
                        GcnNorm norm, std::mt19937_64& rng) {
  return GcnLayer{make_linear(in, out, rng), aggr, act, norm};
}

GcnTape gcn_apply(const GcnLayer& layer, const GraphView& view,
                  std::shared_ptr<const AggResult> agg) {
  GcnTape tape;
  tape.agg = std::move(agg);
  tape.normed = tape.agg->dense_values();
  if (layer.norm == GcnNorm::kLeftDegree) tape.normed = left_degree_normalize(view, tape.normed);
  tape.out = apply_activation(layer.act, linear_forward(layer.lin, tape.normed));
  return tape;
}

GcnTape gcn_forward(const GcnLayer& layer, const GraphView& view, const Matrix& feats,
                    AggProvider* provider, int64_t batch, Timestep t, const ExecContext& ctx) {
  auto agg = provider->fetch_input(batch, t, view, feats, ctx);
  return gcn_apply(layer, view, agg);
}

Matrix gcn_backward(const GcnLayer& layer, const GraphView& view, const GcnTape& tape,
                    const Matrix& dout, const std::string& prefix, ParamMap* grads) {
  Matrix dpre = activation_backward(layer.act, tape.out, dout);
  accumulate(grads, prefix + "/w", tape.normed.transpose() * dpre);
  accumulate(grads, prefix + "/b", dpre.colwise().sum());
  Matrix dnormed = dpre * layer.lin.weight.transpose();
  if (layer.norm == GcnNorm::kLeftDegree) dnormed = left_degree_normalize(view, dnormed);
  // Rows the aggregation flagged empty contributed zeros; their gradient stops.
  if (tape.agg->argext.size() > 0) {
    for (NodeId v = 0; v < view.num_nodes; ++v) {
      if (tape.agg->row_empty(v)) dnormed.row(v).setZero();
    }
  }
  return aggregate_backward(view, dnormed, layer.aggr, *tape.agg);
}

void CellParams::init(CellKind k, Eigen::Index in, Eigen::Index hidden, std::mt19937_64& rng) {
  kind = k;
  in_dim = in;
  hidden_dim = hidden;
  const int gates = gate_count(k);
  wx.clear();
  uh.clear();
  b.clear();
  for (int g = 0; g < gates; ++g) {
    Linear lx = make_linear(in, hidden, rng);
    Linear lh = make_linear(hidden, hidden, rng);
    wx.push_back(lx.weight);
    uh.push_back(lh.weight);
    b.push_back(lx.bias);
  }
}

void CellParams::visit_params(const std::string& prefix,
                              const std::function<void(const std::string&, Matrix*)>& fn) {
  for (size_t g = 0; g < wx.size(); ++g) {
    const std::string idx = std::to_string(g);
    fn(prefix + "/wx" + idx, &wx[g]);
    fn(prefix + "/uh" + idx, &uh[g]);
    fn(prefix + "/b" + idx, &b[g]);
  }
}

CellTape cell_core_forward(const CellParams& p, const Matrix& X, const Matrix& Hm,
                           const Matrix& h_skip, const Matrix* c_prev) {
  CellTape tape;
  auto pre = [&](int g) -> Matrix {
    Matrix m = X * p.wx[g] + Hm * p.uh[g];
    m.rowwise() += p.b[g].row(0);
    return m;
  };
  tape.h_skip = h_skip;  // kept for both kinds; callers read it as the pre-step state
  if (p.kind == CellKind::kLstm) {
    check(c_prev != nullptr, "LSTM step needs the previous cell state");
    Matrix i = sigmoid(pre(0));
    Matrix f = sigmoid(pre(1));
    Matrix g = apply_activation(Activation::kTanh, pre(2));
    Matrix o = sigmoid(pre(3));
    tape.c_prev = *c_prev;
    tape.c = f.cwiseProduct(tape.c_prev) + i.cwiseProduct(g);
    tape.h = o.cwiseProduct(tape.c.array().tanh().matrix());
    tape.gates = {std::move(i), std::move(f), std::move(g), std::move(o)};
  } else {
    Matrix r = sigmoid(pre(0));
    Matrix z = sigmoid(pre(1));
    tape.hn = Hm * p.uh[2];
    Matrix n_pre = X * p.wx[2] + r.cwiseProduct(tape.hn);
    n_pre.rowwise() += p.b[2].row(0);
    Matrix n = apply_activation(Activation::kTanh, n_pre);
    tape.h = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h_skip);
    tape.gates = {std::move(r), std::move(z), std::move(n)};
  }
  return tape;
}

CellCoreGrads cell_core_backward(const CellParams& p, const CellTape& tape, const Matrix& X,
                                 const Matrix& Hm, const Matrix& dh, const Matrix* dc,
                                 const std::string& prefix, ParamMap* grads) {
  CellCoreGrads out;
  out.dX = Matrix::Zero(X.rows(), X.cols());
  out.dHm = Matrix::Zero(Hm.rows(), Hm.cols());

  auto push_gate = [&](int g, const Matrix& dpre) {
    accumulate(grads, prefix + "/wx" + std::to_string(g), X.transpose() * dpre);
    accumulate(grads, prefix + "/b" + std::to_string(g), dpre.colwise().sum());
    out.dX += dpre * p.wx[g].transpose();
  };

  if (p.kind == CellKind::kLstm) {
    const Matrix& i = tape.gates[0];
    const Matrix& f = tape.gates[1];
    const Matrix& g = tape.gates[2];
    const Matrix& o = tape.gates[3];
    Matrix tanh_c = tape.c.array().tanh().matrix();
    Matrix d_o = dh.cwiseProduct(tanh_c);
    Matrix dct = dtanh(tanh_c, dh.cwiseProduct(o));
    if (dc != nullptr) dct += *dc;
    Matrix d_i = dct.cwiseProduct(g);
    Matrix d_g = dct.cwiseProduct(i);
    Matrix d_f = dct.cwiseProduct(tape.c_prev);
    out.dc_prev = dct.cwiseProduct(f);

    Matrix dpre_i = dsigmoid(i, d_i);
    Matrix dpre_f = dsigmoid(f, d_f);
    Matrix dpre_g = dtanh(g, d_g);
    Matrix dpre_o = dsigmoid(o, d_o);
    const Matrix* pres[4] = {&dpre_i, &dpre_f, &dpre_g, &dpre_o};
    for (int g_i = 0; g_i < 4; ++g_i) {
      push_gate(g_i, *pres[g_i]);
      accumulate(grads, prefix + "/uh" + std::to_string(g_i), Hm.transpose() * *pres[g_i]);
      out.dHm += *pres[g_i] * p.uh[g_i].transpose();
    }
  } else {
    const Matrix& r = tape.gates[0];
    const Matrix& z = tape.gates[1];
    const Matrix& n = tape.gates[2];
    Matrix d_z = dh.cwiseProduct(tape.h_skip - n);
    Matrix d_n = dh.cwiseProduct((1.0 - z.array()).matrix());
    out.dh_skip = dh.cwiseProduct(z);

    Matrix dpre_n = dtanh(n, d_n);
    Matrix d_hn = dpre_n.cwiseProduct(r);
    Matrix d_r = dpre_n.cwiseProduct(tape.hn);
    Matrix dpre_r = dsigmoid(r, d_r);
    Matrix dpre_z = dsigmoid(z, d_z);

    push_gate(0, dpre_r);
    push_gate(1, dpre_z);
    push_gate(2, dpre_n);
    accumulate(grads, prefix + "/uh0", Hm.transpose() * dpre_r);
    accumulate(grads, prefix + "/uh1", Hm.transpose() * dpre_z);
    accumulate(grads, prefix + "/uh2", Hm.transpose() * d_hn);
    out.dHm += dpre_r * p.uh[0].transpose() + dpre_z * p.uh[1].transpose() +
               d_hn * p.uh[2].transpose();
  }
  return out;
}

GraphStepResult graphrnn_step(const CellParams& cell, const GraphView&,
                              const GateFetch& fetch_x, const GateFetch& fetch_h,
                              const Matrix& h_prev, const Matrix* c_prev) {
  GraphStepResult out;
  const int gates = gate_count(cell.kind);
  for (int g = 1; g <= gates; ++g) {
    out.tape.agg_x = fetch_x(g);
    out.tape.agg_h = fetch_h(g);
  }
  out.tape.x_dense = out.tape.agg_x->dense_values();
  out.tape.h_dense = out.tape.agg_h->dense_values();
  out.tape.core =
      cell_core_forward(cell, out.tape.x_dense, out.tape.h_dense, h_prev, c_prev);
  out.h = out.tape.core.h;
  if (cell.kind == CellKind::kLstm) out.c = out.tape.core.c;
  return out;
}

GraphStepGrads graphrnn_step_backward(const CellParams& cell, const GraphView& view,
                                      const GraphStepTape& tape, const Matrix& dh,
                                      const Matrix* dc, const std::string& prefix,
                                      ParamMap* grads) {
  CellCoreGrads core = cell_core_backward(cell, tape.core, tape.x_dense, tape.h_dense, dh, dc,
                                          prefix, grads);
  GraphStepGrads out;
  // Empty max/min rows contributed zeros; their gradient stops there.
  auto mask_empty = [&](const AggResult& agg, Matrix* m) {
    if (agg.argext.size() == 0) return;
    for (NodeId v = 0; v < m->rows(); ++v) {
      if (agg.row_empty(v)) m->row(v).setZero();
    }
  };
  mask_empty(*tape.agg_x, &core.dX);
  mask_empty(*tape.agg_h, &core.dHm);
  out.dx = aggregate_backward(view, core.dX, AggrFn{tape.agg_x->kind}, *tape.agg_x);
  out.dh_prev = aggregate_backward(view, core.dHm, AggrFn{tape.agg_h->kind}, *tape.agg_h);
  if (cell.kind == CellKind::kGru) out.dh_prev += core.dh_skip;
  if (cell.kind == CellKind::kLstm) out.dc_prev = core.dc_prev;
  return out;
}

DenseStepResult dense_cell_step(const CellParams& cell, const Matrix& x, const Matrix& h_prev,
                                const Matrix* c_prev) {
  DenseStepResult out;
  out.tape = cell_core_forward(cell, x, h_prev, h_prev, c_prev);
  out.h = out.tape.h;
  if (cell.kind == CellKind::kLstm) out.c = out.tape.c;
  return out;
}

DenseStepGrads dense_cell_step_backward(const CellParams& cell, const CellTape& tape,
                                        const Matrix& x, const Matrix& h_prev, const Matrix& dh,
                                        const Matrix* dc, const std::string& prefix,
                                        ParamMap* grads) {
  CellCoreGrads core = cell_core_backward(cell, tape, x, h_prev, dh, dc, prefix, grads);
  DenseStepGrads out;
  out.dx = std::move(core.dX);
  out.dh_prev = core.dHm;
  if (cell.kind == CellKind::kGru) out.dh_prev += core.dh_skip;
  if (cell.kind == CellKind::kLstm) out.dc_prev = std::move(core.dc_prev);
  return out;
}

}  // namespace dgnn
