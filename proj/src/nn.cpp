/**
 *  Copyright (c) 2026 by Contributors
 * @file nn.cpp
 */
#include "dgnn/nn.hpp"

#include <cmath>

namespace dgnn {

Activation activation_from_string(const std::string& s) {
  if (s == "none") return Activation::kNone;
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "sigmoid") return Activation::kSigmoid;
  fail("unknown activation: " + s);
}

Matrix apply_activation(Activation act, const Matrix& pre) {
  switch (act) {
    case Activation::kNone: return pre;
    case Activation::kRelu: return pre.cwiseMax(0.0);
    case Activation::kTanh: return pre.array().tanh().matrix();
    case Activation::kSigmoid:
      return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
  }
  return pre;
}

Matrix activation_backward(Activation act, const Matrix& out, const Matrix& dout) {
  switch (act) {
    case Activation::kNone: return dout;
    case Activation::kRelu:
      return (out.array() > 0.0).cast<double>().matrix().cwiseProduct(dout);
    case Activation::kTanh:
      return ((1.0 - out.array().square()) * dout.array()).matrix();
    case Activation::kSigmoid:
      return (out.array() * (1.0 - out.array()) * dout.array()).matrix();
  }
  return dout;
}

Linear make_linear(Eigen::Index in, Eigen::Index out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Linear lin;
  lin.weight.resize(in, out);
  lin.bias = Matrix::Zero(1, out);
  for (Eigen::Index i = 0; i < in; ++i)
    for (Eigen::Index j = 0; j < out; ++j) lin.weight(i, j) = dist(rng);
  for (Eigen::Index j = 0; j < out; ++j) lin.bias(0, j) = dist(rng);
  return lin;
}

Matrix linear_forward(const Linear& lin, const Matrix& x) {
  check(x.cols() == lin.weight.rows(), "linear: input dim mismatch");
  Matrix y = x * lin.weight;
  y.rowwise() += lin.bias.row(0);
  return y;
}

MaeLoss loss_mae(const Matrix& pred, const Matrix& target) {
  check(pred.rows() == target.rows() && pred.cols() == target.cols(),
        "loss_mae: shape mismatch");
  MaeLoss out;
  const double n = static_cast<double>(pred.size());
  Matrix diff = pred - target;
  out.value = diff.array().abs().sum() / n;
  out.grad = (diff.array().sign() / n).matrix();
  return out;
}

FdReport finite_difference_check(const std::function<double()>& loss,
                                 const std::function<void(const std::string&, Matrix*)>& visit,
                                 const ParamMap& analytic, double step) {
  check(step > 0.0, "finite differences need a positive step");
  FdReport report;
  auto probe = [&](const std::string& name, Matrix* p) {
    auto it = analytic.find(name);
    check(it != analytic.end(), "no analytic gradient for parameter " + name);
    const Matrix& g = it->second;
    for (Eigen::Index i = 0; i < p->rows(); ++i) {
      for (Eigen::Index j = 0; j < p->cols(); ++j) {
        const double orig = (*p)(i, j);
        (*p)(i, j) = orig + step;
        const double up = loss();
        (*p)(i, j) = orig - step;
        const double down = loss();
        (*p)(i, j) = orig;
        const double numeric = (up - down) / (2.0 * step);
        const double a = g(i, j);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
        const double rel = std::abs(a - numeric) / denom;
        if (rel > report.max_rel_err) {
          report.max_rel_err = rel;
          report.worst_param = name;
        }
      }
    }
  };
  visit([&](const std::string& name, Matrix* p) { probe(name, p); });
  return report;
}

}  // namespace dgnn
