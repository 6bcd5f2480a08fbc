/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/nn.hpp
 * @brief Dense building blocks: activations, linear maps, MAE loss,
 *        finite-difference gradient checking.
 */
#ifndef DGNN_NN_HPP
#define DGNN_NN_HPP

#include <functional>
#include <map>
#include <random>
#include <string>

#include "dgnn/aggregate.hpp"

namespace dgnn {

enum class Activation { kNone, kRelu, kTanh, kSigmoid };

Activation activation_from_string(const std::string& s);
Matrix apply_activation(Activation act, const Matrix& pre);
// d(loss)/d(pre) given the activation output and d(loss)/d(out).
Matrix activation_backward(Activation act, const Matrix& out, const Matrix& dout);

struct Linear {
  Matrix weight;  // in x out
  Matrix bias;    // 1 x out
};

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init.
Linear make_linear(Eigen::Index in, Eigen::Index out, std::mt19937_64& rng);
Matrix linear_forward(const Linear& lin, const Matrix& x);

// Named parameter collection; std::map keeps iteration deterministic.
using ParamMap = std::map<std::string, Matrix>;

struct MaeLoss {
  double value = 0.0;
  Matrix grad;  // same shape as pred; subgradient 0 at exact ties
};
MaeLoss loss_mae(const Matrix& pred, const Matrix& target);

// Central-difference check of analytic gradients. `loss` must re-evaluate the
// forward pass against the current parameter values.
struct FdReport {
  double max_rel_err = 0.0;
  std::string worst_param;
};
FdReport finite_difference_check(const std::function<double()>& loss,
                                 const std::function<void(const std::string&, Matrix*)>& visit,
                                 const ParamMap& analytic, double step);

}  // namespace dgnn

#endif  // DGNN_NN_HPP
