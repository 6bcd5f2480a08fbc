/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/common.hpp
 * @brief Shared scalar types, dense matrix aliases and seed utilities.
 */
#ifndef DGNN_COMMON_HPP
#define DGNN_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dgnn {

using NodeId = int32_t;
using Timestep = int32_t;
using EdgeIdx = int64_t;

// Row-major so a node's feature row is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IndexMatrix = Eigen::Matrix<NodeId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) {
    if (auto c = a.src <=> b.src; c != 0) return c;
    return a.dst <=> b.dst;
  }
};

[[noreturn]] inline void fail(const std::string& msg) { throw std::invalid_argument(msg); }

inline void check(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

// splitmix64; used to derive independent stream seeds from (seed, tags...).
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  return mix64(mix64(mix64(seed ^ mix64(a)) ^ mix64(b)) ^ mix64(c));
}

}  // namespace dgnn

#endif  // DGNN_COMMON_HPP
