/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/synth.hpp
 * @brief Synthetic dynamic-graph generator.
 */
#ifndef DGNN_SYNTH_HPP
#define DGNN_SYNTH_HPP

#include <optional>

#include "dgnn/snapshot.hpp"

namespace dgnn {

// Per-step change ratio: a fixed fraction, or re-drawn uniformly from (0, 1]
// for every step when `uniform` is set.
struct ChangeRatio {
  double value = 0.0;
  bool uniform = false;

  static ChangeRatio fixed(double v) { return {v, false}; }
  static ChangeRatio uniform_per_step() { return {0.0, true}; }
};

struct SynthParams {
  NodeId num_nodes = 0;
  double avg_degree = 1.0;
  NodeId feature_dim = 1;
  Timestep num_snapshots = 1;
  ChangeRatio edge_change;
  ChangeRatio feature_change;
  uint64_t seed = 0;
};

// Snapshot 0 is a uniform random digraph with round(num_nodes*avg_degree)
// distinct edges (no self loops). Every later snapshot changes
// ceil(ratio*|E|) edges, half deleted half inserted, keeping |E| constant,
// and redraws features for ceil(ratio*N) nodes. Deterministic in the seed.
DynamicGraph synthesize(const SynthParams& params);

}  // namespace dgnn

#endif  // DGNN_SYNTH_HPP
