/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/windows.hpp
 * @brief Sliding-window sequence generation.
 */
#ifndef DGNN_WINDOWS_HPP
#define DGNN_WINDOWS_HPP

#include <vector>

#include "dgnn/common.hpp"

namespace dgnn {

// One training sequence: snapshots [start, start+length) as model input and
// `horizon` prediction steps after it. Positions inside a window (idx) are
// 0-based throughout the engine.
struct SequenceWindow {
  Timestep start = 0;
  Timestep length = 1;   // L
  Timestep stride = 1;   // S
  Timestep horizon = 0;  // H

  Timestep snapshot_at(Timestep idx) const { return start + idx; }
  friend bool operator==(const SequenceWindow&, const SequenceWindow&) = default;
};

// Starts 0, S, 2S, ... while start + L + H <= T. Empty when L + H > T.
std::vector<SequenceWindow> sliding_windows(Timestep total, Timestep length, Timestep stride,
                                            Timestep horizon);

}  // namespace dgnn

#endif  // DGNN_WINDOWS_HPP
