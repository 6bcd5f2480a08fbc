#include "dgnn/windows.hpp"

namespace dgnn {

std::vector<SequenceWindow> sliding_windows(Timestep total, Timestep length, Timestep stride,
                                            Timestep horizon) {
  check(length >= 1, "sliding_windows: L must be >= 1");
  check(stride >= 1, "sliding_windows: S must be >= 1");
  check(horizon >= 0, "sliding_windows: H must be >= 0");
  std::vector<SequenceWindow> out;
  for (Timestep start = 0; start + length + horizon <= total; start += stride) {
    out.push_back({start, length, stride, horizon});
  }
  return out;
}

}  // namespace dgnn
