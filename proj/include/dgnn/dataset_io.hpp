/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/dataset_io.hpp
 * @brief On-disk dataset layout: base snapshot plus per-step deltas.
 *
 * Layout (text, bit-exact):
 *   manifest.json        {"feature_dim":d,"format_version":1,"num_nodes":N,"T":T}
 *   snapshot_0.edges     one "src<TAB>dst" per line, ascending (src,dst)
 *   snapshot_0.feats     CSV, row i = node i's features, 9 significant digits
 *   delta_{t}.edges      "D src dst" then "I src dst" lines, each ascending
 *   delta_{t}.feats      CSV "node_id,f0,f1,..." for feature-changed nodes
 */
#ifndef DGNN_DATASET_IO_HPP
#define DGNN_DATASET_IO_HPP

#include <filesystem>

#include "dgnn/snapshot.hpp"

namespace dgnn {

void save_dataset(const DynamicGraph& graph, const std::filesystem::path& dir);
DynamicGraph load_dataset(const std::filesystem::path& dir);

}  // namespace dgnn

#endif  // DGNN_DATASET_IO_HPP
