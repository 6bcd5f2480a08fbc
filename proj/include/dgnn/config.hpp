/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/config.hpp
 * @brief Run configuration: JSON file merged with flag overrides, strict keys.
 */
#ifndef DGNN_CONFIG_HPP
#define DGNN_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dgnn/distsim.hpp"

namespace dgnn {

struct RunSettings {
  std::string dataset;
  std::string out;

  // model
  std::string arch = "gcrn_m2";
  int layers = 2;
  int hidden_dim = 16;
  int seq_len = 8;
  int horizon = 1;
  bool teacher_forcing = true;
  std::string aggr = "sum";
  std::string fanouts = "full";  // "full" or comma list, e.g. "25,10"

  // train
  int batch_size = 0;
  int epochs = 1;
  double lr = 0.01;
  std::string optimizer = "adam";
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::string iteration = "seq_first";
  int stride = 1;
  uint64_t seed = 1;
  double fallback_threshold = 0.5;
  int rescratch_period = 64;
  bool incremental = true;
  std::string cache = "reinc";  // reinc | lru | lfu | off
  double cache_capacity_frac = 1.0;

  // distsim
  int workers = 1;
  std::string scheme = "consecutive_block";
  std::string overlap_mode = "replicate_overlap";

  ModelConfig model_config(Eigen::Index feature_dim) const;
  TrainConfig train_config() const;
  std::optional<CachePolicy> cache_policy() const;
};

// Loads the optional JSON file, applies key=value overrides on top, rejects
// unknown keys in both.
RunSettings parse_run_settings(const std::optional<std::filesystem::path>& config_file,
                               const std::vector<std::pair<std::string, std::string>>& overrides);

// Every run records the exact configuration that produced its outputs.
void write_resolved_config(const RunSettings& s, const std::filesystem::path& dir);

std::vector<Fanout> parse_fanouts(const std::string& text);

}  // namespace dgnn

#endif  // DGNN_CONFIG_HPP
