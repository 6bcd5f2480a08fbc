/**
 *  Copyright (c) 2026 by Contributors
 * @file config.cpp
 */
#include "dgnn/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dgnn {

std::vector<Fanout> parse_fanouts(const std::string& text) {
  if (text.empty() || text == "full") return {kFullFanout, kFullFanout};
  std::vector<Fanout> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "full") {
      out.push_back(kFullFanout);
    } else {
      out.push_back(static_cast<Fanout>(std::stol(item)));
    }
  }
  check(!out.empty(), "fanouts must name at least one hop");
  return out;
}

ModelConfig RunSettings::model_config(Eigen::Index feature_dim) const {
  ModelConfig m;
  m.arch = architecture_from_string(arch);
  m.layers = layers;
  m.feature_dim = feature_dim;
  m.hidden_dim = hidden_dim;
  m.seq_len = seq_len;
  m.horizon = horizon;
  m.teacher_forcing = teacher_forcing;
  m.aggr = AggrFn{aggr_kind_from_string(aggr)};
  m.fanouts = parse_fanouts(fanouts);
  m.seed = seed;
  return m;
}

std::optional<CachePolicy> RunSettings::cache_policy() const {
  if (cache == "off") return std::nullopt;
  return cache_policy_from_string(cache);
}

TrainConfig RunSettings::train_config() const {
  TrainConfig t;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.lr = lr;
  t.optimizer = optimizer_from_string(optimizer);
  t.beta1 = beta1;
  t.beta2 = beta2;
  t.adam_eps = adam_eps;
  t.iteration = iteration_from_string(iteration);
  t.stride = stride;
  t.seed = seed;
  t.fallback_threshold = fallback_threshold;
  t.rescratch_period = rescratch_period;
  t.incremental = incremental;
  t.cache_policy = cache_policy();
  t.cache_capacity_frac = cache_capacity_frac;
  return t;
}

namespace {

using nlohmann::json;

json settings_to_json(const RunSettings& s) {
  return json{{"dataset", s.dataset},
              {"out", s.out},
              {"arch", s.arch},
              {"layers", s.layers},
              {"hidden_dim", s.hidden_dim},
              {"seq_len", s.seq_len},
              {"horizon", s.horizon},
              {"teacher_forcing", s.teacher_forcing},
              {"aggr", s.aggr},
              {"fanouts", s.fanouts},
              {"batch_size", s.batch_size},
              {"epochs", s.epochs},
              {"lr", s.lr},
              {"optimizer", s.optimizer},
              {"beta1", s.beta1},
              {"beta2", s.beta2},
              {"adam_eps", s.adam_eps},
              {"iteration", s.iteration},
              {"stride", s.stride},
              {"seed", s.seed},
              {"fallback_threshold", s.fallback_threshold},
              {"rescratch_period", s.rescratch_period},
              {"incremental", s.incremental},
              {"cache", s.cache},
              {"cache_capacity_frac", s.cache_capacity_frac},
              {"workers", s.workers},
              {"scheme", s.scheme},
              {"overlap_mode", s.overlap_mode}};
}

void apply_json_value(RunSettings* s, const std::string& key, const json& v) {
  auto as_string = [&]() -> std::string {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  if (key == "dataset") s->dataset = as_string();
  else if (key == "out") s->out = as_string();
  else if (key == "arch") s->arch = as_string();
  else if (key == "layers") s->layers = v.get<int>();
  else if (key == "hidden_dim") s->hidden_dim = v.get<int>();
  else if (key == "seq_len") s->seq_len = v.get<int>();
  else if (key == "horizon") s->horizon = v.get<int>();
  else if (key == "teacher_forcing") s->teacher_forcing = v.get<bool>();
  else if (key == "aggr") s->aggr = as_string();
  else if (key == "fanouts") s->fanouts = as_string();
  else if (key == "batch_size") s->batch_size = v.get<int>();
  else if (key == "epochs") s->epochs = v.get<int>();
  else if (key == "lr") s->lr = v.get<double>();
  else if (key == "optimizer") s->optimizer = as_string();
  else if (key == "beta1") s->beta1 = v.get<double>();
  else if (key == "beta2") s->beta2 = v.get<double>();
  else if (key == "adam_eps") s->adam_eps = v.get<double>();
  else if (key == "iteration") s->iteration = as_string();
  else if (key == "stride") s->stride = v.get<int>();
  else if (key == "seed") s->seed = v.get<uint64_t>();
  else if (key == "fallback_threshold") s->fallback_threshold = v.get<double>();
  else if (key == "rescratch_period") s->rescratch_period = v.get<int>();
  else if (key == "incremental") s->incremental = v.get<bool>();
  else if (key == "cache") s->cache = as_string();
  else if (key == "cache_capacity_frac") s->cache_capacity_frac = v.get<double>();
  else if (key == "workers") s->workers = v.get<int>();
  else if (key == "scheme") s->scheme = as_string();
  else if (key == "overlap_mode") s->overlap_mode = as_string();
  else fail("unknown config key: " + key);
}

json parse_scalar(const std::string& text) {
  // Numbers and booleans parse as themselves, everything else is a string.
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded() || v.is_array() || v.is_object()) return json(text);
  return v;
}

}  // namespace

RunSettings parse_run_settings(const std::optional<std::filesystem::path>& config_file,
                               const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunSettings s;
  if (config_file) {
    std::ifstream in(*config_file);
    check(in.good(), "cannot read config file: " + config_file->string());
    json j = json::parse(in);
    check(j.is_object(), "config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) apply_json_value(&s, it.key(), it.value());
  }
  for (const auto& [key, value] : overrides) apply_json_value(&s, key, parse_scalar(value));
  return s;
}

void write_resolved_config(const RunSettings& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "resolved_config.json");
  check(out.good(), "cannot write resolved config");
  out << settings_to_json(s).dump(2) << "\n";
}

}  // namespace dgnn
