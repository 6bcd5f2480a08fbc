/**
 *  Copyright (c) 2026 by Contributors
 * @file train.cpp
 */
#include "dgnn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace dgnn {

IterationOrder iteration_from_string(const std::string& s) {
  if (s == "seq_first") return IterationOrder::kSeqFirst;
  if (s == "node_first") return IterationOrder::kNodeFirst;
  fail("unknown iteration order: " + s);
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  fail("unknown optimizer: " + s);
}

bool optimizer_step(DgnnModel& model, const ParamMap& grads, OptimizerState& state,
                    const TrainConfig& cfg, CacheStore* store) {
  for (const auto& [name, g] : grads) {
    if (!g.allFinite()) return false;
  }
  state.step_count += 1;
  model.visit_params([&](const std::string& name, Matrix* p) {
    auto it = grads.find(name);
    if (it == grads.end()) return;  // parameter untouched this sample
    const Matrix& g = it->second;
    check(g.rows() == p->rows() && g.cols() == p->cols(),
          "gradient shape mismatch for " + name);
    if (cfg.optimizer == OptimizerKind::kSgd) {
      *p -= cfg.lr * g;
      return;
    }
    Matrix& m = state.m.try_emplace(name, Matrix::Zero(p->rows(), p->cols())).first->second;
    Matrix& v = state.v.try_emplace(name, Matrix::Zero(p->rows(), p->cols())).first->second;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_count));
    *p -= (cfg.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_eps)).matrix();
  });
  if (store != nullptr) store->bump_epoch();
  return true;
}

std::vector<std::pair<NodeId, NodeId>> make_batches(NodeId num_nodes, int batch_size,
                                                    uint64_t seed, int64_t epoch_index) {
  if (batch_size <= 0 || batch_size >= num_nodes) return {{0, num_nodes}};
  std::vector<std::pair<NodeId, NodeId>> ranges;
  for (NodeId begin = 0; begin < num_nodes; begin += batch_size) {
    ranges.push_back({begin, std::min<NodeId>(begin + batch_size, num_nodes)});
  }
  std::mt19937_64 rng(derive_seed(seed, 0xba7c4, static_cast<uint64_t>(epoch_index)));
  std::shuffle(ranges.begin(), ranges.end(), rng);
  return ranges;
}

namespace {

bool full_fanouts(const ModelConfig& mcfg) {
  for (Fanout f : mcfg.fanouts) {
    if (f != kFullFanout) return false;
  }
  return true;
}

}  // namespace

SeqSample build_sample(const DynamicGraph& graph, const ModelConfig& mcfg,
                       const SequenceWindow& window, Timestep windows_remaining,
                       int64_t batch_id, std::pair<NodeId, NodeId> node_range, uint64_t seed) {
  SeqSample s;
  s.window = window;
  s.batch_id = batch_id;
  s.windows_remaining = windows_remaining;
  for (NodeId v = node_range.first; v < node_range.second; ++v) s.seeds.push_back(v);

  const Timestep span = window.length + window.horizon;
  const bool whole = full_fanouts(mcfg);
  for (Timestep i = 0; i < span; ++i) {
    const Timestep t = window.start + i;
    const Snapshot& snap = graph.snapshot(t);
    if (whole) {
      s.views.push_back(snap.view());
    } else {
      auto cg = khop(snap, s.seeds, mcfg.fanouts, derive_seed(seed, static_cast<uint64_t>(t)));
      s.owned.push_back(
          std::make_shared<OwnedView>(cg.to_view(snap.num_nodes())));
      s.views.push_back(s.owned.back()->view());
    }
  }
  for (Timestep i = 0; i <= span; ++i) {
    s.feats.push_back(&graph.snapshot(window.start + i).feats());
  }
  return s;
}

double cache_data_size_units(const DynamicGraph& graph, const ModelConfig& mcfg) {
  return 2.0 * static_cast<double>(mcfg.seq_len) * static_cast<double>(graph.num_nodes()) *
         static_cast<double>(graph.feature_dim());
}

namespace {

struct SampleLoss {
  double mae = 0.0;
  std::vector<Matrix> dpred;
};

// MAE over the seed rows of every horizon step; gradients live on seed rows.
SampleLoss seed_loss(const SeqSample& sample, const ForwardArtifacts& fwd) {
  SampleLoss out;
  const Timestep L = sample.window.length;
  const Timestep H = sample.window.horizon;
  const auto n_seeds = static_cast<Eigen::Index>(sample.seeds.size());
  double total = 0.0;
  for (Timestep j = 0; j < H; ++j) {
    const Matrix& pred = fwd.predictions[j];
    const Matrix& target_full = *sample.feats[L + j + 1];
    Matrix pred_sub(n_seeds, pred.cols());
    Matrix target_sub(n_seeds, pred.cols());
    for (Eigen::Index i = 0; i < n_seeds; ++i) {
      pred_sub.row(i) = pred.row(sample.seeds[i]);
      target_sub.row(i) = target_full.row(sample.seeds[i]);
    }
    MaeLoss l = loss_mae(pred_sub, target_sub);
    total += l.value;
    Matrix d = Matrix::Zero(pred.rows(), pred.cols());
    for (Eigen::Index i = 0; i < n_seeds; ++i) {
      d.row(sample.seeds[i]) = l.grad.row(i) / static_cast<double>(H);
    }
    out.dpred.push_back(std::move(d));
  }
  out.mae = H > 0 ? total / static_cast<double>(H) : 0.0;
  return out;
}

EpochReport run_epoch_impl(DgnnModel& model, const DynamicGraph& graph,
                           const std::vector<SequenceWindow>& windows, const TrainConfig& cfg,
                           AggProvider& provider, OptimizerState& opt, int64_t epoch_index,
                           bool seq_first) {
  check(!windows.empty(), "epoch needs at least one window");
  const auto t0 = std::chrono::steady_clock::now();
  const CacheStats stats0 = provider.store() ? provider.store()->stats() : CacheStats{};
  const ExecutionStats exec0 = provider.stats();

  provider.reset_plan_state();  // fresh watermarks: each epoch replays the plan

  EpochReport report;
  auto batches = make_batches(graph.num_nodes(), cfg.batch_size, cfg.seed, epoch_index);

  auto run_sample = [&](int64_t b_idx, int64_t w_idx) {
    const SequenceWindow& window = windows[w_idx];
    SeqSample sample = build_sample(
        graph, model.cfg_, window,
        static_cast<Timestep>(windows.size() - 1 - w_idx), b_idx, batches[b_idx], cfg.seed);
    ForwardArtifacts fwd = model_forward(model, sample, provider);
    SampleLoss loss = seed_loss(sample, fwd);
    ParamMap grads = model_backward(model, sample, fwd, loss.dpred);
    if (!optimizer_step(model, grads, opt, cfg, provider.store())) ++report.skipped_steps;
    report.sample_losses.push_back(loss.mae);
    report.visitation.push_back({b_idx, w_idx});
  };

  if (seq_first) {
    for (int64_t b = 0; b < static_cast<int64_t>(batches.size()); ++b) {
      for (int64_t w = 0; w < static_cast<int64_t>(windows.size()); ++w) run_sample(b, w);
    }
  } else {
    for (int64_t w = 0; w < static_cast<int64_t>(windows.size()); ++w) {
      for (int64_t b = 0; b < static_cast<int64_t>(batches.size()); ++b) run_sample(b, w);
    }
  }

  double total = 0.0;
  for (double l : report.sample_losses) total += l;
  report.loss = report.sample_losses.empty() ? 0.0 : total / report.sample_losses.size();
  report.mae = report.loss;

  if (provider.store()) {
    const CacheStats& s1 = provider.store()->stats();
    report.cache.hits = s1.hits - stats0.hits;
    report.cache.misses = s1.misses - stats0.misses;
    report.cache.evictions = s1.evictions - stats0.evictions;
    report.cache.expirations = s1.expirations - stats0.expirations;
    report.cache.invalidations = s1.invalidations - stats0.invalidations;
    report.cache.rejected = s1.rejected - stats0.rejected;
    report.cache.resident_peak_units = s1.resident_peak_units;
  }
  const ExecutionStats& e1 = provider.stats();
  report.scratch_calls = e1.scratch_calls - exec0.scratch_calls;
  report.incremental_calls = e1.incremental_calls - exec0.incremental_calls;
  report.fallbacks = e1.fallbacks - exec0.fallbacks;
  report.kernel_invocations = report.scratch_calls + report.incremental_calls;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

EpochReport seq_first_epoch(DgnnModel& model, const DynamicGraph& graph,
                            const std::vector<SequenceWindow>& windows, const TrainConfig& cfg,
                            AggProvider& provider, OptimizerState& opt, int64_t epoch_index) {
  return run_epoch_impl(model, graph, windows, cfg, provider, opt, epoch_index, true);
}

EpochReport node_first_epoch(DgnnModel& model, const DynamicGraph& graph,
                             const std::vector<SequenceWindow>& windows, const TrainConfig& cfg,
                             AggProvider& provider, OptimizerState& opt, int64_t epoch_index) {
  return run_epoch_impl(model, graph, windows, cfg, provider, opt, epoch_index, false);
}

TrainSession::TrainSession(const DynamicGraph& graph, const ModelConfig& mcfg,
                           const TrainConfig& tcfg)
    : graph_(graph), mcfg_(mcfg), tcfg_(tcfg), model_(DgnnModel::create(mcfg)) {
  windows_ = sliding_windows(graph.length(), mcfg.seq_len, tcfg.stride, mcfg.horizon);
  check(!windows_.empty(), "dataset too short for the requested windows");
  if (tcfg.cache_policy) {
    const double capacity = tcfg.cache_capacity_frac * cache_data_size_units(graph, mcfg);
    store_ = std::make_unique<CacheStore>(*tcfg.cache_policy, capacity);
  }
  IncrementalOptions inc{tcfg.fallback_threshold, tcfg.rescratch_period};
  provider_ = std::make_unique<AggProvider>(store_.get(), &graph_, mcfg.aggr, tcfg.incremental,
                                            inc);
}

EpochReport TrainSession::run_epoch() {
  EpochReport r =
      tcfg_.iteration == IterationOrder::kSeqFirst
          ? seq_first_epoch(model_, graph_, windows_, tcfg_, *provider_, opt_, epoch_index_)
          : node_first_epoch(model_, graph_, windows_, tcfg_, *provider_, opt_, epoch_index_);
  ++epoch_index_;
  return r;
}

std::vector<EpochReport> TrainSession::run() {
  std::vector<EpochReport> out;
  for (int e = 0; e < tcfg_.epochs; ++e) out.push_back(run_epoch());
  return out;
}

}  // namespace dgnn
