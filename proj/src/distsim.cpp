/**
 *  Copyright (c) 2026 by Contributors
 * @file distsim.cpp
 */
#include "dgnn/distsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace dgnn {

PlacementScheme scheme_from_string(const std::string& s) {
  if (s == "consecutive_block") return PlacementScheme::kConsecutiveBlock;
  if (s == "node_partition") return PlacementScheme::kNodePartition;
  if (s == "sequence_partition") return PlacementScheme::kSequencePartition;
  fail("unknown placement scheme: " + s);
}

const char* to_string(PlacementScheme s) {
  switch (s) {
    case PlacementScheme::kConsecutiveBlock: return "consecutive_block";
    case PlacementScheme::kNodePartition: return "node_partition";
    case PlacementScheme::kSequencePartition: return "sequence_partition";
  }
  return "?";
}

OverlapMode overlap_from_string(const std::string& s) {
  if (s == "replicate_overlap") return OverlapMode::kReplicateOverlap;
  if (s == "remote_fetch") return OverlapMode::kRemoteFetch;
  fail("unknown overlap mode: " + s);
}

WorkerPlan plan(PlacementScheme scheme, Timestep total, int num_workers, Timestep seq_len,
                Timestep stride, Timestep horizon, OverlapMode overlap) {
  check(num_workers >= 1, "plan needs at least one worker");
  check(total >= num_workers, "fewer snapshots than workers");
  WorkerPlan p;
  p.scheme = scheme;
  p.overlap = overlap;
  p.num_workers = num_workers;
  p.total_snapshots = total;
  p.seq_len = seq_len;
  p.stride = stride;
  p.horizon = horizon;
  p.workers.resize(num_workers);

  const auto windows = sliding_windows(total, seq_len, stride, horizon);
  const auto W = static_cast<int64_t>(windows.size());

  if (scheme == PlacementScheme::kConsecutiveBlock) {
    const int64_t base = num_workers > 0 ? W / num_workers : 0;
    const int64_t extra = W % num_workers;
    int64_t w_cursor = 0;
    for (int m = 0; m < num_workers; ++m) {
      WorkerAssignment& a = p.workers[m];
      a.window_begin = w_cursor;
      a.window_end = w_cursor + base + (m < extra ? 1 : 0);
      w_cursor = a.window_end;
      a.block_begin = a.window_begin < W ? windows[a.window_begin].start : total;
      a.block_end = m + 1 < num_workers
                        ? (a.window_end < W ? windows[a.window_end].start : total)
                        : total;
      if (a.block_begin > a.block_end) a.block_begin = a.block_end;
      a.node_begin = 0;
      a.node_end = 0;
    }
    // The first worker's block starts at snapshot 0 by construction.
    if (!p.workers.empty()) p.workers.front().block_begin = 0;
  } else {
    for (int m = 0; m < num_workers; ++m) {
      WorkerAssignment& a = p.workers[m];
      a.block_begin = 0;
      a.block_end = total;
      a.window_begin = m == 0 ? 0 : W;
      a.window_end = m == 0 ? W : W;
    }
  }
  return p;
}

ParamMap allreduce_sim(const std::vector<ParamMap>& per_worker) {
  check(!per_worker.empty(), "allreduce needs at least one worker");
  ParamMap out = per_worker.front();
  for (size_t m = 1; m < per_worker.size(); ++m) {
    check(per_worker[m].size() == out.size(), "allreduce: worker gradient sets differ");
    for (auto& [name, g] : out) {
      auto it = per_worker[m].find(name);
      check(it != per_worker[m].end(), "allreduce: missing gradient " + name);
      check(it->second.rows() == g.rows() && it->second.cols() == g.cols(),
            "allreduce: shape mismatch for " + name);
      g += it->second;
    }
  }
  const double inv = 1.0 / static_cast<double>(per_worker.size());
  for (auto& [name, g] : out) g *= inv;
  return out;
}

namespace {

uint64_t snapshot_bytes(const Snapshot& s) {
  return static_cast<uint64_t>(s.num_edges()) * 8 +
         static_cast<uint64_t>(s.num_nodes()) * s.feature_dim() * 8;
}

std::vector<std::pair<NodeId, NodeId>> node_ranges(NodeId n, int m_count) {
  std::vector<std::pair<NodeId, NodeId>> out;
  NodeId base = n / m_count, extra = n % m_count, cursor = 0;
  for (int m = 0; m < m_count; ++m) {
    NodeId len = base + (m < extra ? 1 : 0);
    out.push_back({cursor, cursor + len});
    cursor += len;
  }
  return out;
}

// Unique cross-partition in-neighbor features pulled per (worker, window,
// snapshot), the dominant cost of per-snapshot node partitioning.
void account_node_partition(const DynamicGraph& graph,
                            const std::vector<SequenceWindow>& windows, int m_count,
                            CommLedger* ledger) {
  auto ranges = node_ranges(graph.num_nodes(), m_count);
  const uint64_t row_bytes = static_cast<uint64_t>(graph.feature_dim()) * 8;
  // windows containing snapshot t
  std::vector<uint64_t> cover(graph.length(), 0);
  for (const auto& w : windows) {
    for (Timestep t = w.start; t < w.start + w.length + w.horizon; ++t) ++cover[t];
  }
  for (Timestep t = 0; t < graph.length(); ++t) {
    if (cover[t] == 0) continue;
    const Snapshot& snap = graph.snapshot(t);
    for (int m = 0; m < m_count; ++m) {
      auto [nb, ne] = ranges[m];
      std::vector<bool> remote(graph.num_nodes(), false);
      uint64_t uniq = 0;
      for (const Edge& e : snap.edges()) {
        if (e.dst >= nb && e.dst < ne && (e.src < nb || e.src >= ne) && !remote[e.src]) {
          remote[e.src] = true;
          ++uniq;
        }
      }
      const uint64_t bytes = uniq * row_bytes * cover[t];
      ledger->per_worker[m].remote_features += bytes;
      ledger->total.remote_features += bytes;
    }
  }
}

// GNN outputs move from the snapshot's worker to each node chunk's RNN
// worker; volume depends on the hidden width, never on the feature width.
void account_sequence_partition(const DynamicGraph& graph,
                                const std::vector<SequenceWindow>& windows, int m_count,
                                Eigen::Index hidden_dim, CommLedger* ledger) {
  auto ranges = node_ranges(graph.num_nodes(), m_count);
  const uint64_t row_bytes = static_cast<uint64_t>(hidden_dim) * 8;
  for (const auto& w : windows) {
    for (Timestep idx = 0; idx < w.length; ++idx) {
      const int owner = static_cast<int>(idx % m_count);
      const uint64_t resident = static_cast<uint64_t>(ranges[owner].second - ranges[owner].first);
      const uint64_t moved = (static_cast<uint64_t>(graph.num_nodes()) - resident) * row_bytes;
      ledger->per_worker[owner].intermediate_redistribution += moved;
      ledger->total.intermediate_redistribution += moved;
    }
  }
}

void account_snapshot_fetch(const DynamicGraph& graph, const WorkerPlan& plan,
                            CommLedger* ledger) {
  for (int m = 0; m < plan.num_workers; ++m) {
    const WorkerAssignment& a = plan.workers[m];
    if (a.window_begin == a.window_end) continue;
    const Timestep overlap_end =
        std::min<Timestep>(a.block_end + plan.seq_len + plan.horizon - 1, graph.length());
    for (Timestep t = a.block_end; t < overlap_end; ++t) {
      const uint64_t bytes = snapshot_bytes(graph.snapshot(t));
      ledger->per_worker[m].snapshot_fetch += bytes;
      ledger->total.snapshot_fetch += bytes;
    }
  }
}

}  // namespace

DistributedResult run_distributed_epoch_core(DgnnModel& model, const DynamicGraph& graph,
                                             const WorkerPlan& plan, const ModelConfig& mcfg,
                                             const TrainConfig& tcfg,
                                             std::vector<std::unique_ptr<AggProvider>>& providers,
                                             OptimizerState& opt, int64_t epoch_index) {
  const auto windows = sliding_windows(graph.length(), mcfg.seq_len, tcfg.stride, mcfg.horizon);
  const auto W = static_cast<int64_t>(windows.size());
  check(W >= 1, "distributed epoch needs at least one window");
  const int M = plan.num_workers;

  DistributedResult result;
  result.per_worker.resize(M);
  result.ledger.per_worker.resize(M);
  std::vector<CacheStats> stats0(M);
  std::vector<ExecutionStats> exec0(M);
  for (int m = 0; m < M; ++m) {
    providers[m]->reset_plan_state();
    if (providers[m]->store()) stats0[m] = providers[m]->store()->stats();
    exec0[m] = providers[m]->stats();
  }

  auto batches = make_batches(graph.num_nodes(), tcfg.batch_size, tcfg.seed, epoch_index);
  const uint64_t param_bytes = static_cast<uint64_t>(model.flatten_params().size()) * 8;

  for (int64_t b = 0; b < static_cast<int64_t>(batches.size()); ++b) {
    // Per-window gradients, summed afterwards in global window order so the
    // result cannot depend on the worker count.
    std::vector<ParamMap> window_grads(W);
    for (int m = 0; m < M; ++m) {
      const WorkerAssignment& a = plan.workers[m];
      for (int64_t w = a.window_begin; w < a.window_end; ++w) {
        SeqSample sample = build_sample(graph, mcfg, windows[w],
                                        static_cast<Timestep>(a.window_end - 1 - w), b,
                                        batches[b], tcfg.seed);
        ForwardArtifacts fwd = model_forward(model, sample, *providers[m]);
        // Loss on seed rows of every horizon step.
        const Timestep L = sample.window.length;
        const Timestep H = sample.window.horizon;
        const auto n_seeds = static_cast<Eigen::Index>(sample.seeds.size());
        std::vector<Matrix> dpred;
        double mae = 0.0;
        for (Timestep j = 0; j < H; ++j) {
          const Matrix& pred = fwd.predictions[j];
          Matrix ps(n_seeds, pred.cols()), ts(n_seeds, pred.cols());
          for (Eigen::Index i = 0; i < n_seeds; ++i) {
            ps.row(i) = pred.row(sample.seeds[i]);
            ts.row(i) = sample.feats[L + j + 1]->row(sample.seeds[i]);
          }
          MaeLoss l = loss_mae(ps, ts);
          mae += l.value / static_cast<double>(H);
          Matrix d = Matrix::Zero(pred.rows(), pred.cols());
          for (Eigen::Index i = 0; i < n_seeds; ++i) {
            d.row(sample.seeds[i]) = l.grad.row(i) / static_cast<double>(H);
          }
          dpred.push_back(std::move(d));
        }
        window_grads[w] = model_backward(model, sample, fwd, dpred);
        result.per_worker[m].sample_losses.push_back(mae);
        result.per_worker[m].visitation.push_back({b, w});
      }
    }

    ParamMap global;
    for (int64_t w = 0; w < W; ++w) {
      for (auto& [name, g] : window_grads[w]) {
        auto it = global.find(name);
        if (it == global.end()) {
          global[name] = g;
        } else {
          it->second += g;
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(W);
    for (auto& [name, g] : global) g *= inv;

    bool applied = false;
    for (int m = 0; m < M; ++m) {
      if (m == 0) {
        applied = optimizer_step(model, global, opt, tcfg, providers[m]->store());
      } else if (applied && providers[m]->store()) {
        providers[m]->store()->bump_epoch();
      }
    }
    if (!applied) {
      for (auto& r : result.per_worker) ++r.skipped_steps;
    }

    // One logical synchronization per step; ring all-reduce volume per worker.
    const auto sync_bytes = static_cast<uint64_t>(
        std::llround(2.0 * (M - 1) / std::max(M, 1) * static_cast<double>(param_bytes)));
    for (int m = 0; m < M; ++m) {
      result.ledger.per_worker[m].gradient_sync += sync_bytes;
      result.ledger.total.gradient_sync += sync_bytes;
    }
  }

  switch (plan.scheme) {
    case PlacementScheme::kConsecutiveBlock:
      if (plan.overlap == OverlapMode::kRemoteFetch) {
        account_snapshot_fetch(graph, plan, &result.ledger);
      }
      break;
    case PlacementScheme::kNodePartition:
      account_node_partition(graph, windows, M, &result.ledger);
      break;
    case PlacementScheme::kSequencePartition:
      account_sequence_partition(graph, windows, M, mcfg.hidden_dim, &result.ledger);
      break;
  }

  for (int m = 0; m < M; ++m) {
    EpochReport& r = result.per_worker[m];
    double total = 0.0;
    for (double l : r.sample_losses) total += l;
    r.loss = r.sample_losses.empty() ? 0.0 : total / r.sample_losses.size();
    r.mae = r.loss;
    if (providers[m]->store()) {
      const CacheStats& s1 = providers[m]->store()->stats();
      r.cache.hits = s1.hits - stats0[m].hits;
      r.cache.misses = s1.misses - stats0[m].misses;
      r.cache.evictions = s1.evictions - stats0[m].evictions;
      r.cache.expirations = s1.expirations - stats0[m].expirations;
      r.cache.invalidations = s1.invalidations - stats0[m].invalidations;
      r.cache.resident_peak_units = s1.resident_peak_units;
    }
    const ExecutionStats& e1 = providers[m]->stats();
    r.scratch_calls = e1.scratch_calls - exec0[m].scratch_calls;
    r.incremental_calls = e1.incremental_calls - exec0[m].incremental_calls;
    r.fallbacks = e1.fallbacks - exec0[m].fallbacks;
    r.kernel_invocations = r.scratch_calls + r.incremental_calls;
    r.comm_bytes = result.ledger.per_worker[m].total();
  }
  return result;
}

DistSession::DistSession(const DynamicGraph& graph, const ModelConfig& mcfg,
                         const TrainConfig& tcfg, const WorkerPlan& plan)
    : graph_(graph), mcfg_(mcfg), tcfg_(tcfg), plan_(plan), model_(DgnnModel::create(mcfg)) {
  windows_ = sliding_windows(graph.length(), mcfg.seq_len, tcfg.stride, mcfg.horizon);
  IncrementalOptions inc{tcfg.fallback_threshold, tcfg.rescratch_period};
  for (int m = 0; m < plan.num_workers; ++m) {
    std::unique_ptr<CacheStore> store;
    if (tcfg.cache_policy) {
      const double capacity = tcfg.cache_capacity_frac * cache_data_size_units(graph, mcfg);
      store = std::make_unique<CacheStore>(*tcfg.cache_policy, capacity);
    }
    providers_.push_back(std::make_unique<AggProvider>(store.get(), &graph_, mcfg.aggr,
                                                       tcfg.incremental, inc));
    stores_.push_back(std::move(store));
  }
}

DistributedResult DistSession::run_epoch() {
  return run_distributed_epoch_core(model_, graph_, plan_, mcfg_, tcfg_, providers_, opt_,
                                    epoch_index_++);
}

DistributedResult run_distributed_epoch(DgnnModel& model, const DynamicGraph& graph,
                                        const WorkerPlan& plan, const ModelConfig& mcfg,
                                        const TrainConfig& tcfg, OptimizerState& opt,
                                        int64_t epoch_index) {
  IncrementalOptions inc{tcfg.fallback_threshold, tcfg.rescratch_period};
  std::vector<std::unique_ptr<CacheStore>> stores;
  std::vector<std::unique_ptr<AggProvider>> providers;
  for (int m = 0; m < plan.num_workers; ++m) {
    std::unique_ptr<CacheStore> store;
    if (tcfg.cache_policy) {
      const double capacity = tcfg.cache_capacity_frac * cache_data_size_units(graph, mcfg);
      store = std::make_unique<CacheStore>(*tcfg.cache_policy, capacity);
    }
    providers.push_back(
        std::make_unique<AggProvider>(store.get(), &graph, mcfg.aggr, tcfg.incremental, inc));
    stores.push_back(std::move(store));
  }
  return run_distributed_epoch_core(model, graph, plan, mcfg, tcfg, providers, opt, epoch_index);
}

}  // namespace dgnn
