/**
 *  Copyright (c) 2026 by Contributors
 * @file engine.cpp
 */
#include "dgnn/engine.hpp"

namespace dgnn {

AggProvider::AggProvider(CacheStore* store, const DynamicGraph* graph, AggrFn fn, bool incremental,
                         IncrementalOptions inc_opts)
    : store_(store), graph_(graph), fn_(fn), incremental_(incremental), inc_opts_(inc_opts) {}

int64_t AggProvider::begin_cell_step() { return ++step_serial_; }

void AggProvider::reset_plan_state() {
  chain_.clear();
  watermark_.clear();
}

std::shared_ptr<const AggResult> AggProvider::compute_scratch(int layer, Timestep t,
                                                              AggKeyKind kind,
                                                              const GraphView& view,
                                                              const Matrix& feats) {
  ++stats_.scratch_calls;
  stats_.invocations.push_back({layer, t, kind, false});
  auto r = std::make_shared<AggResult>(aggregate_scratch(view, feats, fn_));
  r->t = t;
  return r;
}

std::shared_ptr<const AggResult> AggProvider::compute_input(int64_t batch, Timestep t,
                                                            const GraphView& view,
                                                            const Matrix& feats) {
  // Prefer an incremental step from the previous snapshot's aggregation when
  // one is at hand; the full-snapshot path is the only one with exact deltas.
  if (incremental_ && graph_ != nullptr && t >= 1 && t < graph_->length()) {
    std::shared_ptr<const AggResult> prev;
    auto it = chain_.find(batch);
    if (it != chain_.end()) {
      if (it->second.curr_t == t - 1) prev = it->second.curr;
      if (!prev && it->second.curr_t == t) prev = it->second.prev;
    }
    if (!prev && store_ != nullptr) {
      prev = store_->peek({CacheLevel::kGlobal, 0, t - 1, AggKeyKind::kInput, batch, 0});
    }
    if (prev && prev->values.rows() == view.num_nodes) {
      const Snapshot& prev_snap = graph_->snapshot(t - 1);
      const Snapshot& curr_snap = graph_->snapshot(t);
      IncrementalResult inc =
          aggregate_incremental(*prev, prev_snap.view(), curr_snap.view(), prev_snap.feats(),
                                curr_snap.feats(), graph_->delta(t), fn_, inc_opts_);
      ++stats_.incremental_calls;
      if (inc.used_fallback) ++stats_.fallbacks;
      stats_.invocations.push_back({1, t, AggKeyKind::kInput, !inc.used_fallback});
      return std::make_shared<AggResult>(std::move(inc.result));
    }
  }
  return compute_scratch(1, t, AggKeyKind::kInput, view, feats);
}

std::shared_ptr<const AggResult> AggProvider::fetch_input(int64_t batch, Timestep t,
                                                          const GraphView& view,
                                                          const Matrix& feats,
                                                          const ExecContext& ctx) {
  const AggKey key{CacheLevel::kGlobal, 0, t, AggKeyKind::kInput, batch, 0};
  auto remember = [&](std::shared_ptr<const AggResult> agg) {
    ChainState& chain = chain_[batch];
    if (chain.curr_t != t) {
      if (chain.curr_t == t - 1) {
        chain.prev = chain.curr;
      } else {
        chain.prev = nullptr;
      }
      chain.curr_t = t;
    }
    chain.curr = agg;
    return agg;
  };

  if (store_ == nullptr) {
    return remember(compute_input(batch, t, view, feats));
  }

  if (plan_aware()) {
    auto wm = watermark_.find(batch);
    const bool first_time = wm == watermark_.end() || t > wm->second;
    if (first_time) {
      auto agg = compute_input(batch, t, view, feats);
      store_->put(key, agg, ctx);
      watermark_[batch] = t;
      return remember(agg);
    }
  }
  if (auto hit = store_->get(key, ctx)) return remember(hit);
  auto agg = compute_input(batch, t, view, feats);
  store_->put(key, agg, ctx);
  return remember(agg);
}

std::shared_ptr<const AggResult> AggProvider::fetch_hidden(int64_t batch, Timestep t, int layer,
                                                           AggKeyKind kind, const GraphView& view,
                                                           const Matrix& hidden,
                                                           const ExecContext& ctx) {
  if (store_ == nullptr) return compute_scratch(layer, t, kind, view, hidden);
  const AggKey key{CacheLevel::kLocal, layer, t, kind, batch, step_serial_};
  if (plan_aware() && ctx.gate == 1) {
    // A fresh step serial can never have been inserted before.
    auto agg = compute_scratch(layer, t, kind, view, hidden);
    store_->put(key, agg, ctx);
    return agg;
  }
  if (auto hit = store_->get(key, ctx)) return hit;
  auto agg = compute_scratch(layer, t, kind, view, hidden);
  store_->put(key, agg, ctx);
  return agg;
}

std::shared_ptr<const AggResult> AggProvider::compute_uncached(int layer, Timestep t,
                                                               AggKeyKind kind,
                                                               const GraphView& view,
                                                               const Matrix& feats) {
  return compute_scratch(layer, t, kind, view, feats);
}

}  // namespace dgnn
