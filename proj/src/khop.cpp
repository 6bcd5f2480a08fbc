/**
 *  Copyright (c) 2026 by Contributors
 * @file khop.cpp
 */
#include "dgnn/khop.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace dgnn {

std::vector<NodeId> HopBlock::source_nodes() const {
  std::vector<NodeId> src;
  src.reserve(edges.size());
  for (const Edge& e : edges) src.push_back(e.src);
  std::sort(src.begin(), src.end());
  src.erase(std::unique(src.begin(), src.end()), src.end());
  return src;
}

OwnedView ComputationalGraph::to_view(NodeId num_nodes) const {
  OwnedView v;
  v.num_nodes = num_nodes;
  v.in_ptr.assign(num_nodes + 1, 0);
  const auto& edges = deepest().edges;
  for (const Edge& e : edges) ++v.in_ptr[e.dst + 1];
  for (NodeId n = 0; n < num_nodes; ++n) v.in_ptr[n + 1] += v.in_ptr[n];
  v.in_src.resize(edges.size());
  std::vector<EdgeIdx> fill(v.in_ptr.begin(), v.in_ptr.end() - 1);
  for (const Edge& e : edges) v.in_src[fill[e.dst]++] = e.src;
  return v;
}

namespace {

// In-edges of `dst`, capped at `fanout` without replacement.
void sample_in_edges(const Snapshot& snap, NodeId dst, Fanout fanout, uint64_t seed, int hop,
                     std::vector<Edge>* out) {
  GraphView g = snap.view();
  auto nbrs = g.in_neighbors(dst);
  if (fanout == kFullFanout || static_cast<EdgeIdx>(nbrs.size()) <= fanout) {
    for (NodeId u : nbrs) out->push_back({u, dst});
    return;
  }
  std::vector<NodeId> pool(nbrs.begin(), nbrs.end());
  std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(dst), static_cast<uint64_t>(hop)));
  for (Fanout i = 0; i < fanout; ++i) {  // partial Fisher-Yates
    std::uniform_int_distribution<size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    out->push_back({pool[i], dst});
  }
}

HopBlock build_hop(const Snapshot& snap, const std::vector<NodeId>& dests, Fanout fanout,
                   uint64_t seed, int hop) {
  HopBlock block;
  block.destinations = dests;
  for (NodeId v : dests) sample_in_edges(snap, v, fanout, seed, hop, &block.edges);
  std::sort(block.edges.begin(), block.edges.end());
  return block;
}

}  // namespace

ComputationalGraph khop(const Snapshot& snapshot, std::vector<NodeId> seeds,
                        std::vector<Fanout> fanouts, uint64_t seed) {
  check(!seeds.empty(), "khop: seeds must be non-empty");
  check(!fanouts.empty(), "khop: fanouts must name at least one hop");
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  for (NodeId s : seeds) {
    check(s >= 0 && s < snapshot.num_nodes(), "khop: seed node out of range");
  }
  for (Fanout f : fanouts) {
    check(f == kFullFanout || f >= 1, "khop: fanout must be positive or full");
  }

  ComputationalGraph cg;
  cg.seed_nodes = seeds;
  cg.fanouts = fanouts;
  cg.sample_seed = seed;

  std::vector<NodeId> dests = seeds;
  for (size_t k = 0; k < fanouts.size(); ++k) {
    HopBlock block = build_hop(snapshot, dests, fanouts[k], seed, static_cast<int>(k));
    // Next hop expands over the closure: destinations plus this hop's sources.
    std::vector<NodeId> next = dests;
    for (const Edge& e : block.edges) next.push_back(e.src);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cg.hops.push_back(std::move(block));
    dests = std::move(next);
  }
  return cg;
}

bool CgUpdate::empty() const {
  for (const auto& h : hops) {
    if (!h.added.empty() || !h.removed.empty()) return false;
  }
  return true;
}

CgUpdate khop_delta(const ComputationalGraph& prev_cg, const Snapshot& curr,
                    const DeltaGraph& delta) {
  check(delta.t == curr.t(), "khop_delta: delta must produce the current snapshot");
  ComputationalGraph fresh =
      khop(curr, prev_cg.seed_nodes, prev_cg.fanouts, prev_cg.sample_seed);
  CgUpdate up;
  up.hops.resize(fresh.hops.size());
  for (size_t k = 0; k < fresh.hops.size(); ++k) {
    const auto& a = prev_cg.hops[k].edges;
    const auto& b = fresh.hops[k].edges;
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                        std::back_inserter(up.hops[k].added));
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(up.hops[k].removed));
  }
  return up;
}

ComputationalGraph apply_cg_update(const ComputationalGraph& prev_cg, const CgUpdate& update) {
  check(update.hops.size() == prev_cg.hops.size(), "apply_cg_update: hop count mismatch");
  ComputationalGraph out;
  out.seed_nodes = prev_cg.seed_nodes;
  out.fanouts = prev_cg.fanouts;
  out.sample_seed = prev_cg.sample_seed;
  out.hops.resize(prev_cg.hops.size());
  std::vector<NodeId> dests = prev_cg.seed_nodes;
  for (size_t k = 0; k < prev_cg.hops.size(); ++k) {
    std::vector<Edge> kept;
    const auto& prev_edges = prev_cg.hops[k].edges;
    const auto& diff = update.hops[k];
    std::set_difference(prev_edges.begin(), prev_edges.end(), diff.removed.begin(),
                        diff.removed.end(), std::back_inserter(kept));
    std::vector<Edge> merged;
    std::set_union(kept.begin(), kept.end(), diff.added.begin(), diff.added.end(),
                   std::back_inserter(merged));
    out.hops[k].destinations = dests;
    out.hops[k].edges = std::move(merged);
    std::vector<NodeId> next = dests;
    for (const Edge& e : out.hops[k].edges) next.push_back(e.src);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    dests = std::move(next);
  }
  return out;
}

}  // namespace dgnn
