/**
 *  Copyright (c) 2026 by Contributors
 * @file dgnn/cache.hpp
 * @brief Two-level aggregation cache with execution-plan-aware eviction.
 *
 * The store keeps input-feature aggregations at the global level (reusable
 * across gates, windows and model parts) and hidden-state aggregations in
 * per-layer local levels (reusable across gates of one cell step only).
 *
 * Scoring follows priority = F/size - I, where F predicts the entry's future
 * lookups from the execution plan and I is how many timesteps pass before the
 * next access. Local entries: F = K - g. Global entries: F = (1 + v)*K - g
 * with v the number of future (window, part) visits of that snapshot for the
 * current mini-batch, truncated by the windows remaining in the epoch. The
 * brute-force trace oracle in the test suite is the arbiter for these counts.
 * Entries whose F reaches zero are expired immediately; LRU and LFU are
 * baseline policies without expiration.
 */
#ifndef DGNN_CACHE_HPP
#define DGNN_CACHE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dgnn/aggregate.hpp"

namespace dgnn {

enum class CacheLevel : uint8_t { kGlobal, kLocal };
enum class AggKeyKind : uint8_t { kInput, kHiddenPrevT, kHiddenPrevLayer };
enum class ModelPart : uint8_t { kEncoder, kDecoder };
enum class CachePolicy : uint8_t { kReinc, kLru, kLfu };

const char* to_string(CachePolicy p);
CachePolicy cache_policy_from_string(const std::string& s);

struct AggKey {
  CacheLevel level = CacheLevel::kGlobal;
  int layer = 0;                 // local levels only, 1-based
  Timestep t = 0;                // snapshot the payload was aggregated over
  AggKeyKind kind = AggKeyKind::kInput;
  int64_t batch = 0;             // mini-batch identity
  // Hidden aggregations are pure within-cell-step reuse; scoping their keys to
  // the producing step makes stale cross-step hits impossible for every
  // policy, not just the expiring one.
  int64_t step_serial = 0;

  friend bool operator==(const AggKey&, const AggKey&) = default;
};

struct AggKeyHash {
  size_t operator()(const AggKey& k) const {
    uint64_t h = derive_seed(static_cast<uint64_t>(k.t), static_cast<uint64_t>(k.layer),
                             static_cast<uint64_t>(k.batch), static_cast<uint64_t>(k.step_serial));
    return static_cast<size_t>(mix64(h ^ (static_cast<uint64_t>(k.level) << 8) ^
                                     (static_cast<uint64_t>(k.kind) << 16)));
  }
};

// Execution state at the moment an aggregation is produced or looked up.
struct ExecContext {
  int num_layers = 1;            // D
  int gates = 1;                 // K (1 for models without gated cells)
  int gate = 1;                  // g, 1-based, 1..K
  Timestep seq_len = 1;          // L
  Timestep stride = 1;           // S
  Timestep idx = 0;              // encoder: 0-based window position; decoder: step j
  ModelPart part = ModelPart::kEncoder;
  int layer = 1;                 // 1-based
  bool teacher_forcing = false;
  Timestep horizon = 0;          // H
  Timestep windows_remaining = 0;  // windows left for this batch after the current one
  AggKeyKind kind = AggKeyKind::kInput;
};

// Predicted number of lookups of this entry after the current gate.
int future_access_count(const ExecContext& ctx);

// Timesteps that pass before the next access: 0 for local entries, L-S for
// global entries produced in the encoder, L-1 for decoder-produced ones.
int imminence(const ExecContext& ctx);

inline double entry_priority(int future_count, double size_units, int imminence_steps) {
  return static_cast<double>(future_count) / size_units - static_cast<double>(imminence_steps);
}

struct CacheStats {
  int64_t hits = 0;
  int64_t misses = 0;
  int64_t evictions = 0;
  int64_t expirations = 0;
  int64_t invalidations = 0;     // epoch-bump removals
  int64_t rejected = 0;          // puts refused by admission or size
  double resident_peak_units = 0.0;

  int64_t lookups() const { return hits + misses; }
  double hit_rate() const {
    return lookups() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(lookups());
  }
};

struct PutReport {
  bool stored = false;
  bool rejected_too_large = false;
  bool rejected_expired = false;    // arrived with zero future accesses
  bool rejected_admission = false;  // could not beat resident priorities
  std::vector<AggKey> evicted;
};

// Observer events let tests replay the exact access trace.
struct CacheEvent {
  enum class Type { kGet, kPut, kExpire, kEvict, kInvalidate } type;
  AggKey key;
  bool hit = false;      // kGet
  int assigned_f = 0;    // kPut
  bool stored = false;   // kPut
};

class CacheStore {
 public:
  CacheStore(CachePolicy policy, double capacity_units);

  CachePolicy policy() const { return policy_; }
  double capacity_units() const { return capacity_; }
  double resident_units() const { return resident_; }
  size_t entry_count() const { return entries_.size(); }

  PutReport put(const AggKey& key, std::shared_ptr<const AggResult> payload,
                const ExecContext& ctx);
  // Counted lookup; decrements F and may expire the entry under the scoring
  // policy. Returns nullptr on miss.
  std::shared_ptr<const AggResult> get(const AggKey& key, const ExecContext& ctx);
  // Uncounted lookup used by the incremental pipeline to borrow a previous
  // aggregation; never touches counters or scores.
  std::shared_ptr<const AggResult> peek(const AggKey& key) const;
  bool contains(const AggKey& key) const { return entries_.count(key) > 0; }

  // Invalidate everything that depends on learnable weights; input-feature
  // aggregations survive.
  void bump_epoch();
  int64_t epoch() const { return epoch_; }

  const CacheStats& stats() const { return stats_; }
  void set_observer(std::function<void(const CacheEvent&)> obs) { observer_ = std::move(obs); }

  // Entries currently resident, in no particular order (introspection/tests).
  std::vector<AggKey> resident_keys() const;

 private:
  struct Entry {
    AggKey key;
    std::shared_ptr<const AggResult> payload;
    double size_units = 0.0;
    int future_count = 0;
    int imminence_steps = 0;
    double priority = 0.0;
    int64_t frequency = 0;
    int64_t last_access = 0;
    int64_t insert_serial = 0;
  };

  void remove_entry(const AggKey& key, CacheEvent::Type why);
  bool make_room(double need, double incoming_priority, PutReport* report);
  void note_resident_peak();
  void emit(const CacheEvent& ev) {
    if (observer_) observer_(ev);
  }

  CachePolicy policy_;
  double capacity_;
  double resident_ = 0.0;
  int64_t clock_ = 0;
  int64_t epoch_ = 0;
  CacheStats stats_;
  std::unordered_map<AggKey, Entry, AggKeyHash> entries_;
  std::function<void(const CacheEvent&)> observer_;
};

}  // namespace dgnn

#endif  // DGNN_CACHE_HPP
