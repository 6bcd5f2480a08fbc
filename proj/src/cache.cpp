/**
 *  Copyright (c) 2026 by Contributors
 * @file cache.cpp
 */
#include "dgnn/cache.hpp"

#include <algorithm>

namespace dgnn {

const char* to_string(CachePolicy p) {
  switch (p) {
    case CachePolicy::kReinc: return "reinc";
    case CachePolicy::kLru: return "lru";
    case CachePolicy::kLfu: return "lfu";
  }
  return "?";
}

CachePolicy cache_policy_from_string(const std::string& s) {
  if (s == "reinc") return CachePolicy::kReinc;
  if (s == "lru") return CachePolicy::kLru;
  if (s == "lfu") return CachePolicy::kLfu;
  fail("unknown cache policy: " + s);
}

int future_access_count(const ExecContext& ctx) {
  check(ctx.gate >= 1 && ctx.gate <= ctx.gates, "gate must lie in 1..K");
  check(ctx.layer >= 1 && ctx.layer <= ctx.num_layers, "layer must lie in 1..D");
  check(ctx.idx >= 0, "window position must be non-negative");

  const bool global_entry = ctx.layer == 1 && ctx.kind == AggKeyKind::kInput;
  if (!global_entry) return ctx.gates - ctx.gate;

  const int64_t S = ctx.stride;
  const int64_t L = ctx.seq_len;
  const int64_t wrem = ctx.windows_remaining;
  int64_t visits = 0;
  if (ctx.part == ModelPart::kEncoder) {
    // Snapshot start+idx reappears in the next idx/S encoders.
    visits = std::min<int64_t>(ctx.idx / S, wrem);
  } else {
    // Snapshot start+L+j reappears in later decoders while j - m*S >= 0 and
    // in the encoders whose windows cover it (m*S in [j+1, L+j]).
    const int64_t j = ctx.idx;
    visits = std::min<int64_t>(j / S, wrem);
    const int64_t lo = (j + S) / S;  // ceil((j+1)/S)
    const int64_t hi = std::min<int64_t>((L + j) / S, wrem);
    if (hi >= lo) visits += hi - lo + 1;
  }
  const int64_t f = (visits + 1) * ctx.gates - ctx.gate;
  return static_cast<int>(std::max<int64_t>(f, 0));
}

int imminence(const ExecContext& ctx) {
  const bool global_entry = ctx.layer == 1 && ctx.kind == AggKeyKind::kInput;
  if (!global_entry) return 0;
  if (ctx.part == ModelPart::kEncoder) {
    return static_cast<int>(std::max<Timestep>(ctx.seq_len - ctx.stride, 0));
  }
  return static_cast<int>(std::max<Timestep>(ctx.seq_len - 1, 0));
}

CacheStore::CacheStore(CachePolicy policy, double capacity_units)
    : policy_(policy), capacity_(capacity_units) {
  check(capacity_units > 0.0, "cache store needs positive capacity");
}

void CacheStore::note_resident_peak() {
  if (resident_ > stats_.resident_peak_units) stats_.resident_peak_units = resident_;
}

void CacheStore::remove_entry(const AggKey& key, CacheEvent::Type why) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  resident_ -= it->second.size_units;
  entries_.erase(it);
  switch (why) {
    case CacheEvent::Type::kExpire: ++stats_.expirations; break;
    case CacheEvent::Type::kEvict: ++stats_.evictions; break;
    case CacheEvent::Type::kInvalidate: ++stats_.invalidations; break;
    default: break;
  }
  emit({why, key});
}

bool CacheStore::make_room(double need, double incoming_priority, PutReport* report) {
  if (capacity_ - resident_ >= need) return true;

  // Victim order: REINC ascends by (priority, t, insert serial) and only
  // considers entries strictly weaker than the incoming one; LRU ascends by
  // recency, LFU by (frequency, insert serial).
  std::vector<const Entry*> order;
  order.reserve(entries_.size());
  for (const auto& [k, e] : entries_) order.push_back(&e);
  switch (policy_) {
    case CachePolicy::kReinc:
      std::sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
        if (a->priority != b->priority) return a->priority < b->priority;
        if (a->key.t != b->key.t) return a->key.t < b->key.t;
        return a->insert_serial < b->insert_serial;
      });
      break;
    case CachePolicy::kLru:
      std::sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
        return a->last_access < b->last_access;
      });
      break;
    case CachePolicy::kLfu:
      std::sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
        if (a->frequency != b->frequency) return a->frequency < b->frequency;
        return a->insert_serial < b->insert_serial;
      });
      break;
  }

  double freeable = capacity_ - resident_;
  std::vector<AggKey> victims;
  for (const Entry* e : order) {
    if (freeable >= need) break;
    if (policy_ == CachePolicy::kReinc && e->priority >= incoming_priority) break;
    freeable += e->size_units;
    victims.push_back(e->key);
  }
  if (freeable < need) return false;
  for (const AggKey& k : victims) {
    remove_entry(k, CacheEvent::Type::kEvict);
    report->evicted.push_back(k);
  }
  return true;
}

PutReport CacheStore::put(const AggKey& key, std::shared_ptr<const AggResult> payload,
                          const ExecContext& ctx) {
  check(payload != nullptr && payload->values.size() > 0, "cache put needs a non-empty payload");
  PutReport report;
  const double size = static_cast<double>(payload->size_units());

  if (size > capacity_) {
    report.rejected_too_large = true;
    ++stats_.rejected;
    emit({CacheEvent::Type::kPut, key, false, 0, false});
    return report;
  }

  Entry e;
  e.key = key;
  e.payload = std::move(payload);
  e.size_units = size;
  e.insert_serial = ++clock_;
  e.last_access = e.insert_serial;
  e.frequency = 1;
  if (policy_ == CachePolicy::kReinc) {
    e.future_count = future_access_count(ctx);
    e.imminence_steps = imminence(ctx);
    e.priority = entry_priority(e.future_count, e.size_units, e.imminence_steps);
    if (e.future_count <= 0) {
      // Expired on arrival: nothing will ever look it up again.
      report.rejected_expired = true;
      ++stats_.rejected;
      emit({CacheEvent::Type::kPut, key, false, 0, false});
      return report;
    }
  }

  remove_entry(key, CacheEvent::Type::kEvict);  // replace an existing entry

  if (!make_room(size, e.priority, &report)) {
    report.rejected_admission = true;
    ++stats_.rejected;
    emit({CacheEvent::Type::kPut, key, false, e.future_count, false});
    return report;
  }

  resident_ += size;
  note_resident_peak();
  const int assigned = e.future_count;
  entries_.emplace(key, std::move(e));
  report.stored = true;
  emit({CacheEvent::Type::kPut, key, false, assigned, true});
  return report;
}

std::shared_ptr<const AggResult> CacheStore::get(const AggKey& key, const ExecContext&) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++stats_.misses;
    emit({CacheEvent::Type::kGet, key, false});
    return nullptr;
  }
  Entry& e = it->second;
  ++stats_.hits;
  emit({CacheEvent::Type::kGet, key, true});
  e.last_access = ++clock_;
  ++e.frequency;
  auto payload = e.payload;
  if (policy_ == CachePolicy::kReinc) {
    e.future_count -= 1;
    e.priority = entry_priority(e.future_count, e.size_units, e.imminence_steps);
    if (e.future_count <= 0) remove_entry(key, CacheEvent::Type::kExpire);
  }
  return payload;
}

std::shared_ptr<const AggResult> CacheStore::peek(const AggKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second.payload;
}

void CacheStore::bump_epoch() {
  ++epoch_;
  std::vector<AggKey> doomed;
  for (const auto& [k, e] : entries_) {
    if (k.kind != AggKeyKind::kInput) doomed.push_back(k);
  }
  for (const AggKey& k : doomed) remove_entry(k, CacheEvent::Type::kInvalidate);
}

std::vector<AggKey> CacheStore::resident_keys() const {
  std::vector<AggKey> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, e] : entries_) keys.push_back(k);
  return keys;
}

}  // namespace dgnn
