#include "wfprov/processing/pending_queue.hpp"

#include <algorithm>

namespace wfprov {

bool PendingQueue::push(const std::string& key, CanonicalEvent e, clock::time_point now) {
  if (entries_.size() >= capacity_) return false;
  entries_.push_back(Entry{key, std::move(e), now});
  by_key_[key].push_back(std::prev(entries_.end()));
  return true;
}

std::vector<CanonicalEvent> PendingQueue::take(const std::string& key) {
  std::vector<CanonicalEvent> out;
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return out;
  for (auto e : it->second) {
    out.push_back(std::move(e->event));
    entries_.erase(e);
  }
  by_key_.erase(it);
  return out;
}

void PendingQueue::unlink(Iter it) {
  auto k = by_key_.find(it->key);
  if (k != by_key_.end()) {
    k->second.remove(it);
    if (k->second.empty()) by_key_.erase(k);
  }
  entries_.erase(it);
}

std::vector<CanonicalEvent> PendingQueue::expire(clock::time_point now, clock::duration ttl) {
  std::vector<CanonicalEvent> out;
  while (!entries_.empty() && entries_.front().deferred_at + ttl <= now) {
    out.push_back(std::move(entries_.front().event));
    unlink(entries_.begin());
  }
  return out;
}

std::vector<CanonicalEvent> PendingQueue::drain() {
  std::vector<CanonicalEvent> out;
  out.reserve(entries_.size());
  for (auto& e : entries_) out.push_back(std::move(e.event));
  entries_.clear();
  by_key_.clear();
  return out;
}

}  // namespace wfprov
