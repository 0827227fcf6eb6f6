#pragma once

#include <chrono>
#include <list>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfprov/model/event.hpp"

namespace wfprov {

/// Events that reference a task or execution object the eDAG does not know
/// yet, keyed by the missing reference. Bounded; entries older than the TTL
/// are expired by the owner and counted as orphaned.
class PendingQueue {
 public:
  using clock = std::chrono::steady_clock;

  explicit PendingQueue(std::size_t capacity = 100'000) : capacity_(capacity) {}

  static std::string task_key(const TaskId& id) { return "task:" + id.str(); }
  static std::string exec_key(const ExecObjectId& id) { return "exec:" + id.str(); }

  /// False when full (the event is not stored).
  bool push(const std::string& key, CanonicalEvent e, clock::time_point now);

  /// Removes and returns every event waiting on `key`, in deferral order.
  std::vector<CanonicalEvent> take(const std::string& key);

  /// Removes and returns entries deferred at or before `now - ttl`.
  std::vector<CanonicalEvent> expire(clock::time_point now, clock::duration ttl);

  std::vector<CanonicalEvent> drain();

  bool has(const std::string& key) const { return by_key_.contains(key); }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  struct Entry {
    std::string key;
    CanonicalEvent event;
    clock::time_point deferred_at;
  };
  using Iter = std::list<Entry>::iterator;

  void unlink(Iter it);

  std::size_t capacity_;
  std::list<Entry> entries_;
  std::unordered_map<std::string, std::list<Iter>> by_key_;
};

}  // namespace wfprov
