#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "wfprov/model/ids.hpp"
#include "wfprov/model/status.hpp"
#include "wfprov/model/time.hpp"

namespace wfprov {

/// Bounded FIFO set of event ids already applied to one task.
class AppliedEventIds {
 public:
  static constexpr std::size_t kDefaultCapacity = 64;

  explicit AppliedEventIds(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {}

  bool contains(const std::string& id) const;
  /// Inserts `id`, evicting the oldest entry when full. No-op when present.
  void insert(const std::string& id);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const std::deque<std::string>& ids() const noexcept { return ids_; }

  bool operator==(const AppliedEventIds&) const = default;

 private:
  std::size_t capacity_;
  std::deque<std::string> ids_;
};

/// A concrete task node of the eDAG.
struct TaskRecord {
  TaskId task_id;
  AbstractTaskId abstract_task_id;
  WorkflowId workflow_id;
  TaskStatus current_status = TaskStatus::unknown;
  Timestamp last_status_update;
  std::optional<ExecObjectId> exec_object_id;
  std::optional<NodeId> node_id;
  std::optional<Timestamp> start_time;
  std::optional<Timestamp> end_time;
  std::map<std::string, std::string> attrs;
  AppliedEventIds applied_event_ids;

  /// Equality on provenance state; ignores the dedup bookkeeping.
  bool same_state(const TaskRecord& other) const;

  bool operator==(const TaskRecord&) const = default;
};

}  // namespace wfprov
