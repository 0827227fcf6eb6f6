#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wfprov/model/ids.hpp"

namespace wfprov {

enum class TaskKind { cpu_intensive, memory_intensive, combined_intensive };

std::string_view to_string(TaskKind k) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view text) noexcept;

struct AbstractTask {
  AbstractTaskId id;
  TaskKind kind = TaskKind::cpu_intensive;
  int fanout = 1;

  bool operator==(const AbstractTask&) const = default;
};

struct AbstractEdge {
  AbstractTaskId from;
  AbstractTaskId to;

  bool operator==(const AbstractEdge&) const = default;
};

/// Abstract workflow definition: tasks with fan-out counts plus the
/// dependency relation between them.
struct WorkflowSpec {
  WorkflowId workflow_id;
  std::vector<AbstractTask> abstract_tasks;
  std::vector<AbstractEdge> abstract_edges;

  const AbstractTask* find(const AbstractTaskId& id) const;

  /// Throws ValidationError for unknown edge endpoints, duplicate abstract
  /// ids or non-positive fan-out, and CycleError for a cyclic edge relation.
  void validate() const;

  bool operator==(const WorkflowSpec&) const = default;
};

/// Concrete id of the `index`-th (1-based) instance of an abstract task.
TaskId concrete_task_id(const AbstractTaskId& abstract_id, int index);

}  // namespace wfprov
