#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/model/ids.hpp"
#include "wfprov/model/status.hpp"
#include "wfprov/model/task_record.hpp"
#include "wfprov/model/time.hpp"
#include "wfprov/model/workflow_spec.hpp"
#include "wfprov/processing/transition.hpp"

namespace wfprov {

/// Status assertion carried by an update.
struct StatusChange {
  TaskStatus status = TaskStatus::unknown;
  Timestamp at;
  StatusOrigin origin = StatusOrigin::engine;
};

/// Partial TaskRecord fields applied by EDag::apply_attrs.
///
/// Time contributions merge by minimum (start_time is the first running,
/// end_time the first terminal observation); bindings merge by latest
/// assignment timestamp; placement only applies to the currently bound
/// execution object.
struct TaskUpdate {
  std::optional<StatusChange> status;
  std::optional<Timestamp> started_at;
  std::optional<Timestamp> ended_at;
  std::optional<std::pair<ExecObjectId, Timestamp>> binding;
  std::optional<std::pair<ExecObjectId, NodeId>> placement;
  /// Failure reported by the resource manager for the bound execution object.
  std::optional<std::pair<ExecObjectId, Timestamp>> exec_failure;
  std::map<std::string, std::string> attrs;
};

enum class ApplyOutcome { applied, duplicate, stale, unknown_task };

std::string_view to_string(ApplyOutcome o) noexcept;

struct ApplyResult {
  ApplyOutcome outcome = ApplyOutcome::stale;
  /// Status decision taken, when the update carried a status.
  std::optional<TransitionAction> action;
  bool state_changed = false;
};

/// Conjunctive filter for EDag::list_tasks. Unset fields do not constrain.
struct TaskFilter {
  std::optional<TaskStatus> task_status;
  std::optional<AbstractTaskId> abstract_id;
  std::optional<NodeId> node_id;
  /// Direct predecessors of the given task.
  std::optional<TaskId> parent_of;
  /// Direct successors of the given task.
  std::optional<TaskId> child_of;
  /// Inclusive bounds on last_status_update.
  std::optional<Timestamp> updated_from;
  std::optional<Timestamp> updated_to;

  bool matches(const TaskRecord& r) const;
};

struct ResolvedTarget {
  TaskId task_id;
  std::optional<ExecObjectId> exec_object_id;
  std::optional<TimeInterval> interval;

  bool operator==(const ResolvedTarget&) const = default;
};

struct AuditReport {
  std::vector<std::string> divergences;
  bool ok() const { return divergences.empty(); }
};

/// The enriched DAG of one workflow run: concrete task records, dependency
/// edges and secondary indexes. Not synchronized; see EDagStore.
class EDag {
 public:
  EDag() = default;
  explicit EDag(WorkflowId workflow_id) : workflow_id_(std::move(workflow_id)) {}

  /// Expands each abstract task into `fanout` concrete tasks named
  /// `<abstract>_<i>` and each abstract edge into the full cross product of
  /// concrete edges. Throws ValidationError / CycleError for invalid specs.
  static EDag init_from_spec(const WorkflowSpec& spec);

  const WorkflowId& workflow_id() const noexcept { return workflow_id_; }
  std::uint64_t version() const noexcept { return version_; }
  std::size_t task_count() const noexcept { return tasks_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Throws ConflictError when a different record with the same id exists;
  /// an identical record is a no-op. Returns the resulting version.
  std::uint64_t add_task(TaskRecord record);

  /// Throws NotFoundError for unknown tasks and CycleError when the edge
  /// would close a cycle (graph unchanged). Re-adding an edge is a no-op.
  std::uint64_t add_dependency(const TaskId& parent, const TaskId& child);

  /// Merges `update` into the task under the transition rules. Replayed
  /// event ids are reported as duplicates without touching state.
  ApplyResult apply_attrs(const TaskId& task_id, const TaskUpdate& update,
                          const std::string& event_id);

  bool contains(const TaskId& id) const { return tasks_.contains(id); }
  const TaskRecord* find(const TaskId& id) const;
  /// Throws NotFoundError.
  const TaskRecord& get_task(const TaskId& id) const;
  std::optional<TaskId> task_for_exec(const ExecObjectId& exec) const;

  const std::map<TaskId, TaskRecord>& tasks() const noexcept { return tasks_; }
  const std::set<TaskId>& children(const TaskId& id) const;
  const std::set<TaskId>& parents(const TaskId& id) const;
  bool has_abstract(const AbstractTaskId& id) const { return abstract_index_.contains(id); }
  bool has_node(const NodeId& id) const { return node_index_.contains(id); }

  /// Tasks satisfying every predicate, ordered by task id. Throws
  /// NotFoundError when the filter names a task, abstract task or node that
  /// is not in the graph.
  std::vector<TaskRecord> list_tasks(const TaskFilter& filter) const;

  /// One entry per concrete instance. Intervals run from start_time to
  /// end_time, or to `now` for tasks still running. Throws NotFoundError.
  std::vector<ResolvedTarget> resolve_abstract(const AbstractTaskId& id, Timestamp now) const;
  ResolvedTarget resolve_task(const TaskRecord& record, Timestamp now) const;

  std::vector<std::pair<NodeId, std::size_t>> list_nodes() const;
  std::vector<std::pair<AbstractTaskId, std::size_t>> list_abstract_tasks() const;

  /// Recomputes every index from tasks and edges and reports differences,
  /// plus acyclicity and record invariant violations.
  AuditReport audit_indexes() const;

  /// {"workflow_id", "version", "tasks": [...], "edges": [[parent, child], ...]}
  nlohmann::json export_snapshot() const;
  static EDag import_snapshot(const nlohmann::json& doc);

  /// Equality of provenance state (records and edges); ignores version and
  /// dedup bookkeeping.
  bool same_state(const EDag& other) const;

 private:
  void index_insert(const TaskRecord& r);
  void index_erase(const TaskRecord& r);
  bool reaches(const TaskId& from, const TaskId& to) const;
  void insert_edge_unchecked(const TaskId& parent, const TaskId& child);

  WorkflowId workflow_id_;
  std::uint64_t version_ = 0;
  std::map<TaskId, TaskRecord> tasks_;
  std::map<TaskId, std::set<TaskId>> children_;
  std::map<TaskId, std::set<TaskId>> parents_;
  std::size_t edge_count_ = 0;

  std::map<AbstractTaskId, std::set<TaskId>> abstract_index_;
  std::map<NodeId, std::set<TaskId>> node_index_;
  std::map<ExecObjectId, TaskId> exec_index_;
  std::map<TaskStatus, std::set<TaskId>> status_index_;
};

}  // namespace wfprov
