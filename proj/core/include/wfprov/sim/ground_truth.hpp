#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"
#include "wfprov/model/event.hpp"
#include "wfprov/model/workflow_spec.hpp"
#include "wfprov/sim/config.hpp"

namespace wfprov::sim {

/// One line of a trace file: {"source", "ts", "payload", "id"?}.
struct TraceRecord {
  EventSource source = EventSource::workflow_engine;
  Timestamp ts;
  /// JSON object, or a string for free-text records.
  nlohmann::json payload;
  std::optional<std::string> id;

  std::string line() const;
  /// Same record with `ts` replaced (real-time replay stamps emission time).
  std::string line_at(Timestamp at) const;
};

/// Expected eDAG state and backend data of one simulated task.
struct TaskTruth {
  TaskId task_id;
  AbstractTaskId abstract_task_id;
  TaskKind kind = TaskKind::cpu_intensive;
  std::vector<TaskId> parents;
  TaskStatus final_status = TaskStatus::succeeded;
  ExecObjectId exec_object_id;
  NodeId node_id;
  Timestamp queued_at;
  /// Resource-manager binding and placement.
  Timestamp assigned_at;
  Timestamp scheduled_at;
  /// Resource-manager failure report, for injected failures.
  std::optional<Timestamp> exec_failed_at;
  /// Source timestamps of the running event and of the first terminal
  /// observation; the execution interval the eDAG ends up with.
  Timestamp started_at;
  Timestamp ended_at;
  /// Source timestamp of the workflow-engine terminal event.
  Timestamp last_status_update;
  bool warned = false;
};

struct EventTally {
  std::uint64_t records = 0;
  std::uint64_t canonical = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t unsupported = 0;
  std::uint64_t noise = 0;
  std::uint64_t orphans = 0;
};

struct GroundTruth {
  WorkflowSpec spec;
  std::vector<NodeId> nodes;
  std::vector<FailureInjection> failures;
  std::set<TaskKind> warning_kinds;
  std::chrono::milliseconds scrape_step{10'000};
  std::uint64_t seed = 0;

  std::map<TaskId, TaskTruth> tasks;
  /// Every trace record, ordered by timestamp (per-source order preserved).
  std::vector<TraceRecord> events;
  std::vector<MetricSample> metrics;
  std::vector<LogEntry> logs;
  EventTally tally;

  const TaskTruth& task(const TaskId& id) const;
  std::vector<const TraceRecord*> events_of(EventSource s) const;
  /// Samples of one exec object and metric, ordered by time.
  std::vector<MetricPoint> series(const ExecObjectId& exec, MetricKind metric) const;
  Timestamp end_time() const;

  nlohmann::json to_json() const;
  static GroundTruth from_json(const nlohmann::json& j);

  /// Writes spec.json, ground_truth.json, trace.ndjson, metrics.ndjson and
  /// logs.ndjson into `dir`.
  void save(const std::filesystem::path& dir) const;
  static GroundTruth load(const std::filesystem::path& dir);
};

}  // namespace wfprov::sim
