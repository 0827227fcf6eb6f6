#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"
#include "wfprov/edag/edag.hpp"
#include "wfprov/query/request.hpp"

namespace wfprov {

/// A task a federated request gathers data for. `window` is the task's
/// execution interval intersected with the requested start/end; it is unset
/// when the task never ran or the intersection is empty.
struct PlannedTarget {
  TaskRecord record;
  std::optional<ExecObjectId> exec_object_id;
  std::optional<TimeInterval> window;
};

/// Everything needed to answer a request, derived from one eDAG snapshot.
struct QueryPlan {
  QueryRequest request;
  std::uint64_t edag_version = 0;
  Timestamp evaluated_at;
  TaskFilter local_filter;
  /// Local part of the answer (listing routes).
  nlohmann::json local_results = nlohmann::json::array();
  std::vector<PlannedTarget> targets;
  std::optional<MetricRangeQuery> metric_query;
  std::optional<LogSearchQuery> log_query;
  std::vector<std::string> warnings;
};

/// Pure function of (request, snapshot, evaluation instant). Throws
/// NotFoundError for unknown referenced ids and ValidationError for bad
/// parameter values.
QueryPlan plan(const QueryRequest& request, const EDag& dag, Timestamp now,
               std::chrono::microseconds default_step);

/// Splits backend answers per target and builds the `results` array.
nlohmann::json merge_metric_results(const QueryPlan& p, const SeriesMap* series);
nlohmann::json merge_log_results(const QueryPlan& p, const std::vector<LogEntry>* entries);

}  // namespace wfprov
