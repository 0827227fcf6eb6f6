#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/backends/metrics.hpp"
#include "wfprov/edag/edag.hpp"

namespace wfprov {

enum class Route {
  task_details,             // /get/tasks/{task_id}
  workflow_nodes,           // /get/workflow/nodes
  workflow_abstract_tasks,  // /get/workflow/abstract_tasks
  workflow_tasks,           // /get/workflow/tasks
  node_tasks,               // /get/node/tasks/?node_id=  or /get/node/tasks/{node_id}
  task_cpu,                 // /get/tasks/{task_id}/CPU  or /get/tasks/CPU?...
  task_ram,                 // /get/tasks/{task_id}/RAM  or /get/tasks/RAM?...
  task_logs,                // /get/tasks/{task_id}/logs or /get/tasks/logs?...
};

std::string_view to_string(Route r) noexcept;
bool is_federated(Route r) noexcept;

/// A parsed endpoint call. Parameter names are validated against the route;
/// `abstract_task` is folded into `abstract_id`.
struct QueryRequest {
  Route route = Route::workflow_tasks;
  /// Task id (task routes, path form) or node id (node route, path form).
  std::optional<std::string> path_id;
  std::map<std::string, std::string> params;

  /// Parameter names accepted by `route` in the given form.
  static std::vector<std::string> allowed_params(Route route, bool path_form);

  /// Throws ValidationError listing the allowed names on an unknown
  /// parameter, or when a parameter appears twice with different values.
  static QueryRequest make(Route route, std::optional<std::string> path_id,
                           const std::multimap<std::string, std::string>& params);

  /// Parses a request path such as `/get/tasks/CPU` plus its parameters.
  /// Throws NotFoundError for unknown paths.
  static QueryRequest from_path(std::string_view path,
                                const std::multimap<std::string, std::string>& params);

  std::optional<std::string> param(const std::string& name) const;

  nlohmann::json echo() const;
};

/// Typed view of the filter-style parameters.
struct FilterParams {
  std::optional<TaskStatus> task_status;
  std::optional<AbstractTaskId> abstract_id;
  std::optional<NodeId> node_id;
  std::optional<TaskId> parent_of;
  std::optional<TaskId> child_of;
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;
  std::optional<Timestamp> last_status_update;
  std::optional<std::chrono::microseconds> step;
  std::optional<std::string> full_text_query;

  /// Throws ValidationError on malformed values.
  static FilterParams from(const QueryRequest& r);

  /// The eDAG filter for listing routes: start/end and last_status_update
  /// all bound last_status_update (the latter as "at or after").
  TaskFilter listing_filter() const;
  /// The eDAG filter for federated routes: start/end are left to the data
  /// window instead.
  TaskFilter target_filter() const;
};

}  // namespace wfprov
