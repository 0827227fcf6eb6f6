#include "wfprov/query/request.hpp"

#include <algorithm>

#include "wfprov/model/errors.hpp"

namespace wfprov {

std::string_view to_string(Route r) noexcept {
  switch (r) {
    case Route::task_details: return "task_details";
    case Route::workflow_nodes: return "workflow_nodes";
    case Route::workflow_abstract_tasks: return "workflow_abstract_tasks";
    case Route::workflow_tasks: return "workflow_tasks";
    case Route::node_tasks: return "node_tasks";
    case Route::task_cpu: return "task_cpu";
    case Route::task_ram: return "task_ram";
    case Route::task_logs: return "task_logs";
  }
  return "?";
}

bool is_federated(Route r) noexcept {
  return r == Route::task_cpu || r == Route::task_ram || r == Route::task_logs;
}

namespace {

const std::vector<std::string> kFilterParams = {"start",    "end",       "task_status",
                                                "abstract_id", "parent_of", "child_of",
                                                "node_id",  "last_status_update"};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const auto part = path.substr(0, slash);
    if (!part.empty()) parts.emplace_back(part);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

std::optional<Route> federated_route(std::string_view name) {
  if (name == "CPU") return Route::task_cpu;
  if (name == "RAM") return Route::task_ram;
  if (name == "logs") return Route::task_logs;
  return std::nullopt;
}

}  // namespace

std::vector<std::string> QueryRequest::allowed_params(Route route, bool path_form) {
  switch (route) {
    case Route::task_details:
    case Route::workflow_nodes:
    case Route::workflow_abstract_tasks:
      return {};
    case Route::workflow_tasks:
      return kFilterParams;
    case Route::node_tasks: {
      auto v = kFilterParams;
      if (path_form) v.erase(std::find(v.begin(), v.end(), "node_id"));
      return v;
    }
    case Route::task_cpu:
    case Route::task_ram: {
      std::vector<std::string> v = path_form ? std::vector<std::string>{"start", "end"} : kFilterParams;
      v.push_back("step");
      return v;
    }
    case Route::task_logs: {
      std::vector<std::string> v = path_form ? std::vector<std::string>{"start", "end"} : kFilterParams;
      v.push_back("full_text_query");
      return v;
    }
  }
  return {};
}

QueryRequest QueryRequest::make(Route route, std::optional<std::string> path_id,
                                const std::multimap<std::string, std::string>& params) {
  QueryRequest r;
  r.route = route;
  r.path_id = std::move(path_id);
  const auto allowed = allowed_params(route, r.path_id.has_value() || route == Route::task_details);
  for (const auto& [raw_name, value] : params) {
    const std::string name = raw_name == "abstract_task" ? "abstract_id" : raw_name;
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw ValidationError("unknown parameter '" + raw_name + "'; allowed: " +
                            (allowed.empty() ? std::string("(none)") : join(allowed)));
    }
    auto [it, inserted] = r.params.emplace(name, value);
    if (!inserted && it->second != value)
      throw ValidationError("conflicting values for parameter '" + name + "'");
  }
  if (route == Route::node_tasks && !r.path_id && !r.params.contains("node_id"))
    throw ValidationError("node_id required");
  return r;
}

QueryRequest QueryRequest::from_path(std::string_view path,
                                     const std::multimap<std::string, std::string>& params) {
  const auto p = split_path(path);
  const auto not_found = [&] { return NotFoundError("route", std::string(path)); };
  if (p.size() < 3 || p[0] != "get") throw not_found();
  if (p[1] == "tasks") {
    if (p.size() == 3) {
      if (auto fr = federated_route(p[2])) return make(*fr, std::nullopt, params);
      return make(Route::task_details, p[2], params);
    }
    if (p.size() == 4) {
      if (auto fr = federated_route(p[3])) return make(*fr, p[2], params);
    }
    throw not_found();
  }
  if (p[1] == "workflow" && p.size() == 3) {
    if (p[2] == "nodes") return make(Route::workflow_nodes, std::nullopt, params);
    if (p[2] == "abstract_tasks") return make(Route::workflow_abstract_tasks, std::nullopt, params);
    if (p[2] == "tasks") return make(Route::workflow_tasks, std::nullopt, params);
  }
  if (p[1] == "node" && p[2] == "tasks") {
    if (p.size() == 3) return make(Route::node_tasks, std::nullopt, params);
    if (p.size() == 4) return make(Route::node_tasks, p[3], params);
  }
  throw not_found();
}

std::optional<std::string> QueryRequest::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

nlohmann::json QueryRequest::echo() const {
  nlohmann::json j{{"route", to_string(route)}, {"params", params}};
  j["path_id"] = path_id ? nlohmann::json(*path_id) : nlohmann::json(nullptr);
  return j;
}

namespace {

template <typename IdT>
std::optional<IdT> id_param(const QueryRequest& r, const std::string& name) {
  auto v = r.param(name);
  if (!v) return std::nullopt;
  if (!is_valid_identifier(*v)) throw ValidationError(name + " invalid: '" + *v + "'");
  return IdT::unchecked(*v);
}

std::optional<Timestamp> time_param(const QueryRequest& r, const std::string& name) {
  auto v = r.param(name);
  if (!v) return std::nullopt;
  auto t = Timestamp::try_parse(*v);
  if (!t) throw ValidationError(name + " is not an RFC3339 timestamp: '" + *v + "'");
  return t;
}

}  // namespace

FilterParams FilterParams::from(const QueryRequest& r) {
  FilterParams f;
  if (auto s = r.param("task_status")) {
    f.task_status = parse_task_status(*s);
    if (!f.task_status) throw ValidationError("task_status invalid: '" + *s + "'");
  }
  f.abstract_id = id_param<AbstractTaskId>(r, "abstract_id");
  f.node_id = id_param<NodeId>(r, "node_id");
  if (r.route == Route::node_tasks && r.path_id) {
    if (!is_valid_identifier(*r.path_id)) throw ValidationError("node_id invalid");
    f.node_id = NodeId::unchecked(*r.path_id);
  }
  f.parent_of = id_param<TaskId>(r, "parent_of");
  f.child_of = id_param<TaskId>(r, "child_of");
  f.start = time_param(r, "start");
  f.end = time_param(r, "end");
  if (f.start && f.end && *f.end < *f.start) throw ValidationError("end before start");
  f.last_status_update = time_param(r, "last_status_update");
  if (auto s = r.param("step")) {
    f.step = parse_duration(*s);
    if (f.step->count() <= 0) throw ValidationError("step must be positive");
  }
  if (auto q = r.param("full_text_query"); q && !q->empty()) f.full_text_query = *q;
  return f;
}

TaskFilter FilterParams::target_filter() const {
  TaskFilter t;
  t.task_status = task_status;
  t.abstract_id = abstract_id;
  t.node_id = node_id;
  t.parent_of = parent_of;
  t.child_of = child_of;
  t.updated_from = last_status_update;
  return t;
}

TaskFilter FilterParams::listing_filter() const {
  auto t = target_filter();
  if (start) t.updated_from = t.updated_from ? std::max(*t.updated_from, *start) : *start;
  t.updated_to = end;
  return t;
}

}  // namespace wfprov
