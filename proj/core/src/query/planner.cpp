#include "wfprov/query/planner.hpp"

#include <algorithm>
#include <map>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov {

namespace {

nlohmann::json records_json(const std::vector<TaskRecord>& records) {
  auto arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(task_record_view(r));
  return arr;
}

const TaskRecord& require_task(const EDag& dag, const std::string& id) {
  if (!is_valid_identifier(id)) throw NotFoundError("task", id);
  return dag.get_task(TaskId::unchecked(id));
}

void plan_targets(QueryPlan& p, const EDag& dag, const FilterParams& f) {
  std::vector<TaskRecord> records;
  if (p.request.path_id) {
    records.push_back(require_task(dag, *p.request.path_id));
  } else {
    p.local_filter = f.target_filter();
    records = dag.list_tasks(p.local_filter);
  }

  std::optional<TimeInterval> hull;
  std::vector<ExecObjectId> ids;
  for (auto& r : records) {
    const auto resolved = dag.resolve_task(r, p.evaluated_at);
    PlannedTarget t{std::move(r), resolved.exec_object_id, std::nullopt};
    const auto& tid = t.record.task_id.str();
    if (!resolved.interval) {
      p.warnings.push_back("task " + tid + ": no execution interval");
    } else if (!resolved.exec_object_id) {
      p.warnings.push_back("task " + tid + ": no execution object");
    } else {
      auto w = *resolved.interval;
      if (f.start) w.start = std::max(w.start, *f.start);
      if (f.end) w.end = std::min(w.end, *f.end);
      if (w.start <= w.end) {
        t.window = w;
        ids.push_back(*resolved.exec_object_id);
        hull = hull ? TimeInterval{std::min(hull->start, w.start), std::max(hull->end, w.end)} : w;
      }
    }
    p.targets.push_back(std::move(t));
  }
  if (!hull) return;

  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (p.request.route == Route::task_logs) {
    LogSearchQuery q;
    q.exec_object_ids = std::move(ids);
    q.interval = *hull;
    q.full_text = f.full_text_query;
    p.log_query = std::move(q);
  } else {
    MetricRangeQuery q;
    q.exec_object_ids = std::move(ids);
    q.metric = p.request.route == Route::task_cpu ? MetricKind::cpu_cores : MetricKind::mem_bytes;
    q.interval = *hull;
    p.metric_query = std::move(q);
  }
}

nlohmann::json target_header(const PlannedTarget& t) {
  nlohmann::json j{{"task_id", t.record.task_id}, {"abstract_task_id", t.record.abstract_task_id}};
  j["exec_object_id"] = t.exec_object_id ? nlohmann::json(*t.exec_object_id) : nlohmann::json(nullptr);
  j["node_id"] = t.record.node_id ? nlohmann::json(*t.record.node_id) : nlohmann::json(nullptr);
  j["current_status"] = t.record.current_status;
  j["interval"] = t.window ? nlohmann::json(*t.window) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

QueryPlan plan(const QueryRequest& request, const EDag& dag, Timestamp now,
               std::chrono::microseconds default_step) {
  QueryPlan p;
  p.request = request;
  p.edag_version = dag.version();
  p.evaluated_at = now;
  const auto f = FilterParams::from(request);

  switch (request.route) {
    case Route::task_details:
      p.local_results.push_back(task_record_view(require_task(dag, *request.path_id)));
      break;
    case Route::workflow_nodes:
      for (const auto& [node, n] : dag.list_nodes())
        p.local_results.push_back({{"node_id", node}, {"task_count", n}});
      break;
    case Route::workflow_abstract_tasks:
      for (const auto& [a, n] : dag.list_abstract_tasks())
        p.local_results.push_back({{"abstract_task_id", a}, {"task_count", n}});
      break;
    case Route::workflow_tasks:
    case Route::node_tasks:
      p.local_filter = f.listing_filter();
      p.local_results = records_json(dag.list_tasks(p.local_filter));
      break;
    case Route::task_cpu:
    case Route::task_ram:
    case Route::task_logs:
      plan_targets(p, dag, f);
      if (p.metric_query) p.metric_query->step = f.step.value_or(default_step);
      break;
  }
  return p;
}

nlohmann::json merge_metric_results(const QueryPlan& p, const SeriesMap* series) {
  const auto metric_name = p.request.route == Route::task_cpu ? "CPU" : "RAM";
  auto results = nlohmann::json::array();
  for (const auto& t : p.targets) {
    auto j = target_header(t);
    j["metric"] = metric_name;
    auto points = nlohmann::json::array();
    if (series && t.window && t.exec_object_id) {
      if (auto it = series->find(*t.exec_object_id); it != series->end()) {
        for (const auto& pt : it->second)
          if (t.window->contains(pt.timestamp)) points.push_back({pt.timestamp, pt.value});
      }
    }
    j["series"] = std::move(points);
    results.push_back(std::move(j));
  }
  return results;
}

nlohmann::json merge_log_results(const QueryPlan& p, const std::vector<LogEntry>* entries) {
  auto results = nlohmann::json::array();
  if (!entries) return results;
  std::map<ExecObjectId, std::vector<const LogEntry*>> by_exec;
  for (const auto& e : *entries) by_exec[e.exec_object_id].push_back(&e);
  for (const auto& t : p.targets) {
    if (!t.window || !t.exec_object_id) continue;
    const auto it = by_exec.find(*t.exec_object_id);
    if (it == by_exec.end()) continue;
    auto list = nlohmann::json::array();
    for (const auto* e : it->second)
      if (t.window->contains(e->timestamp))
        list.push_back({{"timestamp", e->timestamp}, {"level", to_string(e->level)}, {"message", e->message}});
    if (list.empty()) continue;
    auto j = target_header(t);
    j["entries"] = std::move(list);
    results.push_back(std::move(j));
  }
  return results;
}

}  // namespace wfprov
