#include "wfprov/bench/oracle.hpp"

#include <algorithm>
#include <set>

#include "wfprov/backends/logs.hpp"
#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov::bench {

namespace {

bool seen(Timestamp t, const std::optional<Timestamp>& cutoff) { return !cutoff || t <= *cutoff; }

/// Grid points that can carry a value: those within the staleness bound
/// after some sample.
std::set<Timestamp> candidate_grid(const std::vector<const MetricSample*>& samples,
                                   const TimeInterval& w, std::chrono::microseconds step) {
  std::set<Timestamp> out;
  const auto s = step.count();
  for (const auto* m : samples) {
    const auto lo = std::max(m->timestamp, w.start).micros();
    const auto hi = std::min(m->timestamp + 2 * step, w.end).micros();
    for (std::int64_t k = lo / s - 1; k * s <= hi; ++k)
      if (k * s >= lo) out.insert(Timestamp::from_micros(k * s));
  }
  return out;
}

}  // namespace

TaskRecord expected_record(const sim::GroundTruth& gt, const sim::TaskTruth& t,
                           std::optional<Timestamp> cutoff) {
  TaskRecord r;
  r.task_id = t.task_id;
  r.abstract_task_id = t.abstract_task_id;
  r.workflow_id = gt.spec.workflow_id;

  const bool rm_failed = t.exec_failed_at && seen(*t.exec_failed_at, cutoff);
  if (seen(t.last_status_update, cutoff)) {
    r.current_status = t.final_status;
    r.last_status_update = t.last_status_update;
  } else if (rm_failed) {
    r.current_status = TaskStatus::failed;
    r.last_status_update = *t.exec_failed_at;
    r.attrs["failure_origin"] = "resource_manager";
  } else if (seen(t.started_at, cutoff)) {
    r.current_status = TaskStatus::running;
    r.last_status_update = t.started_at;
  } else if (seen(t.queued_at, cutoff)) {
    r.current_status = TaskStatus::queued;
    r.last_status_update = t.queued_at;
  }

  if (seen(t.started_at, cutoff)) r.start_time = t.started_at;
  if (seen(t.last_status_update, cutoff)) r.end_time = t.last_status_update;
  if (rm_failed && (!r.end_time || *t.exec_failed_at < *r.end_time)) r.end_time = *t.exec_failed_at;

  if (seen(t.assigned_at, cutoff)) {
    r.exec_object_id = t.exec_object_id;
    r.attrs["exec_assigned_at"] = t.assigned_at.to_string();
    if (seen(t.scheduled_at, cutoff)) r.node_id = t.node_id;
  }
  if (rm_failed) {
    r.node_id = t.node_id;
    r.attrs["exec_failed_at"] = t.exec_failed_at->to_string();
    r.attrs["exec_failed_exec_object"] = t.exec_object_id.str();
  }
  return r;
}

Oracle::Oracle(const sim::GroundTruth& gt, std::optional<Timestamp> cutoff,
               std::chrono::microseconds default_step)
    : default_step_(default_step) {
  for (const auto& [id, t] : gt.tasks) {
    tasks_.emplace(id, expected_record(gt, t, cutoff));
    for (const auto& p : t.parents) {
      parents_[id].insert(p);
      children_[p].insert(id);
    }
  }
  for (const auto& s : gt.metrics) samples_[{s.exec_object_id, s.metric}].push_back(&s);
  for (const auto& e : gt.logs) logs_[e.exec_object_id].push_back(&e);
}

const TaskRecord& Oracle::task(const TaskId& id) const {
  auto it = tasks_.find(id);
  if (it == tasks_.end()) throw NotFoundError("task", id.str());
  return it->second;
}

void Oracle::require_refs(const FilterParams& f) const {
  if (f.parent_of) task(*f.parent_of);
  if (f.child_of) task(*f.child_of);
  if (f.abstract_id &&
      std::none_of(tasks_.begin(), tasks_.end(),
                   [&](const auto& kv) { return kv.second.abstract_task_id == *f.abstract_id; }))
    throw NotFoundError("abstract task", f.abstract_id->str());
  if (f.node_id && std::none_of(tasks_.begin(), tasks_.end(),
                                [&](const auto& kv) { return kv.second.node_id == f.node_id; }))
    throw NotFoundError("node", f.node_id->str());
}

bool Oracle::matches(const TaskRecord& r, const FilterParams& f, bool listing) const {
  if (f.task_status && r.current_status != *f.task_status) return false;
  if (f.abstract_id && r.abstract_task_id != *f.abstract_id) return false;
  if (f.node_id && r.node_id != f.node_id) return false;
  if (f.last_status_update && r.last_status_update < *f.last_status_update) return false;
  if (listing && f.start && r.last_status_update < *f.start) return false;
  if (listing && f.end && *f.end < r.last_status_update) return false;
  if (f.parent_of) {
    auto it = parents_.find(*f.parent_of);
    if (it == parents_.end() || !it->second.contains(r.task_id)) return false;
  }
  if (f.child_of) {
    auto it = children_.find(*f.child_of);
    if (it == children_.end() || !it->second.contains(r.task_id)) return false;
  }
  return true;
}

std::vector<const TaskRecord*> Oracle::select(const FilterParams& f, bool listing) const {
  require_refs(f);
  std::vector<const TaskRecord*> out;
  for (const auto& [_, r] : tasks_)
    if (matches(r, f, listing)) out.push_back(&r);
  return out;
}

Oracle::Answer Oracle::answer(const QueryRequest& req, Timestamp now) const {
  Answer a;
  const auto f = FilterParams::from(req);
  switch (req.route) {
    case Route::task_details:
      a.results.push_back(task_record_view(task(TaskId::unchecked(*req.path_id))));
      return a;
    case Route::workflow_nodes: {
      std::map<NodeId, std::size_t> counts;
      for (const auto& [_, r] : tasks_)
        if (r.node_id) ++counts[*r.node_id];
      for (const auto& [n, c] : counts) a.results.push_back({{"node_id", n}, {"task_count", c}});
      return a;
    }
    case Route::workflow_abstract_tasks: {
      std::map<AbstractTaskId, std::size_t> counts;
      for (const auto& [_, r] : tasks_) ++counts[r.abstract_task_id];
      for (const auto& [id, c] : counts) a.results.push_back({{"abstract_task_id", id}, {"task_count", c}});
      return a;
    }
    case Route::workflow_tasks:
    case Route::node_tasks:
      for (const auto* r : select(f, true)) a.results.push_back(task_record_view(*r));
      return a;
    case Route::task_cpu:
    case Route::task_ram:
    case Route::task_logs:
      break;
  }

  std::vector<const TaskRecord*> targets;
  if (req.path_id) targets.push_back(&task(TaskId::unchecked(*req.path_id)));
  else targets = select(f, false);

  const auto step = f.step.value_or(default_step_);
  const auto metric = req.route == Route::task_cpu ? MetricKind::cpu_cores : MetricKind::mem_bytes;
  for (const auto* r : targets) {
    std::optional<TimeInterval> window;
    const auto tid = r->task_id.str();
    if (!r->start_time) {
      a.warnings.insert("task " + tid + ": no execution interval");
    } else if (!r->exec_object_id) {
      a.warnings.insert("task " + tid + ": no execution object");
    } else {
      auto end = std::max(r->end_time.value_or(now), *r->start_time);
      TimeInterval w{std::max(*r->start_time, f.start.value_or(*r->start_time)),
                     f.end ? std::min(end, *f.end) : end};
      if (w.start <= w.end) window = w;
    }

    nlohmann::json header{{"task_id", r->task_id}, {"abstract_task_id", r->abstract_task_id}};
    header["exec_object_id"] = r->exec_object_id ? nlohmann::json(*r->exec_object_id) : nlohmann::json(nullptr);
    header["node_id"] = r->node_id ? nlohmann::json(*r->node_id) : nlohmann::json(nullptr);
    header["current_status"] = r->current_status;
    header["interval"] = window ? nlohmann::json(*window) : nlohmann::json(nullptr);

    if (req.route == Route::task_logs) {
      if (!window) continue;
      std::vector<LogEntry> hits;
      if (auto it = logs_.find(*r->exec_object_id); it != logs_.end()) {
        for (const auto* e : it->second) {
          if (!window->contains(e->timestamp)) continue;
          if (f.full_text_query && !contains_ci(e->message, *f.full_text_query)) continue;
          hits.push_back(*e);
        }
      }
      if (hits.empty()) continue;
      std::sort(hits.begin(), hits.end(), log_order);
      auto entries = nlohmann::json::array();
      for (const auto& e : hits)
        entries.push_back({{"timestamp", e.timestamp}, {"level", to_string(e.level)}, {"message", e.message}});
      header["entries"] = std::move(entries);
      a.results.push_back(std::move(header));
      continue;
    }

    header["metric"] = req.route == Route::task_cpu ? "CPU" : "RAM";
    auto series = nlohmann::json::array();
    const auto it = window ? samples_.find({*r->exec_object_id, metric}) : samples_.end();
    if (it != samples_.end()) {
      for (const auto g : candidate_grid(it->second, *window, step)) {
        const MetricSample* best = nullptr;
        for (const auto* s : it->second) {
          if (g < s->timestamp) continue;
          if (!best || best->timestamp <= s->timestamp) best = s;
        }
        if (best && g - best->timestamp <= 2 * step) series.push_back({g, best->value});
      }
    }
    header["series"] = std::move(series);
    a.results.push_back(std::move(header));
  }
  return a;
}

}  // namespace wfprov::bench
