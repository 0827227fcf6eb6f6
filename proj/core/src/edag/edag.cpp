#include "wfprov/edag/edag.hpp"

#include <algorithm>
#include <deque>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov {

namespace {

constexpr const char* kFailureOriginAttr = "failure_origin";
constexpr const char* kAssignedAtAttr = "exec_assigned_at";
constexpr const char* kPreviousExecAttr = "previous_exec_objects";
constexpr const char* kExecFailedAtAttr = "exec_failed_at";
constexpr const char* kExecFailedObjectAttr = "exec_failed_exec_object";

const std::set<TaskId> kNoTasks;

/// Inserts `id` into a sorted, comma-separated id list.
void add_to_history(std::string& list, const std::string& id) {
  std::set<std::string> ids;
  for (std::size_t start = 0; start < list.size();) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    ids.insert(list.substr(start, end - start));
    start = end + 1;
  }
  ids.insert(id);
  list.clear();
  for (const auto& i : ids) {
    if (!list.empty()) list += ',';
    list += i;
  }
}

void merge_min(std::optional<Timestamp>& slot, const std::optional<Timestamp>& v) {
  if (v && (!slot || *v < *slot)) slot = v;
}

template <typename K>
void diff_index(const std::map<K, std::set<TaskId>>& expected,
                const std::map<K, std::set<TaskId>>& actual, const std::string& name,
                std::vector<std::string>& out, auto key_str) {
  for (const auto& [k, ids] : expected) {
    auto it = actual.find(k);
    if (it == actual.end() || it->second != ids)
      out.push_back(name + " entry for '" + key_str(k) + "' diverges");
  }
  for (const auto& [k, ids] : actual)
    if (!expected.contains(k)) out.push_back(name + " has stale key '" + key_str(k) + "'");
}

}  // namespace

std::string_view to_string(ApplyOutcome o) noexcept {
  switch (o) {
    case ApplyOutcome::applied: return "applied";
    case ApplyOutcome::duplicate: return "duplicate";
    case ApplyOutcome::stale: return "stale";
    case ApplyOutcome::unknown_task: return "unknown_task";
  }
  return "stale";
}

bool TaskFilter::matches(const TaskRecord& r) const {
  if (task_status && r.current_status != *task_status) return false;
  if (abstract_id && r.abstract_task_id != *abstract_id) return false;
  if (node_id && r.node_id != node_id) return false;
  if (updated_from && r.last_status_update < *updated_from) return false;
  if (updated_to && *updated_to < r.last_status_update) return false;
  return true;
}

EDag EDag::init_from_spec(const WorkflowSpec& spec) {
  spec.validate();
  EDag dag(spec.workflow_id);
  std::map<AbstractTaskId, std::vector<TaskId>> instances;
  for (const auto& at : spec.abstract_tasks) {
    auto& ids = instances[at.id];
    for (int i = 1; i <= at.fanout; ++i) {
      TaskRecord r;
      r.task_id = concrete_task_id(at.id, i);
      r.abstract_task_id = at.id;
      r.workflow_id = spec.workflow_id;
      ids.push_back(r.task_id);
      dag.add_task(std::move(r));
    }
  }
  // The abstract relation is acyclic, so its cross-product expansion is too;
  // skip the per-edge reachability check.
  for (const auto& e : spec.abstract_edges) {
    for (const auto& p : instances[e.from]) {
      for (const auto& c : instances[e.to]) {
        dag.insert_edge_unchecked(p, c);
        ++dag.version_;
      }
    }
  }
  return dag;
}

std::uint64_t EDag::add_task(TaskRecord record) {
  if (!is_valid_identifier(record.task_id.str())) throw_invalid_identifier(record.task_id.str());
  if (auto it = tasks_.find(record.task_id); it != tasks_.end()) {
    if (it->second == record) return version_;
    throw ConflictError("task " + record.task_id.str() + " already exists with different attributes");
  }
  if (workflow_id_.empty()) workflow_id_ = record.workflow_id;
  const auto id = record.task_id;
  auto [it, inserted] = tasks_.emplace(id, std::move(record));
  index_insert(it->second);
  return ++version_;
}

void EDag::insert_edge_unchecked(const TaskId& parent, const TaskId& child) {
  if (children_[parent].insert(child).second) {
    parents_[child].insert(parent);
    ++edge_count_;
  }
}

bool EDag::reaches(const TaskId& from, const TaskId& to) const {
  if (from == to) return true;
  std::set<TaskId> seen{from};
  std::deque<TaskId> frontier{from};
  while (!frontier.empty()) {
    const auto cur = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& next : children(cur)) {
      if (next == to) return true;
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  return false;
}

std::uint64_t EDag::add_dependency(const TaskId& parent, const TaskId& child) {
  if (!contains(parent)) throw NotFoundError("task", parent.str());
  if (!contains(child)) throw NotFoundError("task", child.str());
  if (children(parent).contains(child)) return version_;
  if (reaches(child, parent)) throw CycleError({parent.str(), child.str()});
  insert_edge_unchecked(parent, child);
  return ++version_;
}

ApplyResult EDag::apply_attrs(const TaskId& task_id, const TaskUpdate& update,
                              const std::string& event_id) {
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) return {ApplyOutcome::unknown_task, std::nullopt, false};
  TaskRecord& current = it->second;
  if (!event_id.empty() && current.applied_event_ids.contains(event_id))
    return {ApplyOutcome::duplicate, std::nullopt, false};

  ApplyResult result;
  TaskRecord next = current;
  bool status_lost = false;

  if (update.status) {
    const auto& s = *update.status;
    const auto current_origin = current.attrs.contains(kFailureOriginAttr)
                                    ? StatusOrigin::infrastructure
                                    : StatusOrigin::engine;
    const auto action = TransitionTable::standard().decide(
        current.current_status, current.last_status_update, current_origin, s.status, s.at,
        s.origin);
    result.action = action;
    if (action == TransitionAction::advance) {
      next.current_status = s.status;
      next.last_status_update = s.at;
      if (s.origin == StatusOrigin::infrastructure)
        next.attrs[kFailureOriginAttr] = "resource_manager";
      else
        next.attrs.erase(kFailureOriginAttr);
    } else if (action != TransitionAction::backfill) {
      status_lost = true;
    }
  }

  merge_min(next.start_time, update.started_at);
  merge_min(next.end_time, update.ended_at);

  // An exec object belongs to at most one task; the first claim wins.
  const auto claimed_elsewhere = [&](const ExecObjectId& exec) {
    auto owner = exec_index_.find(exec);
    return owner != exec_index_.end() && owner->second != task_id;
  };
  if (update.binding && !claimed_elsewhere(update.binding->first)) {
    const auto& [exec, at] = *update.binding;
    const auto prev_at = current.attrs.contains(kAssignedAtAttr)
                             ? Timestamp::try_parse(current.attrs.at(kAssignedAtAttr))
                             : std::nullopt;
    if (!next.exec_object_id) {
      next.exec_object_id = exec;
      next.attrs[kAssignedAtAttr] = at.to_string();
    } else if (*next.exec_object_id != exec) {
      if (!prev_at || *prev_at <= at) {
        // New attempt: the binding moves and the old placement no longer applies.
        add_to_history(next.attrs[kPreviousExecAttr], next.exec_object_id->str());
        next.exec_object_id = exec;
        next.node_id.reset();
        next.attrs[kAssignedAtAttr] = at.to_string();
      } else {
        add_to_history(next.attrs[kPreviousExecAttr], exec.str());
      }
    }
  }

  if (update.placement && next.exec_object_id == update.placement->first)
    next.node_id = update.placement->second;

  if (update.exec_failure) {
    const auto& [exec, at] = *update.exec_failure;
    auto prev = next.attrs.contains(kExecFailedAtAttr)
                    ? Timestamp::try_parse(next.attrs.at(kExecFailedAtAttr))
                    : std::nullopt;
    if (!prev || at < *prev) {
      next.attrs[kExecFailedAtAttr] = at.to_string();
      next.attrs[kExecFailedObjectAttr] = exec.str();
    }
  }

  for (const auto& [k, v] : update.attrs) next.attrs[k] = v;

  result.state_changed = !next.same_state(current);
  if (!event_id.empty()) next.applied_event_ids.insert(event_id);
  if (result.state_changed) {
    index_erase(current);
    current = std::move(next);
    index_insert(current);
    ++version_;
  } else {
    current.applied_event_ids = std::move(next.applied_event_ids);
  }

  result.outcome = (status_lost || !result.state_changed) ? ApplyOutcome::stale
                                                          : ApplyOutcome::applied;
  return result;
}

const TaskRecord* EDag::find(const TaskId& id) const {
  auto it = tasks_.find(id);
  return it == tasks_.end() ? nullptr : &it->second;
}

const TaskRecord& EDag::get_task(const TaskId& id) const {
  if (const auto* r = find(id)) return *r;
  throw NotFoundError("task", id.str());
}

std::optional<TaskId> EDag::task_for_exec(const ExecObjectId& exec) const {
  auto it = exec_index_.find(exec);
  if (it == exec_index_.end()) return std::nullopt;
  return it->second;
}

const std::set<TaskId>& EDag::children(const TaskId& id) const {
  auto it = children_.find(id);
  return it == children_.end() ? kNoTasks : it->second;
}

const std::set<TaskId>& EDag::parents(const TaskId& id) const {
  auto it = parents_.find(id);
  return it == parents_.end() ? kNoTasks : it->second;
}

std::vector<TaskRecord> EDag::list_tasks(const TaskFilter& f) const {
  if (f.parent_of && !contains(*f.parent_of)) throw NotFoundError("task", f.parent_of->str());
  if (f.child_of && !contains(*f.child_of)) throw NotFoundError("task", f.child_of->str());
  if (f.abstract_id && !has_abstract(*f.abstract_id))
    throw NotFoundError("abstract task", f.abstract_id->str());
  if (f.node_id && !has_node(*f.node_id)) throw NotFoundError("node", f.node_id->str());

  // Drive the scan from the narrowest index the filter touches.
  const std::set<TaskId>* candidates = nullptr;
  auto narrow = [&candidates](const std::set<TaskId>& s) {
    if (!candidates || s.size() < candidates->size()) candidates = &s;
  };
  if (f.child_of) narrow(children(*f.child_of));
  if (f.parent_of) narrow(parents(*f.parent_of));
  if (f.abstract_id) narrow(abstract_index_.at(*f.abstract_id));
  if (f.node_id) narrow(node_index_.at(*f.node_id));
  if (f.task_status) {
    auto it = status_index_.find(*f.task_status);
    narrow(it == status_index_.end() ? kNoTasks : it->second);
  }

  std::vector<TaskRecord> out;
  auto consider = [&](const TaskRecord& r) {
    if (!f.matches(r)) return;
    if (f.child_of && !children(*f.child_of).contains(r.task_id)) return;
    if (f.parent_of && !parents(*f.parent_of).contains(r.task_id)) return;
    out.push_back(r);
  };
  if (candidates) {
    for (const auto& id : *candidates) consider(tasks_.at(id));
  } else {
    for (const auto& [id, r] : tasks_) consider(r);
  }
  return out;
}

ResolvedTarget EDag::resolve_task(const TaskRecord& r, Timestamp now) const {
  ResolvedTarget t{r.task_id, r.exec_object_id, std::nullopt};
  if (r.start_time) {
    auto end = r.end_time.value_or(now);
    if (end < *r.start_time) end = *r.start_time;
    t.interval = TimeInterval{*r.start_time, end};
  }
  return t;
}

std::vector<ResolvedTarget> EDag::resolve_abstract(const AbstractTaskId& id, Timestamp now) const {
  auto it = abstract_index_.find(id);
  if (it == abstract_index_.end()) throw NotFoundError("abstract task", id.str());
  std::vector<ResolvedTarget> out;
  out.reserve(it->second.size());
  for (const auto& tid : it->second) out.push_back(resolve_task(tasks_.at(tid), now));
  return out;
}

std::vector<std::pair<NodeId, std::size_t>> EDag::list_nodes() const {
  std::vector<std::pair<NodeId, std::size_t>> out;
  for (const auto& [node, ids] : node_index_) out.emplace_back(node, ids.size());
  return out;
}

std::vector<std::pair<AbstractTaskId, std::size_t>> EDag::list_abstract_tasks() const {
  std::vector<std::pair<AbstractTaskId, std::size_t>> out;
  for (const auto& [a, ids] : abstract_index_) out.emplace_back(a, ids.size());
  return out;
}

void EDag::index_insert(const TaskRecord& r) {
  abstract_index_[r.abstract_task_id].insert(r.task_id);
  status_index_[r.current_status].insert(r.task_id);
  if (r.node_id) node_index_[*r.node_id].insert(r.task_id);
  if (r.exec_object_id) exec_index_[*r.exec_object_id] = r.task_id;
}

void EDag::index_erase(const TaskRecord& r) {
  auto erase_from = [&r](auto& index, const auto& key) {
    auto it = index.find(key);
    if (it == index.end()) return;
    it->second.erase(r.task_id);
    if (it->second.empty()) index.erase(it);
  };
  erase_from(abstract_index_, r.abstract_task_id);
  erase_from(status_index_, r.current_status);
  if (r.node_id) erase_from(node_index_, *r.node_id);
  if (r.exec_object_id) {
    auto it = exec_index_.find(*r.exec_object_id);
    if (it != exec_index_.end() && it->second == r.task_id) exec_index_.erase(it);
  }
}

AuditReport EDag::audit_indexes() const {
  AuditReport report;
  auto& out = report.divergences;

  std::map<AbstractTaskId, std::set<TaskId>> abstract_index;
  std::map<NodeId, std::set<TaskId>> node_index;
  std::map<ExecObjectId, TaskId> exec_index;
  std::map<TaskStatus, std::set<TaskId>> status_index;
  for (const auto& [id, r] : tasks_) {
    if (id != r.task_id) out.push_back("task keyed under wrong id: " + id.str());
    abstract_index[r.abstract_task_id].insert(id);
    status_index[r.current_status].insert(id);
    if (r.node_id) node_index[*r.node_id].insert(id);
    if (r.exec_object_id) {
      if (exec_index.contains(*r.exec_object_id))
        out.push_back("exec object bound to two tasks: " + r.exec_object_id->str());
      exec_index[*r.exec_object_id] = id;
    }
    if (r.current_status == TaskStatus::running && !r.start_time)
      out.push_back("running task without start_time: " + id.str());
    if (is_terminal(r.current_status) && !r.end_time)
      out.push_back("terminal task without end_time: " + id.str());
  }
  diff_index(abstract_index, abstract_index_, "abstract_index", out,
             [](const AbstractTaskId& k) { return k.str(); });
  diff_index(node_index, node_index_, "node_index", out, [](const NodeId& k) { return k.str(); });
  diff_index(status_index, status_index_, "status_index", out,
             [](TaskStatus k) { return std::string(to_string(k)); });
  if (exec_index != exec_index_) out.emplace_back("exec_index diverges");

  std::map<TaskId, std::set<TaskId>> inverse;
  std::size_t edges = 0;
  std::map<TaskId, std::size_t> indegree;
  for (const auto& [p, cs] : children_) {
    if (!cs.empty() && !contains(p)) out.push_back("edge from unknown task " + p.str());
    for (const auto& c : cs) {
      if (!contains(c)) out.push_back("edge to unknown task " + c.str());
      inverse[c].insert(p);
      ++indegree[c];
      ++edges;
    }
  }
  std::map<TaskId, std::set<TaskId>> parents_nonempty;
  for (const auto& [c, ps] : parents_)
    if (!ps.empty()) parents_nonempty.emplace(c, ps);
  if (inverse != parents_nonempty) out.emplace_back("parent adjacency diverges from edges");
  if (edges != edge_count_) out.emplace_back("edge count diverges");

  // Kahn's algorithm over all tasks.
  std::deque<TaskId> ready;
  for (const auto& [id, r] : tasks_)
    if (indegree[id] == 0) ready.push_back(id);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto id = ready.front();
    ready.pop_front();
    ++visited;
    for (const auto& c : children(id))
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (visited != tasks_.size()) out.emplace_back("dependency graph contains a cycle");
  return report;
}

nlohmann::json EDag::export_snapshot() const {
  Json tasks = Json::array();
  for (const auto& [id, r] : tasks_) tasks.push_back(r);
  Json edges = Json::array();
  for (const auto& [p, cs] : children_)
    for (const auto& c : cs) edges.push_back(Json::array({p.str(), c.str()}));
  return Json{{"workflow_id", workflow_id_}, {"version", version_}, {"tasks", std::move(tasks)},
              {"edges", std::move(edges)}};
}

EDag EDag::import_snapshot(const nlohmann::json& doc) {
  EDag dag;
  if (doc.contains("workflow_id")) dag.workflow_id_ = doc.at("workflow_id").get<WorkflowId>();
  for (const auto& t : doc.at("tasks")) dag.add_task(t.get<TaskRecord>());
  for (const auto& e : doc.at("edges")) {
    const auto parent = e.at(0).get<TaskId>();
    const auto child = e.at(1).get<TaskId>();
    if (!dag.contains(parent)) throw NotFoundError("task", parent.str());
    if (!dag.contains(child)) throw NotFoundError("task", child.str());
    dag.insert_edge_unchecked(parent, child);
  }
  const auto audit = dag.audit_indexes();
  for (const auto& d : audit.divergences)
    if (d == "dependency graph contains a cycle") throw ValidationError("snapshot " + d);
  if (doc.contains("version")) dag.version_ = doc.at("version").get<std::uint64_t>();
  return dag;
}

bool EDag::same_state(const EDag& other) const {
  if (tasks_.size() != other.tasks_.size() || edge_count_ != other.edge_count_) return false;
  for (const auto& [id, r] : tasks_) {
    const auto* o = other.find(id);
    if (!o || !r.same_state(*o)) return false;
  }
  for (const auto& [p, cs] : children_)
    if (cs != other.children(p)) return false;
  return true;
}

}  // namespace wfprov
