#include "wfprov/model/json.hpp"

#include "wfprov/model/errors.hpp"

namespace wfprov {

namespace {

template <typename T, typename Parse>
T parse_enum(const Json& j, Parse parse, const char* what) {
  const auto text = j.get<std::string>();
  if (auto v = parse(text)) return *v;
  throw ValidationError(std::string("unknown ") + what + ": '" + text + "'");
}

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v)
    j[key] = *v;
  else
    j[key] = nullptr;
}

template <typename T>
void get_optional(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    out.reset();
  else
    out = it->get<T>();
}

}  // namespace

void to_json(Json& j, TaskStatus s) { j = to_string(s); }
void from_json(const Json& j, TaskStatus& s) { s = parse_enum<TaskStatus>(j, parse_task_status, "task status"); }
void to_json(Json& j, EventSource s) { j = to_string(s); }
void from_json(const Json& j, EventSource& s) { s = parse_enum<EventSource>(j, parse_event_source, "event source"); }
void to_json(Json& j, EventKind k) { j = to_string(k); }
void from_json(const Json& j, EventKind& k) { k = parse_enum<EventKind>(j, parse_event_kind, "event kind"); }
void to_json(Json& j, TaskKind k) { j = to_string(k); }
void from_json(const Json& j, TaskKind& k) { k = parse_enum<TaskKind>(j, parse_task_kind, "task kind"); }

void to_json(Json& j, const TimeInterval& i) { j = Json{{"start", i.start}, {"end", i.end}}; }

void from_json(const Json& j, TimeInterval& i) {
  i = TimeInterval::make(j.at("start").get<Timestamp>(), j.at("end").get<Timestamp>());
}

void to_json(Json& j, const CanonicalEvent& e) {
  j = Json{{"event_id", e.event_id},
           {"source", e.source},
           {"kind", e.kind},
           {"workflow_id", e.workflow_id},
           {"source_timestamp", e.source_timestamp},
           {"source_seq", e.source_seq},
           {"attrs", e.attrs}};
  put_optional(j, "task_id", e.task_id);
  put_optional(j, "exec_object_id", e.exec_object_id);
  put_optional(j, "node_id", e.node_id);
}

void from_json(const Json& j, CanonicalEvent& e) {
  e.event_id = j.at("event_id").get<std::string>();
  e.source = j.at("source").get<EventSource>();
  e.kind = j.at("kind").get<EventKind>();
  e.workflow_id = j.at("workflow_id").get<WorkflowId>();
  e.source_timestamp = j.at("source_timestamp").get<Timestamp>();
  e.source_seq = j.at("source_seq").get<std::uint64_t>();
  e.attrs = j.value("attrs", std::map<std::string, std::string>{});
  get_optional(j, "task_id", e.task_id);
  get_optional(j, "exec_object_id", e.exec_object_id);
  get_optional(j, "node_id", e.node_id);
}

void to_json(Json& j, const WorkflowSpec& s) {
  Json tasks = Json::array();
  for (const auto& t : s.abstract_tasks)
    tasks.push_back({{"abstract_task_id", t.id}, {"kind", t.kind}, {"fanout", t.fanout}});
  Json edges = Json::array();
  for (const auto& e : s.abstract_edges) edges.push_back({{"from", e.from}, {"to", e.to}});
  j = Json{{"workflow_id", s.workflow_id}, {"abstract_tasks", tasks}, {"abstract_edges", edges}};
}

void from_json(const Json& j, WorkflowSpec& s) {
  s.workflow_id = j.at("workflow_id").get<WorkflowId>();
  s.abstract_tasks.clear();
  for (const auto& t : j.at("abstract_tasks"))
    s.abstract_tasks.push_back(AbstractTask{t.at("abstract_task_id").get<AbstractTaskId>(),
                                            t.at("kind").get<TaskKind>(),
                                            t.value("fanout", 1)});
  s.abstract_edges.clear();
  for (const auto& e : j.value("abstract_edges", Json::array()))
    s.abstract_edges.push_back(
        AbstractEdge{e.at("from").get<AbstractTaskId>(), e.at("to").get<AbstractTaskId>()});
}

Json task_record_view(const TaskRecord& r) {
  Json j{{"task_id", r.task_id},
         {"abstract_task_id", r.abstract_task_id},
         {"workflow_id", r.workflow_id},
         {"current_status", r.current_status},
         {"last_status_update", r.last_status_update},
         {"attrs", r.attrs}};
  put_optional(j, "exec_object_id", r.exec_object_id);
  put_optional(j, "node_id", r.node_id);
  put_optional(j, "start_time", r.start_time);
  put_optional(j, "end_time", r.end_time);
  return j;
}

void to_json(Json& j, const TaskRecord& r) {
  j = task_record_view(r);
  j["applied_event_ids"] = r.applied_event_ids.ids();
}

void from_json(const Json& j, TaskRecord& r) {
  r.task_id = j.at("task_id").get<TaskId>();
  r.abstract_task_id = j.at("abstract_task_id").get<AbstractTaskId>();
  r.workflow_id = j.at("workflow_id").get<WorkflowId>();
  r.current_status = j.at("current_status").get<TaskStatus>();
  r.last_status_update = j.at("last_status_update").get<Timestamp>();
  get_optional(j, "exec_object_id", r.exec_object_id);
  get_optional(j, "node_id", r.node_id);
  get_optional(j, "start_time", r.start_time);
  get_optional(j, "end_time", r.end_time);
  r.attrs = j.value("attrs", std::map<std::string, std::string>{});
  r.applied_event_ids = AppliedEventIds{};
  for (const auto& id : j.value("applied_event_ids", std::vector<std::string>{}))
    r.applied_event_ids.insert(id);
}

}  // namespace wfprov
