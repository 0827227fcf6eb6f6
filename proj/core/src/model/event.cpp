#include "wfprov/model/event.hpp"

namespace wfprov {

std::string_view to_string(EventSource s) noexcept {
  switch (s) {
    case EventSource::workflow_engine: return "workflow_engine";
    case EventSource::resource_manager: return "resource_manager";
  }
  return "workflow_engine";
}

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::task_queued: return "task_queued";
    case EventKind::task_running: return "task_running";
    case EventKind::task_succeeded: return "task_succeeded";
    case EventKind::task_failed: return "task_failed";
    case EventKind::exec_assigned: return "exec_assigned";
    case EventKind::exec_scheduled: return "exec_scheduled";
    case EventKind::exec_failed: return "exec_failed";
  }
  return "task_queued";
}

std::optional<EventSource> parse_event_source(std::string_view text) noexcept {
  if (text == "workflow_engine") return EventSource::workflow_engine;
  if (text == "resource_manager") return EventSource::resource_manager;
  return std::nullopt;
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  for (auto k : {EventKind::task_queued, EventKind::task_running, EventKind::task_succeeded,
                 EventKind::task_failed, EventKind::exec_assigned, EventKind::exec_scheduled,
                 EventKind::exec_failed})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::optional<TaskStatus> status_of(EventKind k) noexcept {
  switch (k) {
    case EventKind::task_queued: return TaskStatus::queued;
    case EventKind::task_running: return TaskStatus::running;
    case EventKind::task_succeeded: return TaskStatus::succeeded;
    case EventKind::task_failed: return TaskStatus::failed;
    default: return std::nullopt;
  }
}

std::vector<std::string> validate_event(const CanonicalEvent& e) {
  std::vector<std::string> out;
  auto check_id = [&out](const auto& id, std::string_view field) {
    if (id && !is_valid_identifier(id->str())) out.push_back(std::string(field) + " invalid");
  };
  if (e.event_id.empty()) out.emplace_back("event_id required");
  if (e.workflow_id.empty())
    out.emplace_back("workflow_id required");
  else if (!is_valid_identifier(e.workflow_id.str()))
    out.emplace_back("workflow_id invalid");
  check_id(e.task_id, "task_id");
  check_id(e.exec_object_id, "exec_object_id");
  check_id(e.node_id, "node_id");

  const bool needs_task = is_task_kind(e.kind) || e.kind == EventKind::exec_assigned;
  const bool needs_exec = e.kind == EventKind::exec_assigned ||
                          e.kind == EventKind::exec_scheduled || e.kind == EventKind::exec_failed;
  const bool needs_node = e.kind == EventKind::exec_scheduled;
  if (needs_task && !e.task_id) out.emplace_back("task_id required");
  if (needs_exec && !e.exec_object_id) out.emplace_back("exec_object_id required");
  if (needs_node && !e.node_id) out.emplace_back("node_id required");
  return out;
}

std::vector<std::string> StreamValidator::validate(const CanonicalEvent& e) {
  auto out = validate_event(e);
  auto& last = last_seq_[source_index(e.source)];
  if (last && e.source_seq <= *last)
    out.emplace_back("seq not increasing");
  else
    last = e.source_seq;
  return out;
}

}  // namespace wfprov
