#include "wfprov/model/status.hpp"

namespace wfprov {

std::string_view to_string(TaskStatus s) noexcept {
  switch (s) {
    case TaskStatus::unknown: return "unknown";
    case TaskStatus::queued: return "queued";
    case TaskStatus::running: return "running";
    case TaskStatus::succeeded: return "succeeded";
    case TaskStatus::failed: return "failed";
  }
  return "unknown";
}

std::optional<TaskStatus> parse_task_status(std::string_view text) noexcept {
  if (text.starts_with("task_")) text.remove_prefix(5);
  for (const auto s : kAllStatuses)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

}  // namespace wfprov
