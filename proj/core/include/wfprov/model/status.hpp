#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace wfprov {

/// Lifecycle status of a concrete task.
///
/// Precedence: unknown < queued < running < {succeeded, failed}. The two
/// terminal statuses share the top rank.
enum class TaskStatus { unknown, queued, running, succeeded, failed };

inline constexpr std::array<TaskStatus, 5> kAllStatuses = {
    TaskStatus::unknown, TaskStatus::queued, TaskStatus::running, TaskStatus::succeeded,
    TaskStatus::failed};

constexpr int precedence(TaskStatus s) noexcept {
  switch (s) {
    case TaskStatus::unknown: return 0;
    case TaskStatus::queued: return 1;
    case TaskStatus::running: return 2;
    case TaskStatus::succeeded:
    case TaskStatus::failed: return 3;
  }
  return 0;
}

constexpr bool is_terminal(TaskStatus s) noexcept { return precedence(s) == 3; }

std::string_view to_string(TaskStatus s) noexcept;

/// Accepts both the bare name ("failed") and the event-style name
/// ("task_failed").
std::optional<TaskStatus> parse_task_status(std::string_view text) noexcept;

}  // namespace wfprov
