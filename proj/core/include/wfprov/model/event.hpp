#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfprov/model/ids.hpp"
#include "wfprov/model/status.hpp"
#include "wfprov/model/time.hpp"

namespace wfprov {

enum class EventSource { workflow_engine, resource_manager };

inline constexpr std::size_t kSourceCount = 2;

constexpr std::size_t source_index(EventSource s) noexcept { return static_cast<std::size_t>(s); }

enum class EventKind {
  task_queued,
  task_running,
  task_succeeded,
  task_failed,
  exec_assigned,
  exec_scheduled,
  exec_failed,
};

std::string_view to_string(EventSource s) noexcept;
std::string_view to_string(EventKind k) noexcept;
std::optional<EventSource> parse_event_source(std::string_view text) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

constexpr bool is_task_kind(EventKind k) noexcept {
  return k == EventKind::task_queued || k == EventKind::task_running ||
         k == EventKind::task_succeeded || k == EventKind::task_failed;
}

/// Status a task_* event announces; nullopt for exec_* kinds.
std::optional<TaskStatus> status_of(EventKind k) noexcept;

/// Normalized provenance event produced by a source adapter.
struct CanonicalEvent {
  std::string event_id;
  EventSource source = EventSource::workflow_engine;
  EventKind kind = EventKind::task_queued;
  WorkflowId workflow_id;
  std::optional<TaskId> task_id;
  std::optional<ExecObjectId> exec_object_id;
  std::optional<NodeId> node_id;
  Timestamp source_timestamp;
  std::uint64_t source_seq = 0;
  std::map<std::string, std::string> attrs;

  bool operator==(const CanonicalEvent&) const = default;
};

/// Every violated field rule of `e`; empty when the event is well-formed.
/// Per-stream sequencing is checked by StreamValidator.
std::vector<std::string> validate_event(const CanonicalEvent& e);

/// Checks field rules plus strictly increasing source_seq per source.
class StreamValidator {
 public:
  std::vector<std::string> validate(const CanonicalEvent& e);

 private:
  std::array<std::optional<std::uint64_t>, kSourceCount> last_seq_{};
};

}  // namespace wfprov
