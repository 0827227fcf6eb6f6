#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/model/ids.hpp"
#include "wfprov/model/time.hpp"
#include "wfprov/model/workflow_spec.hpp"

namespace wfprov::sim {

enum class SizePreset { small, medium, large };

std::string_view to_string(SizePreset p) noexcept;
std::optional<SizePreset> parse_size_preset(std::string_view text) noexcept;
/// 10 / 100 / 1000 concrete tasks.
int preset_task_count(SizePreset p) noexcept;

/// Fixed resource profile of one task kind.
struct ResourceProfile {
  double cpu_cores = 0;
  double mem_bytes = 0;
  std::chrono::milliseconds duration{0};
};

struct FailureInjection {
  TaskId task_id;
  NodeId node_id;
};

struct SimConfig {
  /// Ignored when `spec` is set.
  SizePreset preset = SizePreset::small;
  std::optional<WorkflowSpec> spec;
  std::string workflow_id = "synthetic-workflow";

  std::vector<NodeId> nodes;
  int slots_per_node = 32;
  std::map<TaskKind, ResourceProfile> profiles;
  /// Relative spread of task durations around the profile (uniform).
  double duration_spread = 0.2;
  /// Relative noise on metric values (uniform).
  double metric_noise = 0.05;
  std::chrono::milliseconds scrape_step{10'000};
  /// Upper bound of the uniform per-record timestamp jitter.
  std::chrono::milliseconds jitter_max{50};

  std::vector<FailureInjection> failures;
  std::set<TaskKind> warning_kinds{TaskKind::combined_intensive};

  /// Infrastructure chatter and unsupported records around the real events.
  bool noise = true;
  /// Pods on every node that never bind to a task.
  int system_pods_per_node = 2;

  std::uint64_t seed = 42;
  Timestamp start = Timestamp::parse("2024-12-11T17:00:00Z");

  /// Defaults: four worker nodes and placeholder profiles
  /// (cpu_intensive 0.9 cores / 100 MB, memory_intensive 0.1 cores / 1 GB,
  /// combined_intensive 0.9 cores / 1 GB).
  static SimConfig defaults(SizePreset preset = SizePreset::small, std::uint64_t seed = 42);

  /// The explicit spec, or the preset's layered cpu -> memory -> combined chain.
  WorkflowSpec workflow_spec() const;
};

/// Preset workflow: cpu_intensive_task -> memory_intensive_task ->
/// combined_intensive_task with `total` instances split as evenly as
/// possible (earlier kinds take the remainder).
WorkflowSpec layered_spec(const WorkflowId& workflow_id, int total);

nlohmann::json to_json(const SimConfig& c);

}  // namespace wfprov::sim
