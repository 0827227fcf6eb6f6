#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wfprov/backends/http.hpp"
#include "wfprov/mediation/event_buffer.hpp"

namespace wfprov {

/// Settings of the provenance service. Sources are layered: defaults, then
/// a JSON config file, then WFPROV_* environment variables, then flags.
struct ServiceConfig {
  Endpoint listen{"127.0.0.1", 8080};
  /// Line-oriented event ingestion socket; unset disables it.
  std::optional<Endpoint> ingest;
  std::optional<Endpoint> metrics;
  std::optional<Endpoint> logs;
  std::chrono::microseconds default_step{std::chrono::seconds(10)};
  std::string workflow_id = "workflow";
  /// Workflow spec to initialize the eDAG with; unset means tasks are
  /// registered dynamically from workflow-engine events.
  std::optional<std::filesystem::path> spec;
  std::size_t buffer_capacity = EventBuffer::kDefaultCapacity;
  OverflowPolicy overflow_policy = OverflowPolicy::block;
  std::chrono::milliseconds pending_ttl{60'000};

  /// Keys: listen, ingest, metrics_url, logs_url, default_step, workflow_id,
  /// spec, buffer_capacity, overflow_policy, pending_ttl. Unknown keys throw.
  void apply_json(const nlohmann::json& j);
  void apply_file(const std::filesystem::path& path);
  /// Same keys upper-cased with a WFPROV_ prefix (WFPROV_METRICS_URL, ...).
  void apply_env(const std::function<const char*(const char*)>& getenv_fn);

  nlohmann::json to_json() const;
};

}  // namespace wfprov
