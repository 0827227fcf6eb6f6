#pragma once

#include <chrono>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"
#include "wfprov/edag/edag_store.hpp"
#include "wfprov/query/planner.hpp"

namespace wfprov {

/// Executes requests: plan against a pinned snapshot, then at most one query
/// per backend kind, then merge per task. Safe for concurrent use.
class QueryEngine {
 public:
  /// Either backend may be null; requests needing it then answer with empty
  /// data and a warning.
  QueryEngine(const EDagStore& store, MetricsBackend* metrics, LogsBackend* logs,
              std::chrono::microseconds default_step = std::chrono::seconds(10));

  /// Full response document:
  /// {request, evaluated_at, edag_version, results, warnings, timing}.
  nlohmann::json execute(const QueryRequest& request) const;

  std::chrono::microseconds default_step() const noexcept { return default_step_; }

 private:
  const EDagStore& store_;
  MetricsBackend* metrics_;
  LogsBackend* logs_;
  std::chrono::microseconds default_step_;
};

}  // namespace wfprov
