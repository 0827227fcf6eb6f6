#include "wfprov/query/engine.hpp"

#include "wfprov/model/json.hpp"

namespace wfprov {

namespace {

using steady = std::chrono::steady_clock;

double ms_since(steady::time_point t0, steady::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

QueryEngine::QueryEngine(const EDagStore& store, MetricsBackend* metrics, LogsBackend* logs,
                         std::chrono::microseconds default_step)
    : store_(store), metrics_(metrics), logs_(logs), default_step_(default_step) {}

nlohmann::json QueryEngine::execute(const QueryRequest& request) const {
  const auto t0 = steady::now();
  const auto p = store_.read(
      [&](const EDag& dag) { return plan(request, dag, Timestamp::now(), default_step_); });
  const auto t1 = steady::now();

  auto warnings = p.warnings;
  nlohmann::json results = p.local_results;
  if (request.route == Route::task_cpu || request.route == Route::task_ram) {
    std::optional<SeriesMap> series;
    if (p.metric_query) {
      if (!metrics_) {
        warnings.push_back("metrics backend not configured");
      } else {
        try {
          series = metrics_->range_query(*p.metric_query);
        } catch (const std::exception& e) {
          warnings.push_back(std::string("metrics backend failed: ") + e.what());
        }
      }
    }
    results = merge_metric_results(p, series ? &*series : nullptr);
  } else if (request.route == Route::task_logs) {
    std::optional<std::vector<LogEntry>> entries;
    if (p.log_query) {
      if (!logs_) {
        warnings.push_back("logs backend not configured");
      } else {
        try {
          entries = logs_->search(*p.log_query);
        } catch (const std::exception& e) {
          warnings.push_back(std::string("logs backend failed: ") + e.what());
        }
      }
    }
    results = merge_log_results(p, entries ? &*entries : nullptr);
  }
  const auto t2 = steady::now();

  nlohmann::json out;
  out["request"] = request.echo();
  out["evaluated_at"] = p.evaluated_at;
  out["edag_version"] = p.edag_version;
  out["results"] = std::move(results);
  out["warnings"] = warnings;
  out["timing"] = {{"local_ms", ms_since(t0, t1)},
                   {"backend_ms", ms_since(t1, t2)},
                   {"total_ms", ms_since(t0, steady::now())}};
  return out;
}

}  // namespace wfprov
