#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/backends/http.hpp"
#include "wfprov/processing/latency.hpp"
#include "wfprov/query/service.hpp"
#include "wfprov/sim/config.hpp"
#include "wfprov/sim/emitter.hpp"
#include "wfprov/sim/ground_truth.hpp"

namespace wfprov::bench {

using Progress = std::function<void(const std::string&)>;

/// Preset run used by every benchmark: failures forced onto worker-2 and
/// worker-4, combined_intensive tasks log a warning.
sim::SimConfig standard_config(sim::SizePreset size, std::uint64_t seed);

/// The nodes the standard failure plan uses.
std::set<NodeId> failure_nodes(const sim::GroundTruth& gt);

/// Reference backends and a provenance service on ephemeral local ports,
/// wired together over HTTP the way a real deployment is.
class Deployment {
 public:
  struct Options {
    /// Initialize the eDAG from the workflow spec (otherwise tasks are
    /// registered from workflow-engine events).
    bool with_spec = true;
    /// Start and seed the metrics and logs services.
    bool with_backends = true;
  };

  Deployment(const sim::GroundTruth& gt, Options options);
  ~Deployment();

  Deployment(const Deployment&) = delete;
  Deployment& operator=(const Deployment&) = delete;

  ProvenanceService& service() noexcept { return *service_; }
  int http_port() const { return service_->http_port(); }
  int ingest_port() const { return *service_->ingest_port(); }

  /// Sends records through the ingestion socket and waits until the
  /// processor has caught up.
  std::uint64_t replay(const std::vector<sim::TraceRecord>& events, const sim::Pacing& pacing);

  /// Fresh client per call: nothing is reused between timed runs.
  HttpResult get(const std::string& path, const QueryParams& params = {}) const;

  InMemoryMetricsStore& metrics_store() noexcept { return metrics_store_; }
  InMemoryLogStore& log_store() noexcept { return log_store_; }

 private:
  std::filesystem::path workdir_;
  InMemoryMetricsStore metrics_store_;
  InMemoryLogStore log_store_;
  std::unique_ptr<MetricsHttpServer> metrics_http_;
  std::unique_ptr<LogsHttpServer> logs_http_;
  std::unique_ptr<ProvenanceService> service_;
};

struct QueryTiming {
  std::string query;
  std::string request;
  sim::SizePreset size = sim::SizePreset::small;
  std::vector<double> runs_ms;
  double min_ms = 0;
  double avg_ms = 0;
  double max_ms = 0;
  std::size_t result_count = 0;
};

struct IngestionRun {
  std::uint64_t records = 0;
  LatencySummary latency;
};

struct IngestionResult {
  sim::SizePreset size = sim::SizePreset::small;
  std::string pacing;
  std::uint64_t event_count = 0;
  std::vector<IngestionRun> runs;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct BenchReport {
  std::vector<QueryTiming> queries;
  std::vector<IngestionResult> ingestion;
  std::vector<Check> checks;
  std::string environment;

  bool passed() const;
  void merge(BenchReport other);
  const QueryTiming* timing(const std::string& query, sim::SizePreset size) const;
};

nlohmann::json to_json(const BenchReport& r);

/// Queries 1 to 3 after a full replay, `runs` timed executions each, plus
/// correctness checks of their answers against the ground truth.
BenchReport bench_queries(sim::SizePreset size, std::uint64_t seed, int runs = 3,
                          const Progress& progress = {});

/// Replays the run `runs` times at real-time-scaled pacing into a fresh
/// service each time and reports per-event ingestion latency.
BenchReport bench_ingestion(sim::SizePreset size, std::uint64_t seed, int runs = 5,
                            std::optional<sim::Pacing> pacing = std::nullopt,
                            const Progress& progress = {});

/// Every endpoint against the brute-force oracle, once halfway through the
/// run and once after it.
BenchReport verify_oracle(sim::SizePreset size, std::uint64_t seed, const Progress& progress = {});

/// Adds the small-to-large growth and absolute latency checks when both
/// sizes were benchmarked.
void add_scaling_checks(BenchReport& report);

/// Request set used by verify_oracle: every route, path and collection
/// forms, with a spread of filters.
std::vector<std::pair<std::string, QueryParams>> oracle_requests(const sim::GroundTruth& gt);

/// Pacing used when none is given: compresses the run to about 30 s.
sim::Pacing default_ingestion_pacing(const sim::GroundTruth& gt);

std::string render_text(const BenchReport& r);

}  // namespace wfprov::bench
