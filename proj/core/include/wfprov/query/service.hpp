#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "wfprov/backends/http.hpp"
#include "wfprov/edag/edag_store.hpp"
#include "wfprov/mediation/ingest.hpp"
#include "wfprov/processing/processor.hpp"
#include "wfprov/query/config.hpp"
#include "wfprov/query/engine.hpp"

namespace wfprov {

/// HTTP front of a QueryEngine: the /get/... routes plus /stats, /snapshot
/// and /health.
class QueryService {
 public:
  using StatsFn = std::function<nlohmann::json(bool include_samples)>;

  QueryService(const QueryEngine& engine, const EDagStore& store, StatsFn stats = {});

  int start(const std::string& host = "127.0.0.1", int port = 0) { return server_.start(host, port); }
  void stop() { server_.stop(); }
  int port() const noexcept { return server_.port(); }

  /// Request counter, for tests asserting that a route was hit.
  std::uint64_t requests() const noexcept { return requests_.load(); }

 private:
  const QueryEngine& engine_;
  const EDagStore& store_;
  StatsFn stats_;
  HttpServer server_;
  std::atomic<std::uint64_t> requests_{0};
};

/// The complete provenance system in one process: ingestion socket, event
/// buffer, processor thread, eDAG and query service.
class ProvenanceService {
 public:
  /// Backends come from the configured endpoints (HTTP clients).
  explicit ProvenanceService(ServiceConfig config);
  /// Uses the given backends instead (either may be null).
  ProvenanceService(ServiceConfig config, MetricsBackend* metrics, LogsBackend* logs);
  ~ProvenanceService();

  ProvenanceService(const ProvenanceService&) = delete;
  ProvenanceService& operator=(const ProvenanceService&) = delete;

  /// Starts the processor, the ingestion socket (when configured) and the
  /// HTTP listener.
  void start();
  /// Stops accepting input, drains the buffer and stops serving.
  void stop();

  int http_port() const;
  std::optional<int> ingest_port() const;

  EDagStore& store() noexcept { return store_; }
  EventBuffer& buffer() noexcept { return *buffer_; }
  IngestPipeline& pipeline() noexcept { return *pipeline_; }
  EventProcessor& processor() noexcept { return *processor_; }
  const QueryEngine& engine() const noexcept { return *engine_; }
  const ServiceConfig& config() const noexcept { return config_; }

  nlohmann::json stats_json(bool include_samples = false) const;

  /// Waits until every enqueued event has been dequeued and processed.
  bool wait_idle(std::chrono::milliseconds timeout = std::chrono::seconds(30)) const;

 private:
  void init(MetricsBackend* metrics, LogsBackend* logs);

  ServiceConfig config_;
  EDagStore store_;
  std::unique_ptr<MetricsBackend> owned_metrics_;
  std::unique_ptr<LogsBackend> owned_logs_;
  std::unique_ptr<EventBuffer> buffer_;
  std::unique_ptr<IngestPipeline> pipeline_;
  std::unique_ptr<EventProcessor> processor_;
  std::unique_ptr<ProcessorThread> processor_thread_;
  std::unique_ptr<SocketSource> socket_;
  std::unique_ptr<QueryEngine> engine_;
  std::unique_ptr<QueryService> http_;
  bool started_ = false;
};

/// Mediation counters as JSON.
nlohmann::json to_json(const MediationStats& s);
nlohmann::json to_json(const BufferStats& s);

}  // namespace wfprov
