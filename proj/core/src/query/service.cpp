#include "wfprov/query/service.hpp"

#include <fstream>
#include <thread>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov {

nlohmann::json to_json(const MediationStats& s) {
  nlohmann::json per_source = nlohmann::json::object();
  for (auto src : {EventSource::workflow_engine, EventSource::resource_manager}) {
    const auto& a = s.per_source[source_index(src)];
    per_source[std::string(to_string(src))] = {{"records", a.records},
                                               {"emitted", a.emitted},
                                               {"skipped_noise", a.skipped_noise},
                                               {"skipped_unsupported", a.skipped_unsupported},
                                               {"skipped_malformed", a.skipped_malformed},
                                               {"dedup_dropped", a.dedup_dropped}};
  }
  return {{"records", s.records},
          {"skipped", s.skipped},
          {"dedup_dropped", s.dedup_dropped},
          {"buffer_dropped", s.buffer_dropped},
          {"enqueued", s.enqueued},
          {"conserved", s.conserved()},
          {"per_source", per_source}};
}

nlohmann::json to_json(const BufferStats& s) {
  return {{"accepted", s.accepted},
          {"delivered", s.delivered},
          {"dropped", s.dropped},
          {"backpressure_signals", s.backpressure_signals},
          {"buffered", s.buffered}};
}

QueryService::QueryService(const QueryEngine& engine, const EDagStore& store, StatsFn stats)
    : engine_(engine), store_(store), stats_(std::move(stats)) {
  auto query = [this](const HttpServer::Request& r) {
    ++requests_;
    const auto req = QueryRequest::from_path(r.path, r.params);
    return json_response(200, engine_.execute(req));
  };
  server_.get(R"(/get/.*)", query);
  server_.get("/stats", [this](const HttpServer::Request& r) {
    ++requests_;
    if (!stats_) return error_response(404, "stats not available");
    const auto it = r.params.find("samples");
    const bool samples = it != r.params.end() && (it->second == "1" || it->second == "true");
    return json_response(200, stats_(samples));
  });
  server_.get("/snapshot", [this](const HttpServer::Request&) {
    ++requests_;
    return json_response(200, store_.read([](const EDag& d) { return d.export_snapshot(); }));
  });
  server_.get("/health", [this](const HttpServer::Request&) {
    return json_response(200, {{"status", "ok"}, {"edag_version", store_.version()}});
  });
}

ProvenanceService::ProvenanceService(ServiceConfig config) : config_(std::move(config)) {
  if (config_.metrics) owned_metrics_ = std::make_unique<HttpMetricsClient>(*config_.metrics);
  if (config_.logs) owned_logs_ = std::make_unique<HttpLogsClient>(*config_.logs);
  init(owned_metrics_.get(), owned_logs_.get());
}

ProvenanceService::ProvenanceService(ServiceConfig config, MetricsBackend* metrics,
                                     LogsBackend* logs)
    : config_(std::move(config)) {
  init(metrics, logs);
}

void ProvenanceService::init(MetricsBackend* metrics, LogsBackend* logs) {
  ProcessorOptions opts;
  opts.pending_ttl = config_.pending_ttl;
  WorkflowId wf(config_.workflow_id);
  if (config_.spec) {
    std::ifstream in(*config_.spec);
    if (!in) throw Error("cannot open spec " + config_.spec->string());
    const auto spec = nlohmann::json::parse(in).get<WorkflowSpec>();
    wf = spec.workflow_id;
    config_.workflow_id = wf.str();
    store_.reset(EDag::init_from_spec(spec));
  } else {
    store_.reset(EDag(wf));
    opts.register_unknown_tasks = true;
  }
  buffer_ = std::make_unique<EventBuffer>(config_.buffer_capacity, config_.overflow_policy);
  pipeline_ = std::make_unique<IngestPipeline>(*buffer_, wf);
  processor_ = std::make_unique<EventProcessor>(store_, opts);
  engine_ = std::make_unique<QueryEngine>(store_, metrics, logs, config_.default_step);
  http_ = std::make_unique<QueryService>(*engine_, store_,
                                         [this](bool samples) { return stats_json(samples); });
  if (config_.ingest) socket_ = std::make_unique<SocketSource>(config_.ingest->host, config_.ingest->port);
}

ProvenanceService::~ProvenanceService() { stop(); }

void ProvenanceService::start() {
  if (started_) return;
  processor_thread_ = std::make_unique<ProcessorThread>(*processor_, *buffer_);
  if (socket_) socket_->start(*pipeline_);
  http_->start(config_.listen.host, config_.listen.port);
  started_ = true;
}

void ProvenanceService::stop() {
  if (!started_) return;
  started_ = false;
  if (socket_) {
    socket_->stop();
    socket_->join();
  }
  wait_idle(std::chrono::seconds(10));
  buffer_->close();
  processor_thread_.reset();
  http_->stop();
}

int ProvenanceService::http_port() const { return http_->port(); }

std::optional<int> ProvenanceService::ingest_port() const {
  if (!socket_) return std::nullopt;
  return socket_->port();
}

nlohmann::json ProvenanceService::stats_json(bool include_samples) const {
  auto j = processor_->stats_json(include_samples);
  const auto m = pipeline_->stats();
  j["mediation"] = to_json(m);
  j["buffer"] = to_json(buffer_->stats());
  j["edag"] = store_.read([](const EDag& d) {
    return nlohmann::json{{"version", d.version()},
                          {"tasks", d.task_count()},
                          {"edges", d.edge_count()},
                          {"workflow_id", d.workflow_id()}};
  });
  if (socket_)
    j["ingest_socket"] = {{"lines", socket_->lines_read()}, {"connections", socket_->connections()}};
  return j;
}

bool ProvenanceService::wait_idle(std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    const auto enq = pipeline_->stats().enqueued;
    if (buffer_->size() == 0 && processor_->counters().committed >= enq) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return false;
}

}  // namespace wfprov
