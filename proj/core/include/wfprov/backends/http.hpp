#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"

namespace wfprov {

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;

  /// Accepts `host:port`, `http://host:port` or a bare port.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

struct HttpResult {
  int status = 0;
  std::string body;

  bool ok() const { return status >= 200 && status < 300; }
  nlohmann::json json() const;
};

using QueryParams = std::multimap<std::string, std::string>;

/// Minimal blocking HTTP/1.1 client with connection reuse. Safe to share
/// between threads. Transport failures throw BackendError.
class HttpClient {
 public:
  explicit HttpClient(Endpoint endpoint,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~HttpClient();

  HttpClient(const HttpClient&) = delete;
  HttpClient& operator=(const HttpClient&) = delete;

  HttpResult get(const std::string& path, const QueryParams& params = {});
  /// `path_and_query` is sent as is (already encoded).
  HttpResult get_raw(const std::string& path_and_query);
  HttpResult post(const std::string& path, const std::string& body,
                  const std::string& content_type = "application/x-ndjson");

  const Endpoint& endpoint() const noexcept { return endpoint_; }

 private:
  struct Conn;
  std::unique_ptr<Conn> acquire();
  void release(std::unique_ptr<Conn> c);

  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::vector<std::unique_ptr<Conn>> idle_;
};

/// Background HTTP server; routes are registered by the owning service.
class HttpServer {
 public:
  struct Request {
    std::string path;
    QueryParams params;
    std::string body;
    /// Captures of the route pattern, starting with the full match.
    std::vector<std::string> matches;
  };
  struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
  };
  using Handler = std::function<Response(const Request&)>;

  HttpServer();
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// `pattern` is an ECMAScript regex over the path.
  void get(const std::string& pattern, Handler h);
  void post(const std::string& pattern, Handler h);

  /// Binds (port 0 = ephemeral) and serves on a background thread. Returns
  /// the bound port. Throws Error when binding fails.
  int start(const std::string& host, int port);
  void stop();
  int port() const noexcept { return port_; }
  bool running() const noexcept { return running_.load(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::atomic<bool> running_{false};
};

HttpServer::Response json_response(int status, const nlohmann::json& body);
HttpServer::Response error_response(int status, const std::string& message,
                                    nlohmann::json extra = nlohmann::json::object());

/// Serves a MetricsBackend: POST /ingest, GET /range, GET /health.
class MetricsHttpServer {
 public:
  explicit MetricsHttpServer(MetricsBackend& backend);
  int start(const std::string& host = "127.0.0.1", int port = 0) { return server_.start(host, port); }
  void stop() { server_.stop(); }
  int port() const noexcept { return server_.port(); }

 private:
  MetricsBackend& backend_;
  HttpServer server_;
};

/// Serves a LogsBackend: POST /ingest, GET /search, GET /health.
class LogsHttpServer {
 public:
  explicit LogsHttpServer(LogsBackend& backend);
  int start(const std::string& host = "127.0.0.1", int port = 0) { return server_.start(host, port); }
  void stop() { server_.stop(); }
  int port() const noexcept { return server_.port(); }

 private:
  LogsBackend& backend_;
  HttpServer server_;
};

class HttpMetricsClient final : public MetricsBackend {
 public:
  explicit HttpMetricsClient(Endpoint endpoint) : http_(std::move(endpoint)) {}
  std::size_t ingest(const std::vector<MetricSample>& samples) override;
  SeriesMap range_query(const MetricRangeQuery& q) override;
  BackendHealth health() override;

 private:
  HttpClient http_;
};

class HttpLogsClient final : public LogsBackend {
 public:
  explicit HttpLogsClient(Endpoint endpoint) : http_(std::move(endpoint)) {}
  std::size_t ingest(const std::vector<LogEntry>& entries) override;
  std::vector<LogEntry> search(const LogSearchQuery& q) override;
  BackendHealth health() override;

 private:
  HttpClient http_;
};

/// Comma-joined id list as used by the `ids` query parameter.
std::string join_ids(const std::vector<ExecObjectId>& ids);
std::vector<ExecObjectId> split_ids(std::string_view text);

}  // namespace wfprov
