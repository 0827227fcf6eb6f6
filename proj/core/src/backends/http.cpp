#include "wfprov/backends/http.hpp"

#include <chrono>
#include <thread>

#include "detail/httplib.hpp"
#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov {

Endpoint Endpoint::parse(std::string_view text) {
  if (text.starts_with("http://")) text.remove_prefix(7);
  while (!text.empty() && text.back() == '/') text.remove_suffix(1);
  Endpoint ep;
  const auto colon = text.rfind(':');
  std::string_view port_text = text;
  if (colon != std::string_view::npos) {
    ep.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    ep.port = std::stoi(std::string(port_text), &used);
    if (used != port_text.size() || ep.port < 0 || ep.port > 65535) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ValidationError("bad endpoint: " + std::string(text));
  }
  if (ep.host.empty() || ep.host == "localhost") ep.host = "127.0.0.1";
  return ep;
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

nlohmann::json HttpResult::json() const {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("invalid JSON response: ") + e.what());
  }
}

struct HttpClient::Conn {
  httplib::Client client;
  Conn(const Endpoint& ep, std::chrono::milliseconds timeout) : client(ep.host, ep.port) {
    client.set_keep_alive(true);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(), 0);
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(), 0);
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(), 0);
  }
};

HttpClient::HttpClient(Endpoint endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

HttpClient::~HttpClient() = default;

std::unique_ptr<HttpClient::Conn> HttpClient::acquire() {
  {
    std::lock_guard lock(mu_);
    if (!idle_.empty()) {
      auto c = std::move(idle_.back());
      idle_.pop_back();
      return c;
    }
  }
  return std::make_unique<Conn>(endpoint_, timeout_);
}

void HttpClient::release(std::unique_ptr<Conn> c) {
  std::lock_guard lock(mu_);
  if (idle_.size() < 8) idle_.push_back(std::move(c));
}

namespace {

template <typename F>
HttpResult call(const Endpoint& ep, httplib::Client& client, F&& f) {
  auto res = f(client);
  if (!res)
    throw BackendError("request to " + ep.to_string() + " failed: " + httplib::to_string(res.error()));
  return HttpResult{res->status, res->body};
}

}  // namespace

HttpResult HttpClient::get(const std::string& path, const QueryParams& params) {
  auto conn = acquire();
  auto r = call(endpoint_, conn->client, [&](httplib::Client& c) {
    return c.Get(path, httplib::Params(params.begin(), params.end()), httplib::Headers{});
  });
  release(std::move(conn));
  return r;
}

HttpResult HttpClient::get_raw(const std::string& path_and_query) {
  auto conn = acquire();
  auto r = call(endpoint_, conn->client, [&](httplib::Client& c) { return c.Get(path_and_query); });
  release(std::move(conn));
  return r;
}

HttpResult HttpClient::post(const std::string& path, const std::string& body,
                            const std::string& content_type) {
  auto conn = acquire();
  auto r = call(endpoint_, conn->client,
                [&](httplib::Client& c) { return c.Post(path, body, content_type); });
  release(std::move(conn));
  return r;
}

struct HttpServer::Impl {
  httplib::Server server;
  std::thread worker;
};

HttpServer::HttpServer() : impl_(std::make_unique<Impl>()) {}

HttpServer::~HttpServer() { stop(); }

namespace {

httplib::Server::Handler adapt(HttpServer::Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    HttpServer::Request r;
    r.path = req.path;
    r.params = QueryParams(req.params.begin(), req.params.end());
    r.body = req.body;
    for (const auto& m : req.matches) r.matches.push_back(m.str());
    HttpServer::Response out;
    try {
      out = h(r);
    } catch (const NotFoundError& e) {
      out = error_response(404, e.what(), {{"kind", e.kind()}, {"id", e.id()}});
    } catch (const ValidationError& e) {
      out = error_response(400, e.what());
    } catch (const BackendError& e) {
      out = error_response(502, e.what());
    } catch (const nlohmann::json::exception& e) {
      out = error_response(400, e.what());
    } catch (const std::exception& e) {
      out = error_response(500, e.what());
    }
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
}

}  // namespace

void HttpServer::get(const std::string& pattern, Handler h) {
  impl_->server.Get(pattern, adapt(std::move(h)));
}

void HttpServer::post(const std::string& pattern, Handler h) {
  impl_->server.Post(pattern, adapt(std::move(h)));
}

int HttpServer::start(const std::string& host, int port) {
  auto& s = impl_->server;
  if (port == 0) {
    port_ = s.bind_to_any_port(host);
    if (port_ < 0) throw Error("cannot bind " + host);
  } else {
    if (!s.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
  }
  running_ = true;
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  return port_;
}

void HttpServer::stop() {
  if (!impl_) return;
  if (running_.exchange(false)) impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

HttpServer::Response json_response(int status, const nlohmann::json& body) {
  return {status, body.dump(), "application/json"};
}

HttpServer::Response error_response(int status, const std::string& message, nlohmann::json extra) {
  auto body = std::move(extra);
  body["error"] = message;
  body["status"] = status;
  return json_response(status, body);
}

std::string join_ids(const std::vector<ExecObjectId>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ',';
    out += id.str();
  }
  return out;
}

std::vector<ExecObjectId> split_ids(std::string_view text) {
  std::vector<ExecObjectId> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto part = text.substr(0, comma);
    if (!part.empty()) out.emplace_back(std::string(part));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

namespace {

const std::string& required(const HttpServer::Request& r, const std::string& name) {
  const auto it = r.params.find(name);
  if (it == r.params.end()) throw ValidationError("missing parameter: " + name);
  return it->second;
}

TimeInterval interval_of(const HttpServer::Request& r) {
  return TimeInterval::make(Timestamp::parse(required(r, "start")),
                            Timestamp::parse(required(r, "end")));
}

HttpServer::Response health_ok(const char* kind) {
  return json_response(200, {{"status", "ok"}, {"backend", kind}});
}

}  // namespace

MetricsHttpServer::MetricsHttpServer(MetricsBackend& backend) : backend_(backend) {
  server_.post("/ingest", [this](const HttpServer::Request& r) {
    const auto n = backend_.ingest(parse_metric_ndjson(r.body));
    return json_response(200, {{"ingested", n}});
  });
  server_.get("/range", [this](const HttpServer::Request& r) {
    MetricRangeQuery q;
    q.exec_object_ids = split_ids(required(r, "ids"));
    const auto metric = parse_metric_kind(required(r, "metric"));
    if (!metric) throw ValidationError("unknown metric: " + required(r, "metric"));
    q.metric = *metric;
    q.interval = interval_of(r);
    q.step = parse_duration(required(r, "step"));
    return json_response(200, {{"series", to_json(backend_.range_query(q))}});
  });
  server_.get("/health", [](const HttpServer::Request&) { return health_ok("metrics"); });
}

LogsHttpServer::LogsHttpServer(LogsBackend& backend) : backend_(backend) {
  server_.post("/ingest", [this](const HttpServer::Request& r) {
    const auto n = backend_.ingest(parse_log_ndjson(r.body));
    return json_response(200, {{"ingested", n}});
  });
  server_.get("/search", [this](const HttpServer::Request& r) {
    LogSearchQuery q;
    q.exec_object_ids = split_ids(required(r, "ids"));
    q.interval = interval_of(r);
    if (auto it = r.params.find("q"); it != r.params.end() && !it->second.empty())
      q.full_text = it->second;
    return json_response(200, {{"entries", backend_.search(q)}});
  });
  server_.get("/health", [](const HttpServer::Request&) { return health_ok("logs"); });
}

namespace {

nlohmann::json checked(const HttpResult& r, const char* what) {
  if (!r.ok()) {
    std::string msg = std::string(what) + " returned HTTP " + std::to_string(r.status);
    try {
      msg += ": " + nlohmann::json::parse(r.body).value("error", std::string());
    } catch (const std::exception&) {
    }
    throw BackendError(msg);
  }
  return r.json();
}

BackendHealth probe(HttpClient& http) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto r = http.get("/health");
    const auto ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {r.ok(), ms, r.ok() ? "ok" : "HTTP " + std::to_string(r.status)};
  } catch (const BackendError& e) {
    return {false, 0.0, e.what()};
  }
}

}  // namespace

std::size_t HttpMetricsClient::ingest(const std::vector<MetricSample>& samples) {
  return checked(http_.post("/ingest", to_metric_ndjson(samples)), "metrics ingest")
      .at("ingested")
      .get<std::size_t>();
}

SeriesMap HttpMetricsClient::range_query(const MetricRangeQuery& q) {
  q.validate();
  const QueryParams params{{"ids", join_ids(q.exec_object_ids)},
                           {"metric", std::string(to_string(q.metric))},
                           {"start", q.interval.start.to_string()},
                           {"end", q.interval.end.to_string()},
                           {"step", std::to_string(q.step.count()) + "us"}};
  const auto j = checked(http_.get("/range", params), "metrics range");
  try {
    return series_from_json(j.at("series"));
  } catch (const std::exception& e) {
    throw BackendError(std::string("bad metrics response: ") + e.what());
  }
}

BackendHealth HttpMetricsClient::health() { return probe(http_); }

std::size_t HttpLogsClient::ingest(const std::vector<LogEntry>& entries) {
  return checked(http_.post("/ingest", to_log_ndjson(entries)), "logs ingest")
      .at("ingested")
      .get<std::size_t>();
}

std::vector<LogEntry> HttpLogsClient::search(const LogSearchQuery& q) {
  q.validate();
  QueryParams params{{"ids", join_ids(q.exec_object_ids)},
                     {"start", q.interval.start.to_string()},
                     {"end", q.interval.end.to_string()}};
  if (q.full_text && !q.full_text->empty()) params.emplace("q", *q.full_text);
  const auto j = checked(http_.get("/search", params), "logs search");
  try {
    return j.at("entries").get<std::vector<LogEntry>>();
  } catch (const std::exception& e) {
    throw BackendError(std::string("bad logs response: ") + e.what());
  }
}

BackendHealth HttpLogsClient::health() { return probe(http_); }

}  // namespace wfprov
