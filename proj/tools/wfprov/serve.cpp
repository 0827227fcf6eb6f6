#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>

#include "commands.hpp"
#include "wfprov/backends/http.hpp"
#include "wfprov/query/service.hpp"

namespace wfprov::cli {

void block_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

int wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

namespace {

struct ServeFlags {
  std::string config;
  std::map<std::string, std::string> values;
};

}  // namespace

void add_serve(CLI::App& app) {
  auto flags = std::make_shared<ServeFlags>();
  auto* cmd = app.add_subcommand("serve", "Run the provenance service (ingestion, eDAG, query API)");
  cmd->add_option("--config", flags->config, "JSON config file");
  const std::pair<const char*, const char*> keys[] = {
      {"listen", "HTTP listen address host:port"},
      {"ingest", "event ingestion socket host:port"},
      {"metrics-url", "metrics backend host:port"},
      {"logs-url", "logs backend host:port"},
      {"default-step", "default metric step, e.g. 10s"},
      {"workflow-id", "workflow id for events that carry none"},
      {"spec", "workflow spec JSON; without it tasks register from events"},
      {"buffer-capacity", "event buffer capacity per source"},
      {"overflow-policy", "block or drop_new"},
      {"pending-ttl", "how long unmatched events wait, e.g. 60s"},
  };
  for (const auto& [name, help] : keys) {
    std::string key = name;
    for (auto& c : key)
      if (c == '-') c = '_';
    cmd->add_option_function<std::string>(
        std::string("--") + name, [flags, key](const std::string& v) { flags->values[key] = v; }, help);
  }
  cmd->callback([flags] {
    ServiceConfig cfg;
    if (!flags->config.empty()) cfg.apply_file(flags->config);
    cfg.apply_env([](const char* n) { return std::getenv(n); });
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& [k, v] : flags->values) overrides[k] = v;
    cfg.apply_json(overrides);

    block_signals();
    ProvenanceService svc(cfg);
    svc.start();
    std::fprintf(stderr, "serving on %s:%d", cfg.listen.host.c_str(), svc.http_port());
    if (auto p = svc.ingest_port()) std::fprintf(stderr, ", ingesting on %s:%d", cfg.ingest->host.c_str(), *p);
    std::fprintf(stderr, "\n");
    wait_for_signal();
    std::fprintf(stderr, "shutting down\n");
    svc.stop();
  });
}

void add_backend(CLI::App& app) {
  auto* cmd = app.add_subcommand("backend", "Run a reference metrics or logs backend");
  cmd->require_subcommand(1);
  struct Flags {
    std::string listen;
    std::string data;
  };
  for (const char* kind : {"metrics", "logs"}) {
    auto flags = std::make_shared<Flags>();
    flags->listen = std::string(kind) == "metrics" ? "127.0.0.1:9090" : "127.0.0.1:9091";
    auto* sub = cmd->add_subcommand(kind, std::string("In-memory ") + kind + " store over HTTP");
    sub->add_option("--listen", flags->listen, "host:port")->capture_default_str();
    sub->add_option("--data", flags->data, "NDJSON fixture to preload");
    const bool metrics = std::string(kind) == "metrics";
    sub->callback([flags, metrics] {
      const auto ep = Endpoint::parse(flags->listen);
      block_signals();
      InMemoryMetricsStore mstore;
      InMemoryLogStore lstore;
      std::size_t loaded = 0;
      if (!flags->data.empty())
        loaded = metrics ? mstore.ingest(read_metric_fixture(flags->data))
                         : lstore.ingest(read_log_fixture(flags->data));
      int port = 0;
      std::optional<MetricsHttpServer> ms;
      std::optional<LogsHttpServer> ls;
      if (metrics) port = ms.emplace(mstore).start(ep.host, ep.port);
      else port = ls.emplace(lstore).start(ep.host, ep.port);
      std::fprintf(stderr, "%s backend on %s:%d (%zu records preloaded)\n", metrics ? "metrics" : "logs",
                   ep.host.c_str(), port, loaded);
      wait_for_signal();
      if (ms) ms->stop();
      if (ls) ls->stop();
    });
  }
}

}  // namespace wfprov::cli
