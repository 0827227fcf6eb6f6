#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "wfprov/backends/http.hpp"
#include "wfprov/bench/harness.hpp"
#include "wfprov/model/errors.hpp"
#include "wfprov/sim/emitter.hpp"
#include "wfprov/sim/generator.hpp"

namespace wfprov::cli {

namespace {

struct SimFlags {
  std::string preset = "small";
  std::uint64_t seed = 42;
  std::string out;
  std::vector<std::string> failures;
  bool standard_failures = false;
  bool no_noise = false;
  std::string pace = "fast";
  std::string ingest;
  std::string file;
  std::string metrics_url;
  std::string logs_url;
};

sim::SimConfig make_config(const SimFlags& f) {
  const auto preset = sim::parse_size_preset(f.preset);
  if (!preset) throw ValidationError("preset must be small, medium or large");
  auto cfg = f.standard_failures ? bench::standard_config(*preset, f.seed)
                                 : sim::SimConfig::defaults(*preset, f.seed);
  for (const auto& spec : f.failures) {
    const auto at = spec.find('@');
    if (at == std::string::npos) throw ValidationError("--fail expects task@node, got '" + spec + "'");
    cfg.failures.push_back({TaskId(spec.substr(0, at)), NodeId(spec.substr(at + 1))});
  }
  cfg.noise = !f.no_noise;
  return cfg;
}

/// A saved run from --out when present, else a freshly generated one.
sim::GroundTruth load_or_generate(const SimFlags& f) {
  if (!f.out.empty() && std::filesystem::exists(std::filesystem::path(f.out) / "ground_truth.json"))
    return sim::GroundTruth::load(f.out);
  return sim::generate(make_config(f));
}

void add_common(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--preset", f.preset, "small, medium or large")->capture_default_str();
  cmd->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--fail", f.failures, "force a failure: task@node (repeatable)");
  cmd->add_flag("--standard-failures", f.standard_failures, "use the benchmark failure plan");
  cmd->add_flag("--no-noise", f.no_noise, "omit unsupported records and chatter");
}

}  // namespace

void add_sim(CLI::App& app) {
  auto f = std::make_shared<SimFlags>();
  auto* cmd = app.add_subcommand("sim", "Workload simulator");
  cmd->require_subcommand(1);

  auto* gen = cmd->add_subcommand("generate", "Generate a run and write it to --out");
  add_common(gen, *f);
  gen->add_option("--out", f->out, "output directory")->required();
  gen->callback([f] {
    const auto gt = sim::generate(make_config(*f));
    gt.save(f->out);
    std::printf("%s\n", nlohmann::json{{"out", f->out},
                                       {"tasks", gt.tasks.size()},
                                       {"records", gt.tally.records},
                                       {"canonical", gt.tally.canonical},
                                       {"duplicates", gt.tally.duplicates},
                                       {"unsupported", gt.tally.unsupported},
                                       {"noise", gt.tally.noise},
                                       {"orphans", gt.tally.orphans},
                                       {"metric_samples", gt.metrics.size()},
                                       {"log_entries", gt.logs.size()}}
                            .dump()
                            .c_str());
  });

  auto* emit = cmd->add_subcommand("emit", "Replay a run's trace to a socket or file");
  add_common(emit, *f);
  emit->add_option("--out", f->out, "run directory written by generate");
  emit->add_option("--pace", f->pace, "fast, realtime or realtime:<factor>")->capture_default_str();
  auto* to_socket = emit->add_option("--ingest", f->ingest, "ingestion socket host:port");
  auto* to_file = emit->add_option("--file", f->file, "write NDJSON here instead");
  to_socket->excludes(to_file);
  emit->callback([f] {
    const auto gt = load_or_generate(*f);
    const auto pacing = sim::Pacing::parse(f->pace);
    std::uint64_t n = 0;
    if (!f->ingest.empty()) {
      const auto ep = Endpoint::parse(f->ingest);
      n = sim::emit_to_socket(gt.events, ep.host, ep.port, pacing);
    } else if (!f->file.empty()) {
      sim::write_trace(gt.events, f->file);
      n = gt.events.size();
    } else {
      throw ValidationError("emit needs --ingest or --file");
    }
    std::printf("%s\n", nlohmann::json{{"emitted", n}, {"pace", pacing.to_string()}}.dump().c_str());
  });

  auto* seed = cmd->add_subcommand("seed", "Load a run's metrics and logs into the backends");
  add_common(seed, *f);
  seed->add_option("--out", f->out, "run directory written by generate");
  seed->add_option("--metrics-url", f->metrics_url, "metrics backend host:port")->required();
  seed->add_option("--logs-url", f->logs_url, "logs backend host:port")->required();
  seed->callback([f] {
    const auto gt = load_or_generate(*f);
    HttpMetricsClient metrics(Endpoint::parse(f->metrics_url));
    HttpLogsClient logs(Endpoint::parse(f->logs_url));
    sim::seed_backends(gt, metrics, logs);
    std::printf("%s\n", nlohmann::json{{"metric_samples", gt.metrics.size()}, {"log_entries", gt.logs.size()}}
                            .dump()
                            .c_str());
  });
}

}  // namespace wfprov::cli
