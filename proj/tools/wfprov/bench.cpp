#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "wfprov/bench/harness.hpp"
#include "wfprov/model/errors.hpp"

namespace wfprov::cli {

namespace {

struct BenchFlags {
  std::string size = "small";
  std::uint64_t seed = 42;
  std::string report;
  int runs = 0;
  std::string pace;
  bool quiet = false;
};

sim::SizePreset size_of(const std::string& s) {
  auto p = sim::parse_size_preset(s);
  if (!p) throw ValidationError("size must be small, medium or large");
  return *p;
}

void finish(const bench::BenchReport& report, const BenchFlags& f) {
  std::cout << bench::render_text(report);
  if (!f.report.empty()) {
    std::ofstream out(f.report);
    if (!out) throw Error("cannot write " + f.report);
    out << bench::to_json(report).dump(2) << "\n";
  }
  if (!report.passed()) std::exit(1);
}

bench::Progress progress(const BenchFlags& f) {
  if (f.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << std::endl; };
}

std::optional<sim::Pacing> pacing(const BenchFlags& f) {
  if (f.pace.empty()) return std::nullopt;
  return sim::Pacing::parse(f.pace);
}

}  // namespace

void add_bench(CLI::App& app) {
  auto f = std::make_shared<BenchFlags>();
  auto* cmd = app.add_subcommand("bench", "Benchmarks and end-to-end verification");
  cmd->require_subcommand(1);
  cmd->add_option("--size", f->size, "small, medium or large")->capture_default_str();
  cmd->add_option("--seed", f->seed, "RNG seed")->capture_default_str();
  cmd->add_option("--report", f->report, "write the JSON report here");
  cmd->add_option("--runs", f->runs, "timed runs (default 3 for queries, 5 for ingest)");
  cmd->add_option("--pace", f->pace, "ingestion pacing, realtime:<factor>");
  cmd->add_flag("--quiet", f->quiet, "no progress output");
  cmd->fallthrough();

  cmd->add_subcommand("queries", "Queries 1-3: response times and answers")->callback([f] {
    finish(bench::bench_queries(size_of(f->size), f->seed, f->runs > 0 ? f->runs : 3, progress(*f)), *f);
  });
  cmd->add_subcommand("ingest", "Ingestion latency under real-time replay")->callback([f] {
    finish(bench::bench_ingestion(size_of(f->size), f->seed, f->runs > 0 ? f->runs : 5, pacing(*f),
                                  progress(*f)),
           *f);
  });
  cmd->add_subcommand("verify", "Every endpoint against the brute-force oracle")->callback([f] {
    const auto size = size_of(f->size);
    if (size == sim::SizePreset::large) throw ValidationError("verify supports small and medium");
    finish(bench::verify_oracle(size, f->seed, progress(*f)), *f);
  });
  cmd->add_subcommand("all", "verify, queries at every size up to --size, ingest at --size")->callback([f] {
    const auto size = size_of(f->size);
    bench::BenchReport report;
    for (auto s : {sim::SizePreset::small, sim::SizePreset::medium})
      if (s <= size) report.merge(bench::verify_oracle(s, f->seed, progress(*f)));
    for (auto s : {sim::SizePreset::small, sim::SizePreset::medium, sim::SizePreset::large})
      if (s <= size) report.merge(bench::bench_queries(s, f->seed, f->runs > 0 ? f->runs : 3, progress(*f)));
    bench::add_scaling_checks(report);
    report.merge(bench::bench_ingestion(size, f->seed, 5, pacing(*f), progress(*f)));
    finish(report, *f);
  });
}

}  // namespace wfprov::cli
