#include "wfprov/bench/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "wfprov/bench/oracle.hpp"
#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"
#include "wfprov/sim/generator.hpp"

namespace wfprov::bench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::filesystem::path make_workdir() {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             fmt::format("wfprov-bench-{}-{}", ::getpid(), counter.fetch_add(1));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string label(sim::SizePreset size) { return std::string(sim::to_string(size)); }

void say(const Progress& p, const std::string& msg) {
  if (p) p(msg);
}

Check conservation_check(ProvenanceService& svc, const std::string& name) {
  const auto c = svc.processor().counters();
  const auto m = svc.pipeline().stats();
  const auto b = svc.buffer().stats();
  const bool ok = c.conserved() && m.conserved() && b.accepted == b.delivered + b.buffered &&
                  c.dequeued == b.delivered && b.accepted == m.enqueued;
  return {name, ok,
          fmt::format("dequeued={} applied={} duplicate={} stale={} orphaned={} irrelevant={} "
                      "pending={}; records={} skipped={} dedup={} dropped={} enqueued={}; "
                      "delivered={} buffered={}",
                      c.dequeued, c.applied, c.duplicate, c.stale, c.orphaned, c.irrelevant,
                      c.pending, m.records, m.skipped, m.dedup_dropped, m.buffer_dropped,
                      m.enqueued, b.delivered, b.buffered)};
}

TaskId first_instance(const char* abstract) { return concrete_task_id(AbstractTaskId(abstract), 1); }

/// Samples of one exec and metric inside [from, to].
nlohmann::json truth_series(const sim::GroundTruth& gt, const sim::TaskTruth& t, MetricKind m) {
  auto out = nlohmann::json::array();
  for (const auto& p : gt.series(t.exec_object_id, m))
    if (t.started_at <= p.timestamp && p.timestamp <= t.ended_at) out.push_back({p.timestamp, p.value});
  return out;
}

Check check_query1(const sim::GroundTruth& gt, const nlohmann::json& results, const std::string& name) {
  std::set<NodeId> nodes;
  std::set<TaskId> tasks;
  for (const auto& r : results) {
    tasks.insert(r.at("task_id").get<TaskId>());
    if (r.contains("node_id")) nodes.insert(r.at("node_id").get<NodeId>());
  }
  std::set<TaskId> planned;
  for (const auto& f : gt.failures) planned.insert(f.task_id);
  const auto expected_nodes = failure_nodes(gt);
  std::string got;
  for (const auto& n : nodes) got += (got.empty() ? "" : ",") + n.str();
  return {name, nodes == expected_nodes && tasks == planned,
          fmt::format("{} failed tasks on nodes {{{}}}", tasks.size(), got)};
}

Check check_query2(const sim::GroundTruth& gt, const AbstractTaskId& abstract,
                   const nlohmann::json& cpu, const nlohmann::json& ram, const std::string& name) {
  std::size_t expected_count = 0;
  std::size_t mismatches = 0;
  std::size_t points = 0;
  for (const auto& [id, t] : gt.tasks) {
    if (t.abstract_task_id != abstract) continue;
    ++expected_count;
    for (const auto* doc : {&cpu, &ram}) {
      const bool is_cpu = doc == &cpu;
      const auto it = std::find_if(doc->begin(), doc->end(), [&](const nlohmann::json& r) {
        return r.at("task_id") == id.str();
      });
      const auto expected = truth_series(gt, t, is_cpu ? MetricKind::cpu_cores : MetricKind::mem_bytes);
      points += expected.size();
      if (it == doc->end() || it->at("series") != expected) ++mismatches;
    }
  }
  const bool ok = mismatches == 0 && cpu.size() == expected_count && ram.size() == expected_count;
  return {name, ok,
          fmt::format("{} instances, {} expected points, {} mismatching series", expected_count,
                      points, mismatches)};
}

Check check_query3(const sim::GroundTruth& gt, const TaskId& parent, const nlohmann::json& results,
                   const std::string& name) {
  std::map<std::string, nlohmann::json> expected;
  for (const auto& [id, t] : gt.tasks) {
    if (std::find(t.parents.begin(), t.parents.end(), parent) == t.parents.end()) continue;
    auto entries = nlohmann::json::array();
    std::vector<LogEntry> hits;
    for (const auto& e : gt.logs)
      if (e.exec_object_id == t.exec_object_id && contains_ci(e.message, "warning") &&
          t.started_at <= e.timestamp && e.timestamp <= t.ended_at)
        hits.push_back(e);
    std::sort(hits.begin(), hits.end(), log_order);
    for (const auto& e : hits)
      entries.push_back({{"timestamp", e.timestamp}, {"level", to_string(e.level)}, {"message", e.message}});
    if (!entries.empty()) expected[id.str()] = entries;
  }
  std::map<std::string, nlohmann::json> got;
  for (const auto& r : results) got[r.at("task_id").get<std::string>()] = r.at("entries");
  std::size_t entries = 0;
  for (const auto& [_, e] : expected) entries += e.size();
  return {name, got == expected,
          fmt::format("{} tasks with {} expected warning entries, {} tasks returned", expected.size(),
                      entries, got.size())};
}

std::string environment_note() {
  return fmt::format("{} hardware threads, compiler {}", std::thread::hardware_concurrency(),
                     __VERSION__);
}

}  // namespace

sim::SimConfig standard_config(sim::SizePreset size, std::uint64_t seed) {
  auto cfg = sim::SimConfig::defaults(size, seed);
  cfg.failures = {{TaskId("cpu_intensive_task_2"), NodeId("worker-2")},
                  {TaskId("memory_intensive_task_3"), NodeId("worker-4")},
                  {TaskId("combined_intensive_task_1"), NodeId("worker-2")}};
  cfg.warning_kinds = {TaskKind::combined_intensive};
  return cfg;
}

std::set<NodeId> failure_nodes(const sim::GroundTruth& gt) {
  std::set<NodeId> out;
  for (const auto& f : gt.failures) out.insert(f.node_id);
  return out;
}

Deployment::Deployment(const sim::GroundTruth& gt, Options options) : workdir_(make_workdir()) {
  ServiceConfig cfg;
  cfg.listen = {"127.0.0.1", 0};
  cfg.ingest = Endpoint{"127.0.0.1", 0};
  cfg.workflow_id = gt.spec.workflow_id.str();
  if (options.with_spec) {
    cfg.spec = workdir_ / "spec.json";
    std::ofstream(*cfg.spec) << nlohmann::json(gt.spec).dump();
  }
  if (options.with_backends) {
    metrics_http_ = std::make_unique<MetricsHttpServer>(metrics_store_);
    logs_http_ = std::make_unique<LogsHttpServer>(log_store_);
    cfg.metrics = Endpoint{"127.0.0.1", metrics_http_->start()};
    cfg.logs = Endpoint{"127.0.0.1", logs_http_->start()};
    HttpMetricsClient mc(*cfg.metrics);
    HttpLogsClient lc(*cfg.logs);
    sim::seed_backends(gt, mc, lc);
    service_ = std::make_unique<ProvenanceService>(cfg);
  } else {
    service_ = std::make_unique<ProvenanceService>(cfg, nullptr, nullptr);
  }
  service_->start();
}

Deployment::~Deployment() {
  service_->stop();
  service_.reset();
  if (metrics_http_) metrics_http_->stop();
  if (logs_http_) logs_http_->stop();
  std::error_code ec;
  std::filesystem::remove_all(workdir_, ec);
}

std::uint64_t Deployment::replay(const std::vector<sim::TraceRecord>& events, const sim::Pacing& pacing) {
  const auto before = service_->pipeline().stats().records;
  const auto sent = sim::emit_to_socket(events, "127.0.0.1", ingest_port(), pacing);
  const auto deadline = Clock::now() + std::chrono::seconds(60);
  while (service_->pipeline().stats().records < before + sent && Clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  if (!service_->wait_idle(std::chrono::seconds(60)))
    throw Error("processor did not catch up with the replayed trace");
  return sent;
}

HttpResult Deployment::get(const std::string& path, const QueryParams& params) const {
  HttpClient client(Endpoint{"127.0.0.1", http_port()});
  return client.get(path, params);
}

bool BenchReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void BenchReport::merge(BenchReport other) {
  for (auto& q : other.queries) queries.push_back(std::move(q));
  for (auto& i : other.ingestion) ingestion.push_back(std::move(i));
  for (auto& c : other.checks) checks.push_back(std::move(c));
  if (environment.empty()) environment = std::move(other.environment);
}

const QueryTiming* BenchReport::timing(const std::string& query, sim::SizePreset size) const {
  for (const auto& q : queries)
    if (q.query == query && q.size == size) return &q;
  return nullptr;
}

nlohmann::json to_json(const BenchReport& r) {
  auto queries = nlohmann::json::array();
  for (const auto& q : r.queries)
    queries.push_back({{"query", q.query},
                       {"request", q.request},
                       {"size", sim::to_string(q.size)},
                       {"runs", q.runs_ms.size()},
                       {"runs_ms", q.runs_ms},
                       {"min_ms", q.min_ms},
                       {"avg_ms", q.avg_ms},
                       {"max_ms", q.max_ms},
                       {"result_count", q.result_count}});
  auto ingestion = nlohmann::json::array();
  for (const auto& i : r.ingestion) {
    auto runs = nlohmann::json::array();
    for (const auto& run : i.runs) runs.push_back({{"records", run.records}, {"latency", to_json(run.latency)}});
    ingestion.push_back({{"size", sim::to_string(i.size)},
                         {"pacing", i.pacing},
                         {"event_count", i.event_count},
                         {"runs", runs}});
  }
  auto checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"queries", queries},
          {"ingestion", ingestion},
          {"checks", checks},
          {"passed", r.passed()},
          {"environment", r.environment}};
}

BenchReport bench_queries(sim::SizePreset size, std::uint64_t seed, int runs, const Progress& progress) {
  BenchReport report;
  report.environment = environment_note();
  const auto gt = sim::generate(standard_config(size, seed));
  say(progress, fmt::format("queries[{}]: {} tasks, {} trace records", label(size), gt.tasks.size(),
                            gt.events.size()));
  Deployment d(gt, {});
  d.replay(gt.events, sim::Pacing{});
  report.checks.push_back(conservation_check(d.service(), "conservation[queries/" + label(size) + "]"));

  const auto abstract = AbstractTaskId("cpu_intensive_task");
  const auto parent = first_instance("memory_intensive_task");

  struct Spec {
    std::string name;
    std::vector<std::pair<std::string, QueryParams>> calls;
  };
  const std::vector<Spec> specs = {
      {"Query 1", {{"/get/workflow/tasks", {{"task_status", "failed"}}}}},
      {"Query 2",
       {{"/get/tasks/CPU", {{"abstract_id", abstract.str()}}},
        {"/get/tasks/RAM", {{"abstract_id", abstract.str()}}}}},
      {"Query 3", {{"/get/tasks/logs", {{"child_of", parent.str()}, {"full_text_query", "warning"}}}}},
  };

  for (const auto& spec : specs) {
    QueryTiming t;
    t.query = spec.name;
    t.size = size;
    for (const auto& [path, params] : spec.calls) {
      std::string q;
      for (const auto& [k, v] : params) q += (q.empty() ? "?" : "&") + k + "=" + v;
      t.request += (t.request.empty() ? "" : " + ") + path + q;
    }
    std::vector<HttpResult> responses;
    for (int i = 0; i < runs; ++i) {
      responses.clear();
      const auto t0 = Clock::now();
      for (const auto& [path, params] : spec.calls) responses.push_back(d.get(path, params));
      t.runs_ms.push_back(elapsed_ms(t0));
    }
    std::vector<nlohmann::json> last;
    for (const auto& res : responses) {
      if (!res.ok()) throw Error(fmt::format("{} -> HTTP {}: {}", spec.name, res.status, res.body));
      last.push_back(res.json().at("results"));
    }
    t.min_ms = *std::min_element(t.runs_ms.begin(), t.runs_ms.end());
    t.max_ms = *std::max_element(t.runs_ms.begin(), t.runs_ms.end());
    t.avg_ms = 0;
    for (double v : t.runs_ms) t.avg_ms += v / static_cast<double>(t.runs_ms.size());
    for (const auto& r : last) t.result_count += r.size();
    say(progress, fmt::format("{}[{}]: avg {:.2f} ms over {} runs", spec.name, label(size), t.avg_ms, runs));

    const auto check_name = fmt::format("{}[{}]", spec.name, label(size));
    if (spec.name == "Query 1") report.checks.push_back(check_query1(gt, last[0], check_name));
    if (spec.name == "Query 2") report.checks.push_back(check_query2(gt, abstract, last[0], last[1], check_name));
    if (spec.name == "Query 3") report.checks.push_back(check_query3(gt, parent, last[0], check_name));
    report.queries.push_back(std::move(t));
  }
  return report;
}

sim::Pacing default_ingestion_pacing(const sim::GroundTruth& gt) {
  if (gt.events.empty()) return {true, 1.0};
  const double span_s = std::chrono::duration<double>(gt.events.back().ts - gt.events.front().ts).count();
  return {true, std::max(1.0, std::round(span_s / 30.0))};
}

BenchReport bench_ingestion(sim::SizePreset size, std::uint64_t seed, int runs,
                            std::optional<sim::Pacing> pacing, const Progress& progress) {
  BenchReport report;
  report.environment = environment_note();
  const auto gt = sim::generate(standard_config(size, seed));
  const auto pace = pacing.value_or(default_ingestion_pacing(gt));
  IngestionResult result;
  result.size = size;
  result.pacing = pace.to_string();
  result.event_count = gt.events.size();

  for (int i = 0; i < runs; ++i) {
    Deployment d(gt, {.with_spec = true, .with_backends = false});
    IngestionRun run;
    run.records = d.replay(gt.events, pace);
    const auto stats = d.get("/stats", {{"samples", "1"}});
    if (!stats.ok()) throw Error("GET /stats failed: " + stats.body);
    const auto samples = stats.json().at("latency_samples_ms").get<std::vector<double>>();
    run.latency = summarize(samples);
    const auto name = fmt::format("ingestion[{}] run {}", label(size), i + 1);
    report.checks.push_back({name, run.latency.p95_ms < 250.0 && run.latency.p50_ms < 100.0,
                             fmt::format("{} events, p50 {:.2f} ms, p95 {:.2f} ms, max {:.2f} ms",
                                         run.latency.count, run.latency.p50_ms, run.latency.p95_ms,
                                         run.latency.max_ms)});
    report.checks.push_back(conservation_check(d.service(), fmt::format("conservation[ingest/{}] run {}", label(size), i + 1)));
    say(progress, report.checks[report.checks.size() - 2].name + ": " + report.checks[report.checks.size() - 2].detail);
    result.runs.push_back(run);
  }
  if (size == sim::SizePreset::large)
    report.checks.push_back({"ingestion_event_count[large]",
                             result.event_count >= 20'000 && result.event_count <= 25'000,
                             fmt::format("{} records", result.event_count)});
  report.ingestion.push_back(std::move(result));
  return report;
}

std::vector<std::pair<std::string, QueryParams>> oracle_requests(const sim::GroundTruth& gt) {
  std::vector<std::pair<std::string, QueryParams>> out;
  const auto mid = gt.events.empty()
                       ? Timestamp{}
                       : gt.events.front().ts + (gt.events.back().ts - gt.events.front().ts) / 2;
  const auto quarter = gt.events.empty()
                           ? Timestamp{}
                           : gt.events.front().ts + (gt.events.back().ts - gt.events.front().ts) / 4;
  const auto mid_s = mid.to_string();
  const auto quarter_s = quarter.to_string();

  out.push_back({"/get/workflow/nodes", {}});
  out.push_back({"/get/workflow/abstract_tasks", {}});
  out.push_back({"/get/workflow/tasks", {}});
  for (const char* s : {"unknown", "queued", "running", "succeeded", "failed"})
    out.push_back({"/get/workflow/tasks", {{"task_status", s}}});
  out.push_back({"/get/workflow/tasks", {{"start", mid_s}}});
  out.push_back({"/get/workflow/tasks", {{"end", mid_s}}});
  out.push_back({"/get/workflow/tasks", {{"start", quarter_s}, {"end", mid_s}}});
  out.push_back({"/get/workflow/tasks", {{"last_status_update", quarter_s}}});
  out.push_back({"/get/workflow/tasks", {{"last_status_update", quarter_s}, {"task_status", "succeeded"}}});

  for (const auto& a : gt.spec.abstract_tasks) {
    const auto id = a.id.str();
    const auto first = concrete_task_id(a.id, 1).str();
    out.push_back({"/get/workflow/tasks", {{"abstract_id", id}}});
    out.push_back({"/get/workflow/tasks", {{"abstract_task", id}, {"task_status", "failed"}}});
    out.push_back({"/get/workflow/tasks", {{"parent_of", first}}});
    out.push_back({"/get/workflow/tasks", {{"child_of", first}}});
    out.push_back({"/get/tasks/CPU", {{"abstract_id", id}}});
    out.push_back({"/get/tasks/RAM", {{"abstract_task", id}}});
    out.push_back({"/get/tasks/RAM", {{"abstract_id", id}, {"step", "30s"}}});
    out.push_back({"/get/tasks/CPU", {{"abstract_id", id}, {"start", quarter_s}, {"end", mid_s}}});
    out.push_back({"/get/tasks/logs", {{"abstract_id", id}}});
    out.push_back({"/get/tasks/logs", {{"child_of", first}, {"full_text_query", "warning"}}});
    out.push_back({"/get/tasks/logs", {{"parent_of", first}, {"full_text_query", "FINISHED"}}});
  }
  for (const auto& n : gt.nodes) {
    out.push_back({"/get/node/tasks", {{"node_id", n.str()}}});
    out.push_back({"/get/node/tasks/" + n.str(), {}});
    out.push_back({"/get/node/tasks/" + n.str(), {{"task_status", "succeeded"}}});
    out.push_back({"/get/workflow/tasks", {{"node_id", n.str()}, {"task_status", "failed"}}});
    out.push_back({"/get/tasks/CPU", {{"node_id", n.str()}, {"task_status", "running"}}});
  }
  out.push_back({"/get/tasks/logs", {{"full_text_query", "WARNING"}}});
  out.push_back({"/get/tasks/logs", {{"full_text_query", ""}, {"task_status", "failed"}}});
  out.push_back({"/get/tasks/CPU", {{"task_status", "failed"}, {"step", "5s"}}});
  out.push_back({"/get/tasks/RAM", {{"start", quarter_s}, {"end", mid_s}, {"step", "20s"}}});

  int i = 0;
  for (const auto& [id, t] : gt.tasks) {
    const auto base = "/get/tasks/" + id.str();
    out.push_back({base, {}});
    out.push_back({base + "/CPU", {}});
    out.push_back({base + "/RAM", {}});
    out.push_back({base + "/logs", {}});
    if (i++ % 10 == 0) {
      const auto window_start = (t.started_at + std::chrono::seconds(12)).to_string();
      const auto window_end = (t.started_at + std::chrono::seconds(31)).to_string();
      out.push_back({base + "/CPU", {{"start", window_start}, {"end", window_end}}});
      out.push_back({base + "/RAM", {{"step", "20s"}}});
      out.push_back({base + "/RAM", {{"step", "7s"}, {"end", window_end}}});
      out.push_back({base + "/logs", {{"full_text_query", "processed"}, {"start", window_start}}});
    }
  }

  out.push_back({"/get/tasks/no_such_task", {}});
  out.push_back({"/get/tasks/no_such_task/CPU", {}});
  out.push_back({"/get/workflow/tasks", {{"child_of", "no_such_task"}}});
  out.push_back({"/get/workflow/tasks", {{"abstract_id", "no_such_abstract"}}});
  out.push_back({"/get/node/tasks/no-such-node", {}});
  return out;
}

namespace {

std::string describe(const std::string& path, const QueryParams& params) {
  std::string q;
  for (const auto& [k, v] : params) q += (q.empty() ? "?" : "&") + k + "=" + v;
  return path + q;
}

std::string clip(const std::string& s, std::size_t n = 600) {
  return s.size() <= n ? s : s.substr(0, n) + "...";
}

/// Compares every request against the oracle; returns mismatch descriptions.
std::vector<std::string> compare_all(Deployment& d, const Oracle& oracle,
                                     const std::vector<std::pair<std::string, QueryParams>>& requests) {
  std::vector<std::string> diffs;
  for (const auto& [path, params] : requests) {
    const auto res = d.get(path, params);
    int expected_status = 200;
    Oracle::Answer expected;
    try {
      const auto req = QueryRequest::from_path(path, params);
      const auto now = res.ok() ? res.json().at("evaluated_at").get<Timestamp>() : Timestamp::now();
      expected = oracle.answer(req, now);
    } catch (const NotFoundError&) {
      expected_status = 404;
    } catch (const ValidationError&) {
      expected_status = 400;
    }
    if (res.status != expected_status) {
      diffs.push_back(fmt::format("{}: HTTP {} (expected {}): {}", describe(path, params), res.status,
                                  expected_status, clip(res.body)));
      continue;
    }
    if (expected_status != 200) continue;
    const auto doc = res.json();
    std::set<std::string> warnings;
    for (const auto& w : doc.at("warnings")) warnings.insert(w.get<std::string>());
    if (doc.at("results") != expected.results) {
      diffs.push_back(fmt::format("{}: results differ\n  expected: {}\n  actual:   {}", describe(path, params),
                                  clip(expected.results.dump()), clip(doc.at("results").dump())));
    } else if (warnings != expected.warnings) {
      diffs.push_back(fmt::format("{}: warnings differ ({} expected, {} returned)", describe(path, params),
                                  expected.warnings.size(), warnings.size()));
    }
  }
  return diffs;
}

}  // namespace

BenchReport verify_oracle(sim::SizePreset size, std::uint64_t seed, const Progress& progress) {
  BenchReport report;
  report.environment = environment_note();
  const auto gt = sim::generate(standard_config(size, seed));
  const auto requests = oracle_requests(gt);
  Deployment d(gt, {});

  const auto cut = gt.events.front().ts + (gt.events.back().ts - gt.events.front().ts) / 2;
  std::vector<sim::TraceRecord> head, tail;
  for (const auto& e : gt.events) (e.ts <= cut ? head : tail).push_back(e);

  auto record = [&](const std::string& phase, const std::vector<std::string>& diffs) {
    const auto name = fmt::format("oracle[{}/{}]", label(size), phase);
    std::string detail = fmt::format("{} requests, {} mismatches", requests.size(), diffs.size());
    if (!diffs.empty()) detail += "; first: " + diffs.front();
    report.checks.push_back({name, diffs.empty(), detail});
    say(progress, name + ": " + detail);
  };

  d.replay(head, sim::Pacing{});
  record("mid-run", compare_all(d, Oracle(gt, cut), requests));
  d.replay(tail, sim::Pacing{});
  record("final", compare_all(d, Oracle(gt), requests));
  report.checks.push_back(conservation_check(d.service(), "conservation[verify/" + label(size) + "]"));
  return report;
}

void add_scaling_checks(BenchReport& report) {
  for (const char* q : {"Query 1", "Query 2", "Query 3"}) {
    const auto* small = report.timing(q, sim::SizePreset::small);
    const auto* large = report.timing(q, sim::SizePreset::large);
    if (!small || !large) continue;
    const double ratio = large->avg_ms / std::max(small->avg_ms, 1e-6);
    report.checks.push_back({fmt::format("scaling[{}]", q), ratio < 100.0 && large->avg_ms < 1000.0,
                             fmt::format("avg small {:.2f} ms, large {:.2f} ms, growth {:.1f}x",
                                         small->avg_ms, large->avg_ms, ratio)});
  }
}

std::string render_text(const BenchReport& r) {
  std::ostringstream out;
  if (!r.queries.empty()) {
    out << "Query response times (ms)\n";
    out << fmt::format("{:<9} {:<7} {:>5} {:>10} {:>10} {:>10} {:>8}\n", "query", "size", "runs",
                       "min", "avg", "max", "results");
    for (const auto& q : r.queries)
      out << fmt::format("{:<9} {:<7} {:>5} {:>10.2f} {:>10.2f} {:>10.2f} {:>8}\n", q.query,
                         sim::to_string(q.size), q.runs_ms.size(), q.min_ms, q.avg_ms, q.max_ms,
                         q.result_count);
    out << "\n";
  }
  if (!r.ingestion.empty()) {
    out << "Ingestion latency from event observation to eDAG availability (ms)\n";
    out << fmt::format("{:<7} {:<14} {:>4} {:>8} {:>10} {:>10} {:>10}\n", "size", "pacing", "run",
                       "events", "p50", "p95", "max");
    for (const auto& i : r.ingestion)
      for (std::size_t k = 0; k < i.runs.size(); ++k)
        out << fmt::format("{:<7} {:<14} {:>4} {:>8} {:>10.2f} {:>10.2f} {:>10.2f}\n",
                           sim::to_string(i.size), i.pacing, k + 1, i.runs[k].records,
                           i.runs[k].latency.p50_ms, i.runs[k].latency.p95_ms, i.runs[k].latency.max_ms);
    out << "\n";
  }
  if (!r.checks.empty()) {
    out << "Checks\n";
    for (const auto& c : r.checks)
      out << (c.passed ? "  PASS " : "  FAIL ") << c.name << ": " << c.detail << "\n";
  }
  if (!r.environment.empty()) out << "\nEnvironment: " << r.environment << "\n";
  return out.str();
}

}  // namespace wfprov::bench
