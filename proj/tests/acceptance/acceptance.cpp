// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "support/traces.hpp"
#include "wfprov/backends/counting.hpp"
#include "wfprov/bench/harness.hpp"
#include "wfprov/model/json.hpp"
#include "wfprov/query/service.hpp"
#include "wfprov/sim/emitter.hpp"
#include "wfprov/sim/generator.hpp"

using namespace wfprov;
using namespace std::chrono_literals;
using sim::SizePreset;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void expect(bool ok, std::string note) {
    if (!ok) passed = false;
    if (!ok || notes.size() < 6) notes.push_back((ok ? "ok: " : "FAILED: ") + std::move(note));
  }
};

std::vector<bench::Check> g_conservation;

void keep_conservation(const bench::BenchReport& r) {
  for (const auto& c : r.checks)
    if (c.name.starts_with("conservation")) g_conservation.push_back(c);
}

bench::Check conservation(ProvenanceService& svc, const std::string& name) {
  const auto c = svc.processor().counters();
  const auto m = svc.pipeline().stats();
  const auto b = svc.buffer().stats();
  const bool ok = c.applied + c.duplicate + c.stale + c.orphaned + c.irrelevant + c.pending == c.dequeued &&
                  m.records == m.skipped + m.dedup_dropped + m.buffer_dropped + m.enqueued &&
                  b.accepted == b.delivered + b.buffered && c.dequeued == b.delivered;
  return {name, ok,
          fmt::format("dequeued={} applied={} duplicate={} stale={} orphaned={} irrelevant={} pending={} "
                      "records={} skipped={} dedup={} dropped={} enqueued={}",
                      c.dequeued, c.applied, c.duplicate, c.stale, c.orphaned, c.irrelevant, c.pending,
                      m.records, m.skipped, m.dedup_dropped, m.buffer_dropped, m.enqueued)};
}

void report_checks(Outcome& o, const bench::BenchReport& r, const std::function<bool(const std::string&)>& pick) {
  for (const auto& c : r.checks)
    if (pick(c.name)) o.expect(c.passed, c.name + " " + c.detail);
}

// 1. Every endpoint against the brute-force oracle at 10 and 100 tasks.
Outcome oracle_equivalence() {
  Outcome o;
  for (auto size : {SizePreset::small, SizePreset::medium}) {
    const auto r = bench::verify_oracle(size, kSeed);
    keep_conservation(r);
    report_checks(o, r, [](const std::string& n) { return n.starts_with("oracle"); });
    bool any = false;
    for (const auto& c : r.checks) any |= c.name.starts_with("oracle");
    o.expect(any, fmt::format("oracle checks ran for {}", sim::to_string(size)));
  }
  return o;
}

// 2. Order insensitivity: exhaustive 3-event interleavings and 1000
// randomized traces of at most 50 events.
Outcome order_insensitivity() {
  Outcome o;
  const std::vector<CanonicalEvent> vocab = {
      test::task_event(EventKind::task_queued, "a_1", 100, "q"),
      test::exec_event(EventKind::exec_assigned, "pod-a", 150, "as", "a_1"),
      test::exec_event(EventKind::exec_scheduled, "pod-a", 180, "sc", std::nullopt, "n1"),
      test::task_event(EventKind::task_running, "a_1", 200, "r"),
      test::exec_event(EventKind::exec_failed, "pod-a", 250, "xf", std::nullopt, "n1"),
      test::task_event(EventKind::task_succeeded, "a_1", 300, "s"),
      test::task_event(EventKind::task_failed, "a_1", 300, "f"),
      test::task_event(EventKind::task_failed, "a_1", 400, "f2"),
      test::exec_event(EventKind::exec_scheduled, "stray", 120, "orphan", std::nullopt, "n2"),
  };
  const auto spec = test::tiny_spec();
  std::size_t runs = 0, bad = 0;
  for (const auto& a : vocab)
    for (const auto& b : vocab)
      for (const auto& c : vocab) {
        std::vector<CanonicalEvent> trace = {a, b, c};
        std::stable_sort(trace.begin(), trace.end(),
                         [](const auto& x, const auto& y) { return x.source_timestamp < y.source_timestamp; });
        test::stamp_sequence(trace);
        const auto ref = test::apply_all(spec, trace, 1).dag;
        for (const auto& perm : test::interleavings(trace)) {
          ++runs;
          if (!test::apply_all(spec, perm, 1).dag.same_state(ref)) ++bad;
        }
      }
  o.expect(bad == 0, fmt::format("exhaustive: {} of {} interleavings diverged", bad, runs));

  std::mt19937_64 rng(20241211);
  std::size_t rbad = 0, max_len = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto t = test::random_trace(rng, 50);
    max_len = std::max(max_len, t.events.size());
    const auto ref = test::apply_all(t.spec, t.events, 1).dag;
    std::array<std::vector<CanonicalEvent>, kSourceCount> lanes;
    for (const auto& e : t.events) lanes[source_index(e.source)].push_back(e);
    std::vector<CanonicalEvent> merged;
    std::array<std::size_t, kSourceCount> pos{};
    while (merged.size() < t.events.size()) {
      const auto left0 = lanes[0].size() - pos[0], left1 = lanes[1].size() - pos[1];
      const std::size_t lane = std::uniform_int_distribution<std::size_t>(0, left0 + left1 - 1)(rng) < left0 ? 0 : 1;
      merged.push_back(lanes[lane][pos[lane]++]);
    }
    // Redelivery of a random prefix on top.
    const auto extra = std::uniform_int_distribution<std::size_t>(0, merged.size())(rng);
    auto with_dups = merged;
    with_dups.insert(with_dups.end(), merged.begin(), merged.begin() + extra);
    const auto got = test::apply_all(t.spec, with_dups, std::uniform_int_distribution<std::size_t>(1, 64)(rng));
    if (!got.dag.same_state(ref) || !got.counters.conserved()) ++rbad;
  }
  o.expect(rbad == 0 && max_len <= 50, fmt::format("randomized: {} of 1000 traces diverged (longest {} events)", rbad, max_len));
  return o;
}

struct Answers {
  sim::GroundTruth gt;
  nlohmann::json q1, q2_cpu, q2_ram, q3;
  std::string q2_abstract;
  TaskId q3_parent;
};

// Query 1 to 3 on the medium run, after a full replay through a deployment.
Answers medium_answers() {
  Answers a;
  a.gt = sim::generate(bench::standard_config(SizePreset::medium, kSeed));
  bench::Deployment d(a.gt, {});
  d.replay(a.gt.events, sim::Pacing{});
  g_conservation.push_back(conservation(d.service(), "conservation[acceptance/medium]"));
  a.q2_abstract = "memory_intensive_task";
  a.q3_parent = TaskId("memory_intensive_task_1");
  a.q1 = d.get("/get/workflow/tasks", {{"task_status", "failed"}}).json();
  a.q2_cpu = d.get("/get/tasks/CPU", {{"abstract_id", a.q2_abstract}}).json();
  a.q2_ram = d.get("/get/tasks/RAM", {{"abstract_task", a.q2_abstract}}).json();
  a.q3 = d.get("/get/tasks/logs", {{"child_of", a.q3_parent.str()}, {"full_text_query", "warning"}}).json();
  return a;
}

// 3. Failed tasks' node set equals the injection plan.
Outcome query1(const Answers& a) {
  Outcome o;
  const auto cfg = bench::standard_config(SizePreset::medium, kSeed);
  std::set<std::string> planned_nodes, planned_tasks;
  for (const auto& f : cfg.failures) {
    planned_nodes.insert(f.node_id.str());
    planned_tasks.insert(f.task_id.str());
  }
  std::set<std::string> nodes, tasks;
  for (const auto& r : a.q1.at("results")) {
    if (r.contains("node_id") && r.at("node_id").is_string()) nodes.insert(r.at("node_id").get<std::string>());
    tasks.insert(r.at("task_id").get<std::string>());
  }
  o.expect(planned_nodes.size() == 2, fmt::format("plan spans {} nodes", planned_nodes.size()));
  o.expect(nodes == planned_nodes, fmt::format("node set {} vs plan {}", nlohmann::json(nodes).dump(),
                                               nlohmann::json(planned_nodes).dump()));
  o.expect(tasks == planned_tasks, fmt::format("{} failed tasks", tasks.size()));
  return o;
}

// 4. Per-instance series equal the simulator's samples under the
// last-sample-at-or-before alignment with a 2 x step staleness bound.
Outcome query2(const Answers& a) {
  Outcome o;
  const auto step = std::chrono::duration_cast<std::chrono::microseconds>(10s).count();
  for (auto [metric, doc] : {std::pair{MetricKind::cpu_cores, &a.q2_cpu}, {MetricKind::mem_bytes, &a.q2_ram}}) {
    std::map<std::string, const nlohmann::json*> by_task;
    for (const auto& r : doc->at("results")) by_task[r.at("task_id").get<std::string>()] = &r;
    std::size_t instances = 0, points = 0, mismatched = 0;
    for (const auto& [id, t] : a.gt.tasks) {
      if (t.abstract_task_id.str() != a.q2_abstract) continue;
      ++instances;
      const auto samples = a.gt.series(t.exec_object_id, metric);
      nlohmann::json expected = nlohmann::json::array();
      std::int64_t g = t.started_at.micros();
      if (g % step) g += step - g % step;
      std::size_t raw_in_window = 0;
      for (const auto& s : samples) raw_in_window += t.started_at <= s.timestamp && s.timestamp <= t.ended_at;
      for (; g <= t.ended_at.micros(); g += step) {
        const MetricPoint* best = nullptr;
        for (const auto& s : samples)
          if (s.timestamp.micros() <= g) best = &s;
        if (best && g - best->timestamp.micros() <= 2 * step)
          expected.push_back({Timestamp::from_micros(g), best->value});
      }
      const auto it = by_task.find(id.str());
      if (it == by_task.end()) {
        ++mismatched;
        continue;
      }
      const auto& got = it->second->at("series");
      points += got.size();
      if (got != expected || got.size() != raw_in_window) ++mismatched;
    }
    o.expect(instances > 0 && by_task.size() == instances && mismatched == 0,
             fmt::format("{}: {} instances, {} points, {} mismatched", to_string(metric), instances, points, mismatched));
  }
  return o;
}

// 5. Exactly the injected children's warning entries.
Outcome query3(const Answers& a) {
  Outcome o;
  std::set<std::tuple<std::string, std::string, std::string>> expected, got;
  std::size_t children = 0;
  for (const auto& [id, t] : a.gt.tasks) {
    if (std::find(t.parents.begin(), t.parents.end(), a.q3_parent) == t.parents.end()) continue;
    ++children;
    for (const auto& l : a.gt.logs)
      if (l.exec_object_id == t.exec_object_id && contains_ci(l.message, "warning"))
        expected.insert({id.str(), l.timestamp.to_string(), l.message});
  }
  for (const auto& r : a.q3.at("results"))
    for (const auto& e : r.at("entries"))
      got.insert({r.at("task_id").get<std::string>(), e.at("timestamp").get<std::string>(),
                  e.at("message").get<std::string>()});
  o.expect(children > 0 && !expected.empty(), fmt::format("{} children, {} injected warnings", children, expected.size()));
  o.expect(got == expected, fmt::format("{} entries returned, {} expected", got.size(), expected.size()));
  return o;
}

// 6. Growth from 10 to 1000 tasks below 100x, large average below 1 s.
Outcome scaling(bench::BenchReport& all) {
  Outcome o;
  for (auto size : {SizePreset::small, SizePreset::medium, SizePreset::large}) {
    auto r = bench::bench_queries(size, kSeed, 3);
    keep_conservation(r);
    all.merge(std::move(r));
  }
  bench::add_scaling_checks(all);
  for (const char* q : {"Query 1", "Query 2", "Query 3"}) {
    const auto* s = all.timing(q, SizePreset::small);
    const auto* l = all.timing(q, SizePreset::large);
    if (!s || !l) {
      o.expect(false, std::string(q) + " not measured");
      continue;
    }
    const double ratio = l->avg_ms / std::max(s->avg_ms, 1e-6);
    o.expect(ratio < 100.0, fmt::format("{}: small {:.2f} ms, large {:.2f} ms, growth {:.1f}x", q, s->avg_ms, l->avg_ms, ratio));
    o.expect(l->avg_ms < 1000.0, fmt::format("{}: large avg {:.2f} ms < 1000 ms", q, l->avg_ms));
  }
  return o;
}

// 7. Five real-time-scaled replays of the large run.
Outcome ingestion(bench::BenchReport& all) {
  Outcome o;
  auto r = bench::bench_ingestion(SizePreset::large, kSeed, 5);
  keep_conservation(r);
  std::size_t runs = 0;
  for (const auto& ing : r.ingestion) {
    o.expect(ing.event_count >= 20'000 && ing.event_count <= 25'000,
             fmt::format("{} events, pacing {}", ing.event_count, ing.pacing));
    for (const auto& run : ing.runs) {
      ++runs;
      o.expect(run.latency.p95_ms < 250.0 && run.latency.p50_ms < 100.0,
               fmt::format("run {}: p50 {:.2f} ms, p95 {:.2f} ms, max {:.2f} ms over {} events", runs,
                           run.latency.p50_ms, run.latency.p95_ms, run.latency.max_ms, run.latency.count));
    }
  }
  o.expect(runs == 5, fmt::format("{} runs", runs));
  all.merge(std::move(r));
  return o;
}

// 8. One backend query per kind per federated request at 1, 10 and 333
// instances, counted by instrumented backends behind a live service.
Outcome federation() {
  Outcome o;
  struct Case {
    SizePreset size;
    std::string path;
    QueryParams params;
    std::size_t instances;
  };
  const std::vector<Case> cases = {
      {SizePreset::large, "/get/tasks/memory_intensive_task_7", {}, 1},
      {SizePreset::small, "/get/tasks", {}, 10},
      {SizePreset::large, "/get/tasks", {{"abstract_id", "memory_intensive_task"}}, 333},
  };
  std::map<SizePreset, sim::GroundTruth> truths;
  for (const auto& c : cases) {
    auto& gt = truths.try_emplace(c.size, sim::generate(bench::standard_config(c.size, kSeed))).first->second;
    InMemoryMetricsStore m;
    InMemoryLogStore l;
    sim::seed_backends(gt, m, l);
    CountingMetricsBackend cm(m);
    CountingLogsBackend cl(l);
    ServiceConfig cfg;
    cfg.listen = {"127.0.0.1", 0};
    cfg.workflow_id = gt.spec.workflow_id.str();
    const auto spec_path = std::filesystem::temp_directory_path() / ("wfprov_accept_spec_" + std::to_string(c.instances) + ".json");
    {
      std::ofstream out(spec_path);
      out << nlohmann::json(gt.spec).dump();
    }
    cfg.spec = spec_path;
    ProvenanceService svc(cfg, &cm, &cl);
    svc.start();
    sim::emit_to_pipeline(gt.events, svc.pipeline(), sim::Pacing{});
    svc.wait_idle(60s);
    HttpClient http(Endpoint{"127.0.0.1", svc.http_port()});
    for (const char* kind : {"CPU", "RAM", "logs"}) {
      cm.reset();
      cl.reset();
      const auto before_m = cm.queries(), before_l = cl.queries();
      const auto body = http.get(c.path + "/" + kind, c.params).json();
      const auto dm = cm.queries() - before_m, dl = cl.queries() - before_l;
      const bool logs = std::string(kind) == "logs";
      const auto ids = logs ? cl.last_query().exec_object_ids.size() : cm.last_query().exec_object_ids.size();
      const auto results = body.at("results").size();
      // Log results list only tasks with entries; every instance logs.
      o.expect((logs ? dl == 1 && dm == 0 : dm == 1 && dl == 0) && ids == c.instances && results == c.instances,
               fmt::format("{} instances, {}: metrics queries {}, log queries {}, ids {}, results {}", c.instances,
                           kind, dm, dl, ids, results));
    }
    // Local routes stay local.
    cm.reset();
    cl.reset();
    http.get("/get/workflow/tasks", {{"task_status", "failed"}});
    http.get("/get/workflow/nodes");
    o.expect(cm.queries() + cl.queries() == 0, "local routes issued no backend queries");
    g_conservation.push_back(conservation(svc, fmt::format("conservation[federation/{}]", c.instances)));
    svc.stop();
    std::filesystem::remove(spec_path);
  }
  return o;
}

// 9. Every end-to-end run above balanced its counters.
Outcome conservation_summary() {
  Outcome o;
  for (const auto& c : g_conservation) o.expect(c.passed, c.name + " " + c.detail);
  o.expect(g_conservation.size() >= 8, fmt::format("{} runs checked", g_conservation.size()));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  bench::BenchReport report;
  std::optional<Answers> answers;
  auto with_answers = [&](auto fn) {
    return [&, fn] {
      if (!answers) answers = medium_answers();
      return fn(*answers);
    };
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence (10 and 100 tasks)", oracle_equivalence},
      {2, "order insensitivity (exhaustive + 1000 randomized)", order_insensitivity},
      {3, "query 1: failed tasks on the injected nodes", with_answers(query1)},
      {4, "query 2: per-instance CPU/RAM series", with_answers(query2)},
      {5, "query 3: children's warning log entries", with_answers(query3)},
      {6, "scaling: growth < 100x, large avg < 1 s", [&] { return scaling(report); }},
      {7, "ingestion: large, 5 runs, p95 < 250 ms, p50 < 100 ms", [&] { return ingestion(report); }},
      {8, "federation minimality (1, 10, 333 instances)", federation},
      {9, "conservation", conservation_summary},
  };

  int failed = 0;
  std::vector<std::string> lines;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    const auto line = fmt::format("[{}] criterion {}: {} ({:.1f} s)", o.passed ? "PASS" : "FAIL", c.id, c.name, secs);
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
    failed += !o.passed;
  }
  std::printf("\n%s\n", bench::render_text(report).c_str());
  std::printf("summary:\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
