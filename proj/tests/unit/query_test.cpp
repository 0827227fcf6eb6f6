#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support/traces.hpp"
#include "wfprov/backends/counting.hpp"
#include "wfprov/edag/edag_store.hpp"
#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"
#include "wfprov/query/config.hpp"
#include "wfprov/query/engine.hpp"
#include "wfprov/query/planner.hpp"
#include "wfprov/query/request.hpp"
#include "wfprov/query/service.hpp"

using namespace wfprov;
using namespace wfprov::test;
using namespace std::chrono_literals;

namespace {

using Params = std::multimap<std::string, std::string>;

TaskUpdate run(std::string pod, std::string node, std::int64_t start_ms, std::optional<std::pair<TaskStatus, std::int64_t>> end) {
  TaskUpdate u;
  u.binding = std::make_pair(ExecObjectId(pod), at_ms(start_ms - 1000));
  u.placement = std::make_pair(ExecObjectId(pod), NodeId(node));
  u.started_at = at_ms(start_ms);
  u.status = StatusChange{TaskStatus::running, at_ms(start_ms), StatusOrigin::engine};
  if (end) {
    u.status = StatusChange{end->first, at_ms(end->second), StatusOrigin::engine};
    u.ended_at = at_ms(end->second);
  }
  return u;
}

// a_1 ran on n1 from 10 s to 40 s, a_2 on n2 from 15 s to 30 s and failed,
// b_1 is queued only.
struct Fixture {
  EDagStore store{EDag::init_from_spec(tiny_spec())};
  InMemoryMetricsStore metrics;
  InMemoryLogStore logs;
  CountingMetricsBackend counting_metrics{metrics};
  CountingLogsBackend counting_logs{logs};
  QueryEngine engine{store, &counting_metrics, &counting_logs};

  Fixture() {
    store.write([](EDag& d) {
      d.apply_attrs(TaskId("a_1"), run("pod-a1", "n1", 10'000, std::make_pair(TaskStatus::succeeded, 40'000)), "1");
      d.apply_attrs(TaskId("a_2"), run("pod-a2", "n2", 15'000, std::make_pair(TaskStatus::failed, 30'000)), "2");
      TaskUpdate q;
      q.status = StatusChange{TaskStatus::queued, at_ms(41'000), StatusOrigin::engine};
      d.apply_attrs(TaskId("b_1"), q, "3");
    });
    std::vector<MetricSample> samples;
    for (int s = 0; s <= 60; s += 10) {
      samples.push_back({ExecObjectId("pod-a1"), MetricKind::cpu_cores, at_ms(s * 1000), 0.9});
      samples.push_back({ExecObjectId("pod-a2"), MetricKind::cpu_cores, at_ms(s * 1000), 0.2});
      samples.push_back({ExecObjectId("pod-a1"), MetricKind::mem_bytes, at_ms(s * 1000), 1e8});
    }
    metrics.ingest(samples);
    logs.ingest({{ExecObjectId("pod-a1"), at_ms(20'000), LogLevel::warning, "warning: memory usage above 90% of limit"},
                 {ExecObjectId("pod-a1"), at_ms(50'000), LogLevel::warning, "warning after the end"},
                 {ExecObjectId("pod-a2"), at_ms(20'000), LogLevel::info, "progress 50%"}});
  }

  nlohmann::json get(const std::string& path, const Params& params = {}) {
    return engine.execute(QueryRequest::from_path(path, params));
  }
  std::uint64_t backend_calls() const { return counting_metrics.queries() + counting_logs.queries(); }
};

std::vector<std::string> task_ids(const nlohmann::json& results) {
  std::vector<std::string> out;
  for (const auto& r : results) out.push_back(r.at("task_id").get<std::string>());
  return out;
}

}  // namespace

TEST(QueryRequest, RoutesAndForms) {
  EXPECT_EQ(QueryRequest::from_path("/get/tasks/a_1", {}).route, Route::task_details);
  EXPECT_EQ(QueryRequest::from_path("/get/workflow/nodes", {}).route, Route::workflow_nodes);
  EXPECT_EQ(QueryRequest::from_path("/get/workflow/abstract_tasks", {}).route, Route::workflow_abstract_tasks);
  EXPECT_EQ(QueryRequest::from_path("/get/workflow/tasks", {}).route, Route::workflow_tasks);
  const auto cpu = QueryRequest::from_path("/get/tasks/a_1/CPU", {});
  EXPECT_EQ(cpu.route, Route::task_cpu);
  EXPECT_EQ(cpu.path_id, "a_1");
  const auto ram = QueryRequest::from_path("/get/tasks/RAM", {{"abstract_task", "a"}});
  EXPECT_EQ(ram.route, Route::task_ram);
  EXPECT_FALSE(ram.path_id);
  EXPECT_EQ(ram.param("abstract_id"), "a");
  EXPECT_EQ(QueryRequest::from_path("/get/tasks/logs", {{"child_of", "a_1"}}).route, Route::task_logs);
  const auto node_q = QueryRequest::from_path("/get/node/tasks/", {{"node_id", "n1"}});
  EXPECT_EQ(node_q.route, Route::node_tasks);
  const auto node_p = QueryRequest::from_path("/get/node/tasks/n1", {});
  EXPECT_EQ(node_p.path_id, "n1");
  EXPECT_THROW(QueryRequest::from_path("/get/nothing", {}), NotFoundError);
  EXPECT_TRUE(is_federated(Route::task_logs));
  EXPECT_FALSE(is_federated(Route::workflow_tasks));
}

TEST(QueryRequest, UnknownParameterListsAllowed) {
  try {
    QueryRequest::from_path("/get/workflow/tasks", {{"colour", "red"}});
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("colour"), std::string::npos);
    EXPECT_NE(msg.find("task_status"), std::string::npos);
  }
  EXPECT_THROW(QueryRequest::from_path("/get/tasks/a_1/CPU", {{"abstract_id", "a"}}), ValidationError);
  EXPECT_THROW(QueryRequest::from_path("/get/tasks/a_1", {{"start", "2024-12-11T17:00:00Z"}}), ValidationError);
  EXPECT_THROW(QueryRequest::from_path("/get/workflow/tasks", {{"abstract_id", "a"}, {"abstract_task", "b"}}),
               ValidationError);
  EXPECT_THROW(QueryRequest::from_path("/get/node/tasks/", {}), ValidationError);
}

TEST(FilterParams, ParsesAndRejects) {
  const auto ok = FilterParams::from(QueryRequest::from_path(
      "/get/workflow/tasks", {{"task_status", "task_failed"}, {"start", "2024-12-11 17:00:00 UTC"}}));
  EXPECT_EQ(ok.task_status, TaskStatus::failed);
  EXPECT_EQ(ok.start, at_ms(0));
  EXPECT_THROW(FilterParams::from(QueryRequest::from_path("/get/workflow/tasks", {{"task_status", "done"}})),
               ValidationError);
  EXPECT_THROW(FilterParams::from(QueryRequest::from_path("/get/workflow/tasks", {{"start", "noon"}})),
               ValidationError);
  EXPECT_THROW(FilterParams::from(QueryRequest::from_path(
                   "/get/workflow/tasks", {{"start", "2024-12-11T18:00:00Z"}, {"end", "2024-12-11T17:00:00Z"}})),
               ValidationError);
  EXPECT_THROW(FilterParams::from(QueryRequest::from_path("/get/tasks/CPU", {{"step", "0s"}})), ValidationError);
}

TEST(QueryEngine, LocalRoutesNeverTouchBackends) {
  Fixture f;
  const auto failed = f.get("/get/workflow/tasks", {{"task_status", "failed"}});
  EXPECT_EQ(task_ids(failed.at("results")), std::vector<std::string>{"a_2"});
  EXPECT_EQ(failed.at("results")[0].at("node_id"), "n2");
  EXPECT_EQ(task_ids(f.get("/get/workflow/tasks", {{"abstract_id", "a"}}).at("results")),
            (std::vector<std::string>{"a_1", "a_2"}));
  EXPECT_EQ(task_ids(f.get("/get/workflow/tasks", {{"child_of", "a_1"}}).at("results")), std::vector<std::string>{"b_1"});
  EXPECT_EQ(task_ids(f.get("/get/workflow/tasks", {{"parent_of", "b_1"}, {"task_status", "succeeded"}}).at("results")),
            std::vector<std::string>{"a_1"});
  EXPECT_EQ(task_ids(f.get("/get/workflow/tasks", {{"last_status_update", "2024-12-11T17:00:35Z"}}).at("results")),
            (std::vector<std::string>{"a_1", "b_1"}));
  EXPECT_EQ(task_ids(f.get("/get/node/tasks/", {{"node_id", "n1"}}).at("results")), std::vector<std::string>{"a_1"});
  EXPECT_EQ(f.get("/get/node/tasks/n2").at("results").size(), 1u);
  EXPECT_EQ(f.get("/get/workflow/nodes").at("results").size(), 2u);
  const auto abs = f.get("/get/workflow/abstract_tasks").at("results");
  ASSERT_EQ(abs.size(), 2u);
  EXPECT_EQ(abs[0].at("task_count"), 2);
  const auto details = f.get("/get/tasks/a_1").at("results");
  ASSERT_EQ(details.size(), 1u);
  EXPECT_EQ(details[0].at("exec_object_id"), "pod-a1");
  EXPECT_EQ(f.backend_calls(), 0u);
}

TEST(QueryEngine, UnknownReferencesAreNotFound) {
  Fixture f;
  EXPECT_THROW(f.get("/get/workflow/tasks", {{"child_of", "ghost"}}), NotFoundError);
  EXPECT_THROW(f.get("/get/tasks/ghost"), NotFoundError);
  EXPECT_THROW(f.get("/get/tasks/CPU", {{"abstract_id", "ghost"}}), NotFoundError);
  // A leaf has no children: empty, not an error.
  EXPECT_TRUE(f.get("/get/tasks/logs", {{"child_of", "b_1"}}).at("results").empty());
}

TEST(QueryEngine, MetricSeriesPerInstanceWithinWindow) {
  Fixture f;
  const auto r = f.get("/get/tasks/CPU", {{"abstract_id", "a"}});
  EXPECT_EQ(f.counting_metrics.queries(), 1u);
  EXPECT_EQ(f.counting_logs.queries(), 0u);
  const auto& results = r.at("results");
  ASSERT_EQ(results.size(), 2u);
  // a_1: grid 10..40 s, a_2: 20..30 s.
  EXPECT_EQ(results[0].at("series").size(), 4u);
  for (const auto& pt : results[0].at("series")) EXPECT_EQ(pt[1], 0.9);
  EXPECT_EQ(results[1].at("series").size(), 2u);
  for (const auto& pt : results[1].at("series")) EXPECT_EQ(pt[1], 0.2);
  const auto q = f.counting_metrics.last_query();
  EXPECT_EQ(q.exec_object_ids.size(), 2u);
  EXPECT_EQ(q.interval, TimeInterval::make(at_ms(10'000), at_ms(40'000)));

  // Path form equals the collection form narrowed to that task.
  const auto path = f.get("/get/tasks/a_2/CPU");
  EXPECT_EQ(path.at("results")[0], results[1]);

  // Explicit bounds intersect the task's own interval.
  const auto clipped = f.get("/get/tasks/a_1/CPU", {{"start", "2024-12-11T17:00:25Z"}});
  EXPECT_EQ(clipped.at("results")[0].at("series").size(), 2u);
  EXPECT_EQ(f.get("/get/tasks/a_1/RAM").at("results")[0].at("series").size(), 4u);
}

TEST(QueryEngine, TaskThatNeverRanGetsWarning) {
  Fixture f;
  const auto r = f.get("/get/tasks/b_1/CPU");
  EXPECT_TRUE(r.at("results")[0].at("series").empty());
  ASSERT_EQ(r.at("warnings").size(), 1u);
  EXPECT_NE(r.at("warnings")[0].get<std::string>().find("no execution interval"), std::string::npos);
  EXPECT_EQ(f.backend_calls(), 0u);
}

TEST(QueryEngine, LogsGroupedPerTaskAndFiltered) {
  Fixture f;
  const auto r = f.get("/get/tasks/logs", {{"parent_of", "b_1"}, {"full_text_query", "WARNING"}});
  EXPECT_EQ(f.counting_logs.queries(), 1u);
  const auto& results = r.at("results");
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].at("task_id"), "a_1");
  // The entry after a_1 finished is outside its window.
  ASSERT_EQ(results[0].at("entries").size(), 1u);
  EXPECT_EQ(results[0].at("entries")[0].at("level"), "warning");

  const auto all = f.get("/get/tasks/logs", {{"abstract_id", "a"}, {"full_text_query", ""}});
  EXPECT_EQ(all.at("results").size(), 2u);
}

TEST(QueryEngine, BackendFailureYieldsPartialResult) {
  EDagStore store(EDag::init_from_spec(tiny_spec()));
  store.write([](EDag& d) { d.apply_attrs(TaskId("a_1"), run("pod-a1", "n1", 10'000, std::nullopt), "1"); });
  UnreachableMetricsBackend down;
  InMemoryLogStore logs;
  QueryEngine engine(store, &down, nullptr);
  const auto r = engine.execute(QueryRequest::from_path("/get/tasks/CPU", {{"abstract_id", "a"}}));
  ASSERT_EQ(r.at("results").size(), 2u);
  EXPECT_TRUE(r.at("results")[0].at("series").empty());
  bool saw = false;
  for (const auto& w : r.at("warnings")) saw |= w.get<std::string>().find("metrics backend failed") != std::string::npos;
  EXPECT_TRUE(saw);
  const auto l = engine.execute(QueryRequest::from_path("/get/tasks/logs", {{"abstract_id", "a"}}));
  EXPECT_TRUE(l.at("results").empty());
  EXPECT_NE(l.at("warnings").dump().find("logs backend not configured"), std::string::npos);
}

TEST(QueryEngine, ResponseShape) {
  Fixture f;
  const auto r = f.get("/get/workflow/tasks", {{"abstract_task", "a"}});
  for (const char* k : {"request", "evaluated_at", "edag_version", "results", "warnings", "timing"})
    EXPECT_TRUE(r.contains(k)) << k;
  EXPECT_TRUE(r.at("timing").contains("total_ms"));
  EXPECT_EQ(r.at("edag_version"), f.store.version());
}

// One query per backend kind regardless of how many tasks the request spans.
TEST(QueryEngine, FederationMinimality) {
  for (int fanout : {1, 10, 333}) {
    WorkflowSpec spec;
    spec.workflow_id = kWorkflow;
    spec.abstract_tasks = {{AbstractTaskId("wide"), TaskKind::combined_intensive, fanout}};
    EDagStore store(EDag::init_from_spec(spec));
    store.write([&](EDag& d) {
      for (int i = 1; i <= fanout; ++i)
        d.apply_attrs(concrete_task_id(AbstractTaskId("wide"), i),
                      run("pod-" + std::to_string(i), "n1", 1000 + i, std::make_pair(TaskStatus::succeeded, 60'000)),
                      "e" + std::to_string(i));
    });
    InMemoryMetricsStore m;
    InMemoryLogStore l;
    CountingMetricsBackend cm(m);
    CountingLogsBackend cl(l);
    QueryEngine engine(store, &cm, &cl);
    engine.execute(QueryRequest::from_path("/get/tasks/CPU", {{"abstract_id", "wide"}}));
    EXPECT_EQ(cm.queries(), 1u) << fanout;
    EXPECT_EQ(cm.last_query().exec_object_ids.size(), static_cast<std::size_t>(fanout));
    engine.execute(QueryRequest::from_path("/get/tasks/RAM", {{"abstract_id", "wide"}}));
    EXPECT_EQ(cm.queries(), 2u) << fanout;
    engine.execute(QueryRequest::from_path("/get/tasks/logs", {{"abstract_id", "wide"}, {"full_text_query", "warning"}}));
    EXPECT_EQ(cl.queries(), 1u) << fanout;
    EXPECT_EQ(cl.last_query().exec_object_ids.size(), static_cast<std::size_t>(fanout));
  }
}

TEST(Planner, PureAndCoversTargets) {
  Fixture f;
  const auto req = QueryRequest::from_path("/get/tasks/logs", {{"abstract_id", "a"}, {"end", "2024-12-11T17:00:20Z"}});
  const auto now = at_ms(100'000);
  const auto p1 = f.store.read([&](const EDag& d) { return plan(req, d, now, 10s); });
  const auto p2 = f.store.read([&](const EDag& d) { return plan(req, d, now, 10s); });
  ASSERT_TRUE(p1.log_query);
  EXPECT_EQ(p1.log_query->exec_object_ids, p2.log_query->exec_object_ids);
  EXPECT_EQ(p1.log_query->interval, TimeInterval::make(at_ms(10'000), at_ms(20'000)));
  for (const auto& t : p1.targets) {
    ASSERT_TRUE(t.window);
    EXPECT_TRUE(std::find(p1.log_query->exec_object_ids.begin(), p1.log_query->exec_object_ids.end(),
                          *t.exec_object_id) != p1.log_query->exec_object_ids.end());
    EXPECT_LE(p1.log_query->interval.start, t.window->start);
    EXPECT_GE(p1.log_query->interval.end, t.window->end);
  }
  EXPECT_FALSE(p1.metric_query);
}

TEST(QueryService, HttpStatusCodes) {
  Fixture f;
  QueryService svc(f.engine, f.store, [](bool) { return nlohmann::json{{"ok", true}}; });
  const int port = svc.start();
  HttpClient c(Endpoint{"127.0.0.1", port});
  EXPECT_EQ(c.get("/get/workflow/tasks", {{"task_status", "failed"}}).status, 200);
  const auto bad = c.get("/get/workflow/tasks", {{"bogus", "1"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_NE(bad.body.find("allowed"), std::string::npos);
  EXPECT_EQ(c.get("/get/workflow/tasks", {{"child_of", "ghost"}}).status, 404);
  EXPECT_EQ(c.get("/get/tasks/ghost").status, 404);
  EXPECT_EQ(c.get("/get/elsewhere").status, 404);
  EXPECT_EQ(c.get("/stats").json().at("ok"), true);
  const auto snap = c.get("/snapshot").json();
  EXPECT_TRUE(EDag::import_snapshot(snap).same_state(f.store.read([](const EDag& d) { return d; })));
  EXPECT_EQ(c.get("/health").status, 200);
  const auto body = c.get("/get/tasks/logs", {{"child_of", "a_1"}, {"full_text_query", "warning"}}).json();
  EXPECT_TRUE(body.at("results").empty());
  svc.stop();
}

TEST(ServiceConfig, Precedence) {
  const auto dir = std::filesystem::temp_directory_path() / "wfprov_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "c.json");
    out << R"({"listen":"127.0.0.1:9000","metrics_url":"http://127.0.0.1:9090","default_step":"30s","workflow_id":"from-file"})";
  }
  ServiceConfig c;
  c.apply_file(dir / "c.json");
  EXPECT_EQ(c.listen.port, 9000);
  EXPECT_EQ(c.default_step, 30s);
  c.apply_env([](const char* name) -> const char* {
    if (std::string(name) == "WFPROV_DEFAULT_STEP") return "15s";
    if (std::string(name) == "WFPROV_LOGS_URL") return "127.0.0.1:9200";
    return nullptr;
  });
  EXPECT_EQ(c.default_step, 15s);
  EXPECT_EQ(c.logs->port, 9200);
  EXPECT_EQ(c.metrics->port, 9090);
  c.apply_json({{"default_step", "5s"}});  // flags come last
  EXPECT_EQ(c.default_step, 5s);
  EXPECT_EQ(c.workflow_id, "from-file");
  EXPECT_THROW(c.apply_json({{"colour", "red"}}), ValidationError);
  EXPECT_THROW(c.apply_json({{"overflow_policy", "sometimes"}}), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST(ProvenanceService, EndToEndOverSocket) {
  ServiceConfig cfg;
  cfg.listen = {"127.0.0.1", 0};
  cfg.ingest = Endpoint{"127.0.0.1", 0};
  cfg.workflow_id = "wf";
  InMemoryMetricsStore m;
  InMemoryLogStore l;
  ProvenanceService svc(cfg, &m, &l);
  svc.start();
  {
    LineSocketWriter we("127.0.0.1", *svc.ingest_port());
    we.write_line(R"({"source":"workflow_engine","ts":"2024-12-11T17:00:00Z","payload":{"task":"x_1","state":"queued","abstract_task":"x"}})");
    we.write_line(R"({"source":"workflow_engine","ts":"2024-12-11T17:00:05Z","payload":{"task":"x_2","state":"queued","abstract_task":"x","parents":"x_1"}})");
    we.write_line(R"({"source":"resource_manager","ts":"2024-12-11T17:00:01Z","payload":{"event":"assigned","pod":"x-1-pod","task":"x_1"}})");
    we.write_line(R"({"source":"resource_manager","ts":"2024-12-11T17:00:02Z","payload":{"event":"scheduled","pod":"x-1-pod","node":"n9"}})");
    we.write_line("background chatter");
  }
  for (int i = 0; i < 200 && svc.pipeline().stats().records < 5; ++i) std::this_thread::sleep_for(10ms);
  ASSERT_TRUE(svc.wait_idle(5s));
  HttpClient c(Endpoint{"127.0.0.1", svc.http_port()});
  const auto r = c.get("/get/workflow/tasks", {{"child_of", "x_1"}}).json();
  EXPECT_EQ(task_ids(r.at("results")), std::vector<std::string>{"x_2"});
  const auto node = c.get("/get/node/tasks/n9").json();
  EXPECT_EQ(task_ids(node.at("results")), std::vector<std::string>{"x_1"});
  const auto stats = c.get("/stats").json();
  EXPECT_TRUE(stats.dump().find("\"conserved\":true") != std::string::npos) << stats.dump();
  svc.stop();
}
