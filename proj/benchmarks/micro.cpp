#include <benchmark/benchmark.h>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"
#include "wfprov/bench/harness.hpp"
#include "wfprov/edag/edag_store.hpp"
#include "wfprov/mediation/adapter.hpp"
#include "wfprov/processing/processor.hpp"
#include "wfprov/query/engine.hpp"
#include "wfprov/sim/generator.hpp"

using namespace wfprov;

namespace {

const sim::GroundTruth& truth(sim::SizePreset size) {
  static std::map<sim::SizePreset, sim::GroundTruth> cache;
  auto it = cache.find(size);
  if (it == cache.end()) it = cache.emplace(size, sim::generate(bench::standard_config(size, 42))).first;
  return it->second;
}

sim::SizePreset preset(const benchmark::State& s) { return static_cast<sim::SizePreset>(s.range(0)); }

std::vector<CanonicalEvent> normalized(const sim::GroundTruth& gt) {
  WorkflowEngineAdapter we(gt.spec.workflow_id);
  ResourceManagerAdapter rm(gt.spec.workflow_id);
  std::vector<CanonicalEvent> out;
  for (const auto& r : gt.events) {
    auto& a = r.source == EventSource::workflow_engine ? static_cast<SourceAdapter&>(we) : rm;
    if (auto n = a.process({r.source, r.line(), r.ts}); n.event) out.push_back(std::move(*n.event));
  }
  return out;
}

}  // namespace

static void BM_AdapterNormalize(benchmark::State& state) {
  const auto& gt = truth(preset(state));
  std::vector<std::string> lines;
  for (const auto& r : gt.events) lines.push_back(r.line());
  for (auto _ : state) {
    WorkflowEngineAdapter we(gt.spec.workflow_id);
    ResourceManagerAdapter rm(gt.spec.workflow_id);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto& a = gt.events[i].source == EventSource::workflow_engine ? static_cast<SourceAdapter&>(we) : rm;
      benchmark::DoNotOptimize(a.process({gt.events[i].source, lines[i], gt.events[i].ts}));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lines.size()));
}
BENCHMARK(BM_AdapterNormalize)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_ProcessTrace(benchmark::State& state) {
  const auto& gt = truth(preset(state));
  const auto events = normalized(gt);
  for (auto _ : state) {
    EDagStore store(EDag::init_from_spec(gt.spec));
    EventProcessor proc(store);
    for (std::size_t i = 0; i < events.size(); i += 512)
      proc.process_batch({events.begin() + static_cast<std::ptrdiff_t>(i),
                          events.begin() + static_cast<std::ptrdiff_t>(std::min(events.size(), i + 512))});
    benchmark::DoNotOptimize(proc.counters());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_ProcessTrace)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static EDagStore& loaded_store(sim::SizePreset size) {
  static std::map<sim::SizePreset, std::unique_ptr<EDagStore>> stores;
  auto& s = stores[size];
  if (!s) {
    const auto& gt = truth(size);
    s = std::make_unique<EDagStore>(EDag::init_from_spec(gt.spec));
    EventProcessor proc(*s);
    proc.process_batch(normalized(gt));
  }
  return *s;
}

static void BM_ListTasksFailed(benchmark::State& state) {
  const auto& store = loaded_store(preset(state));
  TaskFilter f;
  f.task_status = TaskStatus::failed;
  for (auto _ : state)
    store.read([&](const EDag& d) { benchmark::DoNotOptimize(d.list_tasks(f)); });
}
BENCHMARK(BM_ListTasksFailed)->Arg(0)->Arg(2);

static void BM_ListTasksChildOf(benchmark::State& state) {
  const auto& store = loaded_store(preset(state));
  TaskFilter f;
  f.child_of = TaskId("memory_intensive_task_1");
  for (auto _ : state)
    store.read([&](const EDag& d) { benchmark::DoNotOptimize(d.list_tasks(f)); });
}
BENCHMARK(BM_ListTasksChildOf)->Arg(0)->Arg(2);

static void BM_MetricsRangeQuery(benchmark::State& state) {
  const auto& gt = truth(preset(state));
  InMemoryMetricsStore store;
  store.ingest(gt.metrics);
  MetricRangeQuery q;
  for (const auto& [id, t] : gt.tasks)
    if (t.abstract_task_id.str() == "cpu_intensive_task") q.exec_object_ids.push_back(t.exec_object_id);
  q.interval = TimeInterval::make(gt.events.front().ts, gt.end_time());
  for (auto _ : state) benchmark::DoNotOptimize(store.range_query(q));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.exec_object_ids.size()));
}
BENCHMARK(BM_MetricsRangeQuery)->Arg(0)->Arg(2)->Unit(benchmark::kMicrosecond);

static void BM_LogSearch(benchmark::State& state) {
  const auto& gt = truth(preset(state));
  InMemoryLogStore store;
  store.ingest(gt.logs);
  LogSearchQuery q;
  for (const auto& [id, t] : gt.tasks)
    if (t.abstract_task_id.str() == "combined_intensive_task") q.exec_object_ids.push_back(t.exec_object_id);
  q.interval = TimeInterval::make(gt.events.front().ts, gt.end_time());
  q.full_text = "warning";
  for (auto _ : state) benchmark::DoNotOptimize(store.search(q));
}
BENCHMARK(BM_LogSearch)->Arg(0)->Arg(2)->Unit(benchmark::kMicrosecond);

static void BM_EngineQuery2(benchmark::State& state) {
  const auto& gt = truth(preset(state));
  const auto& store = loaded_store(preset(state));
  InMemoryMetricsStore metrics;
  metrics.ingest(gt.metrics);
  QueryEngine engine(store, &metrics, nullptr);
  const auto req = QueryRequest::from_path("/get/tasks/CPU", {{"abstract_id", "cpu_intensive_task"}});
  for (auto _ : state) benchmark::DoNotOptimize(engine.execute(req));
}
BENCHMARK(BM_EngineQuery2)->Arg(0)->Arg(2)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
