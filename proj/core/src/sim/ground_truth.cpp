#include "wfprov/sim/ground_truth.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov::sim {

namespace {

nlohmann::json record_json(const TraceRecord& r, Timestamp ts) {
  nlohmann::json j{{"source", to_string(r.source)}, {"ts", ts}, {"payload", r.payload}};
  if (r.id) j["id"] = *r.id;
  return j;
}

TraceRecord record_from_json(const nlohmann::json& j) {
  TraceRecord r;
  const auto src = parse_event_source(j.at("source").get<std::string>());
  if (!src) throw ValidationError("trace record with unknown source");
  r.source = *src;
  r.ts = j.at("ts").get<Timestamp>();
  r.payload = j.at("payload");
  if (auto it = j.find("id"); it != j.end()) r.id = it->get<std::string>();
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << body;
}

nlohmann::json task_json(const TaskTruth& t) {
  return {{"task_id", t.task_id},
          {"abstract_task_id", t.abstract_task_id},
          {"kind", t.kind},
          {"parents", t.parents},
          {"final_status", t.final_status},
          {"exec_object_id", t.exec_object_id},
          {"node_id", t.node_id},
          {"queued_at", t.queued_at},
          {"assigned_at", t.assigned_at},
          {"scheduled_at", t.scheduled_at},
          {"exec_failed_at", t.exec_failed_at ? nlohmann::json(*t.exec_failed_at) : nlohmann::json(nullptr)},
          {"started_at", t.started_at},
          {"ended_at", t.ended_at},
          {"last_status_update", t.last_status_update},
          {"warned", t.warned}};
}

TaskTruth task_from_json(const nlohmann::json& j) {
  TaskTruth t;
  j.at("task_id").get_to(t.task_id);
  j.at("abstract_task_id").get_to(t.abstract_task_id);
  j.at("kind").get_to(t.kind);
  j.at("parents").get_to(t.parents);
  j.at("final_status").get_to(t.final_status);
  j.at("exec_object_id").get_to(t.exec_object_id);
  j.at("node_id").get_to(t.node_id);
  j.at("queued_at").get_to(t.queued_at);
  j.at("assigned_at").get_to(t.assigned_at);
  j.at("scheduled_at").get_to(t.scheduled_at);
  if (const auto& f = j.at("exec_failed_at"); !f.is_null()) t.exec_failed_at = f.get<Timestamp>();
  j.at("started_at").get_to(t.started_at);
  j.at("ended_at").get_to(t.ended_at);
  j.at("last_status_update").get_to(t.last_status_update);
  j.at("warned").get_to(t.warned);
  return t;
}

}  // namespace

std::string TraceRecord::line() const { return record_json(*this, ts).dump(); }

std::string TraceRecord::line_at(Timestamp at) const { return record_json(*this, at).dump(); }

const TaskTruth& GroundTruth::task(const TaskId& id) const {
  auto it = tasks.find(id);
  if (it == tasks.end()) throw NotFoundError("task", id.str());
  return it->second;
}

std::vector<const TraceRecord*> GroundTruth::events_of(EventSource s) const {
  std::vector<const TraceRecord*> out;
  for (const auto& e : events)
    if (e.source == s) out.push_back(&e);
  return out;
}

std::vector<MetricPoint> GroundTruth::series(const ExecObjectId& exec, MetricKind metric) const {
  std::vector<MetricPoint> out;
  for (const auto& s : metrics)
    if (s.exec_object_id == exec && s.metric == metric) out.push_back({s.timestamp, s.value});
  std::sort(out.begin(), out.end(),
            [](const MetricPoint& a, const MetricPoint& b) { return a.timestamp < b.timestamp; });
  return out;
}

Timestamp GroundTruth::end_time() const {
  Timestamp t;
  for (const auto& e : events) t = std::max(t, e.ts);
  for (const auto& [_, task] : tasks) t = std::max(t, task.ended_at);
  return t;
}

nlohmann::json GroundTruth::to_json() const {
  nlohmann::json tj = nlohmann::json::array();
  for (const auto& [_, t] : tasks) tj.push_back(task_json(t));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : this->failures) failures.push_back({{"task_id", f.task_id}, {"node_id", f.node_id}});
  nlohmann::json warn = nlohmann::json::array();
  for (auto k : warning_kinds) warn.push_back(k);
  return {{"spec", spec},
          {"nodes", nodes},
          {"failures", failures},
          {"warning_kinds", warn},
          {"scrape_step_ms", scrape_step.count()},
          {"seed", seed},
          {"tasks", tj},
          {"tally",
           {{"records", tally.records},
            {"canonical", tally.canonical},
            {"duplicates", tally.duplicates},
            {"unsupported", tally.unsupported},
            {"noise", tally.noise},
            {"orphans", tally.orphans}}}};
}

GroundTruth GroundTruth::from_json(const nlohmann::json& j) {
  GroundTruth gt;
  j.at("spec").get_to(gt.spec);
  j.at("nodes").get_to(gt.nodes);
  for (const auto& f : j.at("failures"))
    gt.failures.push_back({f.at("task_id").get<TaskId>(), f.at("node_id").get<NodeId>()});
  for (const auto& k : j.at("warning_kinds")) gt.warning_kinds.insert(k.get<TaskKind>());
  gt.scrape_step = std::chrono::milliseconds(j.at("scrape_step_ms").get<std::int64_t>());
  gt.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("tasks")) {
    auto task = task_from_json(t);
    auto id = task.task_id;
    gt.tasks.emplace(std::move(id), std::move(task));
  }
  const auto& tl = j.at("tally");
  gt.tally.records = tl.at("records").get<std::uint64_t>();
  gt.tally.canonical = tl.at("canonical").get<std::uint64_t>();
  gt.tally.duplicates = tl.at("duplicates").get<std::uint64_t>();
  gt.tally.unsupported = tl.at("unsupported").get<std::uint64_t>();
  gt.tally.noise = tl.at("noise").get<std::uint64_t>();
  gt.tally.orphans = tl.at("orphans").get<std::uint64_t>();
  return gt;
}

void GroundTruth::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_file(dir / "spec.json", nlohmann::json(spec).dump(2) + "\n");
  write_file(dir / "ground_truth.json", to_json().dump(2) + "\n");
  std::string trace;
  for (const auto& e : events) {
    trace += e.line();
    trace += '\n';
  }
  write_file(dir / "trace.ndjson", trace);
  write_metric_fixture(dir / "metrics.ndjson", metrics);
  write_log_fixture(dir / "logs.ndjson", logs);
}

GroundTruth GroundTruth::load(const std::filesystem::path& dir) {
  auto gt = from_json(nlohmann::json::parse(read_file(dir / "ground_truth.json")));
  std::istringstream trace(read_file(dir / "trace.ndjson"));
  for (std::string line; std::getline(trace, line);)
    if (!line.empty()) gt.events.push_back(record_from_json(nlohmann::json::parse(line)));
  gt.metrics = read_metric_fixture(dir / "metrics.ndjson");
  gt.logs = read_log_fixture(dir / "logs.ndjson");
  return gt;
}

}  // namespace wfprov::sim
