#include "wfprov/sim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <tuple>

#include "wfprov/model/errors.hpp"

namespace wfprov::sim {

std::string pod_name(const TaskId& task, std::uint64_t suffix) {
  std::string out;
  for (char c : task.str()) {
    if (c == '_') out += '-';
    else if (c >= 'A' && c <= 'Z') out += static_cast<char>(c - 'A' + 'a');
    else out += c;
  }
  char hex[16];
  std::snprintf(hex, sizeof hex, "%013llx",
                static_cast<unsigned long long>(suffix & 0xFFFFFFFFFFFFFull));
  return out + "-" + hex;
}

namespace {

using std::chrono::duration_cast;
using std::chrono::microseconds;
using std::chrono::milliseconds;

constexpr microseconds ms(std::int64_t v) { return duration_cast<microseconds>(milliseconds(v)); }

class Builder {
 public:
  Builder(const SimConfig& cfg, GroundTruth& gt) : cfg_(cfg), gt_(gt), rng_(cfg.seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  std::uint64_t bits() { return rng_(); }

  Timestamp jittered(Timestamp t) {
    const auto max_us = duration_cast<microseconds>(cfg_.jitter_max).count();
    if (max_us <= 0) return t;
    return t + microseconds(std::uniform_int_distribution<std::int64_t>(0, max_us)(rng_));
  }

  /// Canonical record with a fresh id; returns the id.
  std::string canonical(EventSource s, Timestamp ts, nlohmann::json payload) {
    const auto id = (s == EventSource::workflow_engine ? "we-" : "rm-") +
                    std::to_string(++seq_[source_index(s)]);
    gt_.events.push_back({s, ts, std::move(payload), id});
    ++gt_.tally.canonical;
    return id;
  }

  void duplicate(EventSource s, Timestamp ts, nlohmann::json payload, const std::string& id) {
    gt_.events.push_back({s, ts, std::move(payload), id});
    ++gt_.tally.duplicates;
  }

  void unsupported(EventSource s, Timestamp ts, nlohmann::json payload) {
    if (!cfg_.noise) return;
    gt_.events.push_back({s, ts, std::move(payload), std::nullopt});
    ++gt_.tally.unsupported;
  }

  void noise(EventSource s, Timestamp ts, std::string text) {
    if (!cfg_.noise) return;
    gt_.events.push_back({s, ts, std::move(text), std::nullopt});
    ++gt_.tally.noise;
  }

 private:
  const SimConfig& cfg_;
  GroundTruth& gt_;
  std::mt19937_64 rng_;
  std::array<std::uint64_t, kSourceCount> seq_{};
};

std::vector<const AbstractTask*> topo_order(const WorkflowSpec& spec) {
  std::map<AbstractTaskId, int> indeg;
  for (const auto& a : spec.abstract_tasks) indeg[a.id] = 0;
  for (const auto& e : spec.abstract_edges) ++indeg[e.to];
  std::vector<const AbstractTask*> out;
  std::vector<bool> done(spec.abstract_tasks.size(), false);
  while (out.size() < spec.abstract_tasks.size()) {
    for (std::size_t i = 0; i < spec.abstract_tasks.size(); ++i) {
      const auto& a = spec.abstract_tasks[i];
      if (done[i] || indeg[a.id] != 0) continue;
      done[i] = true;
      out.push_back(&a);
      for (const auto& e : spec.abstract_edges)
        if (e.from == a.id) --indeg[e.to];
      break;
    }
  }
  return out;
}

std::string join_ids(const std::vector<TaskId>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ',';
    out += id.str();
  }
  return out;
}

double round_to(double v, double unit) { return std::round(v / unit) * unit; }

}  // namespace

GroundTruth generate(const SimConfig& cfg) {
  const auto spec = cfg.workflow_spec();
  spec.validate();
  if (cfg.nodes.empty()) throw ValidationError("simulation needs at least one node");
  if (cfg.slots_per_node <= 0) throw ValidationError("slots_per_node must be positive");
  for (const auto& a : spec.abstract_tasks)
    if (!cfg.profiles.contains(a.kind))
      throw ValidationError("no resource profile for kind " + std::string(to_string(a.kind)));

  GroundTruth gt;
  gt.spec = spec;
  gt.nodes = cfg.nodes;
  gt.failures = cfg.failures;
  gt.warning_kinds = cfg.warning_kinds;
  gt.scrape_step = cfg.scrape_step;
  gt.seed = cfg.seed;

  std::map<TaskId, NodeId> forced;
  for (const auto& f : cfg.failures) {
    if (std::find(cfg.nodes.begin(), cfg.nodes.end(), f.node_id) == cfg.nodes.end())
      throw ValidationError("failure plan names unknown node " + f.node_id.str());
    forced[f.task_id] = f.node_id;
  }

  Builder b(cfg, gt);
  const auto wf = spec.workflow_id.str();
  const auto WE = EventSource::workflow_engine;
  const auto RM = EventSource::resource_manager;

  using SlotHeap = std::priority_queue<Timestamp, std::vector<Timestamp>, std::greater<>>;
  std::vector<SlotHeap> slots(cfg.nodes.size());
  std::vector<int> assigned_count(cfg.nodes.size(), 0);
  for (auto& h : slots)
    for (int i = 0; i < cfg.slots_per_node; ++i) h.push(cfg.start);

  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    for (int k = 0; k < cfg.system_pods_per_node; ++k) {
      const auto pod = pod_name(TaskId("kube-proxy"), b.bits());
      b.canonical(RM, b.jittered(cfg.start + ms(200 + 10 * k)),
                  {{"event", "scheduled"}, {"pod", pod}, {"node", cfg.nodes[n].str()}});
      ++gt.tally.orphans;
    }
  }

  std::map<AbstractTaskId, std::vector<TaskId>> instances;
  Timestamp last_end = cfg.start;

  for (const auto* a : topo_order(spec)) {
    std::vector<TaskId> parents;
    for (const auto& e : spec.abstract_edges)
      if (e.to == a->id)
        for (const auto& p : instances[e.from]) parents.push_back(p);

    Timestamp layer_ready = cfg.start + ms(1000);
    for (const auto& p : parents) layer_ready = std::max(layer_ready, gt.tasks.at(p).last_status_update);
    if (!parents.empty()) layer_ready = layer_ready + ms(static_cast<std::int64_t>(b.uniform(500, 1500)));

    const auto& profile = cfg.profiles.at(a->kind);
    const bool warn = cfg.warning_kinds.contains(a->kind);
    for (int i = 1; i <= a->fanout; ++i) {
      TaskTruth t;
      t.task_id = concrete_task_id(a->id, i);
      t.abstract_task_id = a->id;
      t.kind = a->kind;
      t.parents = parents;
      t.warned = warn;
      instances[a->id].push_back(t.task_id);
      const auto ready = layer_ready + ms(20 * (i - 1));

      std::size_t node = 0;
      if (auto f = forced.find(t.task_id); f != forced.end()) {
        node = static_cast<std::size_t>(
            std::find(cfg.nodes.begin(), cfg.nodes.end(), f->second) - cfg.nodes.begin());
        t.final_status = TaskStatus::failed;
      } else {
        for (std::size_t n = 1; n < cfg.nodes.size(); ++n) {
          const auto tn = slots[n].top();
          const auto tb = slots[node].top();
          if (tn < tb || (tn == tb && assigned_count[n] < assigned_count[node])) node = n;
        }
      }
      ++assigned_count[node];
      const auto slot_free = slots[node].top();
      slots[node].pop();
      t.node_id = cfg.nodes[node];
      t.exec_object_id = ExecObjectId(pod_name(t.task_id, b.bits()));
      const auto& pod = t.exec_object_id.str();
      const auto& tid = t.task_id.str();
      const auto& node_name = t.node_id.str();
      const nlohmann::json task_base{{"task", tid}, {"workflow", wf}, {"abstract_task", a->id.str()}};

      // Workflow engine: scheduled (unsupported), queued.
      auto p = task_base;
      p["state"] = "scheduled";
      b.unsupported(WE, b.jittered(ready), p);
      p["state"] = "queued";
      if (!parents.empty()) p["parents"] = join_ids(parents);
      t.queued_at = b.jittered(ready + ms(100));
      b.canonical(WE, t.queued_at, p);

      // Resource manager: bind, place, start the container.
      const auto t_assign = std::max(ready + ms(400), slot_free);
      t.assigned_at = b.jittered(t_assign);
      b.canonical(RM, t.assigned_at, {{"event", "assigned"}, {"pod", pod}, {"task", tid}, {"workflow", wf}});
      t.scheduled_at = b.jittered(t_assign + ms(100));
      b.canonical(RM, t.scheduled_at, {{"event", "scheduled"}, {"pod", pod}, {"node", node_name}});
      const char* lifecycle[] = {"pulling", "pulled", "created", "started"};
      const int offsets[] = {300, 1000, 1200, 1400};
      for (int k = 0; k < 4; ++k)
        b.unsupported(RM, b.jittered(t_assign + ms(offsets[k])), {{"event", lifecycle[k]}, {"pod", pod}, {"node", node_name}});

      const auto t_run = t_assign + ms(1500);
      const auto duration = microseconds(static_cast<std::int64_t>(
          static_cast<double>(duration_cast<microseconds>(profile.duration).count()) *
          (1.0 + b.uniform(-cfg.duration_spread, cfg.duration_spread))));
      const auto t_end = t_run + duration;

      p = task_base;
      p["state"] = "running";
      t.started_at = b.jittered(t_run);
      const auto running_id = b.canonical(WE, t.started_at, p);
      b.duplicate(WE, b.jittered(t_run + duration / 3), p, running_id);
      b.duplicate(WE, b.jittered(t_run + 2 * (duration / 3)), p, running_id);

      for (int k = 1; k <= 3; ++k)
        b.noise(RM, b.jittered(t_run + k * (duration / 4)), "readiness probe succeeded pod=" + pod);
      b.noise(RM, b.jittered(t_assign + ms(50)), "kubelet: volume mounted for pod " + pod);
      b.noise(RM, b.jittered(t_end + ms(600)), "kubelet: cleaned up pod sandbox " + pod);
      b.noise(WE, b.jittered(ready + ms(50)), "executor: slots available=" + std::to_string(cfg.slots_per_node));
      b.noise(WE, b.jittered(t_run + ms(200)), "executor: submitted 1 task instance");
      b.noise(WE, b.jittered(t_end + ms(200)), "executor: reaped finished task instance");
      b.noise(WE, b.jittered(t_end + ms(400)), "scheduler: dag run progress recomputed");

      p = task_base;
      if (t.final_status == TaskStatus::failed) {
        const auto rm_fail = b.jittered(t_end - ms(100));
        t.exec_failed_at = rm_fail;
        b.canonical(RM, rm_fail, {{"event", "failed"}, {"pod", pod}, {"node", node_name}, {"reason", "Error"}});
        p["state"] = "failed";
        t.last_status_update = b.jittered(t_end);
        b.canonical(WE, t.last_status_update, p);
        t.ended_at = std::min(rm_fail, t.last_status_update);
      } else {
        p["state"] = "succeeded";
        t.last_status_update = b.jittered(t_end);
        b.canonical(WE, t.last_status_update, p);
        b.unsupported(RM, b.jittered(t_end + ms(300)), {{"event", "completed"}, {"pod", pod}, {"node", node_name}});
        t.ended_at = t.last_status_update;
      }
      slots[node].push(t_end + ms(500));
      last_end = std::max(last_end, t_end + ms(600));

      // Metrics: one scrape per grid point inside the execution interval.
      for (const auto g : step_grid(TimeInterval{t.started_at, t.ended_at},
                                    duration_cast<microseconds>(cfg.scrape_step))) {
        const double cpu = round_to(profile.cpu_cores * (1 + b.uniform(-cfg.metric_noise, cfg.metric_noise)), 1e-4);
        const double mem = std::round(profile.mem_bytes * (1 + b.uniform(-cfg.metric_noise, cfg.metric_noise)));
        gt.metrics.push_back({t.exec_object_id, MetricKind::cpu_cores, g, cpu});
        gt.metrics.push_back({t.exec_object_id, MetricKind::mem_bytes, g, mem});
      }

      // Logs, all inside the execution interval.
      const auto span = t.ended_at - t.started_at;
      auto log = [&](Timestamp at, LogLevel level, std::string msg) {
        gt.logs.push_back({t.exec_object_id, at, level, std::move(msg)});
      };
      log(t.started_at + ms(200), LogLevel::info, "starting " + tid + " on " + node_name);
      log(t.started_at + span * 2 / 5, LogLevel::info, "processed 50% of input");
      if (warn) log(t.started_at + span / 2, LogLevel::warning, "warning: memory usage above 90% of limit");
      log(t.started_at + span * 4 / 5, LogLevel::info, "processed 100% of input");
      if (t.final_status == TaskStatus::failed)
        log(t.ended_at - ms(300), LogLevel::error, "task failed with exit code 1");
      else
        log(t.ended_at - ms(300), LogLevel::info, "task finished successfully");

      gt.tasks.emplace(t.task_id, std::move(t));
    }
  }

  for (const auto& f : cfg.failures)
    if (!gt.tasks.contains(f.task_id))
      throw ValidationError("failure plan names unknown task " + f.task_id.str());

  // Background chatter over the whole run.
  for (auto t = cfg.start; t <= last_end; t = t + ms(5000))
    b.noise(WE, b.jittered(t), "scheduler heartbeat ok");
  for (auto t = cfg.start + ms(3000); t <= last_end; t = t + ms(7000))
    b.noise(RM, b.jittered(t), "kubelet: node status updated");

  std::stable_sort(gt.events.begin(), gt.events.end(),
                   [](const TraceRecord& x, const TraceRecord& y) { return x.ts < y.ts; });
  gt.tally.records = gt.events.size();
  std::sort(gt.metrics.begin(), gt.metrics.end(), [](const MetricSample& x, const MetricSample& y) {
    return std::tie(x.exec_object_id, x.metric, x.timestamp) <
           std::tie(y.exec_object_id, y.metric, y.timestamp);
  });
  std::sort(gt.logs.begin(), gt.logs.end(), log_order);
  return gt;
}

}  // namespace wfprov::sim
