#include "wfprov/sim/config.hpp"

#include "wfprov/model/json.hpp"

namespace wfprov::sim {

std::string_view to_string(SizePreset p) noexcept {
  switch (p) {
    case SizePreset::small: return "small";
    case SizePreset::medium: return "medium";
    case SizePreset::large: return "large";
  }
  return "small";
}

std::optional<SizePreset> parse_size_preset(std::string_view text) noexcept {
  if (text == "small") return SizePreset::small;
  if (text == "medium") return SizePreset::medium;
  if (text == "large") return SizePreset::large;
  return std::nullopt;
}

int preset_task_count(SizePreset p) noexcept {
  switch (p) {
    case SizePreset::small: return 10;
    case SizePreset::medium: return 100;
    case SizePreset::large: return 1000;
  }
  return 10;
}

SimConfig SimConfig::defaults(SizePreset preset, std::uint64_t seed) {
  SimConfig c;
  c.preset = preset;
  c.seed = seed;
  c.workflow_id = std::string("synthetic-") + std::string(to_string(preset));
  for (int i = 1; i <= 4; ++i) c.nodes.emplace_back("worker-" + std::to_string(i));
  using std::chrono::milliseconds;
  c.profiles[TaskKind::cpu_intensive] = {0.9, 100e6, milliseconds(40'000)};
  c.profiles[TaskKind::memory_intensive] = {0.1, 1e9, milliseconds(50'000)};
  c.profiles[TaskKind::combined_intensive] = {0.9, 1e9, milliseconds(60'000)};
  return c;
}

WorkflowSpec layered_spec(const WorkflowId& workflow_id, int total) {
  WorkflowSpec spec;
  spec.workflow_id = workflow_id;
  const std::pair<const char*, TaskKind> kinds[] = {
      {"cpu_intensive_task", TaskKind::cpu_intensive},
      {"memory_intensive_task", TaskKind::memory_intensive},
      {"combined_intensive_task", TaskKind::combined_intensive}};
  const int base = total / 3;
  const int rem = total % 3;
  for (int i = 0; i < 3; ++i) {
    const int fanout = base + (i < rem ? 1 : 0);
    if (fanout > 0) spec.abstract_tasks.push_back({AbstractTaskId(kinds[i].first), kinds[i].second, fanout});
  }
  for (std::size_t i = 1; i < spec.abstract_tasks.size(); ++i)
    spec.abstract_edges.push_back({spec.abstract_tasks[i - 1].id, spec.abstract_tasks[i].id});
  return spec;
}

WorkflowSpec SimConfig::workflow_spec() const {
  if (spec) return *spec;
  return layered_spec(WorkflowId(workflow_id), preset_task_count(preset));
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json profiles = nlohmann::json::object();
  for (const auto& [kind, p] : c.profiles)
    profiles[std::string(to_string(kind))] = {
        {"cpu_cores", p.cpu_cores}, {"mem_bytes", p.mem_bytes}, {"duration_ms", p.duration.count()}};
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : c.failures) failures.push_back({{"task_id", f.task_id}, {"node_id", f.node_id}});
  nlohmann::json warn = nlohmann::json::array();
  for (auto k : c.warning_kinds) warn.push_back(to_string(k));
  return {{"preset", to_string(c.preset)},
          {"workflow_id", c.workflow_id},
          {"nodes", c.nodes},
          {"slots_per_node", c.slots_per_node},
          {"profiles", profiles},
          {"duration_spread", c.duration_spread},
          {"metric_noise", c.metric_noise},
          {"scrape_step_ms", c.scrape_step.count()},
          {"jitter_max_ms", c.jitter_max.count()},
          {"failures", failures},
          {"warning_kinds", warn},
          {"noise", c.noise},
          {"system_pods_per_node", c.system_pods_per_node},
          {"seed", c.seed},
          {"start", c.start}};
}

}  // namespace wfprov::sim
