#include "wfprov/backends/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov {

std::string_view to_string(MetricKind m) noexcept {
  return m == MetricKind::cpu_cores ? "cpu_cores" : "mem_bytes";
}

std::optional<MetricKind> parse_metric_kind(std::string_view text) noexcept {
  if (text == "cpu_cores" || text == "CPU" || text == "cpu") return MetricKind::cpu_cores;
  if (text == "mem_bytes" || text == "RAM" || text == "ram") return MetricKind::mem_bytes;
  return std::nullopt;
}

void MetricRangeQuery::validate() const {
  if (exec_object_ids.empty()) throw ValidationError("metric range query needs at least one id");
  if (step.count() <= 0) throw ValidationError("step must be positive");
}

nlohmann::json to_json(const BackendHealth& h) {
  return {{"reachable", h.reachable}, {"latency_ms", h.latency_ms}, {"detail", h.detail}};
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  auto q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::vector<Timestamp> step_grid(const TimeInterval& interval, std::chrono::microseconds step) {
  std::vector<Timestamp> out;
  const auto s = step.count();
  if (s <= 0) return out;
  auto g = -floor_div(-interval.start.micros(), s) * s;
  for (; g <= interval.end.micros(); g += s) out.push_back(Timestamp::from_micros(g));
  return out;
}

std::size_t InMemoryMetricsStore::ingest(const std::vector<MetricSample>& samples) {
  for (const auto& s : samples)
    if (s.value < 0 || s.exec_object_id.empty())
      throw ValidationError("metric sample needs an id and a non-negative value");
  std::unique_lock lock(mu_);
  for (const auto& s : samples) {
    auto& series = series_[{s.exec_object_id, s.metric}];
    auto [it, inserted] = series.emplace(s.timestamp, s.value);
    // Same instant twice: keep the larger value so the result does not depend
    // on ingest order.
    if (!inserted) it->second = std::max(it->second, s.value);
  }
  return samples.size();
}

SeriesMap InMemoryMetricsStore::range_query(const MetricRangeQuery& q) {
  q.validate();
  const auto step = q.step.count();
  const auto staleness = 2 * q.step;
  std::shared_lock lock(mu_);
  SeriesMap out;
  for (const auto& id : std::set<ExecObjectId>(q.exec_object_ids.begin(), q.exec_object_ids.end())) {
    const auto it = series_.find({id, q.metric});
    if (it == series_.end()) continue;
    auto& points = out[id];
    const auto& samples = it->second;
    // Walk samples rather than grid points: each sample covers the grid
    // points from its own instant up to the next sample or the staleness
    // bound, whichever comes first.
    auto s = samples.lower_bound(q.interval.start - staleness);
    for (; s != samples.end() && s->first <= q.interval.end; ++s) {
      const auto next = std::next(s);
      auto last = std::min(q.interval.end, s->first + staleness);
      if (next != samples.end() && next->first - Timestamp::duration(1) < last)
        last = next->first - Timestamp::duration(1);
      const auto first = std::max(q.interval.start, s->first);
      for (auto g = -floor_div(-first.micros(), step) * step; g <= last.micros(); g += step)
        points.push_back({Timestamp::from_micros(g), s->second});
    }
  }
  return out;
}

std::size_t InMemoryMetricsStore::sample_count() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, s] : series_) n += s.size();
  return n;
}

void InMemoryMetricsStore::clear() {
  std::unique_lock lock(mu_);
  series_.clear();
}

void to_json(nlohmann::json& j, const MetricSample& s) {
  j = {{"exec_object_id", s.exec_object_id},
       {"metric", to_string(s.metric)},
       {"timestamp", s.timestamp},
       {"value", s.value}};
}

void from_json(const nlohmann::json& j, MetricSample& s) {
  s.exec_object_id = j.at("exec_object_id").get<ExecObjectId>();
  const auto m = parse_metric_kind(j.at("metric").get<std::string>());
  if (!m) throw ValidationError("unknown metric: " + j.at("metric").get<std::string>());
  s.metric = *m;
  s.timestamp = j.at("timestamp").get<Timestamp>();
  s.value = j.at("value").get<double>();
}

nlohmann::json to_json(const SeriesMap& m) {
  auto j = nlohmann::json::object();
  for (const auto& [id, points] : m) {
    auto arr = nlohmann::json::array();
    for (const auto& p : points) arr.push_back({p.timestamp.to_string(), p.value});
    j[id.str()] = std::move(arr);
  }
  return j;
}

SeriesMap series_from_json(const nlohmann::json& j) {
  SeriesMap out;
  for (const auto& [id, arr] : j.items()) {
    auto& points = out[ExecObjectId(id)];
    for (const auto& p : arr)
      points.push_back({Timestamp::parse(p.at(0).get<std::string>()), p.at(1).get<double>()});
  }
  return out;
}

std::vector<MetricSample> parse_metric_ndjson(std::string_view text) {
  std::vector<MetricSample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<MetricSample>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("metric line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string to_metric_ndjson(const std::vector<MetricSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += nlohmann::json(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<MetricSample> read_metric_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_metric_ndjson(ss.str());
}

void write_metric_fixture(const std::filesystem::path& path,
                          const std::vector<MetricSample>& samples) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_metric_ndjson(samples);
}

}  // namespace wfprov
