#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/model/ids.hpp"
#include "wfprov/model/time.hpp"

namespace wfprov {

enum class MetricKind { cpu_cores, mem_bytes };

std::string_view to_string(MetricKind m) noexcept;
/// Accepts cpu_cores / mem_bytes and the endpoint spellings CPU / RAM.
std::optional<MetricKind> parse_metric_kind(std::string_view text) noexcept;

struct MetricSample {
  ExecObjectId exec_object_id;
  MetricKind metric = MetricKind::cpu_cores;
  Timestamp timestamp;
  double value = 0;

  bool operator==(const MetricSample&) const = default;
};

struct MetricPoint {
  Timestamp timestamp;
  double value = 0;

  bool operator==(const MetricPoint&) const = default;
};

/// One aggregated range query over many execution objects.
struct MetricRangeQuery {
  std::vector<ExecObjectId> exec_object_ids;
  MetricKind metric = MetricKind::cpu_cores;
  TimeInterval interval;
  std::chrono::microseconds step{std::chrono::seconds(10)};

  /// Throws ValidationError for an empty id set or a non-positive step.
  void validate() const;
};

/// Absent key: nothing was ever ingested for that id and metric. Present key
/// with an empty vector: known id, no sample close enough to any grid point.
using SeriesMap = std::map<ExecObjectId, std::vector<MetricPoint>>;

struct BackendHealth {
  bool reachable = false;
  double latency_ms = 0;
  std::string detail;
};

nlohmann::json to_json(const BackendHealth& h);

class MetricsBackend {
 public:
  virtual ~MetricsBackend() = default;
  virtual std::size_t ingest(const std::vector<MetricSample>& samples) = 0;
  virtual SeriesMap range_query(const MetricRangeQuery& q) = 0;
  virtual BackendHealth health() = 0;
};

/// Grid points of a range query: multiples of `step` since the epoch that
/// fall inside `interval`.
std::vector<Timestamp> step_grid(const TimeInterval& interval, std::chrono::microseconds step);

/// Reference time-series store. Each grid point takes the value of the last
/// sample at or before it, provided that sample is at most 2 x step old;
/// otherwise the point is left out (a gap).
class InMemoryMetricsStore final : public MetricsBackend {
 public:
  std::size_t ingest(const std::vector<MetricSample>& samples) override;
  SeriesMap range_query(const MetricRangeQuery& q) override;
  BackendHealth health() override { return {true, 0.0, "in-memory"}; }

  std::size_t sample_count() const;
  void clear();

 private:
  mutable std::shared_mutex mu_;
  std::map<std::pair<ExecObjectId, MetricKind>, std::map<Timestamp, double>> series_;
};

void to_json(nlohmann::json& j, const MetricSample& s);
void from_json(const nlohmann::json& j, MetricSample& s);
nlohmann::json to_json(const SeriesMap& m);
SeriesMap series_from_json(const nlohmann::json& j);

std::vector<MetricSample> parse_metric_ndjson(std::string_view text);
std::string to_metric_ndjson(const std::vector<MetricSample>& samples);
std::vector<MetricSample> read_metric_fixture(const std::filesystem::path& path);
void write_metric_fixture(const std::filesystem::path& path,
                          const std::vector<MetricSample>& samples);

}  // namespace wfprov
