#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace wfprov {

struct LatencySummary {
  std::uint64_t count = 0;
  double min_ms = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  double p99_ms = 0;
  double max_ms = 0;
};

/// Nearest-rank percentile (`q` in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> samples, double q);

LatencySummary summarize(std::span<const double> samples_ms);

nlohmann::json to_json(const LatencySummary& s);

/// Thread-safe collector of per-event latencies in milliseconds.
class LatencyRecorder {
 public:
  explicit LatencyRecorder(std::size_t max_samples = 1u << 22) : max_samples_(max_samples) {}

  void record(double ms);
  void record_many(std::span<const double> ms);

  std::vector<double> samples() const;
  LatencySummary summary() const;

  /// Cumulative histogram with power-of-two millisecond bounds.
  nlohmann::json histogram() const;

  void clear();

 private:
  std::size_t max_samples_;
  mutable std::mutex mu_;
  std::vector<double> samples_;
  std::uint64_t overflow_ = 0;
};

}  // namespace wfprov
