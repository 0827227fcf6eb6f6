#include "wfprov/processing/latency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wfprov {

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return samples[rank - 1];
}

LatencySummary summarize(std::span<const double> samples_ms) {
  LatencySummary s;
  if (samples_ms.empty()) return s;
  std::vector<double> v(samples_ms.begin(), samples_ms.end());
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  auto at = [&](double q) {
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return v[std::clamp<std::size_t>(rank, 1, n) - 1];
  };
  s.count = n;
  s.min_ms = v.front();
  s.max_ms = v.back();
  s.mean_ms = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  s.p50_ms = at(0.50);
  s.p95_ms = at(0.95);
  s.p99_ms = at(0.99);
  return s;
}

nlohmann::json to_json(const LatencySummary& s) {
  return {{"count", s.count}, {"min_ms", s.min_ms}, {"mean_ms", s.mean_ms}, {"p50_ms", s.p50_ms},
          {"p95_ms", s.p95_ms}, {"p99_ms", s.p99_ms}, {"max_ms", s.max_ms}};
}

void LatencyRecorder::record(double ms) {
  std::lock_guard lock(mu_);
  if (samples_.size() < max_samples_)
    samples_.push_back(ms);
  else
    ++overflow_;
}

void LatencyRecorder::record_many(std::span<const double> ms) {
  std::lock_guard lock(mu_);
  for (const double v : ms) {
    if (samples_.size() < max_samples_)
      samples_.push_back(v);
    else
      ++overflow_;
  }
}

std::vector<double> LatencyRecorder::samples() const {
  std::lock_guard lock(mu_);
  return samples_;
}

LatencySummary LatencyRecorder::summary() const { return summarize(samples()); }

nlohmann::json LatencyRecorder::histogram() const {
  const auto v = samples();
  nlohmann::json buckets = nlohmann::json::array();
  double bound = 0.125;
  std::size_t covered = 0;
  while (covered < v.size() && bound <= 65536.0) {
    covered = static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [bound](double x) { return x <= bound; }));
    buckets.push_back({{"le_ms", bound}, {"count", covered}});
    bound *= 2;
  }
  buckets.push_back({{"le_ms", "+Inf"}, {"count", v.size()}});
  return buckets;
}

void LatencyRecorder::clear() {
  std::lock_guard lock(mu_);
  samples_.clear();
  overflow_ = 0;
}

}  // namespace wfprov
