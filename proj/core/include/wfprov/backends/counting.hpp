#pragma once

#include <atomic>
#include <mutex>
#include <vector>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"

namespace wfprov {

/// Forwards to another metrics backend and counts the range queries it sees.
class CountingMetricsBackend final : public MetricsBackend {
 public:
  explicit CountingMetricsBackend(MetricsBackend& inner) : inner_(inner) {}

  std::size_t ingest(const std::vector<MetricSample>& samples) override {
    return inner_.ingest(samples);
  }
  SeriesMap range_query(const MetricRangeQuery& q) override {
    ++queries_;
    {
      std::lock_guard lock(mu_);
      last_ = q;
    }
    return inner_.range_query(q);
  }
  BackendHealth health() override { return inner_.health(); }

  std::uint64_t queries() const noexcept { return queries_.load(); }
  MetricRangeQuery last_query() const {
    std::lock_guard lock(mu_);
    return last_;
  }
  void reset() { queries_ = 0; }

 private:
  MetricsBackend& inner_;
  std::atomic<std::uint64_t> queries_{0};
  mutable std::mutex mu_;
  MetricRangeQuery last_;
};

/// Forwards to another log backend and counts the searches it sees.
class CountingLogsBackend final : public LogsBackend {
 public:
  explicit CountingLogsBackend(LogsBackend& inner) : inner_(inner) {}

  std::size_t ingest(const std::vector<LogEntry>& entries) override {
    return inner_.ingest(entries);
  }
  std::vector<LogEntry> search(const LogSearchQuery& q) override {
    ++queries_;
    {
      std::lock_guard lock(mu_);
      last_ = q;
    }
    return inner_.search(q);
  }
  BackendHealth health() override { return inner_.health(); }

  std::uint64_t queries() const noexcept { return queries_.load(); }
  LogSearchQuery last_query() const {
    std::lock_guard lock(mu_);
    return last_;
  }
  void reset() { queries_ = 0; }

 private:
  LogsBackend& inner_;
  std::atomic<std::uint64_t> queries_{0};
  mutable std::mutex mu_;
  LogSearchQuery last_;
};

/// Always fails; stands in for an unreachable backend.
class UnreachableMetricsBackend final : public MetricsBackend {
 public:
  std::size_t ingest(const std::vector<MetricSample>&) override;
  SeriesMap range_query(const MetricRangeQuery&) override;
  BackendHealth health() override { return {false, 0.0, "unreachable"}; }
};

class UnreachableLogsBackend final : public LogsBackend {
 public:
  std::size_t ingest(const std::vector<LogEntry>&) override;
  std::vector<LogEntry> search(const LogSearchQuery&) override;
  BackendHealth health() override { return {false, 0.0, "unreachable"}; }
};

}  // namespace wfprov
