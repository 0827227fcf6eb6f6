#include "wfprov/backends/counting.hpp"

#include "wfprov/model/errors.hpp"

namespace wfprov {

std::size_t UnreachableMetricsBackend::ingest(const std::vector<MetricSample>&) {
  throw BackendError("metrics backend unreachable");
}

SeriesMap UnreachableMetricsBackend::range_query(const MetricRangeQuery&) {
  throw BackendError("metrics backend unreachable");
}

std::size_t UnreachableLogsBackend::ingest(const std::vector<LogEntry>&) {
  throw BackendError("logs backend unreachable");
}

std::vector<LogEntry> UnreachableLogsBackend::search(const LogSearchQuery&) {
  throw BackendError("logs backend unreachable");
}

}  // namespace wfprov
