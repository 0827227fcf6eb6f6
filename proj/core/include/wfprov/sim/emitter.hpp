#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "wfprov/backends/logs.hpp"
#include "wfprov/backends/metrics.hpp"
#include "wfprov/mediation/ingest.hpp"
#include "wfprov/sim/ground_truth.hpp"

namespace wfprov::sim {

/// Replay speed. `fast` sends as quickly as the sink accepts and keeps the
/// recorded timestamps; `realtime:F` sleeps so that F simulated seconds pass
/// per wall second and stamps every record with its emission time.
struct Pacing {
  bool realtime = false;
  double factor = 1.0;

  /// "fast", "realtime" or "realtime:<factor>". Throws ValidationError.
  static Pacing parse(std::string_view text);
  std::string to_string() const;
};

using LineSink = std::function<void(const std::string& line)>;

/// Replays the records of each source on its own thread into that source's
/// sink, preserving per-source order. Returns the number of lines sent.
std::uint64_t replay(const std::vector<TraceRecord>& events, const Pacing& pacing,
                     const std::array<LineSink, kSourceCount>& sinks, std::stop_token stop = {});

/// One TCP connection per source.
std::uint64_t emit_to_socket(const std::vector<TraceRecord>& events, const std::string& host,
                             int port, const Pacing& pacing, std::stop_token stop = {});

std::uint64_t emit_to_pipeline(const std::vector<TraceRecord>& events, IngestPipeline& pipeline,
                               const Pacing& pacing, std::stop_token stop = {});

/// Writes the merged trace as NDJSON.
void write_trace(const std::vector<TraceRecord>& events, const std::filesystem::path& path);

/// Loads the run's metric samples and log entries into the backends.
void seed_backends(const GroundTruth& gt, MetricsBackend& metrics, LogsBackend& logs,
                   std::size_t chunk = 5000);

}  // namespace wfprov::sim
