#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wfprov/mediation/adapter.hpp"
#include "wfprov/mediation/event_buffer.hpp"

namespace wfprov {

/// Counts for the conservation identity
///   records = skipped + dedup_dropped + buffer_dropped + enqueued.
struct MediationStats {
  std::uint64_t records = 0;
  std::uint64_t skipped = 0;
  std::uint64_t dedup_dropped = 0;
  std::uint64_t buffer_dropped = 0;
  std::uint64_t enqueued = 0;
  std::array<AdapterStats, kSourceCount> per_source{};

  bool conserved() const {
    return records == skipped + dedup_dropped + buffer_dropped + enqueued;
  }
};

/// Adapters for both sources in front of one EventBuffer. Safe to call from
/// several producer threads; access is serialized per source so that
/// source_seq order equals buffer order, and backpressure stalls only the
/// producing source.
class IngestPipeline {
 public:
  IngestPipeline(EventBuffer& buffer, WorkflowId default_workflow,
                 std::size_t dedup_window = SourceAdapter::kDefaultDedupWindow);

  EnqueueResult submit(const RawSourceRecord& rec);

  /// Routes a trace line by its `"source"` field, falling back to `source`
  /// for bare text lines. Unroutable lines count as skipped noise.
  void submit_line(const std::string& line, std::optional<EventSource> source = std::nullopt);

  MediationStats stats() const;
  EventBuffer& buffer() noexcept { return buffer_; }

 private:
  struct Lane {
    std::mutex mu;
    std::unique_ptr<SourceAdapter> adapter;
    std::uint64_t buffer_dropped = 0;
    std::uint64_t enqueued = 0;
  };

  EventBuffer& buffer_;
  mutable std::array<Lane, kSourceCount> lanes_;
  std::atomic<std::uint64_t> unroutable_{0};
};

/// Extracts the value of a top-level `"source"` key without a full parse.
std::optional<EventSource> peek_source(std::string_view line) noexcept;

/// A producer feeding an IngestPipeline: pull-based over files, push-based
/// over a socket.
class RecordSource {
 public:
  virtual ~RecordSource() = default;
  virtual void start(IngestPipeline& pipeline) = 0;
  virtual void stop() = 0;
  virtual void join() = 0;
};

/// Reads an NDJSON trace file on its own thread.
class TraceFileSource final : public RecordSource {
 public:
  explicit TraceFileSource(std::filesystem::path path,
                           std::optional<EventSource> fallback = std::nullopt);
  ~TraceFileSource() override;

  void start(IngestPipeline& pipeline) override;
  void stop() override;
  void join() override;

  /// Synchronous variant; returns the number of lines read.
  static std::uint64_t pump(const std::filesystem::path& path, IngestPipeline& pipeline,
                            std::optional<EventSource> fallback = std::nullopt);

  std::uint64_t lines_read() const noexcept { return lines_.load(); }

 private:
  std::filesystem::path path_;
  std::optional<EventSource> fallback_;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> lines_{0};
  std::thread worker_;
};

/// Accepts TCP connections on a local port and feeds every received line to
/// the pipeline; one reader thread per connection.
class SocketSource final : public RecordSource {
 public:
  /// Binds immediately; port 0 picks an ephemeral port (see port()).
  explicit SocketSource(const std::string& host = "127.0.0.1", int port = 0);
  ~SocketSource() override;

  SocketSource(const SocketSource&) = delete;
  SocketSource& operator=(const SocketSource&) = delete;

  int port() const noexcept { return port_; }

  void start(IngestPipeline& pipeline) override;
  void stop() override;
  void join() override;

  std::uint64_t lines_read() const noexcept { return lines_.load(); }
  std::uint64_t connections() const noexcept { return connections_.load(); }

 private:
  void accept_loop(IngestPipeline& pipeline);
  void read_loop(int fd, IngestPipeline& pipeline);

  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> lines_{0};
  std::atomic<std::uint64_t> connections_{0};
  std::thread acceptor_;
  std::mutex readers_mu_;
  std::vector<std::thread> readers_;
};

/// Newline-delimited writer over a TCP connection.
class LineSocketWriter {
 public:
  LineSocketWriter(const std::string& host, int port);
  ~LineSocketWriter();

  LineSocketWriter(const LineSocketWriter&) = delete;
  LineSocketWriter& operator=(const LineSocketWriter&) = delete;

  /// Appends '\n'. Throws Error when the peer is gone.
  void write_line(std::string_view line);
  void close();

 private:
  int fd_ = -1;
};

}  // namespace wfprov
