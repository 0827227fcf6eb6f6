#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stop_token>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/edag/edag_store.hpp"
#include "wfprov/mediation/event_buffer.hpp"
#include "wfprov/model/event.hpp"
#include "wfprov/processing/latency.hpp"
#include "wfprov/processing/pending_queue.hpp"

namespace wfprov {

/// `orphaned` here means the pending queue was full at deferral time.
enum class ProcessOutcome { applied, duplicate, stale, deferred, orphaned, irrelevant };

std::string_view to_string(ProcessOutcome o) noexcept;

struct ProcessorOptions {
  std::chrono::milliseconds pending_ttl{60'000};
  std::size_t pending_capacity = 100'000;
  std::size_t batch_size = 512;
  std::chrono::milliseconds poll_interval{20};
  /// Dynamic-DAG mode: task events carrying abstract_task_id create the task
  /// (and edges to already known parents) instead of waiting for add_task.
  bool register_unknown_tasks = false;
};

/// Processor counters. `deferred` counts deferrals (an event can be deferred
/// and later resolved); `invalid` is the subset of `stale` that hit a
/// forbidden transition. Every dequeued event ends in exactly one of
/// applied / duplicate / stale / orphaned / irrelevant, or is still pending.
struct ProcessorCounters {
  std::uint64_t dequeued = 0;
  std::uint64_t applied = 0;
  std::uint64_t duplicate = 0;
  std::uint64_t stale = 0;
  std::uint64_t invalid = 0;
  std::uint64_t deferred = 0;
  std::uint64_t orphaned = 0;
  std::uint64_t irrelevant = 0;
  std::uint64_t pending = 0;
  /// Dequeued events whose batch has been committed.
  std::uint64_t committed = 0;

  bool conserved() const {
    return applied + duplicate + stale + orphaned + irrelevant + pending == dequeued;
  }
};

nlohmann::json to_json(const ProcessorCounters& c);

struct ExtractedIds {
  std::optional<TaskId> task_id;
  std::optional<AbstractTaskId> abstract_task_id;
  std::optional<ExecObjectId> exec_object_id;
  std::optional<NodeId> node_id;
};

/// True when `e` is well-formed and belongs to the workflow held by `dag`.
bool classify(const CanonicalEvent& e, const EDag& dag);

/// Identifiers connecting `e` to the workflow context; the task comes from
/// the event or, for pod-only events, from the exec binding.
ExtractedIds extract_identifiers(const CanonicalEvent& e, const EDag& dag);

/// The sole mutator of the eDAG. Not thread-safe except for the read-only
/// accessors (counters, latencies), which may be called from any thread.
class EventProcessor {
 public:
  using clock = PendingQueue::clock;

  explicit EventProcessor(EDagStore& store, ProcessorOptions options = {});

  /// Applies one relevant event to `dag`. Unknown tasks / exec objects are
  /// deferred. Exposed for tests; does not touch counters.
  ProcessOutcome apply_event(const CanonicalEvent& e, EDag& dag, clock::time_point now);

  /// Processes `batch` under one write lock and records the ingestion latency
  /// of every resolved event at commit.
  void process_batch(std::vector<CanonicalEvent> batch);

  /// Moves pending entries older than the TTL to orphaned.
  std::size_t expire_pending(clock::time_point now = clock::now());

  /// Drains `buffer` until it is closed and empty or `stop` is requested,
  /// then processes whatever is left.
  void run_loop(EventBuffer& buffer, std::stop_token stop);

  /// Orphans every still-pending event.
  std::size_t flush_pending();

  ProcessorCounters counters() const;
  const LatencyRecorder& latency() const noexcept { return latency_; }
  LatencyRecorder& latency() noexcept { return latency_; }
  /// Counters plus latency summary and histogram; raw samples on request.
  nlohmann::json stats_json(bool include_samples = false) const;
  void reset_latency() { latency_.clear(); }

 private:
  /// Processes `e` and every pending event it unblocks; bumps counters.
  void handle(CanonicalEvent e, EDag& dag, clock::time_point now);
  ProcessOutcome defer(const std::string& key, const CanonicalEvent& e, clock::time_point now);
  bool try_register_task(const CanonicalEvent& e, EDag& dag);

  EDagStore& store_;
  ProcessorOptions options_;
  PendingQueue pending_;
  LatencyRecorder latency_;

  mutable std::mutex counters_mu_;
  ProcessorCounters counters_;
  /// Source timestamps (µs) of events resolved in the current batch.
  std::vector<std::int64_t> resolved_ts_;
  /// Pending keys unblocked by the last apply_event.
  std::vector<std::string> unblocked_;
  bool last_invalid_ = false;
};

/// Runs EventProcessor::run_loop on a background thread.
class ProcessorThread {
 public:
  ProcessorThread(EventProcessor& processor, EventBuffer& buffer);
  ~ProcessorThread();

  void stop();
  void join();

 private:
  std::jthread worker_;
};

}  // namespace wfprov
