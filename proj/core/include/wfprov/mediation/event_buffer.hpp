#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <utility>
#include <vector>

#include "wfprov/model/event.hpp"

namespace wfprov {

enum class OverflowPolicy { block, drop_new };

enum class EnqueueResult { accepted, backpressure, dropped, closed };

std::string_view to_string(EnqueueResult r) noexcept;

struct BufferStats {
  std::uint64_t accepted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t backpressure_signals = 0;
  std::size_t buffered = 0;
};

/// Bounded multi-producer / single-consumer buffer with one FIFO per source.
///
/// Events from one source are delivered in enqueue order. Across sources,
/// delivery follows arrival order at the buffer; no cross-source ordering
/// beyond that is implied.
class EventBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 10'000;

  explicit EventBuffer(std::size_t capacity_per_source = kDefaultCapacity,
                       OverflowPolicy policy = OverflowPolicy::block);

  EventBuffer(const EventBuffer&) = delete;
  EventBuffer& operator=(const EventBuffer&) = delete;

  /// Never blocks. When the source queue is full: `backpressure` under the
  /// block policy (event not taken), `dropped` under drop_new (counted).
  EnqueueResult enqueue(CanonicalEvent e);

  /// Waits while the source queue is full (block policy) until space frees
  /// up or the buffer closes.
  EnqueueResult enqueue_wait(CanonicalEvent e);

  /// Up to `max_n` events; empty when drained.
  std::vector<CanonicalEvent> dequeue_batch(std::size_t max_n);

  /// Like dequeue_batch but waits up to `timeout` for the first event.
  std::vector<CanonicalEvent> wait_dequeue_batch(std::size_t max_n,
                                                 std::chrono::milliseconds timeout);

  /// Wakes blocked producers and consumers; later enqueues return `closed`.
  void close();
  bool closed() const;

  std::size_t capacity() const noexcept { return capacity_; }
  OverflowPolicy policy() const noexcept { return policy_; }
  std::size_t size() const;
  std::size_t size(EventSource s) const;
  BufferStats stats() const;

 private:
  EnqueueResult enqueue_locked(CanonicalEvent& e);
  std::vector<CanonicalEvent> take_locked(std::size_t max_n);

  const std::size_t capacity_;
  const OverflowPolicy policy_;

  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::array<std::deque<std::pair<std::uint64_t, CanonicalEvent>>, kSourceCount> queues_;
  std::uint64_t arrival_counter_ = 0;
  bool closed_ = false;
  BufferStats stats_;
};

}  // namespace wfprov
