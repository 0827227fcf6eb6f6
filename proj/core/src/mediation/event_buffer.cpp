#include "wfprov/mediation/event_buffer.hpp"

#include "wfprov/model/errors.hpp"

namespace wfprov {

std::string_view to_string(EnqueueResult r) noexcept {
  switch (r) {
    case EnqueueResult::accepted: return "accepted";
    case EnqueueResult::backpressure: return "backpressure";
    case EnqueueResult::dropped: return "dropped";
    case EnqueueResult::closed: return "closed";
  }
  return "closed";
}

EventBuffer::EventBuffer(std::size_t capacity_per_source, OverflowPolicy policy)
    : capacity_(capacity_per_source), policy_(policy) {
  if (capacity_ == 0) throw ValidationError("buffer capacity must be positive");
}

EnqueueResult EventBuffer::enqueue_locked(CanonicalEvent& e) {
  if (closed_) return EnqueueResult::closed;
  auto& q = queues_[source_index(e.source)];
  if (q.size() >= capacity_) {
    if (policy_ == OverflowPolicy::drop_new) {
      ++stats_.dropped;
      return EnqueueResult::dropped;
    }
    ++stats_.backpressure_signals;
    return EnqueueResult::backpressure;
  }
  q.emplace_back(arrival_counter_++, std::move(e));
  ++stats_.accepted;
  return EnqueueResult::accepted;
}

EnqueueResult EventBuffer::enqueue(CanonicalEvent e) {
  EnqueueResult r;
  {
    std::lock_guard lock(mu_);
    r = enqueue_locked(e);
  }
  if (r == EnqueueResult::accepted) not_empty_.notify_one();
  return r;
}

EnqueueResult EventBuffer::enqueue_wait(CanonicalEvent e) {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto r = enqueue_locked(e);
    if (r != EnqueueResult::backpressure) {
      lock.unlock();
      if (r == EnqueueResult::accepted) not_empty_.notify_one();
      return r;
    }
    const auto src = source_index(e.source);
    not_full_.wait(lock, [&] { return closed_ || queues_[src].size() < capacity_; });
  }
}

std::vector<CanonicalEvent> EventBuffer::take_locked(std::size_t max_n) {
  std::vector<CanonicalEvent> out;
  while (out.size() < max_n) {
    std::deque<std::pair<std::uint64_t, CanonicalEvent>>* next = nullptr;
    for (auto& q : queues_)
      if (!q.empty() && (!next || q.front().first < next->front().first)) next = &q;
    if (!next) break;
    out.push_back(std::move(next->front().second));
    next->pop_front();
  }
  stats_.delivered += out.size();
  return out;
}

std::vector<CanonicalEvent> EventBuffer::dequeue_batch(std::size_t max_n) {
  std::vector<CanonicalEvent> out;
  {
    std::lock_guard lock(mu_);
    out = take_locked(max_n);
  }
  if (!out.empty()) not_full_.notify_all();
  return out;
}

std::vector<CanonicalEvent> EventBuffer::wait_dequeue_batch(std::size_t max_n,
                                                            std::chrono::milliseconds timeout) {
  std::vector<CanonicalEvent> out;
  {
    std::unique_lock lock(mu_);
    not_empty_.wait_for(lock, timeout, [&] {
      if (closed_) return true;
      for (const auto& q : queues_)
        if (!q.empty()) return true;
      return false;
    });
    out = take_locked(max_n);
  }
  if (!out.empty()) not_full_.notify_all();
  return out;
}

void EventBuffer::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  not_empty_.notify_all();
  not_full_.notify_all();
}

bool EventBuffer::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::size_t EventBuffer::size() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& q : queues_) n += q.size();
  return n;
}

std::size_t EventBuffer::size(EventSource s) const {
  std::lock_guard lock(mu_);
  return queues_[source_index(s)].size();
}

BufferStats EventBuffer::stats() const {
  std::lock_guard lock(mu_);
  auto s = stats_;
  s.buffered = 0;
  for (const auto& q : queues_) s.buffered += q.size();
  return s;
}

}  // namespace wfprov
