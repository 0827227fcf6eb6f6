#include "wfprov/processing/processor.hpp"

#include <deque>

#include "wfprov/model/errors.hpp"

namespace wfprov {

std::string_view to_string(ProcessOutcome o) noexcept {
  switch (o) {
    case ProcessOutcome::applied: return "applied";
    case ProcessOutcome::duplicate: return "duplicate";
    case ProcessOutcome::stale: return "stale";
    case ProcessOutcome::deferred: return "deferred";
    case ProcessOutcome::orphaned: return "orphaned";
    case ProcessOutcome::irrelevant: return "irrelevant";
  }
  return "?";
}

nlohmann::json to_json(const ProcessorCounters& c) {
  return {{"dequeued", c.dequeued}, {"applied", c.applied},     {"duplicate", c.duplicate},
          {"stale", c.stale},       {"invalid", c.invalid},     {"deferred", c.deferred},
          {"orphaned", c.orphaned}, {"irrelevant", c.irrelevant}, {"pending", c.pending},
          {"committed", c.committed}};
}

bool classify(const CanonicalEvent& e, const EDag& dag) {
  if (!validate_event(e).empty()) return false;
  return e.workflow_id == dag.workflow_id();
}

ExtractedIds extract_identifiers(const CanonicalEvent& e, const EDag& dag) {
  ExtractedIds ids;
  ids.task_id = e.task_id;
  ids.exec_object_id = e.exec_object_id;
  ids.node_id = e.node_id;
  if (!ids.task_id && ids.exec_object_id) ids.task_id = dag.task_for_exec(*ids.exec_object_id);
  if (ids.task_id) {
    if (const auto* r = dag.find(*ids.task_id)) {
      ids.abstract_task_id = r->abstract_task_id;
      if (!ids.exec_object_id) ids.exec_object_id = r->exec_object_id;
      if (!ids.node_id) ids.node_id = r->node_id;
    } else if (auto it = e.attrs.find("abstract_task_id"); it != e.attrs.end() &&
                                                           is_valid_identifier(it->second)) {
      ids.abstract_task_id = AbstractTaskId::unchecked(it->second);
    }
  }
  return ids;
}

EventProcessor::EventProcessor(EDagStore& store, ProcessorOptions options)
    : store_(store), options_(options), pending_(options.pending_capacity) {}

ProcessOutcome EventProcessor::defer(const std::string& key, const CanonicalEvent& e,
                                     clock::time_point now) {
  return pending_.push(key, e, now) ? ProcessOutcome::deferred : ProcessOutcome::orphaned;
}

bool EventProcessor::try_register_task(const CanonicalEvent& e, EDag& dag) {
  if (!options_.register_unknown_tasks) return false;
  const auto abs = e.attrs.find("abstract_task_id");
  if (abs == e.attrs.end() || !is_valid_identifier(abs->second)) return false;
  TaskRecord rec;
  rec.task_id = *e.task_id;
  rec.abstract_task_id = AbstractTaskId::unchecked(abs->second);
  rec.workflow_id = dag.workflow_id();
  dag.add_task(std::move(rec));
  if (auto p = e.attrs.find("parents"); p != e.attrs.end()) {
    std::string_view rest = p->second;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto name = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (!is_valid_identifier(name)) continue;
      const auto parent = TaskId::unchecked(std::string(name));
      if (!dag.contains(parent)) continue;
      try {
        dag.add_dependency(parent, *e.task_id);
      } catch (const CycleError&) {
      }
    }
  }
  unblocked_.push_back(PendingQueue::task_key(*e.task_id));
  return true;
}

ProcessOutcome EventProcessor::apply_event(const CanonicalEvent& e, EDag& dag,
                                           clock::time_point now) {
  unblocked_.clear();
  last_invalid_ = false;
  const auto ts = e.source_timestamp;
  TaskUpdate u;
  TaskId target;

  if (is_task_kind(e.kind)) {
    target = *e.task_id;
    if (!dag.contains(target) && !try_register_task(e, dag))
      return defer(PendingQueue::task_key(target), e, now);
    const auto st = *status_of(e.kind);
    u.status = StatusChange{st, ts, StatusOrigin::engine};
    if (st == TaskStatus::running) u.started_at = ts;
    if (is_terminal(st)) u.ended_at = ts;
  } else if (e.kind == EventKind::exec_assigned) {
    target = *e.task_id;
    if (!dag.contains(target)) return defer(PendingQueue::task_key(target), e, now);
    u.binding = std::make_pair(*e.exec_object_id, ts);
    if (e.node_id) u.placement = std::make_pair(*e.exec_object_id, *e.node_id);
  } else {
    const auto& exec = *e.exec_object_id;
    auto bound = dag.task_for_exec(exec);
    if (!bound) return defer(PendingQueue::exec_key(exec), e, now);
    target = *bound;
    if (e.kind == EventKind::exec_scheduled) {
      u.placement = std::make_pair(exec, *e.node_id);
    } else {
      u.status = StatusChange{TaskStatus::failed, ts, StatusOrigin::infrastructure};
      u.ended_at = ts;
      u.exec_failure = std::make_pair(exec, ts);
      if (e.node_id) u.placement = std::make_pair(exec, *e.node_id);
    }
  }

  const auto r = dag.apply_attrs(target, u, e.event_id);
  switch (r.outcome) {
    case ApplyOutcome::applied:
      if (u.binding) unblocked_.push_back(PendingQueue::exec_key(u.binding->first));
      return ProcessOutcome::applied;
    case ApplyOutcome::duplicate:
      return ProcessOutcome::duplicate;
    case ApplyOutcome::stale:
      last_invalid_ = r.action == TransitionAction::invalid;
      return ProcessOutcome::stale;
    case ApplyOutcome::unknown_task:
      return defer(PendingQueue::task_key(target), e, now);
  }
  return ProcessOutcome::stale;
}

void EventProcessor::handle(CanonicalEvent first, EDag& dag, clock::time_point now) {
  std::deque<CanonicalEvent> work;
  work.push_back(std::move(first));
  while (!work.empty()) {
    auto e = std::move(work.front());
    work.pop_front();
    if (!classify(e, dag)) {
      std::lock_guard lock(counters_mu_);
      ++counters_.irrelevant;
      continue;
    }
    const auto o = apply_event(e, dag, now);
    {
      std::lock_guard lock(counters_mu_);
      switch (o) {
        case ProcessOutcome::applied: ++counters_.applied; break;
        case ProcessOutcome::duplicate: ++counters_.duplicate; break;
        case ProcessOutcome::stale:
          ++counters_.stale;
          if (last_invalid_) ++counters_.invalid;
          break;
        case ProcessOutcome::deferred:
          ++counters_.deferred;
          ++counters_.pending;
          break;
        case ProcessOutcome::orphaned: ++counters_.orphaned; break;
        case ProcessOutcome::irrelevant: ++counters_.irrelevant; break;
      }
    }
    if (o == ProcessOutcome::applied || o == ProcessOutcome::duplicate ||
        o == ProcessOutcome::stale)
      resolved_ts_.push_back(e.source_timestamp.micros());
    const auto keys = unblocked_;
    for (const auto& key : keys) {
      auto released = pending_.take(key);
      if (released.empty()) continue;
      {
        std::lock_guard lock(counters_mu_);
        counters_.pending -= released.size();
      }
      for (auto& r : released) work.push_back(std::move(r));
    }
  }
}

void EventProcessor::process_batch(std::vector<CanonicalEvent> batch) {
  if (batch.empty()) return;
  {
    std::lock_guard lock(counters_mu_);
    counters_.dequeued += batch.size();
  }
  resolved_ts_.clear();
  const auto now = clock::now();
  Timestamp committed;
  store_.write([&](EDag& dag) {
    for (auto& e : batch) handle(std::move(e), dag, now);
    committed = Timestamp::now();
  });
  std::vector<double> ms;
  ms.reserve(resolved_ts_.size());
  for (const auto ts : resolved_ts_)
    ms.push_back(static_cast<double>(committed.micros() - ts) / 1000.0);
  latency_.record_many(ms);
  std::lock_guard lock(counters_mu_);
  counters_.committed += batch.size();
}

std::size_t EventProcessor::expire_pending(clock::time_point now) {
  const auto expired = pending_.expire(now, options_.pending_ttl);
  if (!expired.empty()) {
    std::lock_guard lock(counters_mu_);
    counters_.pending -= expired.size();
    counters_.orphaned += expired.size();
  }
  return expired.size();
}

std::size_t EventProcessor::flush_pending() {
  const auto drained = pending_.drain();
  std::lock_guard lock(counters_mu_);
  counters_.pending -= drained.size();
  counters_.orphaned += drained.size();
  return drained.size();
}

void EventProcessor::run_loop(EventBuffer& buffer, std::stop_token stop) {
  auto next_expiry = clock::now() + std::chrono::seconds(1);
  while (!stop.stop_requested()) {
    auto batch = buffer.wait_dequeue_batch(options_.batch_size, options_.poll_interval);
    if (!batch.empty()) process_batch(std::move(batch));
    const auto now = clock::now();
    if (now >= next_expiry) {
      expire_pending(now);
      next_expiry = now + std::chrono::seconds(1);
    }
    if (buffer.closed() && buffer.size() == 0) break;
  }
  for (auto batch = buffer.dequeue_batch(options_.batch_size); !batch.empty();
       batch = buffer.dequeue_batch(options_.batch_size))
    process_batch(std::move(batch));
}

ProcessorCounters EventProcessor::counters() const {
  std::lock_guard lock(counters_mu_);
  return counters_;
}

nlohmann::json EventProcessor::stats_json(bool include_samples) const {
  const auto c = counters();
  nlohmann::json j;
  j["counters"] = to_json(c);
  j["conserved"] = c.conserved();
  j["latency"] = to_json(latency_.summary());
  j["latency_histogram"] = latency_.histogram();
  if (include_samples) j["latency_samples_ms"] = latency_.samples();
  return j;
}

ProcessorThread::ProcessorThread(EventProcessor& processor, EventBuffer& buffer)
    : worker_([&processor, &buffer](std::stop_token st) { processor.run_loop(buffer, st); }) {}

ProcessorThread::~ProcessorThread() {
  stop();
  join();
}

void ProcessorThread::stop() { worker_.request_stop(); }

void ProcessorThread::join() {
  if (worker_.joinable()) worker_.join();
}

}  // namespace wfprov
