#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>

#include "wfprov/model/event.hpp"
#include "wfprov/model/ids.hpp"
#include "wfprov/model/time.hpp"

namespace wfprov {

/// One raw record as observed at a source: a trace/socket line plus the
/// instant it was read.
struct RawSourceRecord {
  EventSource source = EventSource::workflow_engine;
  std::string payload;
  Timestamp arrival_timestamp;
};

/// Why an adapter produced no event.
enum class SkipReason {
  noise,        // not a provenance signal at all
  unsupported,  // recognized record type outside the canonical vocabulary
  malformed,    // recognized but unusable (bad timestamp, missing field, bad id)
};

std::string_view to_string(SkipReason r) noexcept;

struct NormalizeResult {
  std::optional<CanonicalEvent> event;
  std::optional<SkipReason> skip;
  std::string diagnostic;

  bool ok() const { return event.has_value(); }
};

struct AdapterStats {
  std::uint64_t records = 0;
  std::uint64_t emitted = 0;
  std::uint64_t skipped_noise = 0;
  std::uint64_t skipped_unsupported = 0;
  std::uint64_t skipped_malformed = 0;
  std::uint64_t dedup_dropped = 0;

  std::uint64_t skipped() const { return skipped_noise + skipped_unsupported + skipped_malformed; }
};

/// Flattened view of a raw record: the outer trace envelope plus payload
/// fields, whichever grammar (JSON object or `key=value` text) carried them.
struct RecordFields {
  std::map<std::string, std::string> fields;
  std::optional<std::string> ts;
  std::optional<std::string> id;
};

/// Parses either a trace envelope `{"source":..,"ts":..,"payload":{..}|".."}`
/// or a bare `key=value` text line. Returns nullopt for unparseable JSON.
std::optional<RecordFields> split_record(const std::string& payload);

/// Per-source normalizer. Not synchronized: one caller at a time (the ingest
/// pipeline serializes access per source).
class SourceAdapter {
 public:
  static constexpr std::size_t kDefaultDedupWindow = 1024;

  SourceAdapter(EventSource source, WorkflowId default_workflow,
                std::size_t dedup_window = kDefaultDedupWindow);
  virtual ~SourceAdapter() = default;

  EventSource source() const noexcept { return source_; }

  /// Parses `rec` per the source grammar and stamps the next source_seq.
  /// Never throws; failures come back as a skip with a diagnostic.
  NormalizeResult normalize(const RawSourceRecord& rec);

  /// True when `e` passes; false when its event_id was seen within the
  /// sliding window of recent ids.
  bool dedup(const CanonicalEvent& e);

  /// normalize + dedup, with stats.
  NormalizeResult process(const RawSourceRecord& rec);

  const AdapterStats& stats() const noexcept { return stats_; }
  std::uint64_t next_seq() const noexcept { return next_seq_; }

 protected:
  /// Maps fields onto a canonical event (without event id / seq).
  virtual NormalizeResult map_fields(const RecordFields& rec, Timestamp ts) const = 0;

  const WorkflowId& default_workflow() const noexcept { return default_workflow_; }

 private:
  EventSource source_;
  WorkflowId default_workflow_;
  std::size_t dedup_window_;
  std::uint64_t next_seq_ = 0;
  std::deque<std::string> recent_order_;
  std::unordered_set<std::string> recent_;
  AdapterStats stats_;
};

/// Task state changes from the workflow engine:
/// payload {"task","workflow"?,"state","abstract_task"?,"parents"?}.
class WorkflowEngineAdapter final : public SourceAdapter {
 public:
  explicit WorkflowEngineAdapter(WorkflowId default_workflow,
                                 std::size_t dedup_window = kDefaultDedupWindow)
      : SourceAdapter(EventSource::workflow_engine, std::move(default_workflow), dedup_window) {}

 protected:
  NormalizeResult map_fields(const RecordFields& rec, Timestamp ts) const override;
};

/// Execution-object events from the resource manager:
/// payload {"event":"assigned"|"scheduled"|"failed","pod","task"?,"node"?}.
class ResourceManagerAdapter final : public SourceAdapter {
 public:
  explicit ResourceManagerAdapter(WorkflowId default_workflow,
                                  std::size_t dedup_window = kDefaultDedupWindow)
      : SourceAdapter(EventSource::resource_manager, std::move(default_workflow), dedup_window) {}

 protected:
  NormalizeResult map_fields(const RecordFields& rec, Timestamp ts) const override;
};

std::unique_ptr<SourceAdapter> make_adapter(EventSource source, WorkflowId default_workflow,
                                            std::size_t dedup_window = SourceAdapter::kDefaultDedupWindow);

}  // namespace wfprov
