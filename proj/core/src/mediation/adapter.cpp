#include "wfprov/mediation/adapter.hpp"

#include <cctype>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace wfprov {

namespace {

using nlohmann::json;

std::string scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

/// `key=value` tokens separated by whitespace; values may be double-quoted.
std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const auto tok_start = i;
    while (i < text.size() && text[i] != '=' && !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i >= text.size() || text[i] != '=') continue;
    const auto key = text.substr(tok_start, i - tok_start);
    ++i;
    std::string value;
    if (i < text.size() && text[i] == '"') {
      ++i;
      while (i < text.size() && text[i] != '"') value += text[i++];
      if (i < text.size()) ++i;
    } else {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
        value += text[i++];
    }
    if (!key.empty()) out[std::string(key)] = std::move(value);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string derive_event_id(EventSource source, const RecordFields& rec, Timestamp ts) {
  std::uint64_t h = fnv1a(to_string(source));
  h = fnv1a(ts.to_string(), h);
  for (const auto& [k, v] : rec.fields) {
    h = fnv1a(k, fnv1a("|", h));
    h = fnv1a(v, fnv1a("=", h));
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(source == EventSource::workflow_engine ? "we-" : "rm-") + buf;
}

NormalizeResult skip(SkipReason reason, std::string why) {
  return NormalizeResult{std::nullopt, reason, std::move(why)};
}

const std::string* field(const RecordFields& rec, const char* key) {
  auto it = rec.fields.find(key);
  if (it == rec.fields.end() || it->second.empty()) return nullptr;
  return &it->second;
}

}  // namespace

std::string_view to_string(SkipReason r) noexcept {
  switch (r) {
    case SkipReason::noise: return "noise";
    case SkipReason::unsupported: return "unsupported";
    case SkipReason::malformed: return "malformed";
  }
  return "noise";
}

std::optional<RecordFields> split_record(const std::string& payload) {
  RecordFields rec;
  std::size_t first = 0;
  while (first < payload.size() && std::isspace(static_cast<unsigned char>(payload[first]))) ++first;
  if (first < payload.size() && payload[first] == '{') {
    const auto doc = json::parse(payload, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    if (auto it = doc.find("ts"); it != doc.end() && it->is_string()) rec.ts = it->get<std::string>();
    if (auto it = doc.find("id"); it != doc.end() && it->is_string()) rec.id = it->get<std::string>();
    if (auto it = doc.find("payload"); it != doc.end()) {
      if (it->is_object()) {
        for (const auto& [k, v] : it->items()) rec.fields[k] = scalar_to_string(v);
      } else if (it->is_string()) {
        rec.fields = parse_key_values(it->get_ref<const std::string&>());
      }
    }
  } else {
    rec.fields = parse_key_values(payload);
  }
  if (!rec.ts) {
    if (auto it = rec.fields.find("ts"); it != rec.fields.end()) {
      rec.ts = it->second;
      rec.fields.erase(it);
    }
  }
  return rec;
}

SourceAdapter::SourceAdapter(EventSource source, WorkflowId default_workflow,
                             std::size_t dedup_window)
    : source_(source), default_workflow_(std::move(default_workflow)), dedup_window_(dedup_window) {}

NormalizeResult SourceAdapter::normalize(const RawSourceRecord& rec) {
  auto fields = split_record(rec.payload);
  if (!fields) return skip(SkipReason::noise, "unparseable record");
  Timestamp ts = rec.arrival_timestamp;
  if (fields->ts) {
    auto parsed = Timestamp::try_parse(*fields->ts);
    if (!parsed) return skip(SkipReason::malformed, "bad timestamp '" + *fields->ts + "'");
    ts = *parsed;
  }
  NormalizeResult out;
  try {
    out = map_fields(*fields, ts);
  } catch (const std::exception& ex) {
    return skip(SkipReason::malformed, ex.what());
  }
  if (!out.event) return out;
  auto& e = *out.event;
  e.source = source_;
  e.source_timestamp = ts;
  e.event_id = fields->id ? *fields->id : derive_event_id(source_, *fields, ts);
  if (auto problems = validate_event(e); !problems.empty())
    return skip(SkipReason::malformed, problems.front());
  e.source_seq = next_seq_++;
  return out;
}

bool SourceAdapter::dedup(const CanonicalEvent& e) {
  if (dedup_window_ == 0) return true;
  if (recent_.contains(e.event_id)) return false;
  recent_.insert(e.event_id);
  recent_order_.push_back(e.event_id);
  if (recent_order_.size() > dedup_window_) {
    recent_.erase(recent_order_.front());
    recent_order_.pop_front();
  }
  return true;
}

NormalizeResult SourceAdapter::process(const RawSourceRecord& rec) {
  ++stats_.records;
  auto out = normalize(rec);
  if (!out.event) {
    switch (*out.skip) {
      case SkipReason::noise: ++stats_.skipped_noise; break;
      case SkipReason::unsupported: ++stats_.skipped_unsupported; break;
      case SkipReason::malformed: ++stats_.skipped_malformed; break;
    }
    return out;
  }
  if (!dedup(*out.event)) {
    ++stats_.dedup_dropped;
    out.event.reset();
    out.diagnostic = "duplicate event id";
    return out;
  }
  ++stats_.emitted;
  return out;
}

NormalizeResult WorkflowEngineAdapter::map_fields(const RecordFields& rec, Timestamp) const {
  const auto* task = field(rec, "task");
  const auto* state = field(rec, "state");
  if (!task && !state) return skip(SkipReason::noise, "no task state fields");
  if (!task) return skip(SkipReason::malformed, "state without task");
  if (!state) return skip(SkipReason::malformed, "task without state");

  std::optional<EventKind> kind;
  if (*state == "queued") kind = EventKind::task_queued;
  else if (*state == "running") kind = EventKind::task_running;
  else if (*state == "succeeded" || *state == "success") kind = EventKind::task_succeeded;
  else if (*state == "failed") kind = EventKind::task_failed;
  if (!kind) return skip(SkipReason::unsupported, "state '" + *state + "'");

  CanonicalEvent e;
  e.kind = *kind;
  e.task_id = TaskId(*task);
  const auto* wf = field(rec, "workflow");
  e.workflow_id = wf ? WorkflowId(*wf) : default_workflow();
  if (const auto* a = field(rec, "abstract_task")) e.attrs["abstract_task_id"] = *a;
  if (const auto* p = field(rec, "parents")) e.attrs["parents"] = *p;
  if (const auto* t = field(rec, "try")) e.attrs["attempt"] = *t;
  return NormalizeResult{std::move(e), std::nullopt, {}};
}

NormalizeResult ResourceManagerAdapter::map_fields(const RecordFields& rec, Timestamp) const {
  const auto* ev = field(rec, "event");
  const auto* pod = field(rec, "pod");
  if (!ev || !pod) return skip(SkipReason::noise, "no pod event fields");

  CanonicalEvent e;
  if (*ev == "assigned") e.kind = EventKind::exec_assigned;
  else if (*ev == "scheduled") e.kind = EventKind::exec_scheduled;
  else if (*ev == "failed") e.kind = EventKind::exec_failed;
  else return skip(SkipReason::unsupported, "pod event '" + *ev + "'");

  e.exec_object_id = ExecObjectId(*pod);
  if (const auto* t = field(rec, "task")) e.task_id = TaskId(*t);
  if (const auto* n = field(rec, "node")) e.node_id = NodeId(*n);
  const auto* wf = field(rec, "workflow");
  e.workflow_id = wf ? WorkflowId(*wf) : default_workflow();
  if (const auto* reason = field(rec, "reason")) e.attrs["reason"] = *reason;
  return NormalizeResult{std::move(e), std::nullopt, {}};
}

std::unique_ptr<SourceAdapter> make_adapter(EventSource source, WorkflowId default_workflow,
                                            std::size_t dedup_window) {
  if (source == EventSource::workflow_engine)
    return std::make_unique<WorkflowEngineAdapter>(std::move(default_workflow), dedup_window);
  return std::make_unique<ResourceManagerAdapter>(std::move(default_workflow), dedup_window);
}

}  // namespace wfprov
