#pragma once

// JSON mapping of the domain types. Field names are part of the external
// interface and must not change.

#include <nlohmann/json.hpp>

#include "wfprov/model/event.hpp"
#include "wfprov/model/ids.hpp"
#include "wfprov/model/status.hpp"
#include "wfprov/model/task_record.hpp"
#include "wfprov/model/time.hpp"
#include "wfprov/model/workflow_spec.hpp"

namespace nlohmann {

template <typename Tag>
struct adl_serializer<wfprov::Id<Tag>> {
  static void to_json(json& j, const wfprov::Id<Tag>& id) { j = id.str(); }
  static void from_json(const json& j, wfprov::Id<Tag>& id) {
    id = wfprov::Id<Tag>(j.get<std::string>());
  }
};

template <>
struct adl_serializer<wfprov::Timestamp> {
  static void to_json(json& j, const wfprov::Timestamp& t) { j = t.to_string(); }
  static void from_json(const json& j, wfprov::Timestamp& t) {
    t = wfprov::Timestamp::parse(j.get<std::string>());
  }
};

}  // namespace nlohmann

namespace wfprov {

using Json = nlohmann::json;

void to_json(Json& j, TaskStatus s);
void from_json(const Json& j, TaskStatus& s);
void to_json(Json& j, EventSource s);
void from_json(const Json& j, EventSource& s);
void to_json(Json& j, EventKind k);
void from_json(const Json& j, EventKind& k);
void to_json(Json& j, TaskKind k);
void from_json(const Json& j, TaskKind& k);

void to_json(Json& j, const TimeInterval& i);
void from_json(const Json& j, TimeInterval& i);
void to_json(Json& j, const CanonicalEvent& e);
void from_json(const Json& j, CanonicalEvent& e);
void to_json(Json& j, const WorkflowSpec& s);
void from_json(const Json& j, WorkflowSpec& s);

/// Full record including applied_event_ids (snapshot form).
void to_json(Json& j, const TaskRecord& r);
void from_json(const Json& j, TaskRecord& r);

/// Public view served by the query layer: same fields minus dedup state.
Json task_record_view(const TaskRecord& r);

}  // namespace wfprov
