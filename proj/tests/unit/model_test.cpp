#include <gtest/gtest.h>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/event.hpp"
#include "wfprov/model/json.hpp"
#include "wfprov/model/task_record.hpp"
#include "wfprov/model/workflow_spec.hpp"
#include "wfprov/sim/generator.hpp"

using namespace wfprov;
using namespace std::chrono_literals;

TEST(Timestamp, ParsesUtcSuffixWithSpaceSeparator) {
  const auto t = Timestamp::parse("2024-12-11 17:08:54.964 UTC");
  EXPECT_EQ(t.to_string(), "2024-12-11T17:08:54.964000Z");
  EXPECT_EQ(t, Timestamp::parse("2024-12-11T17:08:54.964Z"));
  EXPECT_EQ(t, Timestamp::parse("2024-12-11T18:08:54.964+01:00"));
  // 2024-12-11T00:00:00Z is 1733875200 s after the epoch.
  EXPECT_EQ(t.micros(), (1733875200LL + 17 * 3600 + 8 * 60 + 54) * 1'000'000 + 964'000);
}

TEST(Timestamp, RoundTripsMicroseconds) {
  for (std::int64_t us : {0LL, 1LL, 999'999LL, 1733937534964123LL}) {
    const auto t = Timestamp::from_micros(us);
    EXPECT_EQ(Timestamp::parse(t.to_string()), t) << t.to_string();
  }
}

TEST(Timestamp, RejectsGarbage) {
  for (const char* bad : {"", "yesterday", "2024-13-01T00:00:00Z", "2024-12-11T17:08", "2024-12-11T25:00:00Z"})
    EXPECT_FALSE(Timestamp::try_parse(bad)) << bad;
  EXPECT_THROW(Timestamp::parse("nope"), ValidationError);
}

TEST(TimeInterval, IntersectAndOrder) {
  const auto a = TimeInterval::make(Timestamp::from_millis(0), Timestamp::from_millis(10));
  const auto b = TimeInterval::make(Timestamp::from_millis(5), Timestamp::from_millis(20));
  const auto c = TimeInterval::make(Timestamp::from_millis(11), Timestamp::from_millis(12));
  EXPECT_EQ(a.intersect(b), TimeInterval::make(Timestamp::from_millis(5), Timestamp::from_millis(10)));
  EXPECT_FALSE(a.intersect(c));
  EXPECT_TRUE(a.overlaps(b));
  EXPECT_THROW(TimeInterval::make(Timestamp::from_millis(2), Timestamp::from_millis(1)), ValidationError);
}

TEST(Duration, Units) {
  EXPECT_EQ(parse_duration("10s"), 10s);
  EXPECT_EQ(parse_duration("10"), 10s);
  EXPECT_EQ(parse_duration("250ms"), 250ms);
  EXPECT_EQ(parse_duration("0.5s"), 500ms);
  EXPECT_EQ(parse_duration("2m"), 120s);
  EXPECT_EQ(parse_duration("1h"), 3600s);
  EXPECT_EQ(parse_duration("7us"), 7us);
  EXPECT_THROW(parse_duration("fast"), ValidationError);
  EXPECT_THROW(parse_duration(""), ValidationError);
}

TEST(Ids, RejectWhitespaceAndSeparators) {
  EXPECT_NO_THROW(TaskId("cpu_intensive_task_1"));
  EXPECT_NO_THROW(NodeId("hu-worker-c25"));
  for (const char* bad : {"", "a b", "a/b", "a?b", "a#b", "a,b", "a\tb"})
    EXPECT_THROW(TaskId{bad}, ValidationError) << bad;
}

TEST(Status, ParseBothSpellings) {
  for (auto s : kAllStatuses) {
    EXPECT_EQ(parse_task_status(to_string(s)), s);
    EXPECT_EQ(parse_task_status("task_" + std::string(to_string(s))), s);
  }
  EXPECT_FALSE(parse_task_status("done"));
  EXPECT_LT(precedence(TaskStatus::unknown), precedence(TaskStatus::queued));
  EXPECT_LT(precedence(TaskStatus::queued), precedence(TaskStatus::running));
  EXPECT_EQ(precedence(TaskStatus::succeeded), precedence(TaskStatus::failed));
}

TEST(PodName, MatchesObservedFormat) {
  EXPECT_EQ(sim::pod_name(TaskId("cpu_intensive_task_1"), 0xdff41d38f92a4ULL),
            "cpu-intensive-task-1-dff41d38f92a4");
  EXPECT_EQ(sim::pod_name(TaskId("Mixed_Case"), 0x1ULL), "mixed-case-0000000000001");
}

TEST(CanonicalEvent, FieldRules) {
  CanonicalEvent e;
  e.event_id = "x";
  e.workflow_id = WorkflowId("wf");
  e.kind = EventKind::task_queued;
  EXPECT_FALSE(validate_event(e).empty());  // task_id missing
  e.task_id = TaskId("t");
  EXPECT_TRUE(validate_event(e).empty());

  e.kind = EventKind::exec_scheduled;
  e.source = EventSource::resource_manager;
  e.exec_object_id = ExecObjectId("p");
  EXPECT_FALSE(validate_event(e).empty());  // node_id missing
  e.node_id = NodeId("n");
  EXPECT_TRUE(validate_event(e).empty());

  e.kind = EventKind::exec_assigned;
  e.task_id.reset();
  EXPECT_FALSE(validate_event(e).empty());
}

TEST(CanonicalEvent, StreamSequenceStrictlyIncreasing) {
  StreamValidator v;
  CanonicalEvent e;
  e.event_id = "a";
  e.workflow_id = WorkflowId("wf");
  e.task_id = TaskId("t");
  e.source_seq = 3;
  EXPECT_TRUE(v.validate(e).empty());
  EXPECT_FALSE(v.validate(e).empty());
  e.source = EventSource::resource_manager;
  e.kind = EventKind::exec_assigned;
  e.exec_object_id = ExecObjectId("p");
  e.source_seq = 0;
  EXPECT_TRUE(v.validate(e).empty());  // independent per source
}

TEST(Json, EventRoundTrip) {
  CanonicalEvent e;
  e.event_id = "rm-7";
  e.source = EventSource::resource_manager;
  e.kind = EventKind::exec_scheduled;
  e.workflow_id = WorkflowId("wf");
  e.exec_object_id = ExecObjectId("cpu-intensive-task-1-dff41d38f92a4");
  e.node_id = NodeId("hu-worker-c25");
  e.source_timestamp = Timestamp::parse("2024-12-11 17:08:54.964 UTC");
  e.source_seq = 12;
  e.attrs = {{"k", "v"}};
  const nlohmann::json j = e;
  EXPECT_EQ(j.at("kind"), "exec_scheduled");
  EXPECT_TRUE(j.at("task_id").is_null());
  EXPECT_EQ(j.get<CanonicalEvent>(), e);
}

TEST(Json, TaskRecordRoundTripAndView) {
  TaskRecord r;
  r.task_id = TaskId("cpu_intensive_task_1");
  r.abstract_task_id = AbstractTaskId("cpu_intensive_task");
  r.workflow_id = WorkflowId("wf");
  r.current_status = TaskStatus::succeeded;
  r.last_status_update = Timestamp::parse("2024-12-11 17:08:54.964 UTC");
  r.exec_object_id = ExecObjectId("cpu-intensive-task-1-dff41d38f92a4");
  r.node_id = NodeId("hu-worker-c25");
  r.start_time = r.last_status_update - 30s;
  r.end_time = r.last_status_update;
  r.applied_event_ids.insert("e1");
  const nlohmann::json j = r;
  EXPECT_EQ(j.get<TaskRecord>(), r);
  const auto view = task_record_view(r);
  EXPECT_FALSE(view.contains("applied_event_ids"));
  EXPECT_EQ(view.at("current_status"), "succeeded");
  EXPECT_EQ(view.at("last_status_update"), "2024-12-11T17:08:54.964000Z");
  EXPECT_EQ(view.at("node_id"), "hu-worker-c25");
}

TEST(Json, SpecRoundTrip) {
  WorkflowSpec s;
  s.workflow_id = WorkflowId("wf");
  s.abstract_tasks = {{AbstractTaskId("a"), TaskKind::cpu_intensive, 3},
                      {AbstractTaskId("b"), TaskKind::combined_intensive, 1}};
  s.abstract_edges = {{AbstractTaskId("a"), AbstractTaskId("b")}};
  const nlohmann::json j = s;
  EXPECT_EQ(j.get<WorkflowSpec>(), s);
}

TEST(WorkflowSpec, Validation) {
  WorkflowSpec s;
  s.workflow_id = WorkflowId("wf");
  s.abstract_tasks = {{AbstractTaskId("a"), TaskKind::cpu_intensive, 1},
                      {AbstractTaskId("b"), TaskKind::cpu_intensive, 1}};
  s.abstract_edges = {{AbstractTaskId("a"), AbstractTaskId("b")}};
  EXPECT_NO_THROW(s.validate());

  auto cyclic = s;
  cyclic.abstract_edges.push_back({AbstractTaskId("b"), AbstractTaskId("a")});
  EXPECT_THROW(cyclic.validate(), CycleError);

  auto dangling = s;
  dangling.abstract_edges.push_back({AbstractTaskId("a"), AbstractTaskId("zzz")});
  EXPECT_THROW(dangling.validate(), ValidationError);

  auto zero = s;
  zero.abstract_tasks[0].fanout = 0;
  EXPECT_THROW(zero.validate(), ValidationError);

  auto dup = s;
  dup.abstract_tasks.push_back(dup.abstract_tasks[0]);
  EXPECT_THROW(dup.validate(), ValidationError);
}

TEST(AppliedEventIds, FifoEviction) {
  AppliedEventIds ids(3);
  for (const char* id : {"a", "b", "c", "a", "d"}) ids.insert(id);
  EXPECT_FALSE(ids.contains("a"));
  EXPECT_TRUE(ids.contains("b"));
  EXPECT_TRUE(ids.contains("d"));
  EXPECT_EQ(ids.size(), 3u);
}
