#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support/traces.hpp"
#include "wfprov/edag/edag.hpp"
#include "wfprov/model/errors.hpp"

using namespace wfprov;
using namespace std::chrono_literals;

namespace {

TaskRecord bare(const std::string& id, const std::string& abs = "a") {
  TaskRecord r;
  r.task_id = TaskId(id);
  r.abstract_task_id = AbstractTaskId(abs);
  r.workflow_id = WorkflowId("wf");
  return r;
}

TaskUpdate status(TaskStatus s, Timestamp at) {
  TaskUpdate u;
  u.status = StatusChange{s, at, StatusOrigin::engine};
  if (s == TaskStatus::running) u.started_at = at;
  if (is_terminal(s)) u.ended_at = at;
  return u;
}

std::vector<std::string> ids_of(const std::vector<TaskRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.task_id.str());
  return out;
}

}  // namespace

TEST(EDag, InitFromSpecCrossProduct) {
  const auto dag = EDag::init_from_spec(test::tiny_spec());
  EXPECT_EQ(dag.task_count(), 3u);
  EXPECT_EQ(dag.edge_count(), 2u);
  EXPECT_EQ(dag.parents(TaskId("b_1")), (std::set<TaskId>{TaskId("a_1"), TaskId("a_2")}));
  EXPECT_EQ(dag.get_task(TaskId("a_2")).abstract_task_id, AbstractTaskId("a"));
  EXPECT_EQ(dag.get_task(TaskId("a_2")).current_status, TaskStatus::unknown);
  const auto abs = dag.list_abstract_tasks();
  ASSERT_EQ(abs.size(), 2u);
  EXPECT_EQ(abs[0], std::make_pair(AbstractTaskId("a"), std::size_t{2}));
  EXPECT_TRUE(dag.audit_indexes().ok());
}

TEST(EDag, AddTaskIdempotentOrConflict) {
  EDag dag(WorkflowId("wf"));
  const auto v1 = dag.add_task(bare("t1"));
  EXPECT_EQ(dag.add_task(bare("t1")), v1);
  EXPECT_THROW(dag.add_task(bare("t1", "other")), ConflictError);
}

TEST(EDag, DependenciesAndCycles) {
  EDag dag(WorkflowId("wf"));
  for (auto id : {"A_1", "B_1", "C_1"}) dag.add_task(bare(id));
  const auto v = dag.add_dependency(TaskId("A_1"), TaskId("B_1"));
  EXPECT_EQ(dag.add_dependency(TaskId("A_1"), TaskId("B_1")), v);
  EXPECT_THROW(dag.add_dependency(TaskId("B_1"), TaskId("A_1")), CycleError);
  dag.add_dependency(TaskId("B_1"), TaskId("C_1"));
  EXPECT_THROW(dag.add_dependency(TaskId("C_1"), TaskId("A_1")), CycleError);
  EXPECT_THROW(dag.add_dependency(TaskId("A_1"), TaskId("A_1")), CycleError);
  EXPECT_THROW(dag.add_dependency(TaskId("A_1"), TaskId("Z_1")), NotFoundError);
  EXPECT_EQ(dag.edge_count(), 2u);
  EXPECT_TRUE(dag.audit_indexes().ok());
}

TEST(EDag, ApplyAttrsProducesObservedRecord) {
  EDag dag(WorkflowId("wf"));
  dag.add_task(bare("cpu_intensive_task_1", "cpu_intensive_task"));
  const auto at = Timestamp::parse("2024-12-11 17:08:54.964 UTC");
  auto u = status(TaskStatus::succeeded, at);
  u.binding = std::make_pair(ExecObjectId("cpu-intensive-task-1-dff41d38f92a4"), at - 40s);
  u.placement = std::make_pair(ExecObjectId("cpu-intensive-task-1-dff41d38f92a4"), NodeId("hu-worker-c25"));
  const auto r = dag.apply_attrs(TaskId("cpu_intensive_task_1"), u, "e1");
  EXPECT_EQ(r.outcome, ApplyOutcome::applied);
  const auto& rec = dag.get_task(TaskId("cpu_intensive_task_1"));
  EXPECT_EQ(rec.abstract_task_id, AbstractTaskId("cpu_intensive_task"));
  EXPECT_EQ(rec.current_status, TaskStatus::succeeded);
  EXPECT_EQ(rec.last_status_update.to_string(), "2024-12-11T17:08:54.964000Z");
  EXPECT_EQ(rec.exec_object_id, ExecObjectId("cpu-intensive-task-1-dff41d38f92a4"));
  EXPECT_EQ(rec.node_id, NodeId("hu-worker-c25"));
  EXPECT_EQ(dag.task_for_exec(ExecObjectId("cpu-intensive-task-1-dff41d38f92a4")), TaskId("cpu_intensive_task_1"));
  EXPECT_TRUE(dag.has_node(NodeId("hu-worker-c25")));

  const auto v = dag.version();
  EXPECT_EQ(dag.apply_attrs(TaskId("cpu_intensive_task_1"), u, "e1").outcome, ApplyOutcome::duplicate);
  EXPECT_EQ(dag.version(), v);
  EXPECT_EQ(dag.apply_attrs(TaskId("nope"), u, "e2").outcome, ApplyOutcome::unknown_task);
}

TEST(EDag, LateRunningBackfillsStart) {
  EDag dag(WorkflowId("wf"));
  dag.add_task(bare("t"));
  const auto t0 = test::at_ms(0);
  dag.apply_attrs(TaskId("t"), status(TaskStatus::succeeded, t0 + 10s), "s");
  const auto r = dag.apply_attrs(TaskId("t"), status(TaskStatus::running, t0 + 2s), "r");
  EXPECT_EQ(r.outcome, ApplyOutcome::applied);
  EXPECT_EQ(r.action, TransitionAction::backfill);
  const auto& rec = dag.get_task(TaskId("t"));
  EXPECT_EQ(rec.current_status, TaskStatus::succeeded);
  EXPECT_EQ(rec.last_status_update, t0 + 10s);
  EXPECT_EQ(rec.start_time, t0 + 2s);
  EXPECT_EQ(rec.end_time, t0 + 10s);
  EXPECT_EQ(dag.apply_attrs(TaskId("t"), status(TaskStatus::queued, t0 + 1s), "q").outcome, ApplyOutcome::stale);
}

TEST(EDag, VersionMovesIffStateChanges) {
  EDag dag(WorkflowId("wf"));
  dag.add_task(bare("t"));
  auto v = dag.version();
  dag.apply_attrs(TaskId("t"), status(TaskStatus::queued, test::at_ms(10)), "q1");
  EXPECT_GT(dag.version(), v);
  v = dag.version();
  // A second queued report changes nothing observable.
  const auto r = dag.apply_attrs(TaskId("t"), status(TaskStatus::queued, test::at_ms(20)), "q2");
  EXPECT_FALSE(r.state_changed);
  EXPECT_EQ(dag.version(), v);
}

TEST(EDag, ResolveAbstractUsesNowForRunning) {
  auto dag = EDag::init_from_spec(test::tiny_spec());
  auto u = status(TaskStatus::running, test::at_ms(1000));
  u.binding = std::make_pair(ExecObjectId("p1"), test::at_ms(900));
  dag.apply_attrs(TaskId("a_1"), u, "r");
  const auto now = test::at_ms(5000);
  const auto targets = dag.resolve_abstract(AbstractTaskId("a"), now);
  ASSERT_EQ(targets.size(), 2u);
  EXPECT_EQ(targets[0].exec_object_id, ExecObjectId("p1"));
  EXPECT_EQ(targets[0].interval, TimeInterval::make(test::at_ms(1000), now));
  EXPECT_FALSE(targets[1].interval);
  EXPECT_THROW(dag.resolve_abstract(AbstractTaskId("zzz"), now), NotFoundError);
}

TEST(EDag, ListTasksRejectsUnknownReferences) {
  const auto dag = EDag::init_from_spec(test::tiny_spec());
  TaskFilter f;
  f.child_of = TaskId("ghost");
  EXPECT_THROW(dag.list_tasks(f), NotFoundError);
  f = {};
  f.abstract_id = AbstractTaskId("ghost");
  EXPECT_THROW(dag.list_tasks(f), NotFoundError);
  f = {};
  f.child_of = TaskId("b_1");  // leaf
  EXPECT_TRUE(dag.list_tasks(f).empty());
  EXPECT_TRUE(EDag(WorkflowId("wf")).list_tasks({}).empty());
}

// Random graphs of up to 200 tasks; list_tasks must agree with a scan that
// only uses the edge list kept on the side.
TEST(EDagProperty, ListTasksMatchesBruteForce) {
  std::mt19937_64 rng(7);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::array<TaskStatus, 5> statuses = kAllStatuses;
  for (int round = 0; round < 40; ++round) {
    EDag dag(WorkflowId("wf"));
    const int n = pick(1, 200);
    std::vector<TaskId> ids;
    for (int i = 0; i < n; ++i) {
      ids.emplace_back("t" + std::to_string(i));
      dag.add_task(bare(ids.back().str(), "abs" + std::to_string(pick(0, 4))));
    }
    std::set<std::pair<TaskId, TaskId>> edges;
    for (int i = 0; i < n * 2; ++i) {
      const auto a = pick(0, n - 1), b = pick(0, n - 1);
      // Forward edges only, so the side list stays acyclic too.
      if (a >= b) continue;
      dag.add_dependency(ids[a], ids[b]);
      edges.insert({ids[a], ids[b]});
    }
    for (int i = 0; i < n; ++i) {
      const auto s = statuses[pick(1, 4)];
      auto u = status(s, test::at_ms(pick(0, 100'000)));
      if (pick(0, 1)) {
        const ExecObjectId pod("pod" + std::to_string(i));
        u.binding = std::make_pair(pod, test::at_ms(0));
        u.placement = std::make_pair(pod, NodeId("n" + std::to_string(pick(0, 3))));
      }
      dag.apply_attrs(ids[i], u, "e" + std::to_string(i));
    }
    ASSERT_TRUE(dag.audit_indexes().ok());

    for (int q = 0; q < 50; ++q) {
      TaskFilter f;
      if (pick(0, 2) == 0) f.task_status = statuses[pick(0, 4)];
      if (pick(0, 2) == 0) f.abstract_id = AbstractTaskId("abs" + std::to_string(pick(0, 4)));
      if (pick(0, 3) == 0) f.node_id = NodeId("n" + std::to_string(pick(0, 3)));
      if (pick(0, 3) == 0) f.parent_of = ids[pick(0, n - 1)];
      if (pick(0, 3) == 0) f.child_of = ids[pick(0, n - 1)];
      if (pick(0, 3) == 0) f.updated_from = test::at_ms(pick(0, 100'000));
      if (pick(0, 3) == 0) f.updated_to = test::at_ms(pick(0, 100'000));

      std::vector<std::string> expected;
      for (const auto& id : ids) {
        const auto& r = dag.get_task(id);
        if (f.task_status && r.current_status != *f.task_status) continue;
        if (f.abstract_id && r.abstract_task_id != *f.abstract_id) continue;
        if (f.node_id && r.node_id != *f.node_id) continue;
        if (f.parent_of && !edges.contains({id, *f.parent_of})) continue;
        if (f.child_of && !edges.contains({*f.child_of, id})) continue;
        if (f.updated_from && r.last_status_update < *f.updated_from) continue;
        if (f.updated_to && r.last_status_update > *f.updated_to) continue;
        expected.push_back(id.str());
      }
      std::sort(expected.begin(), expected.end());

      try {
        EXPECT_EQ(ids_of(dag.list_tasks(f)), expected);
      } catch (const NotFoundError&) {
        // Only legal when the filter names something absent from the graph.
        EXPECT_TRUE((f.abstract_id && !dag.has_abstract(*f.abstract_id)) ||
                    (f.node_id && !dag.has_node(*f.node_id)));
      }
    }
  }
}

TEST(EDagProperty, AuditAfterRandomMutations) {
  std::mt19937_64 rng(11);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  EDag dag(WorkflowId("wf"));
  std::vector<TaskId> ids;
  for (int step = 0; step < 3000; ++step) {
    const int op = pick(0, 9);
    if (op == 0 || ids.size() < 2) {
      ids.emplace_back("t" + std::to_string(ids.size()));
      dag.add_task(bare(ids.back().str(), "abs" + std::to_string(pick(0, 3))));
    } else if (op <= 2) {
      try {
        dag.add_dependency(ids[pick(0, ids.size() - 1)], ids[pick(0, ids.size() - 1)]);
      } catch (const CycleError&) {
      }
    } else {
      const auto& id = ids[pick(0, ids.size() - 1)];
      auto u = status(kAllStatuses[pick(1, 4)], test::at_ms(pick(0, 10'000)));
      const ExecObjectId pod("p" + std::to_string(pick(0, 30)));
      if (pick(0, 1)) u.binding = std::make_pair(pod, test::at_ms(pick(0, 10'000)));
      if (pick(0, 1)) u.placement = std::make_pair(pod, NodeId("n" + std::to_string(pick(0, 3))));
      if (pick(0, 4) == 0) {
        u.status->origin = StatusOrigin::infrastructure;
        u.status->status = TaskStatus::failed;
        u.ended_at = u.status->at;
        u.exec_failure = std::make_pair(pod, u.status->at);
      }
      dag.apply_attrs(id, u, "e" + std::to_string(step));
    }
    if (step % 100 == 0) {
      const auto audit = dag.audit_indexes();
      ASSERT_TRUE(audit.ok()) << audit.divergences.front();
    }
  }
  EXPECT_TRUE(dag.audit_indexes().ok());
}

TEST(EDag, SnapshotRoundTrip) {
  auto dag = EDag::init_from_spec(test::tiny_spec());
  auto u = status(TaskStatus::failed, test::at_ms(500));
  u.binding = std::make_pair(ExecObjectId("p1"), test::at_ms(100));
  u.placement = std::make_pair(ExecObjectId("p1"), NodeId("n1"));
  dag.apply_attrs(TaskId("a_1"), u, "x");
  const auto doc = dag.export_snapshot();
  EXPECT_EQ(doc.at("edges").size(), 2u);
  EXPECT_EQ(doc.at("edges")[0].size(), 2u);
  const auto back = EDag::import_snapshot(doc);
  EXPECT_TRUE(back.same_state(dag));
  EXPECT_TRUE(back.audit_indexes().ok());
  EXPECT_EQ(back.export_snapshot(), doc);
}

TEST(EDag, SnapshotRejectsCycles) {
  auto doc = EDag::init_from_spec(test::tiny_spec()).export_snapshot();
  doc["edges"].push_back({"b_1", "a_1"});
  EXPECT_THROW(EDag::import_snapshot(doc), ValidationError);
}
