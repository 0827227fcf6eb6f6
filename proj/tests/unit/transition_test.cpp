#include <gtest/gtest.h>

#include "wfprov/processing/transition.hpp"

using namespace wfprov;
using A = TransitionAction;
using S = TaskStatus;

namespace {

// Independent restatement of the status rules, row = current, column = announced.
A expected_rule(S cur, S next) {
  if (next == S::unknown) return A::invalid;
  const bool cur_term = cur == S::succeeded || cur == S::failed;
  const bool next_term = next == S::succeeded || next == S::failed;
  if (cur_term && next_term) return A::advance;
  auto rank = [](S s) { return s == S::unknown ? 0 : s == S::queued ? 1 : s == S::running ? 2 : 3; };
  if (rank(next) > rank(cur)) return A::advance;
  if (cur_term && next == S::running) return A::backfill;
  if (cur_term && next == S::queued) return A::invalid;
  return A::stale_ignore;
}

}  // namespace

TEST(TransitionTable, FullTable) {
  const auto& t = TransitionTable::standard();
  for (auto cur : kAllStatuses)
    for (auto next : kAllStatuses) {
      const auto r = t.rule(cur, next);
      EXPECT_EQ(r.action, expected_rule(cur, next)) << to_string(cur) << " -> " << to_string(next);
      EXPECT_EQ(r.requires_later_timestamp, is_terminal(cur) && is_terminal(next));
    }
}

TEST(TransitionTable, TerminalRetryNeedsLaterTimestamp) {
  const auto& t = TransitionTable::standard();
  const auto t0 = Timestamp::from_millis(1000);
  const auto e = StatusOrigin::engine;
  EXPECT_EQ(t.decide(S::failed, t0, e, S::succeeded, t0 + std::chrono::milliseconds(1), e), A::advance);
  EXPECT_EQ(t.decide(S::failed, t0, e, S::succeeded, t0 - std::chrono::milliseconds(1), e), A::stale_ignore);
  EXPECT_EQ(t.decide(S::succeeded, t0, e, S::succeeded, t0 + std::chrono::milliseconds(1), e), A::advance);
}

TEST(TransitionTable, EqualTimestampTerminalsResolveToFailed) {
  const auto& t = TransitionTable::standard();
  const auto t0 = Timestamp::from_millis(1000);
  const auto e = StatusOrigin::engine;
  EXPECT_EQ(t.decide(S::succeeded, t0, e, S::failed, t0, e), A::advance);
  EXPECT_EQ(t.decide(S::failed, t0, e, S::succeeded, t0, e), A::stale_ignore);
  EXPECT_EQ(t.decide(S::failed, t0, e, S::failed, t0, e), A::stale_ignore);
  EXPECT_EQ(t.decide(S::succeeded, t0, e, S::succeeded, t0, e), A::stale_ignore);
}

TEST(TransitionTable, InfrastructureFailureIsProvisional) {
  const auto& t = TransitionTable::standard();
  const auto t0 = Timestamp::from_millis(1000);
  const auto early = t0 - std::chrono::seconds(5);
  const auto e = StatusOrigin::engine;
  const auto i = StatusOrigin::infrastructure;
  // Lands on live tasks.
  EXPECT_EQ(t.decide(S::running, early, e, S::failed, t0, i), A::advance);
  EXPECT_EQ(t.decide(S::unknown, Timestamp{}, e, S::failed, t0, i), A::advance);
  // Never overrides a terminal status.
  EXPECT_EQ(t.decide(S::succeeded, early, e, S::failed, t0, i), A::stale_ignore);
  EXPECT_EQ(t.decide(S::failed, early, i, S::failed, t0, i), A::stale_ignore);
  // Any engine terminal replaces it, even an older one.
  EXPECT_EQ(t.decide(S::failed, t0, i, S::succeeded, early, e), A::advance);
  EXPECT_EQ(t.decide(S::failed, t0, i, S::failed, early, e), A::advance);
  // Only failures may come from the infrastructure.
  EXPECT_EQ(t.decide(S::queued, early, e, S::running, t0, i), A::invalid);
}
