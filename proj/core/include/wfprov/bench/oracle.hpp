#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/model/task_record.hpp"
#include "wfprov/query/request.hpp"
#include "wfprov/sim/ground_truth.hpp"

namespace wfprov::bench {

/// Expected answers computed by linear scans over a GroundTruth, without
/// the eDAG, its indexes or the planner.
class Oracle {
 public:
  /// `cutoff`: only events with a source timestamp at or before it have
  /// been ingested. Backends always hold the full run's data.
  explicit Oracle(const sim::GroundTruth& gt, std::optional<Timestamp> cutoff = std::nullopt,
                  std::chrono::microseconds default_step = std::chrono::seconds(10));

  const std::map<TaskId, TaskRecord>& tasks() const noexcept { return tasks_; }
  const TaskRecord& task(const TaskId& id) const;

  struct Answer {
    nlohmann::json results = nlohmann::json::array();
    std::set<std::string> warnings;
  };
  /// `now` closes the intervals of tasks still running. Throws
  /// NotFoundError for unknown referenced ids.
  Answer answer(const QueryRequest& request, Timestamp now) const;

 private:
  bool matches(const TaskRecord& r, const FilterParams& f, bool listing) const;
  std::vector<const TaskRecord*> select(const FilterParams& f, bool listing) const;
  void require_refs(const FilterParams& f) const;

  std::chrono::microseconds default_step_;
  std::map<TaskId, TaskRecord> tasks_;
  std::map<TaskId, std::set<TaskId>> parents_;
  std::map<TaskId, std::set<TaskId>> children_;
  std::map<std::pair<ExecObjectId, MetricKind>, std::vector<const MetricSample*>> samples_;
  std::map<ExecObjectId, std::vector<const LogEntry*>> logs_;
};

/// Expected final record of one task.
TaskRecord expected_record(const sim::GroundTruth& gt, const sim::TaskTruth& t,
                           std::optional<Timestamp> cutoff = std::nullopt);

}  // namespace wfprov::bench
