#include "wfprov/model/task_record.hpp"

#include <algorithm>

namespace wfprov {

bool AppliedEventIds::contains(const std::string& id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

void AppliedEventIds::insert(const std::string& id) {
  if (capacity_ == 0 || contains(id)) return;
  if (ids_.size() == capacity_) ids_.pop_front();
  ids_.push_back(id);
}

bool TaskRecord::same_state(const TaskRecord& o) const {
  return task_id == o.task_id && abstract_task_id == o.abstract_task_id &&
         workflow_id == o.workflow_id && current_status == o.current_status &&
         last_status_update == o.last_status_update && exec_object_id == o.exec_object_id &&
         node_id == o.node_id && start_time == o.start_time && end_time == o.end_time &&
         attrs == o.attrs;
}

}  // namespace wfprov
