#include "wfprov/processing/transition.hpp"

namespace wfprov {

std::string_view to_string(TransitionAction a) noexcept {
  switch (a) {
    case TransitionAction::advance: return "advance";
    case TransitionAction::backfill: return "backfill";
    case TransitionAction::stale_ignore: return "stale_ignore";
    case TransitionAction::invalid: return "invalid";
  }
  return "invalid";
}

TransitionTable::TransitionTable() {
  for (const auto cur : kAllStatuses) {
    for (const auto next : kAllStatuses) {
      TransitionRule r;
      if (next == TaskStatus::unknown) {
        r.action = TransitionAction::invalid;
      } else if (is_terminal(cur) && is_terminal(next)) {
        r = {TransitionAction::advance, true};
      } else if (precedence(next) > precedence(cur)) {
        r.action = TransitionAction::advance;
      } else if (is_terminal(cur) && next == TaskStatus::running) {
        r.action = TransitionAction::backfill;
      } else if (is_terminal(cur) && next == TaskStatus::queued) {
        r.action = TransitionAction::invalid;
      } else {
        r.action = TransitionAction::stale_ignore;
      }
      table_[static_cast<std::size_t>(cur)][static_cast<std::size_t>(next)] = r;
    }
  }
}

const TransitionTable& TransitionTable::standard() {
  static const TransitionTable table;
  return table;
}

TransitionAction TransitionTable::decide(TaskStatus current, Timestamp current_at,
                                         StatusOrigin current_origin, TaskStatus announced,
                                         Timestamp announced_at,
                                         StatusOrigin announced_origin) const {
  if (announced_origin == StatusOrigin::infrastructure) {
    if (announced != TaskStatus::failed) return TransitionAction::invalid;
    return is_terminal(current) ? TransitionAction::stale_ignore : TransitionAction::advance;
  }
  if (is_terminal(current) && current_origin == StatusOrigin::infrastructure &&
      is_terminal(announced))
    return TransitionAction::advance;

  const auto r = rule(current, announced);
  if (r.action == TransitionAction::advance && r.requires_later_timestamp) {
    // Two terminal reports at the same instant: failed wins, so the outcome
    // does not depend on arrival order.
    if (announced_at == current_at)
      return announced == TaskStatus::failed && current != TaskStatus::failed
                 ? TransitionAction::advance
                 : TransitionAction::stale_ignore;
    if (announced_at < current_at) return TransitionAction::stale_ignore;
  }
  return r.action;
}

}  // namespace wfprov
