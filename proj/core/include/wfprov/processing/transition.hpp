#pragma once

#include <array>

#include "wfprov/model/status.hpp"
#include "wfprov/model/time.hpp"

namespace wfprov {

enum class TransitionAction { advance, backfill, stale_ignore, invalid };

std::string_view to_string(TransitionAction a) noexcept;

/// Which side of the system asserted a status. A failure reported only by the
/// resource manager is provisional: any workflow-engine terminal status
/// replaces it, and it never replaces a terminal status itself.
enum class StatusOrigin { engine, infrastructure };

struct TransitionRule {
  TransitionAction action = TransitionAction::invalid;
  /// Only meaningful for `advance`: the incoming timestamp must be strictly
  /// later than the current last_status_update.
  bool requires_later_timestamp = false;

  bool operator==(const TransitionRule&) const = default;
};

/// (current status, announced status) -> action.
///
///   - advance along the precedence order;
///   - terminal -> terminal only with a strictly later timestamp (retry);
///   - running announced on a terminal task backfills start_time;
///   - queued announced on a terminal task is invalid (counted, ignored);
///   - everything else moving backwards is stale;
///   - nothing may announce `unknown`.
class TransitionTable {
 public:
  static const TransitionTable& standard();

  TransitionRule rule(TaskStatus current, TaskStatus announced) const {
    return table_[static_cast<std::size_t>(current)][static_cast<std::size_t>(announced)];
  }

  /// Full decision including timestamps and status origins.
  TransitionAction decide(TaskStatus current, Timestamp current_at, StatusOrigin current_origin,
                          TaskStatus announced, Timestamp announced_at,
                          StatusOrigin announced_origin) const;

 private:
  TransitionTable();

  std::array<std::array<TransitionRule, 5>, 5> table_{};
};

}  // namespace wfprov
