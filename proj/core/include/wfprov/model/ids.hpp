#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace wfprov {

/// True when `s` is usable as an identifier: non-empty, no whitespace, no
/// path separators, no URL query/fragment delimiters, no list commas.
bool is_valid_identifier(std::string_view s) noexcept;

/// Opaque string identifier, distinguished at compile time by `Tag`.
template <typename Tag>
class Id {
 public:
  Id() = default;

  /// Throws ValidationError when `value` is not a valid identifier.
  explicit Id(std::string value);

  /// Skips validation; for values already checked by a parser.
  static Id unchecked(std::string value) {
    Id id;
    id.value_ = std::move(value);
    return id;
  }

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const Id&) const = default;
  bool operator==(const Id&) const = default;

 private:
  std::string value_;
};

void throw_invalid_identifier(std::string_view value);

template <typename Tag>
Id<Tag>::Id(std::string value) : value_(std::move(value)) {
  if (!is_valid_identifier(value_)) throw_invalid_identifier(value_);
}

struct WorkflowIdTag {};
struct AbstractTaskIdTag {};
struct TaskIdTag {};
struct ExecObjectIdTag {};
struct NodeIdTag {};

using WorkflowId = Id<WorkflowIdTag>;
using AbstractTaskId = Id<AbstractTaskIdTag>;
using TaskId = Id<TaskIdTag>;
using ExecObjectId = Id<ExecObjectIdTag>;
using NodeId = Id<NodeIdTag>;

}  // namespace wfprov

template <typename Tag>
struct std::hash<wfprov::Id<Tag>> {
  std::size_t operator()(const wfprov::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
