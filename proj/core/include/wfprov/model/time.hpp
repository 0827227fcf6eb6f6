#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace wfprov {

/// UTC instant with microsecond resolution.
///
/// Serialized as RFC3339 with six fractional digits and a `Z` suffix, e.g.
/// `2024-12-11T17:08:54.964000Z`. Parsing accepts any number of fractional
/// digits, a `T` or space date/time separator, and a `Z`, ` UTC` or numeric
/// `+hh:mm` suffix; offsets are folded into UTC.
class Timestamp {
 public:
  using clock = std::chrono::system_clock;
  using duration = std::chrono::microseconds;
  using time_point = std::chrono::time_point<clock, duration>;

  constexpr Timestamp() = default;
  constexpr explicit Timestamp(time_point tp) : tp_(tp) {}

  static Timestamp now();
  static constexpr Timestamp from_micros(std::int64_t us) { return Timestamp(time_point(duration(us))); }
  static constexpr Timestamp from_millis(std::int64_t ms) { return from_micros(ms * 1000); }

  /// Throws ValidationError on malformed input.
  static Timestamp parse(std::string_view text);
  static std::optional<Timestamp> try_parse(std::string_view text) noexcept;

  std::string to_string() const;

  constexpr time_point time() const { return tp_; }
  constexpr std::int64_t micros() const { return tp_.time_since_epoch().count(); }
  constexpr double millis() const { return static_cast<double>(micros()) / 1000.0; }

  constexpr Timestamp operator+(duration d) const { return Timestamp(tp_ + d); }
  constexpr Timestamp operator-(duration d) const { return Timestamp(tp_ - d); }
  constexpr duration operator-(Timestamp other) const { return tp_ - other.tp_; }

  constexpr auto operator<=>(const Timestamp&) const = default;

 private:
  time_point tp_{};
};

/// Closed interval [start, end]; start <= end.
struct TimeInterval {
  Timestamp start;
  Timestamp end;

  /// Throws ValidationError when end < start.
  static TimeInterval make(Timestamp start, Timestamp end);

  bool contains(Timestamp t) const { return start <= t && t <= end; }
  bool overlaps(const TimeInterval& o) const { return start <= o.end && o.start <= end; }
  std::optional<TimeInterval> intersect(const TimeInterval& o) const;

  bool operator==(const TimeInterval&) const = default;
};

/// Parses `<number>[us|ms|s|m|h]`; a bare number means seconds. Fractions
/// are allowed ("0.5s"). Throws ValidationError.
std::chrono::microseconds parse_duration(std::string_view text);

}  // namespace wfprov
