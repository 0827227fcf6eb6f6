#include "wfprov/model/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "wfprov/model/errors.hpp"

namespace wfprov {

namespace {

using namespace std::chrono;

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool consume(std::string_view word) {
    if (s_.substr(pos_, word.size()) != word) return false;
    pos_ += word.size();
    return true;
  }
  bool digits(int count, int& out) {
    out = 0;
    for (int i = 0; i < count; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) return false;
      out = out * 10 + (s_[pos_++] - '0');
    }
    return true;
  }
  /// Fractional seconds scaled to microseconds; extra digits are truncated.
  std::int64_t fraction() {
    std::int64_t us = 0;
    int n = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      if (n < 6) {
        us = us * 10 + (s_[pos_] - '0');
        ++n;
      }
      ++pos_;
    }
    for (; n < 6; ++n) us *= 10;
    return us;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::optional<Timestamp> parse_impl(std::string_view text) {
  Cursor c(text);
  int y, mo, d, h, mi, se;
  if (!c.digits(4, y) || !c.consume('-') || !c.digits(2, mo) || !c.consume('-') ||
      !c.digits(2, d))
    return std::nullopt;
  if (!c.consume('T') && !c.consume('t') && !c.consume(' ')) return std::nullopt;
  if (!c.digits(2, h) || !c.consume(':') || !c.digits(2, mi) || !c.consume(':') ||
      !c.digits(2, se))
    return std::nullopt;
  std::int64_t frac_us = 0;
  if (c.consume('.')) frac_us = c.fraction();

  std::int64_t offset_min = 0;
  if (c.consume('Z') || c.consume('z') || c.consume(" UTC") || c.done()) {
  } else if (c.peek() == '+' || c.peek() == '-') {
    const bool neg = c.peek() == '-';
    c.consume(c.peek());
    int oh, om;
    if (!c.digits(2, oh) || !c.consume(':') || !c.digits(2, om)) return std::nullopt;
    offset_min = (neg ? -1 : 1) * (oh * 60 + om);
  } else {
    return std::nullopt;
  }
  if (!c.done()) return std::nullopt;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return std::nullopt;

  const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se} + microseconds{frac_us} -
                  minutes{offset_min};
  return Timestamp(time_point_cast<microseconds>(tp));
}

}  // namespace

Timestamp Timestamp::now() {
  return Timestamp(time_point_cast<duration>(clock::now()));
}

Timestamp Timestamp::parse(std::string_view text) {
  if (auto t = parse_impl(text)) return *t;
  throw ValidationError("malformed timestamp: '" + std::string(text) + "'");
}

std::optional<Timestamp> Timestamp::try_parse(std::string_view text) noexcept {
  try {
    return parse_impl(text);
  } catch (...) {
    return std::nullopt;
  }
}

std::string Timestamp::to_string() const {
  const auto day_point = floor<days>(tp_);
  const year_month_day ymd{day_point};
  auto rest = tp_ - day_point;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto m = duration_cast<minutes>(rest);
  rest -= m;
  const auto s = duration_cast<seconds>(rest);
  rest -= s;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02lld.%06lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<long long>(s.count()),
                static_cast<long long>(rest.count()));
  return buf;
}

TimeInterval TimeInterval::make(Timestamp start, Timestamp end) {
  if (end < start)
    throw ValidationError("interval end " + end.to_string() + " precedes start " +
                          start.to_string());
  return TimeInterval{start, end};
}

std::optional<TimeInterval> TimeInterval::intersect(const TimeInterval& o) const {
  const auto s = std::max(start, o.start);
  const auto e = std::min(end, o.end);
  if (e < s) return std::nullopt;
  return TimeInterval{s, e};
}

std::chrono::microseconds parse_duration(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
  const auto number = text.substr(0, i);
  const auto unit = text.substr(i);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (number.empty() || ec != std::errc() || ptr != number.data() + number.size())
    throw ValidationError("bad duration: " + std::string(text));
  double scale = 0;
  if (unit.empty() || unit == "s") scale = 1e6;
  else if (unit == "ms") scale = 1e3;
  else if (unit == "us") scale = 1;
  else if (unit == "m") scale = 60e6;
  else if (unit == "h") scale = 3600e6;
  else throw ValidationError("bad duration unit: " + std::string(text));
  return std::chrono::microseconds(static_cast<std::int64_t>(value * scale + 0.5));
}

}  // namespace wfprov
