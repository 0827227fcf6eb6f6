#include "wfprov/backends/logs.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include "wfprov/model/errors.hpp"
#include "wfprov/model/json.hpp"

namespace wfprov {

std::string_view to_string(LogLevel l) noexcept {
  switch (l) {
    case LogLevel::info: return "info";
    case LogLevel::warning: return "warning";
    case LogLevel::error: return "error";
  }
  return "info";
}

std::optional<LogLevel> parse_log_level(std::string_view text) noexcept {
  if (text == "info") return LogLevel::info;
  if (text == "warning" || text == "warn") return LogLevel::warning;
  if (text == "error") return LogLevel::error;
  return std::nullopt;
}

bool log_order(const LogEntry& a, const LogEntry& b) {
  return std::tie(a.timestamp, a.exec_object_id, a.level, a.message) <
         std::tie(b.timestamp, b.exec_object_id, b.level, b.message);
}

void LogSearchQuery::validate() const {
  if (exec_object_ids.empty()) throw ValidationError("log search needs at least one id");
}

bool contains_ci(std::string_view haystack, std::string_view needle) noexcept {
  if (needle.empty()) return true;
  const auto lower = [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  };
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [&](char a, char b) { return lower(a) == lower(b); });
  return it != haystack.end();
}

std::size_t InMemoryLogStore::ingest(const std::vector<LogEntry>& entries) {
  for (const auto& e : entries)
    if (e.message.empty() || e.exec_object_id.empty())
      throw ValidationError("log entry needs an id and a non-empty message");
  std::unique_lock lock(mu_);
  for (const auto& e : entries) {
    auto& v = by_exec_[e.exec_object_id];
    v.insert(std::upper_bound(v.begin(), v.end(), e, log_order), e);
  }
  return entries.size();
}

std::vector<LogEntry> InMemoryLogStore::search(const LogSearchQuery& q) {
  q.validate();
  const std::string_view needle = q.full_text ? std::string_view(*q.full_text) : std::string_view{};
  std::vector<LogEntry> out;
  std::shared_lock lock(mu_);
  for (const auto& id : std::set<ExecObjectId>(q.exec_object_ids.begin(), q.exec_object_ids.end())) {
    const auto it = by_exec_.find(id);
    if (it == by_exec_.end()) continue;
    const auto& v = it->second;
    auto first = std::lower_bound(v.begin(), v.end(), q.interval.start,
                                  [](const LogEntry& e, Timestamp t) { return e.timestamp < t; });
    for (; first != v.end() && first->timestamp <= q.interval.end; ++first)
      if (contains_ci(first->message, needle)) out.push_back(*first);
  }
  std::sort(out.begin(), out.end(), log_order);
  return out;
}

std::size_t InMemoryLogStore::entry_count() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, v] : by_exec_) n += v.size();
  return n;
}

void InMemoryLogStore::clear() {
  std::unique_lock lock(mu_);
  by_exec_.clear();
}

void to_json(nlohmann::json& j, const LogEntry& e) {
  j = {{"exec_object_id", e.exec_object_id},
       {"timestamp", e.timestamp},
       {"level", to_string(e.level)},
       {"message", e.message}};
}

void from_json(const nlohmann::json& j, LogEntry& e) {
  e.exec_object_id = j.at("exec_object_id").get<ExecObjectId>();
  e.timestamp = j.at("timestamp").get<Timestamp>();
  const auto level = parse_log_level(j.value("level", std::string("info")));
  if (!level) throw ValidationError("unknown log level: " + j.at("level").get<std::string>());
  e.level = *level;
  e.message = j.at("message").get<std::string>();
}

std::vector<LogEntry> parse_log_ndjson(std::string_view text) {
  std::vector<LogEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<LogEntry>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string to_log_ndjson(const std::vector<LogEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += nlohmann::json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<LogEntry> read_log_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_log_ndjson(ss.str());
}

void write_log_fixture(const std::filesystem::path& path, const std::vector<LogEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_log_ndjson(entries);
}

}  // namespace wfprov
