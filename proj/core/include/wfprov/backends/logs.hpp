#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfprov/backends/metrics.hpp"
#include "wfprov/model/ids.hpp"
#include "wfprov/model/time.hpp"

namespace wfprov {

enum class LogLevel { info, warning, error };

std::string_view to_string(LogLevel l) noexcept;
std::optional<LogLevel> parse_log_level(std::string_view text) noexcept;

struct LogEntry {
  ExecObjectId exec_object_id;
  Timestamp timestamp;
  LogLevel level = LogLevel::info;
  std::string message;

  bool operator==(const LogEntry&) const = default;
};

/// Result order: timestamp, then exec object id, level and message.
bool log_order(const LogEntry& a, const LogEntry& b);

struct LogSearchQuery {
  std::vector<ExecObjectId> exec_object_ids;
  TimeInterval interval;
  /// Case-insensitive substring; empty is the same as absent.
  std::optional<std::string> full_text;

  void validate() const;
};

/// ASCII case-insensitive containment.
bool contains_ci(std::string_view haystack, std::string_view needle) noexcept;

class LogsBackend {
 public:
  virtual ~LogsBackend() = default;
  virtual std::size_t ingest(const std::vector<LogEntry>& entries) = 0;
  virtual std::vector<LogEntry> search(const LogSearchQuery& q) = 0;
  virtual BackendHealth health() = 0;
};

class InMemoryLogStore final : public LogsBackend {
 public:
  /// Throws ValidationError on an empty message (nothing is ingested).
  std::size_t ingest(const std::vector<LogEntry>& entries) override;
  std::vector<LogEntry> search(const LogSearchQuery& q) override;
  BackendHealth health() override { return {true, 0.0, "in-memory"}; }

  std::size_t entry_count() const;
  void clear();

 private:
  mutable std::shared_mutex mu_;
  std::map<ExecObjectId, std::vector<LogEntry>> by_exec_;
};

void to_json(nlohmann::json& j, const LogEntry& e);
void from_json(const nlohmann::json& j, LogEntry& e);

std::vector<LogEntry> parse_log_ndjson(std::string_view text);
std::string to_log_ndjson(const std::vector<LogEntry>& entries);
std::vector<LogEntry> read_log_fixture(const std::filesystem::path& path);
void write_log_fixture(const std::filesystem::path& path, const std::vector<LogEntry>& entries);

}  // namespace wfprov
