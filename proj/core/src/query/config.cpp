#include "wfprov/query/config.hpp"

#include <cctype>
#include <fstream>

#include "wfprov/model/errors.hpp"

namespace wfprov {

namespace {

std::string duration_text(std::chrono::microseconds d) { return std::to_string(d.count()) + "us"; }

OverflowPolicy parse_policy(const std::string& s) {
  if (s == "block") return OverflowPolicy::block;
  if (s == "drop_new" || s == "drop-new") return OverflowPolicy::drop_new;
  throw ValidationError("overflow_policy must be block or drop_new, got '" + s + "'");
}

std::string text_of(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void apply_key(ServiceConfig& c, const std::string& key, const std::string& v) {
  if (key == "listen") c.listen = Endpoint::parse(v);
  else if (key == "ingest") c.ingest = v.empty() ? std::nullopt : std::optional(Endpoint::parse(v));
  else if (key == "metrics_url") c.metrics = v.empty() ? std::nullopt : std::optional(Endpoint::parse(v));
  else if (key == "logs_url") c.logs = v.empty() ? std::nullopt : std::optional(Endpoint::parse(v));
  else if (key == "default_step") c.default_step = parse_duration(v);
  else if (key == "workflow_id") c.workflow_id = v;
  else if (key == "spec") c.spec = v.empty() ? std::nullopt : std::optional<std::filesystem::path>(v);
  else if (key == "buffer_capacity") c.buffer_capacity = std::stoul(v);
  else if (key == "overflow_policy") c.overflow_policy = parse_policy(v);
  else if (key == "pending_ttl")
    c.pending_ttl = std::chrono::duration_cast<std::chrono::milliseconds>(parse_duration(v));
  else throw ValidationError("unknown config key: " + key);
}

constexpr const char* kKeys[] = {"listen",       "ingest", "metrics_url",     "logs_url",
                                 "default_step", "workflow_id", "spec", "buffer_capacity",
                                 "overflow_policy", "pending_ttl"};

}  // namespace

void ServiceConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) apply_key(*this, key, text_of(value));
}

void ServiceConfig::apply_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  try {
    apply_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
}

void ServiceConfig::apply_env(const std::function<const char*(const char*)>& getenv_fn) {
  for (const char* key : kKeys) {
    std::string name = "WFPROV_";
    for (const char* p = key; *p; ++p) name += static_cast<char>(std::toupper(*p));
    if (const char* v = getenv_fn(name.c_str())) apply_key(*this, key, v);
  }
}

nlohmann::json ServiceConfig::to_json() const {
  nlohmann::json j{{"listen", listen.to_string()},
                   {"default_step", duration_text(default_step)},
                   {"workflow_id", workflow_id},
                   {"buffer_capacity", buffer_capacity},
                   {"overflow_policy", overflow_policy == OverflowPolicy::block ? "block" : "drop_new"},
                   {"pending_ttl", std::to_string(pending_ttl.count()) + "ms"}};
  j["ingest"] = ingest ? nlohmann::json(ingest->to_string()) : nlohmann::json(nullptr);
  j["metrics_url"] = metrics ? nlohmann::json(metrics->to_string()) : nlohmann::json(nullptr);
  j["logs_url"] = logs ? nlohmann::json(logs->to_string()) : nlohmann::json(nullptr);
  j["spec"] = spec ? nlohmann::json(spec->string()) : nlohmann::json(nullptr);
  return j;
}

}  // namespace wfprov
