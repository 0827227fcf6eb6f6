#include "wfprov/sim/emitter.hpp"

#include <charconv>
#include <fstream>
#include <thread>

#include "wfprov/model/errors.hpp"

namespace wfprov::sim {

Pacing Pacing::parse(std::string_view text) {
  if (text == "fast") return {};
  if (text == "realtime") return {true, 1.0};
  constexpr std::string_view prefix = "realtime:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto num = text.substr(prefix.size());
    double f = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), f);
    if (ec == std::errc() && ptr == num.data() + num.size() && f > 0) return {true, f};
  }
  throw ValidationError("pace must be fast, realtime or realtime:<factor>, got '" +
                        std::string(text) + "'");
}

std::string Pacing::to_string() const {
  if (!realtime) return "fast";
  std::string f = std::to_string(factor);
  while (f.size() > 1 && f.back() == '0') f.pop_back();
  if (!f.empty() && f.back() == '.') f.pop_back();
  return "realtime:" + f;
}

std::uint64_t replay(const std::vector<TraceRecord>& events, const Pacing& pacing,
                     const std::array<LineSink, kSourceCount>& sinks, std::stop_token stop) {
  if (events.empty()) return 0;
  const auto t0 = events.front().ts;
  const auto wall0 = std::chrono::steady_clock::now();
  std::array<std::uint64_t, kSourceCount> sent{};

  auto run = [&](EventSource src) {
    const auto& sink = sinks[source_index(src)];
    auto& count = sent[source_index(src)];
    for (const auto& e : events) {
      if (e.source != src) continue;
      if (stop.stop_requested()) return;
      if (!pacing.realtime) {
        sink(e.line());
      } else {
        const auto offset = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double, std::micro>(static_cast<double>((e.ts - t0).count()) /
                                                      pacing.factor));
        std::this_thread::sleep_until(wall0 + offset);
        sink(e.line_at(Timestamp::now()));
      }
      ++count;
    }
  };

  {
    std::jthread we(run, EventSource::workflow_engine);
    std::jthread rm(run, EventSource::resource_manager);
  }
  return sent[0] + sent[1];
}

std::uint64_t emit_to_socket(const std::vector<TraceRecord>& events, const std::string& host,
                             int port, const Pacing& pacing, std::stop_token stop) {
  LineSocketWriter we(host, port);
  LineSocketWriter rm(host, port);
  const auto n = replay(events, pacing,
                        {[&](const std::string& l) { we.write_line(l); },
                         [&](const std::string& l) { rm.write_line(l); }},
                        stop);
  we.close();
  rm.close();
  return n;
}

std::uint64_t emit_to_pipeline(const std::vector<TraceRecord>& events, IngestPipeline& pipeline,
                               const Pacing& pacing, std::stop_token stop) {
  return replay(events, pacing,
                {[&](const std::string& l) { pipeline.submit_line(l, EventSource::workflow_engine); },
                 [&](const std::string& l) { pipeline.submit_line(l, EventSource::resource_manager); }},
                stop);
}

void write_trace(const std::vector<TraceRecord>& events, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : events) out << e.line() << '\n';
}

void seed_backends(const GroundTruth& gt, MetricsBackend& metrics, LogsBackend& logs,
                   std::size_t chunk) {
  for (std::size_t i = 0; i < gt.metrics.size(); i += chunk) {
    const auto end = std::min(gt.metrics.size(), i + chunk);
    metrics.ingest({gt.metrics.begin() + static_cast<std::ptrdiff_t>(i),
                    gt.metrics.begin() + static_cast<std::ptrdiff_t>(end)});
  }
  for (std::size_t i = 0; i < gt.logs.size(); i += chunk) {
    const auto end = std::min(gt.logs.size(), i + chunk);
    logs.ingest({gt.logs.begin() + static_cast<std::ptrdiff_t>(i),
                 gt.logs.begin() + static_cast<std::ptrdiff_t>(end)});
  }
}

}  // namespace wfprov::sim
