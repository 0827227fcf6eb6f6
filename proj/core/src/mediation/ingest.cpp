#include "wfprov/mediation/ingest.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "wfprov/model/errors.hpp"

namespace wfprov {

namespace {

sockaddr_in make_addr(const std::string& host, int port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  const auto resolved = host == "localhost" ? std::string("127.0.0.1") : host;
  if (::inet_pton(AF_INET, resolved.c_str(), &addr.sin_addr) != 1)
    throw ValidationError("not an IPv4 address: " + host);
  return addr;
}

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

std::optional<EventSource> peek_source(std::string_view line) noexcept {
  constexpr std::string_view key = "\"source\"";
  const auto k = line.find(key);
  if (k == std::string_view::npos) return std::nullopt;
  auto i = line.find(':', k + key.size());
  if (i == std::string_view::npos) return std::nullopt;
  i = line.find('"', i);
  if (i == std::string_view::npos) return std::nullopt;
  const auto end = line.find('"', i + 1);
  if (end == std::string_view::npos) return std::nullopt;
  return parse_event_source(line.substr(i + 1, end - i - 1));
}

IngestPipeline::IngestPipeline(EventBuffer& buffer, WorkflowId default_workflow,
                               std::size_t dedup_window)
    : buffer_(buffer) {
  for (auto s : {EventSource::workflow_engine, EventSource::resource_manager})
    lanes_[source_index(s)].adapter = make_adapter(s, default_workflow, dedup_window);
}

EnqueueResult IngestPipeline::submit(const RawSourceRecord& rec) {
  auto& lane = lanes_[source_index(rec.source)];
  std::lock_guard lock(lane.mu);
  auto out = lane.adapter->process(rec);
  if (!out.event) return EnqueueResult::dropped;
  const auto r = buffer_.enqueue_wait(std::move(*out.event));
  if (r == EnqueueResult::accepted)
    ++lane.enqueued;
  else
    ++lane.buffer_dropped;
  return r;
}

void IngestPipeline::submit_line(const std::string& line, std::optional<EventSource> source) {
  if (auto s = peek_source(line)) source = s;
  if (!source) {
    ++unroutable_;
    return;
  }
  submit(RawSourceRecord{*source, line, Timestamp::now()});
}

MediationStats IngestPipeline::stats() const {
  MediationStats s;
  s.records = unroutable_.load();
  s.skipped = unroutable_.load();
  for (std::size_t i = 0; i < kSourceCount; ++i) {
    auto& lane = lanes_[i];
    std::lock_guard lock(lane.mu);
    const auto& a = lane.adapter->stats();
    s.per_source[i] = a;
    s.records += a.records;
    s.skipped += a.skipped();
    s.dedup_dropped += a.dedup_dropped;
    s.buffer_dropped += lane.buffer_dropped;
    s.enqueued += lane.enqueued;
  }
  return s;
}

TraceFileSource::TraceFileSource(std::filesystem::path path, std::optional<EventSource> fallback)
    : path_(std::move(path)), fallback_(fallback) {}

TraceFileSource::~TraceFileSource() {
  stop();
  join();
}

std::uint64_t TraceFileSource::pump(const std::filesystem::path& path, IngestPipeline& pipeline,
                                    std::optional<EventSource> fallback) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path.string());
  std::uint64_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    pipeline.submit_line(line, fallback);
    ++n;
  }
  return n;
}

void TraceFileSource::start(IngestPipeline& pipeline) {
  worker_ = std::thread([this, &pipeline] {
    std::ifstream in(path_);
    std::string line;
    while (!stop_.load() && std::getline(in, line)) {
      if (line.empty()) continue;
      pipeline.submit_line(line, fallback_);
      ++lines_;
    }
  });
}

void TraceFileSource::stop() { stop_ = true; }

void TraceFileSource::join() {
  if (worker_.joinable()) worker_.join();
}

SocketSource::SocketSource(const std::string& host, int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(errno_text("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  auto addr = make_addr(host, port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const auto msg = errno_text("bind/listen");
    ::close(listen_fd_);
    throw Error(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

SocketSource::~SocketSource() {
  stop();
  join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void SocketSource::start(IngestPipeline& pipeline) {
  acceptor_ = std::thread([this, &pipeline] { accept_loop(pipeline); });
}

void SocketSource::accept_loop(IngestPipeline& pipeline) {
  while (!stop_.load()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 50) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    ++connections_;
    std::lock_guard lock(readers_mu_);
    readers_.emplace_back([this, fd, &pipeline] { read_loop(fd, pipeline); });
  }
}

void SocketSource::read_loop(int fd, IngestPipeline& pipeline) {
  std::string pending;
  char buf[16384];
  while (!stop_.load()) {
    pollfd pfd{fd, POLLIN, 0};
    if (::poll(&pfd, 1, 50) <= 0) continue;
    const auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    pending.append(buf, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (auto nl = pending.find('\n'); nl != std::string::npos; nl = pending.find('\n', start)) {
      if (nl > start) {
        pipeline.submit_line(pending.substr(start, nl - start));
        ++lines_;
      }
      start = nl + 1;
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) {
    pipeline.submit_line(pending);
    ++lines_;
  }
  ::close(fd);
}

void SocketSource::stop() { stop_ = true; }

void SocketSource::join() {
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> readers;
  {
    std::lock_guard lock(readers_mu_);
    readers.swap(readers_);
  }
  for (auto& t : readers)
    if (t.joinable()) t.join();
}

LineSocketWriter::LineSocketWriter(const std::string& host, int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw Error(errno_text("socket"));
  auto addr = make_addr(host, port);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const auto msg = errno_text("connect");
    ::close(fd_);
    fd_ = -1;
    throw Error(msg);
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

LineSocketWriter::~LineSocketWriter() { close(); }

void LineSocketWriter::write_line(std::string_view line) {
  std::string data(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw Error(errno_text("send"));
    off += static_cast<std::size_t>(n);
  }
}

void LineSocketWriter::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
    ::close(fd_);
    fd_ = -1;
  }
}

}  // namespace wfprov
