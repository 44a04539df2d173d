#include "goci/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "goci/parse.hpp"
#include "goci/session.hpp"

namespace goci {

namespace {

struct Stopped {};

bool send_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    auto n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

std::string line(const Json& j) { return j.dump() + "\n"; }

}  // namespace

std::pair<std::string, std::uint16_t> parse_bind(const std::string& addr) {
  auto colon = addr.rfind(':');
  std::string host = colon == std::string::npos ? "127.0.0.1" : addr.substr(0, colon);
  std::string port = colon == std::string::npos ? addr : addr.substr(colon + 1);
  if (host.empty()) host = "127.0.0.1";
  if (host == "localhost") host = "127.0.0.1";
  std::size_t used = 0;
  unsigned long p = 0;
  try {
    p = std::stoul(port, &used);
  } catch (...) {
    used = 0;
  }
  if (port.empty() || used != port.size() || p > 65535) throw std::invalid_argument("bad bind address '" + addr + "'");
  return {host, static_cast<std::uint16_t>(p)};
}

struct SessionServer::Impl : Teacher {
  ServeInputs in;
  int listen_fd = -1;
  int wake[2] = {-1, -1};
  std::uint16_t bound_port = 0;

  std::mutex m;
  std::condition_variable cv;
  bool connected = false;
  bool stopping = false;
  bool finished = false;
  std::optional<AdviceQuery> pending;
  std::optional<std::vector<std::size_t>> answered;
  std::deque<std::string> outbox;
  std::string theory;
  ScoreParts score;
  std::size_t iteration = 0;
  std::optional<InductionResult> result;
  std::exception_ptr failure;

  // network thread only
  int client = -1;
  std::string inbuf;

  void poke() {
    char c = 1;
    [[maybe_unused]] auto n = ::write(wake[1], &c, 1);
  }

  // caller holds m
  void emit(const Json& j) {
    if (connected) outbox.push_back(line(j));
    poke();
  }

  std::optional<std::vector<std::size_t>> answer(const AdviceQuery& q, std::chrono::milliseconds timeout) override {
    std::unique_lock lk(m);
    if (stopping) throw Stopped{};
    pending = q;
    answered.reset();
    theory = render(q.theory);
    iteration = q.iteration;
    emit(query_record(q, in.lib));
    auto remaining = timeout;
    while (!answered && !stopping) {
      if (!connected) {
        cv.wait(lk);
        continue;
      }
      auto t0 = std::chrono::steady_clock::now();
      cv.wait_for(lk, remaining, [&] { return answered || stopping || !connected; });
      remaining -= std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
      if (!answered && remaining.count() <= 0) break;
    }
    if (stopping) throw Stopped{};
    auto a = std::move(answered);
    answered.reset();
    pending.reset();
    if (!a) emit(error_record("query " + std::to_string(q.id) + " timed out"));
    return a;
  }

  void drop_client() {
    if (client >= 0) ::close(client);
    client = -1;
    inbuf.clear();
    std::lock_guard lk(m);
    connected = false;
    outbox.clear();
    cv.notify_all();
  }

  bool flush() {
    std::deque<std::string> out;
    {
      std::lock_guard lk(m);
      out.swap(outbox);
    }
    for (const auto& s : out)
      if (!send_all(client, s)) return false;
    return true;
  }

  void attach(int fd) {
    if (client >= 0) {
      send_all(fd, line(error_record("session already has a client")));
      ::close(fd);
      return;
    }
    client = fd;
    std::string greeting;
    {
      std::lock_guard lk(m);
      connected = true;
      outbox.clear();
      Json state = state_record(theory, score, iteration);
      state["pending"] = pending ? query_record(*pending, in.lib) : Json(nullptr);
      greeting = line(hello_record(in.session_id, in.pos.front().head.predicate)) + line(state);
      if (pending) greeting += line(query_record(*pending, in.lib));
      cv.notify_all();
    }
    if (!send_all(client, greeting)) drop_client();
  }

  Json handle(const std::string& text) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception&) {
      return error_record("not a JSON record");
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return error_record("record lacks 'kind'");
    auto kind = j["kind"].get<std::string>();
    if (kind != "prefer") return error_record("unexpected record kind '" + kind + "'");
    std::lock_guard lk(m);
    if (!pending || answered) return error_record("no query is pending");
    try {
      answered = preference_from_record(j, *pending).chosen;
    } catch (const ProtocolError& e) {
      return error_record(e.what());
    }
    cv.notify_all();
    return nullptr;
  }

  bool read_client() {
    char buf[4096];
    auto n = ::recv(client, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) return true;
    if (n <= 0) return false;
    inbuf.append(buf, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = inbuf.find('\n')) != std::string::npos) {
      std::string text = inbuf.substr(0, nl);
      inbuf.erase(0, nl + 1);
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (text.empty()) continue;
      auto reply = handle(text);
      if (!reply.is_null() && !send_all(client, line(reply))) return false;
    }
    if (inbuf.size() > (1u << 20)) {
      send_all(client, line(error_record("record too long")));
      return false;
    }
    return true;
  }

  void run_loop() {
    auto cfg = in.cfg;
    cfg.on_iteration = [this](const IterationTrace& t) {
      std::lock_guard lk(m);
      theory = t.theory;
      score = t.score;
      iteration = t.iteration;
      emit(trace_record(t));
      emit(state_record(theory, score, iteration));
    };
    try {
      auto r = run_goci(in.pos, in.neg, in.domain, in.lib, cfg, this);
      std::lock_guard lk(m);
      emit(done_record(r));
      result = std::move(r);
    } catch (const Stopped&) {
      std::lock_guard lk(m);
      failure = std::make_exception_ptr(std::runtime_error("session stopped"));
    } catch (const std::exception& e) {
      std::lock_guard lk(m);
      emit(error_record(e.what()));
      failure = std::current_exception();
    }
    std::lock_guard lk(m);
    finished = true;
    poke();
  }
};

SessionServer::SessionServer(ServeInputs in, const std::string& host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()) {
  if (in.pos.empty()) throw std::invalid_argument("serve needs at least one positive example");
  impl_->in = std::move(in);
  if (::pipe(impl_->wake) != 0) throw std::runtime_error("pipe failed");
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket failed");
  impl_->listen_fd = fd;
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw std::invalid_argument("bad host '" + host + "'");
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 4) != 0)
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  impl_->bound_port = ntohs(addr.sin_port);
}

SessionServer::~SessionServer() {
  if (impl_->client >= 0) ::close(impl_->client);
  if (impl_->listen_fd >= 0) ::close(impl_->listen_fd);
  for (int fd : impl_->wake)
    if (fd >= 0) ::close(fd);
}

std::uint16_t SessionServer::port() const { return impl_->bound_port; }

void SessionServer::stop() {
  std::lock_guard lk(impl_->m);
  impl_->stopping = true;
  impl_->cv.notify_all();
  impl_->poke();
}

InductionResult SessionServer::run() {
  auto& I = *impl_;
  std::thread worker([&] { I.run_loop(); });
  for (;;) {
    pollfd fds[3] = {{I.wake[0], POLLIN, 0}, {I.listen_fd, POLLIN, 0}, {I.client, POLLIN, 0}};
    int nfds = I.client >= 0 ? 3 : 2;
    if (::poll(fds, nfds, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (fds[0].revents & POLLIN) {
      char buf[64];
      [[maybe_unused]] auto n = ::read(I.wake[0], buf, sizeof buf);
    }
    if (I.client >= 0 && !I.flush()) I.drop_client();
    {
      std::lock_guard lk(I.m);
      if (I.finished && I.outbox.empty()) break;
    }
    // old client's hangup first, so a quick reconnect is not refused
    if (nfds == 3 && I.client >= 0 && (fds[2].revents & (POLLIN | POLLHUP | POLLERR)))
      if (!I.read_client()) I.drop_client();
    if (fds[1].revents & POLLIN) {
      int fd = ::accept(I.listen_fd, nullptr, nullptr);
      if (fd >= 0) I.attach(fd);
    }
  }
  worker.join();
  if (I.client >= 0) I.flush();
  if (I.client >= 0) {
    ::shutdown(I.client, SHUT_RDWR);
    ::close(I.client);
    I.client = -1;
  }
  if (I.failure) std::rethrow_exception(I.failure);
  return std::move(*I.result);
}

}  // namespace goci
