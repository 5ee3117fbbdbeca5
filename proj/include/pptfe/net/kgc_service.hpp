#pragma once

// Issuance service: one ISSUE_REQ in, one ISSUE_RESP (or ERROR) out per
// connection. pp and msk are shared read-only across session threads.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "pptfe/codec.hpp"
#include "pptfe/net/frame.hpp"
#include "pptfe/net/session_log.hpp"
#include "pptfe/net/socket.hpp"
#include "pptfe/ppkeygen.hpp"

namespace pptfe::net {

struct HandledRequest {
  Frame reply;
  SessionOutcome outcome;
};

// Transport-free request handling, so it can be exercised without sockets.
template <PairingGroup G>
HandledRequest handle_request_frame(const PublicParams<G>& pp, const MasterSecretKey<G>& msk, const Frame& request,
                                    Rng& rng) {
  if (request.backend != G::kId)
    return {make_error_frame(G::kId, ErrorCode::kMalformed, "backend mismatch"), SessionOutcome::kMalformed};
  if (request.type != MsgType::kIssueRequest)
    return {make_error_frame(G::kId, ErrorCode::kMalformed, "expected ISSUE_REQ"), SessionOutcome::kMalformed};
  Msg1<G> msg1;
  try {
    msg1 = decode_all(request.payload, [](ByteReader& r) { return read_msg1<G>(r); });
  } catch (const DecodeError& e) {
    return {make_error_frame(G::kId, ErrorCode::kMalformed, e.what()), SessionOutcome::kMalformed};
  }
  if (msg1.y.size() != pp.dim())
    return {make_error_frame(G::kId, ErrorCode::kMalformed, "request vector has wrong dimension"),
            SessionOutcome::kMalformed};
  try {
    const auto msg2 = kgc_respond(pp, msk, msg1, rng);
    return {Frame{G::kId, MsgType::kIssueResponse, encode(msg2)}, SessionOutcome::kIssued};
  } catch (const ProtocolAbort& e) {
    return {make_error_frame(G::kId, ErrorCode::kProofRejected, e.what()), SessionOutcome::kProofRejected};
  } catch (const std::exception&) {
    return {make_error_frame(G::kId, ErrorCode::kInternal, "internal error"), SessionOutcome::kInternal};
  }
}

struct ServiceOptions {
  Endpoint listen{"127.0.0.1", 0};
  std::size_t max_sessions = 16;
  std::chrono::milliseconds io_timeout{10000};
};

// Overrides from PPTFE_LISTEN and PPTFE_MAX_SESSIONS when set.
inline ServiceOptions options_from_env(ServiceOptions base) {
  if (const char* v = std::getenv("PPTFE_LISTEN"); v && *v) base.listen = parse_endpoint(v);
  if (const char* v = std::getenv("PPTFE_MAX_SESSIONS"); v && *v) {
    const long n = std::strtol(v, nullptr, 10);
    if (n <= 0) throw std::invalid_argument("PPTFE_MAX_SESSIONS must be positive");
    base.max_sessions = static_cast<std::size_t>(n);
  }
  return base;
}

template <PairingGroup G>
class KgcService {
 public:
  KgcService(PublicParams<G> pp, MasterSecretKey<G> msk, ServiceOptions opts)
      : pp_(std::move(pp)), msk_(std::move(msk)), opts_(std::move(opts)), listener_(opts_.listen) {
    if (opts_.max_sessions == 0) throw std::invalid_argument("max_sessions must be positive");
    if (msk_.s.size() != pp_.dim()) throw DimensionError("master secret does not match public parameters");
    acceptor_ = std::thread([this] { accept_loop(); });
  }
  KgcService(const KgcService&) = delete;
  KgcService& operator=(const KgcService&) = delete;
  ~KgcService() { stop(); }

  std::uint16_t port() const { return listener_.port(); }
  Endpoint endpoint() const { return {opts_.listen.host, port()}; }
  const SessionLog& log() const { return log_; }

  // Stops accepting and waits for in-flight sessions to finish.
  void stop() {
    stopping_.store(true);
    slots_cv_.notify_all();
    if (acceptor_.joinable()) acceptor_.join();
    std::list<Worker> workers;
    {
      std::lock_guard lock(mu_);
      workers.swap(workers_);
    }
    for (auto& w : workers)
      if (w.thread.joinable()) w.thread.join();
  }

  void wait() {
    if (acceptor_.joinable()) acceptor_.join();
  }

 private:
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void reap_finished() {
    std::lock_guard lock(mu_);
    for (auto it = workers_.begin(); it != workers_.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = workers_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void accept_loop() {
    using namespace std::chrono_literals;
    while (!stopping_.load()) {
      {
        std::unique_lock lock(mu_);
        slots_cv_.wait_for(lock, 100ms, [&] { return active_ < opts_.max_sessions || stopping_.load(); });
        if (stopping_.load()) break;
        if (active_ >= opts_.max_sessions) continue;
      }
      reap_finished();
      auto sock = listener_.accept_for(100ms);
      if (!sock) continue;
      sock->set_io_timeout(opts_.io_timeout);
      auto done = std::make_shared<std::atomic<bool>>(false);
      std::lock_guard lock(mu_);
      ++active_;
      workers_.push_back(Worker{std::thread([this, s = std::move(*sock), done]() mutable {
                                  serve_one(s);
                                  {
                                    std::lock_guard inner(mu_);
                                    --active_;
                                  }
                                  slots_cv_.notify_all();
                                  done->store(true);
                                }),
                                done});
    }
  }

  void serve_one(Socket& sock) {
    SessionRecord rec;
    rec.id = log_.next_id();
    rec.started = std::chrono::system_clock::now();
    try {
      Frame request;
      try {
        request = read_frame(sock);
      } catch (const FrameError& e) {
        rec.outcome = SessionOutcome::kMalformed;
        write_frame(sock, make_error_frame(G::kId, ErrorCode::kMalformed, e.what()));
        finish(sock, rec);
        return;
      }
      SystemRng rng;
      auto handled = handle_request_frame(pp_, msk_, request, rng);
      rec.outcome = handled.outcome;
      write_frame(sock, handled.reply);
    } catch (const TransportError&) {
      rec.outcome = SessionOutcome::kTransport;
    } catch (const std::exception&) {
      rec.outcome = SessionOutcome::kInternal;
    }
    finish(sock, rec);
  }

  void finish(Socket& sock, SessionRecord& rec) {
    sock.shutdown_write();
    rec.finished = std::chrono::system_clock::now();
    log_.append(rec);
  }

  const PublicParams<G> pp_;
  const MasterSecretKey<G> msk_;
  const ServiceOptions opts_;
  Listener listener_;
  SessionLog log_;

  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::condition_variable slots_cv_;
  std::size_t active_ = 0;
  std::list<Worker> workers_;
  std::thread acceptor_;
};

}  // namespace pptfe::net
