#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "pptfe/bytes.hpp"
#include "pptfe/errors.hpp"
#include "pptfe/net/frame.hpp"

namespace pptfe::net {

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(ErrorFamily::kProtocol, what) {}
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

// "host:port"; throws std::invalid_argument.
Endpoint parse_endpoint(const std::string& text);
std::string to_string(const Endpoint& ep);

// Owning TCP stream socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  static Socket connect(const Endpoint& ep, std::chrono::milliseconds io_timeout = std::chrono::seconds(30));

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();

  void set_io_timeout(std::chrono::milliseconds timeout);
  void send_all(ByteView data);
  // Reads exactly out.size() bytes; returns false on orderly EOF before any byte.
  bool recv_exact(std::span<std::uint8_t> out);
  void shutdown_write();

 private:
  int fd_ = -1;
};

// Listening socket with a pollable accept so callers can stop it.
class Listener {
 public:
  explicit Listener(const Endpoint& ep, int backlog = 64);
  Listener(Listener&&) noexcept = default;
  ~Listener() = default;

  std::uint16_t port() const { return port_; }
  // Waits up to `timeout` for a connection.
  std::optional<Socket> accept_for(std::chrono::milliseconds timeout);

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

void write_frame(Socket& sock, const Frame& frame);
// Header is validated before the payload is read, so oversize lengths never
// allocate. Throws FrameError or TransportError.
Frame read_frame(Socket& sock, std::optional<BackendId> expected = std::nullopt);

}  // namespace pptfe::net
