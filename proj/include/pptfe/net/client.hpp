#pragma once

// User side of remote issuance: exactly one request frame, one response frame.

#include <cstdint>
#include <string>

#include "pptfe/codec.hpp"
#include "pptfe/net/frame.hpp"
#include "pptfe/net/socket.hpp"
#include "pptfe/ppkeygen.hpp"

namespace pptfe::net {

// The KGC answered with an ERROR frame.
class RemoteError : public Error {
 public:
  RemoteError(std::uint16_t code, const std::string& detail)
      : Error(ErrorFamily::kProtocol, "KGC error " + std::to_string(code) + ": " + detail), code_(code) {}
  std::uint16_t code() const noexcept { return code_; }

 private:
  std::uint16_t code_;
};

// Raw bytes exchanged during one session, for transcript inspection.
struct WireCapture {
  Bytes sent;
  Bytes received;
  std::size_t frames_sent = 0;
  std::size_t frames_received = 0;
};

template <PairingGroup G>
FunctionalKey<G> request_key(const PublicParams<G>& pp, const typename G::Scalar& theta,
                             const std::vector<typename G::Scalar>& y, const Endpoint& server, Rng& rng,
                             WireCapture* capture = nullptr) {
  auto [state, msg1] = user_round1(pp, theta, y, rng);
  const Frame request{G::kId, MsgType::kIssueRequest, encode(msg1)};

  Socket sock = Socket::connect(server);
  const Bytes wire = encode_frame(request);
  sock.send_all(wire);
  if (capture) {
    capture->sent.insert(capture->sent.end(), wire.begin(), wire.end());
    ++capture->frames_sent;
  }

  const Frame reply = read_frame(sock, G::kId);
  if (capture) {
    const Bytes raw = encode_frame(reply);
    capture->received.insert(capture->received.end(), raw.begin(), raw.end());
    ++capture->frames_received;
  }
  if (reply.type == MsgType::kError) {
    const auto err = decode_error_payload(reply.payload);
    throw RemoteError(err.code, err.detail);
  }
  if (reply.type != MsgType::kIssueResponse)
    throw FrameError(FrameErrorKind::kUnknownType, "unexpected reply type");
  const auto msg2 = decode_all(reply.payload, [](ByteReader& r) { return read_msg2<G>(r); });
  return user_finalize(pp, state, msg2);
}

}  // namespace pptfe::net
