#pragma once

// Wire framing for the issuance service:
//   length (u32 BE, = 3 + |payload|) | version (0x01) | backend id | msg type | payload

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "pptfe/bytes.hpp"
#include "pptfe/errors.hpp"
#include "pptfe/group.hpp"

namespace pptfe::net {

inline constexpr std::uint8_t kProtocolVersion = 0x01;
inline constexpr std::size_t kMaxPayload = 16u * 1024 * 1024;
inline constexpr std::size_t kFrameHeaderBytes = 4 + 3;

enum class MsgType : std::uint8_t {
  kIssueRequest = 0x01,   // carries Msg1
  kIssueResponse = 0x02,  // carries Msg2
  kError = 0x7F,          // carries u16 code + UTF-8 detail
};

// ERROR frame codes.
enum class ErrorCode : std::uint16_t {
  kMalformed = 0x0001,
  kProofRejected = 0x0002,
  kInternal = 0x00FF,
};

struct Frame {
  BackendId backend = BackendId::kToy;
  MsgType type = MsgType::kIssueRequest;
  Bytes payload;
  bool operator==(const Frame&) const = default;
};

enum class FrameErrorKind {
  kSize,         // payload above kMaxPayload
  kIncomplete,   // fewer bytes than the header declares
  kMalformed,    // declared length cannot hold the fixed header
  kNegotiation,  // version or backend mismatch
  kUnknownType,
};

class FrameError : public Error {
 public:
  FrameError(FrameErrorKind kind, const std::string& what) : Error(ErrorFamily::kProtocol, what), kind_(kind) {}
  FrameErrorKind kind() const noexcept { return kind_; }

 private:
  FrameErrorKind kind_;
};

Bytes encode_frame(const Frame& frame);

struct DecodedFrame {
  Frame frame;
  std::size_t consumed = 0;  // bytes past this frame belong to the next one
};

// Decodes the first frame in `in`. If `expected` is set, a different backend
// byte is a negotiation error.
DecodedFrame decode_frame(ByteView in, std::optional<BackendId> expected = std::nullopt);

// Validates the 7 fixed header bytes; returns the payload length to read next.
std::size_t check_frame_header(ByteView header, std::optional<BackendId> expected);

Frame make_error_frame(BackendId backend, ErrorCode code, const std::string& detail);

struct ErrorPayload {
  std::uint16_t code = 0;
  std::string detail;
};

ErrorPayload decode_error_payload(ByteView payload);

}  // namespace pptfe::net
