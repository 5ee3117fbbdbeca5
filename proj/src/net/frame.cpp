#include "pptfe/net/frame.hpp"

namespace pptfe::net {

namespace {

std::uint32_t read_u32(ByteView b) {
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

bool known_type(std::uint8_t t) {
  return t == static_cast<std::uint8_t>(MsgType::kIssueRequest) ||
         t == static_cast<std::uint8_t>(MsgType::kIssueResponse) || t == static_cast<std::uint8_t>(MsgType::kError);
}

bool known_backend(std::uint8_t b) {
  return b == static_cast<std::uint8_t>(BackendId::kToy) || b == static_cast<std::uint8_t>(BackendId::kCurve);
}

}  // namespace

Bytes encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) throw FrameError(FrameErrorKind::kSize, "payload exceeds 16 MiB");
  ByteWriter w;
  w.put_u32(static_cast<std::uint32_t>(3 + frame.payload.size()));
  w.put_u8(kProtocolVersion);
  w.put_u8(static_cast<std::uint8_t>(frame.backend));
  w.put_u8(static_cast<std::uint8_t>(frame.type));
  w.put(frame.payload);
  return std::move(w).take();
}

std::size_t check_frame_header(ByteView header, std::optional<BackendId> expected) {
  if (header.size() < kFrameHeaderBytes) throw FrameError(FrameErrorKind::kIncomplete, "truncated frame header");
  const std::uint32_t length = read_u32(header);
  if (length < 3) throw FrameError(FrameErrorKind::kMalformed, "declared length below header size");
  if (length - 3 > kMaxPayload) throw FrameError(FrameErrorKind::kSize, "payload exceeds 16 MiB");
  if (header[4] != kProtocolVersion) throw FrameError(FrameErrorKind::kNegotiation, "unsupported protocol version");
  if (!known_backend(header[5])) throw FrameError(FrameErrorKind::kNegotiation, "unknown backend id");
  if (expected && header[5] != static_cast<std::uint8_t>(*expected))
    throw FrameError(FrameErrorKind::kNegotiation, "backend mismatch");
  if (!known_type(header[6])) throw FrameError(FrameErrorKind::kUnknownType, "unknown message type");
  return length - 3;
}

DecodedFrame decode_frame(ByteView in, std::optional<BackendId> expected) {
  const std::size_t payload_len = check_frame_header(in, expected);
  if (in.size() < kFrameHeaderBytes + payload_len) throw FrameError(FrameErrorKind::kIncomplete, "truncated payload");
  DecodedFrame out;
  out.frame.backend = static_cast<BackendId>(in[5]);
  out.frame.type = static_cast<MsgType>(in[6]);
  const auto payload = in.subspan(kFrameHeaderBytes, payload_len);
  out.frame.payload.assign(payload.begin(), payload.end());
  out.consumed = kFrameHeaderBytes + payload_len;
  return out;
}

Frame make_error_frame(BackendId backend, ErrorCode code, const std::string& detail) {
  ByteWriter w;
  w.put_u16(static_cast<std::uint16_t>(code));
  w.put(as_bytes(detail));
  return Frame{backend, MsgType::kError, std::move(w).take()};
}

ErrorPayload decode_error_payload(ByteView payload) {
  ByteReader r(payload);
  ErrorPayload out;
  out.code = r.get_u16();
  const auto rest = r.take(r.remaining());
  out.detail.assign(rest.begin(), rest.end());
  return out;
}

}  // namespace pptfe::net
