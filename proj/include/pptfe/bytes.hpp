#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pptfe/errors.hpp"

namespace pptfe {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView bytes);

// Append-only big-endian writer used by every canonical encoding.
class ByteWriter {
 public:
  void put(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void put_u8(std::uint8_t v) { out_.push_back(v); }
  void put_u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void put_u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }

  template <class T>
  void put_value(const T& value) {
    const auto bytes = value.to_bytes();
    put(ByteView(bytes.data(), bytes.size()));
  }

  // 4-byte big-endian count followed by each item.
  template <class T>
  void put_list(const std::vector<T>& items) {
    put_u32(static_cast<std::uint32_t>(items.size()));
    for (const auto& item : items) put_value(item);
  }

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  ByteView take(std::size_t n) {
    if (n > remaining()) throw DecodeError("truncated input");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t get_u8() { return take(1)[0]; }
  std::uint16_t get_u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
  }
  std::uint32_t get_u32() {
    auto b = take(4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  }

  template <class T>
  T get_value() {
    return T::from_bytes(take(T::kBytes));
  }

  // max_count guards against allocating for a hostile length prefix.
  template <class T>
  std::vector<T> get_list(std::size_t max_count) {
    const std::uint32_t n = get_u32();
    if (n > max_count || std::size_t{n} * T::kBytes > remaining()) throw DecodeError("list length out of range");
    std::vector<T> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(get_value<T>());
    return out;
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  void expect_end() const {
    if (remaining() != 0) throw DecodeError("trailing bytes after encoding");
  }

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace pptfe
