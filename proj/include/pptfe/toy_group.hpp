#pragma once

// Insecure bilinear group for oracle testing. G is (Z_p, +) so every element is
// its own discrete log; GT is the order-p subgroup of F_q^* with p | q-1, and
// e(x, y) = gt_gen^(x*y). Bilinear by construction, and every exponent is
// inspectable, which is the point.

#include <array>
#include <bit>
#include <cstdint>

#include "pptfe/group.hpp"

namespace pptfe {

namespace toy_detail {

constexpr std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) { return (a * b) % m; }

constexpr std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t acc = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) acc = mul_mod(acc, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return acc;
}

constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Smallest prime q = k*p + 1.
constexpr std::uint64_t field_for(std::uint64_t p) {
  for (std::uint64_t k = 2;; k += 2)
    if (is_prime(k * p + 1)) return k * p + 1;
}

// Fixed generator of the order-p subgroup of F_q^*.
constexpr std::uint64_t subgroup_generator(std::uint64_t p, std::uint64_t q) {
  for (std::uint64_t g = 2;; ++g) {
    const std::uint64_t h = pow_mod(g, (q - 1) / p, q);
    if (h != 1) return h;
  }
}

constexpr std::size_t byte_width(std::uint64_t max_value) {
  return (static_cast<std::size_t>(std::bit_width(max_value)) + 7) / 8;
}

template <std::size_t N>
std::array<std::uint8_t, N> encode_be(std::uint64_t v) {
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[N - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
  return out;
}

inline std::uint64_t decode_be(ByteView in, std::size_t n) {
  if (in.size() != n) throw DecodeError("wrong encoding width");
  std::uint64_t v = 0;
  for (auto b : in) v = (v << 8) | b;
  return v;
}

}  // namespace toy_detail

template <std::uint64_t P>
class ToyScalar {
  static_assert(toy_detail::is_prime(P) && P < (1ULL << 31), "toy modulus must be a small prime");

 public:
  static constexpr std::uint64_t kModulus = P;
  static constexpr std::size_t kBytes = toy_detail::byte_width(P - 1);

  constexpr ToyScalar() = default;

  static constexpr ToyScalar zero() { return ToyScalar(); }
  static constexpr ToyScalar one() { return from_u64(1); }
  static constexpr ToyScalar from_u64(std::uint64_t v) { return ToyScalar(v % P); }
  static constexpr ToyScalar from_i64(std::int64_t v) {
    const auto mag = from_u64(v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v));
    return v < 0 ? -mag : mag;
  }
  static ToyScalar random(Rng& rng) { return from_u64(rng.next_u64()); }
  static ToyScalar from_digest(const Digest& digest) {
    std::uint64_t acc = 0;
    for (auto b : digest) acc = (acc * 256 + b) % P;
    return ToyScalar(acc);
  }

  constexpr std::uint64_t value() const { return v_; }
  constexpr bool is_zero() const { return v_ == 0; }

  friend constexpr ToyScalar operator+(ToyScalar a, ToyScalar b) { return ToyScalar((a.v_ + b.v_) % P); }
  friend constexpr ToyScalar operator-(ToyScalar a, ToyScalar b) { return ToyScalar((a.v_ + P - b.v_) % P); }
  friend constexpr ToyScalar operator*(ToyScalar a, ToyScalar b) { return ToyScalar(a.v_ * b.v_ % P); }
  constexpr ToyScalar operator-() const { return ToyScalar((P - v_) % P); }
  constexpr bool operator==(const ToyScalar&) const = default;

  ToyScalar inverse() const {
    if (v_ == 0) throw std::domain_error("inverse of zero scalar");
    return ToyScalar(toy_detail::pow_mod(v_, P - 2, P));
  }

  std::array<std::uint8_t, kBytes> to_bytes() const { return toy_detail::encode_be<kBytes>(v_); }
  static ToyScalar from_bytes(ByteView in) {
    const auto v = toy_detail::decode_be(in, kBytes);
    if (v >= P) throw DecodeError("scalar not reduced");
    return ToyScalar(v);
  }

 private:
  constexpr explicit ToyScalar(std::uint64_t v) : v_(v) {}
  std::uint64_t v_ = 0;
};

template <std::uint64_t P>
class ToyElement {
 public:
  using Scalar = ToyScalar<P>;
  static constexpr std::size_t kBytes = Scalar::kBytes;

  constexpr ToyElement() = default;

  static constexpr ToyElement identity() { return ToyElement(); }
  static constexpr ToyElement generator() { return ToyElement(Scalar::one()); }
  static ToyElement random(Rng& rng) { return ToyElement(Scalar::random(rng)); }
  static constexpr ToyElement from_exponent(Scalar e) { return ToyElement(e); }

  // Discrete log w.r.t. generator(); the inspection hook the oracles rely on.
  constexpr Scalar exponent() const { return log_; }
  constexpr bool is_identity() const { return log_.is_zero(); }

  friend constexpr ToyElement operator*(ToyElement a, ToyElement b) { return ToyElement(a.log_ + b.log_); }
  friend constexpr ToyElement operator/(ToyElement a, ToyElement b) { return ToyElement(a.log_ - b.log_); }
  constexpr ToyElement inverse() const { return ToyElement(-log_); }
  ToyElement pow(Scalar k) const {
    ++op_counts().exps;
    return ToyElement(log_ * k);
  }
  constexpr bool operator==(const ToyElement&) const = default;

  std::array<std::uint8_t, kBytes> to_bytes() const { return log_.to_bytes(); }
  static ToyElement from_bytes(ByteView in) { return ToyElement(Scalar::from_bytes(in)); }

 private:
  constexpr explicit ToyElement(Scalar log) : log_(log) {}
  Scalar log_;
};

template <std::uint64_t P>
class ToyGt {
 public:
  using Scalar = ToyScalar<P>;
  static constexpr std::uint64_t kField = toy_detail::field_for(P);
  static constexpr std::uint64_t kGenerator = toy_detail::subgroup_generator(P, kField);
  static constexpr std::size_t kBytes = toy_detail::byte_width(kField - 1);

  constexpr ToyGt() = default;

  static constexpr ToyGt identity() { return ToyGt(); }
  static constexpr ToyGt generator() { return ToyGt(kGenerator); }
  // gt_gen^e, uncounted; used by the pairing itself and by test oracles.
  static constexpr ToyGt from_exponent(Scalar e) {
    return ToyGt(toy_detail::pow_mod(kGenerator, e.value(), kField));
  }

  constexpr std::uint64_t value() const { return v_; }
  constexpr bool is_identity() const { return v_ == 1; }

  friend constexpr ToyGt operator*(ToyGt a, ToyGt b) { return ToyGt(toy_detail::mul_mod(a.v_, b.v_, kField)); }
  friend ToyGt operator/(ToyGt a, ToyGt b) { return a * b.inverse(); }
  ToyGt inverse() const { return ToyGt(toy_detail::pow_mod(v_, kField - 2, kField)); }
  ToyGt pow(Scalar k) const {
    ++op_counts().gt_exps;
    return ToyGt(toy_detail::pow_mod(v_, k.value(), kField));
  }
  constexpr bool operator==(const ToyGt&) const = default;

  std::array<std::uint8_t, kBytes> to_bytes() const { return toy_detail::encode_be<kBytes>(v_); }
  static ToyGt from_bytes(ByteView in) {
    const auto v = toy_detail::decode_be(in, kBytes);
    if (v == 0 || v >= kField || toy_detail::pow_mod(v, P, kField) != 1)
      throw DecodeError("not an element of the order-p subgroup");
    return ToyGt(v);
  }

 private:
  constexpr explicit ToyGt(std::uint64_t v) : v_(v) {}
  std::uint64_t v_ = 1;
};

template <std::uint64_t P>
struct ToyGroup {
  static constexpr BackendId kId = BackendId::kToy;
  using Scalar = ToyScalar<P>;
  using Element = ToyElement<P>;
  using Gt = ToyGt<P>;

  static Gt pair(const Element& x, const Element& y) {
    ++op_counts().pairings;
    return Gt::from_exponent(x.exponent() * y.exponent());
  }
};

inline constexpr std::uint64_t kToyModulus = 1000003;
using Toy = ToyGroup<kToyModulus>;

}  // namespace pptfe
