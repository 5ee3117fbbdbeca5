#pragma once

#include <concepts>
#include <cstdint>
#include <string_view>

#include "pptfe/bytes.hpp"
#include "pptfe/hash.hpp"
#include "pptfe/op_counter.hpp"
#include "pptfe/rng.hpp"

namespace pptfe {

// Persisted as a single tag byte in files and wire frames.
enum class BackendId : std::uint8_t { kToy = 0x01, kCurve = 0x02 };

std::string_view to_string(BackendId id);

// A symmetric bilinear group: one source group G (Element), target group GT (Gt),
// common prime order p (Scalar modulus) and e: G x G -> GT.
template <class G>
concept PairingGroup = requires(const typename G::Scalar& k, const typename G::Element& x,
                                const typename G::Gt& t, Rng& rng, ByteView bytes) {
  { G::kId } -> std::convertible_to<BackendId>;
  { G::pair(x, x) } -> std::same_as<typename G::Gt>;
  { G::Scalar::random(rng) } -> std::same_as<typename G::Scalar>;
  { G::Scalar::from_i64(int64_t{1}) } -> std::same_as<typename G::Scalar>;
  { G::Scalar::from_digest(Digest{}) } -> std::same_as<typename G::Scalar>;
  { k + k } -> std::same_as<typename G::Scalar>;
  { k * k } -> std::same_as<typename G::Scalar>;
  { k.inverse() } -> std::same_as<typename G::Scalar>;
  { G::Element::generator() } -> std::same_as<typename G::Element>;
  { G::Element::identity() } -> std::same_as<typename G::Element>;
  { G::Element::random(rng) } -> std::same_as<typename G::Element>;
  { x * x } -> std::same_as<typename G::Element>;
  { x.pow(k) } -> std::same_as<typename G::Element>;
  { x.inverse() } -> std::same_as<typename G::Element>;
  { t * t } -> std::same_as<typename G::Gt>;
  { t.pow(k) } -> std::same_as<typename G::Gt>;
  { t.inverse() } -> std::same_as<typename G::Gt>;
  { G::Gt::identity() } -> std::same_as<typename G::Gt>;
  { G::Element::from_bytes(bytes) } -> std::same_as<typename G::Element>;
  { G::Gt::from_bytes(bytes) } -> std::same_as<typename G::Gt>;
  { G::Scalar::from_bytes(bytes) } -> std::same_as<typename G::Scalar>;
  x.to_bytes();
  t.to_bytes();
  k.to_bytes();
};

// c = (SHA-256(tag || 0x00 || transcript) as a big-endian integer) mod p.
template <PairingGroup G>
typename G::Scalar hash_to_scalar(std::string_view tag, ByteView transcript) {
  static constexpr std::uint8_t kSeparator[1] = {0x00};
  ++op_counts().hashes;
  return G::Scalar::from_digest(sha256({as_bytes(tag), kSeparator, transcript}));
}

// Inner product over the scalar field.
template <class Scalar>
Scalar inner_product(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  Scalar acc = Scalar::zero();
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

}  // namespace pptfe
