#pragma once

// Traceable functional encryption for inner products: Setup, Encrypt, KeyGen,
// key verification, Decrypt and Trace over any PairingGroup.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pptfe/dlog.hpp"
#include "pptfe/errors.hpp"
#include "pptfe/group.hpp"

namespace pptfe {

inline constexpr std::uint64_t kDefaultDlogBound = 1ULL << 20;

template <PairingGroup G>
struct PublicParams {
  using Element = typename G::Element;
  using Gt = typename G::Gt;

  Element g0;
  Element g1;
  Element g2;
  Element h;                   // extra base used only by blind issuance
  Element tracer_pk;           // g2^b
  Element kgc_pk;              // g0^a
  std::vector<Element> masks;  // g1^{s_i}, one per coordinate

  // e(g0, g1), the decryption base. Derived, never serialized.
  Gt gt_base;

  std::size_t dim() const { return masks.size(); }

  void derive() { gt_base = G::pair(g0, g1); }

  bool operator==(const PublicParams& o) const {
    return g0 == o.g0 && g1 == o.g1 && g2 == o.g2 && h == o.h && tracer_pk == o.tracer_pk &&
           kgc_pk == o.kgc_pk && masks == o.masks;
  }
};

template <PairingGroup G>
struct MasterSecretKey {
  typename G::Scalar a;
  std::vector<typename G::Scalar> s;  // h_i = g1^{s_i}
  bool operator==(const MasterSecretKey&) const = default;
};

template <PairingGroup G>
struct TracerSecret {
  typename G::Scalar b;
  bool operator==(const TracerSecret&) const = default;
};

template <PairingGroup G>
struct Ciphertext {
  std::vector<typename G::Element> body;  // h_i^r * g1^{x_i}
  typename G::Element r_g1;               // g1^r
  typename G::Element r_g2;               // g2^r
  typename G::Element r_g0;               // g0^r

  std::size_t element_count() const { return body.size() + 3; }
  bool operator==(const Ciphertext&) const = default;
};

// (K1, K2, K3, K4, K5). K4 and K5 are the scalars w and d shared by every
// component, which is what stops components of different keys being mixed.
template <PairingGroup G>
struct FunctionalKey {
  typename G::Element k1;  // g0^<y,s> * B^{w/(d+a)}
  typename G::Element k2;  // (g0 * (g2 B)^w * g2^theta)^{1/(d+a)}
  typename G::Element k3;  // g1^{1/(d+a)}
  typename G::Scalar k4;   // w
  typename G::Scalar k5;   // d
  bool operator==(const FunctionalKey&) const = default;
};

// What the key holder must present alongside the key.
template <PairingGroup G>
struct KeyContext {
  std::vector<typename G::Scalar> y;
  typename G::Scalar theta;
  bool operator==(const KeyContext&) const = default;
};

template <PairingGroup G>
struct SetupOutput {
  PublicParams<G> pp;
  MasterSecretKey<G> msk;
  TracerSecret<G> tsk;
};

template <class Scalar>
void require_identity(const Scalar& theta) {
  if (theta.is_zero()) throw IdentityDomainError("identity must be nonzero");
}

template <PairingGroup G>
void require_dim(const PublicParams<G>& pp, std::size_t n, const char* what) {
  if (n != pp.dim())
    throw DimensionError(std::string(what) + " has length " + std::to_string(n) + ", expected " +
                         std::to_string(pp.dim()));
}

// Largest |value| the decryptor can tell apart from its negation.
template <PairingGroup G>
constexpr std::uint64_t max_recoverable_magnitude() {
  if constexpr (requires { G::Scalar::kModulus; }) {
    return (G::Scalar::kModulus - 1) / 2;
  } else {
    return std::numeric_limits<std::int64_t>::max();
  }
}

template <PairingGroup G>
SetupOutput<G> setup(std::size_t dim, Rng& rng) {
  using Element = typename G::Element;
  using Scalar = typename G::Scalar;
  if (dim == 0) throw DimensionError("dimension must be at least 1");

  auto nonidentity = [&rng] {
    for (;;) {
      auto e = Element::random(rng);
      if (!e.is_identity()) return e;
    }
  };

  SetupOutput<G> out;
  auto& pp = out.pp;
  pp.g0 = nonidentity();
  pp.g1 = nonidentity();
  pp.g2 = nonidentity();
  pp.h = nonidentity();

  out.msk.s.reserve(dim);
  pp.masks.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.msk.s.push_back(Scalar::random(rng));
    pp.masks.push_back(pp.g1.pow(out.msk.s.back()));
  }

  // B and Y must not be the identity, so their exponents must not be zero.
  do out.tsk.b = Scalar::random(rng); while (out.tsk.b.is_zero());
  do out.msk.a = Scalar::random(rng); while (out.msk.a.is_zero());
  pp.tracer_pk = pp.g2.pow(out.tsk.b);
  pp.kgc_pk = pp.g0.pow(out.msk.a);
  pp.derive();
  return out;
}

// Encrypt with caller-chosen randomness r (test hook and equivalence checks).
template <PairingGroup G>
Ciphertext<G> encrypt_with(const PublicParams<G>& pp, const std::vector<typename G::Scalar>& x,
                           const typename G::Scalar& r) {
  require_dim(pp, x.size(), "plaintext");
  Ciphertext<G> ct;
  ct.body.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ct.body.push_back(pp.masks[i].pow(r) * pp.g1.pow(x[i]));
  ct.r_g1 = pp.g1.pow(r);
  ct.r_g2 = pp.g2.pow(r);
  ct.r_g0 = pp.g0.pow(r);
  return ct;
}

template <PairingGroup G>
Ciphertext<G> encrypt(const PublicParams<G>& pp, const std::vector<typename G::Scalar>& x, Rng& rng) {
  return encrypt_with(pp, x, G::Scalar::random(rng));
}

// KeyGen with caller-chosen (w, d); d + a must be invertible.
template <PairingGroup G>
FunctionalKey<G> keygen_with(const PublicParams<G>& pp, const MasterSecretKey<G>& msk, const KeyContext<G>& ctx,
                             const typename G::Scalar& w, const typename G::Scalar& d) {
  require_dim(pp, ctx.y.size(), "key vector");
  require_identity(ctx.theta);
  const auto denom = d + msk.a;
  if (denom.is_zero()) throw std::domain_error("d + a == 0");
  const auto inv = denom.inverse();

  FunctionalKey<G> key;
  key.k1 = pp.g0.pow(inner_product(ctx.y, msk.s)) * pp.tracer_pk.pow(w * inv);
  key.k2 = (pp.g0 * (pp.g2 * pp.tracer_pk).pow(w) * pp.g2.pow(ctx.theta)).pow(inv);
  key.k3 = pp.g1.pow(inv);
  key.k4 = w;
  key.k5 = d;
  return key;
}

template <PairingGroup G>
FunctionalKey<G> keygen(const PublicParams<G>& pp, const MasterSecretKey<G>& msk, const KeyContext<G>& ctx,
                        Rng& rng) {
  using Scalar = typename G::Scalar;
  const auto w = Scalar::random(rng);
  auto d = Scalar::random(rng);
  while ((d + msk.a).is_zero()) d = Scalar::random(rng);
  return keygen_with(pp, msk, ctx, w, d);
}

// The three pairing equations a key holder checks:
//   e(K1, g1)           = e(g0, prod h_i^{y_i}) * e(B^w, K3)
//   e(K3, g0^{K5} Y)    = e(g0, g1)
//   e(K2, g0^{K5} Y)    = e(g0, g0) * e(g0, g2 B)^{K4} * e(g0, g2)^theta
template <PairingGroup G>
bool verify_key(const PublicParams<G>& pp, const FunctionalKey<G>& key, const KeyContext<G>& ctx) {
  using Element = typename G::Element;
  if (ctx.y.size() != pp.dim() || ctx.theta.is_zero()) return false;

  Element weighted = Element::identity();
  for (std::size_t i = 0; i < ctx.y.size(); ++i) weighted = weighted * pp.masks[i].pow(ctx.y[i]);
  if (!(G::pair(key.k1, pp.g1) == G::pair(pp.g0, weighted) * G::pair(pp.tracer_pk.pow(key.k4), key.k3)))
    return false;

  const Element shifted = pp.g0.pow(key.k5) * pp.kgc_pk;  // g0^{d+a}
  if (!(G::pair(key.k3, shifted) == pp.gt_base)) return false;

  return G::pair(key.k2, shifted) == G::pair(pp.g0, pp.g0) * G::pair(pp.g0, pp.g2 * pp.tracer_pk).pow(key.k4) *
                                         G::pair(pp.g0, pp.g2).pow(ctx.theta);
}

// e(g0,g1)^<x,y> recovered from the five-pairing ratio.
template <PairingGroup G>
typename G::Gt decrypt_to_gt(const PublicParams<G>& pp, const FunctionalKey<G>& key, const KeyContext<G>& ctx,
                             const Ciphertext<G>& ct) {
  using Element = typename G::Element;
  require_dim(pp, ctx.y.size(), "key vector");
  require_dim(pp, ct.body.size(), "ciphertext");

  Element weighted = Element::identity();
  for (std::size_t i = 0; i < ct.body.size(); ++i) weighted = weighted * ct.body[i].pow(ctx.y[i]);

  const auto num = G::pair(pp.g0, weighted) * G::pair(ct.r_g1, key.k2);
  const auto den = G::pair(key.k1, ct.r_g1) * G::pair(key.k3, ct.r_g0) *
                   G::pair(key.k3.pow(key.k4) * key.k3.pow(ctx.theta), ct.r_g2);
  return num / den;
}

// Returns <x, y> when |<x, y>| <= bound, std::nullopt otherwise.
template <PairingGroup G>
std::optional<std::int64_t> decrypt(const PublicParams<G>& pp, const FunctionalKey<G>& key,
                                    const KeyContext<G>& ctx, const Ciphertext<G>& ct,
                                    std::uint64_t bound = kDefaultDlogBound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  bound = std::min<std::uint64_t>(bound, max_recoverable_magnitude<G>());
  const auto target = decrypt_to_gt(pp, key, ctx, ct);
  if (auto n = dlog_bsgs(pp.gt_base, target, bound)) return static_cast<std::int64_t>(*n);
  if (auto n = dlog_bsgs(pp.gt_base, target.inverse(), bound)) return -static_cast<std::int64_t>(*n);
  return std::nullopt;
}

// The tracer's two target-group values for a key: base = e(K3, g2) and
// target = e(K2, g1) / (e(g0, K3) * e(g2, K3^{K4} * K3^{K4 b})) = base^theta.
template <PairingGroup G>
struct TraceTarget {
  typename G::Gt base;
  typename G::Gt target;
};

template <PairingGroup G>
TraceTarget<G> trace_target(const PublicParams<G>& pp, const TracerSecret<G>& tsk, const FunctionalKey<G>& key) {
  const auto blind = key.k3.pow(key.k4) * key.k3.pow(key.k4 * tsk.b);
  return {G::pair(key.k3, pp.g2), G::pair(key.k2, pp.g1) / (G::pair(pp.g0, key.k3) * G::pair(pp.g2, blind))};
}

// First candidate theta with base^theta == target, or std::nullopt.
template <PairingGroup G>
std::optional<typename G::Scalar> trace(const PublicParams<G>& pp, const TracerSecret<G>& tsk,
                                        const FunctionalKey<G>& key,
                                        std::span<const typename G::Scalar> candidates) {
  if (candidates.empty()) return std::nullopt;
  const auto t = trace_target(pp, tsk, key);
  for (const auto& theta : candidates)
    if (t.base.pow(theta) == t.target) return theta;
  return std::nullopt;
}

}  // namespace pptfe
