#pragma once

// Two-message blind issuance. The user commits to its identity in (A1, A2),
// the KGC answers with blinded key material (B1..B5) without learning theta,
// and the user unblinds: K1 = B1 / B4^tau, K2 = B2, K3 = B3, K4 = w1 + w2,
// K5 = B5. The result equals KeyGen run with w = w1 + w2 and the KGC's d.

#include <utility>
#include <vector>

#include "pptfe/errors.hpp"
#include "pptfe/scheme.hpp"
#include "pptfe/sigma.hpp"

namespace pptfe {

// Kept by the user between the two messages; never serialized.
template <PairingGroup G>
struct UserRound1State {
  typename G::Scalar theta;
  typename G::Scalar tau;
  typename G::Scalar w1;
  std::vector<typename G::Scalar> y;
};

template <PairingGroup G>
struct Msg1 {
  std::vector<typename G::Scalar> y;
  typename G::Element a1;  // h^tau * B^w1
  typename G::Element a2;  // (g2 B)^w1 * g2^theta
  SigmaUProof<G> proof;
  bool operator==(const Msg1&) const = default;
};

template <PairingGroup G>
struct Msg2 {
  typename G::Scalar w2;
  typename G::Element b1;
  typename G::Element b2;
  typename G::Element b3;
  typename G::Element b4;
  typename G::Scalar b5;
  SigmaKProof<G> proof;
  bool operator==(const Msg2&) const = default;
};

template <PairingGroup G>
SigmaKStatement<G> sigma_k_statement(const std::vector<typename G::Scalar>& y, const typename G::Element& a1,
                                     const typename G::Element& a2, const Msg2<G>& m) {
  return {y, a1, a2, m.w2, m.b1, m.b2, m.b3, m.b4, m.b5};
}

// Randomness a user session consumes; injectable for equivalence tests.
template <PairingGroup G>
struct UserRandomness {
  typename G::Scalar tau;
  typename G::Scalar w1;
  SigmaUSecrets<G> nonces;
};

template <PairingGroup G>
struct KgcRandomness {
  typename G::Scalar w2;
  typename G::Scalar d;
  SigmaKNonces<G> nonces;
};

template <PairingGroup G>
std::pair<UserRound1State<G>, Msg1<G>> user_round1_with(const PublicParams<G>& pp, const typename G::Scalar& theta,
                                                        const std::vector<typename G::Scalar>& y,
                                                        const UserRandomness<G>& rnd) {
  require_identity(theta);
  require_dim(pp, y.size(), "key vector");
  UserRound1State<G> state{theta, rnd.tau, rnd.w1, y};
  Msg1<G> msg;
  msg.y = y;
  msg.a1 = pp.h.pow(rnd.tau) * pp.tracer_pk.pow(rnd.w1);
  msg.a2 = (pp.g2 * pp.tracer_pk).pow(rnd.w1) * pp.g2.pow(theta);
  msg.proof = sigma_u_prove_with(pp, msg.a1, msg.a2, {rnd.tau, theta, rnd.w1}, rnd.nonces);
  return {std::move(state), std::move(msg)};
}

template <PairingGroup G>
UserRandomness<G> sample_user_randomness(Rng& rng) {
  using Scalar = typename G::Scalar;
  UserRandomness<G> r;
  r.tau = Scalar::random(rng);
  r.w1 = Scalar::random(rng);
  r.nonces = {Scalar::random(rng), Scalar::random(rng), Scalar::random(rng)};
  return r;
}

template <PairingGroup G>
std::pair<UserRound1State<G>, Msg1<G>> user_round1(const PublicParams<G>& pp, const typename G::Scalar& theta,
                                                   const std::vector<typename G::Scalar>& y, Rng& rng) {
  return user_round1_with(pp, theta, y, sample_user_randomness<G>(rng));
}

// KGC side. Throws ProtocolAbort without producing anything if SigmaU fails.
template <PairingGroup G>
Msg2<G> kgc_respond_with(const PublicParams<G>& pp, const MasterSecretKey<G>& msk, const Msg1<G>& msg1,
                         const KgcRandomness<G>& rnd) {
  if (msg1.y.size() != pp.dim()) throw ProtocolAbort("request vector has wrong dimension");
  if (!sigma_u_verify(pp, msg1.a1, msg1.a2, msg1.proof)) throw ProtocolAbort("user proof rejected");
  const auto denom = rnd.d + msk.a;
  if (denom.is_zero()) throw std::domain_error("d + a == 0");
  const auto inv = denom.inverse();

  Msg2<G> out;
  out.w2 = rnd.w2;
  out.b1 = pp.g0.pow(inner_product(msg1.y, msk.s)) * (msg1.a1 * pp.tracer_pk.pow(rnd.w2)).pow(inv);
  out.b2 = (pp.g0 * msg1.a2 * (pp.g2 * pp.tracer_pk).pow(rnd.w2)).pow(inv);
  out.b3 = pp.g1.pow(inv);
  out.b4 = pp.h.pow(inv);
  out.b5 = rnd.d;
  out.proof = sigma_k_prove_with(pp, sigma_k_statement<G>(msg1.y, msg1.a1, msg1.a2, out), msk.a, msk.s, rnd.nonces);
  return out;
}

template <PairingGroup G>
KgcRandomness<G> sample_kgc_randomness(const MasterSecretKey<G>& msk, Rng& rng) {
  using Scalar = typename G::Scalar;
  KgcRandomness<G> r;
  r.w2 = Scalar::random(rng);
  do r.d = Scalar::random(rng); while ((r.d + msk.a).is_zero());
  r.nonces.a = Scalar::random(rng);
  for (std::size_t i = 0; i < msk.s.size(); ++i) r.nonces.s.push_back(Scalar::random(rng));
  return r;
}

template <PairingGroup G>
Msg2<G> kgc_respond(const PublicParams<G>& pp, const MasterSecretKey<G>& msk, const Msg1<G>& msg1, Rng& rng) {
  return kgc_respond_with(pp, msk, msg1, sample_kgc_randomness(msk, rng));
}

// Checks run in a fixed order: KGC proof, pairing checks on B3/B4, then the
// assembled key against verify_key. Throws IssuanceError naming the stage.
template <PairingGroup G>
FunctionalKey<G> user_finalize(const PublicParams<G>& pp, const UserRound1State<G>& state, const Msg2<G>& msg2) {
  // A1, A2 are recomputed from the retained secrets rather than trusted.
  const auto a1 = pp.h.pow(state.tau) * pp.tracer_pk.pow(state.w1);
  const auto a2 = (pp.g2 * pp.tracer_pk).pow(state.w1) * pp.g2.pow(state.theta);
  if (!sigma_k_verify(pp, sigma_k_statement<G>(state.y, a1, a2, msg2), msg2.proof))
    throw IssuanceError(IssuanceStage::kKgcProof, "KGC proof rejected");

  const auto shifted = pp.g0.pow(msg2.b5) * pp.kgc_pk;  // g0^{d+a}
  if (!(G::pair(msg2.b3, shifted) == pp.gt_base) || !(G::pair(msg2.b4, shifted) == G::pair(pp.h, pp.g0)))
    throw IssuanceError(IssuanceStage::kPairingCheck, "pairing check on B3/B4 failed");

  FunctionalKey<G> key;
  key.k1 = msg2.b1 / msg2.b4.pow(state.tau);
  key.k2 = msg2.b2;
  key.k3 = msg2.b3;
  key.k4 = state.w1 + msg2.w2;
  key.k5 = msg2.b5;
  if (!verify_key(pp, key, KeyContext<G>{state.y, state.theta}))
    throw IssuanceError(IssuanceStage::kKeyCheck, "issued key failed verification");
  return key;
}

}  // namespace pptfe
