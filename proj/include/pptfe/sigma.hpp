#pragma once

// Fiat-Shamir sigma protocols used by blind issuance.
//
// SigmaU: user knows (tau, theta, w1) with
//   A1 = h^tau * B^w1,  A2 = (g2 B)^w1 * g2^theta.
// SigmaK: KGC knows (a, s_1..s_l) such that, with d = B5,
//   g0^{mu_i}                 = (g0^{y_i})^a                      for each i
//   B1^d / (A1 B^w2)          = B1^-a * prod (g0^{mu_i} g0^{d y_i})^{s_i}
//   g0 A2 (g2 B)^w2 / B2^d    = B2^a
//   g1 / B3^d                 = B3^a
//   h / B4^d                  = B4^a
// Responses are nonce - c * secret.

#include <string>
#include <vector>

#include "pptfe/bytes.hpp"
#include "pptfe/group.hpp"
#include "pptfe/scheme.hpp"

namespace pptfe {

inline constexpr std::string_view kSigmaUTag = "SIGMA_U";
inline constexpr std::string_view kSigmaKTag = "SIGMA_K";
inline constexpr std::string_view kNonceTag = "PPTFE_NONCE";

template <PairingGroup G>
struct SigmaUProof {
  typename G::Element a1_commit;  // A1'
  typename G::Element a2_commit;  // A2'
  typename G::Scalar c;
  typename G::Scalar t_tau;
  typename G::Scalar t_theta;
  typename G::Scalar t_w1;
  bool operator==(const SigmaUProof&) const = default;
};

template <PairingGroup G>
struct SigmaUSecrets {
  typename G::Scalar tau;
  typename G::Scalar theta;
  typename G::Scalar w1;
};

// Per-equation outcome; ok() is the verifier's verdict.
struct SigmaUCheck {
  bool challenge = false;
  bool a1 = false;
  bool a2 = false;
  bool ok() const { return challenge && a1 && a2; }
};

template <PairingGroup G>
struct SigmaKProof {
  std::vector<typename G::Element> mu_commit_p;  // (g0^{mu_i})'
  typename G::Element r1p;
  typename G::Element r2p;
  typename G::Element r3p;
  typename G::Element r4p;
  typename G::Scalar c;
  typename G::Scalar t_a;
  std::vector<typename G::Scalar> t_s;
  std::vector<typename G::Element> mu_commit;  // g0^{y_i a}
  bool operator==(const SigmaKProof&) const = default;
};

// Public statement of SigmaK; w2 travels in the clear and is bound here.
template <PairingGroup G>
struct SigmaKStatement {
  std::vector<typename G::Scalar> y;
  typename G::Element a1;
  typename G::Element a2;
  typename G::Scalar w2;
  typename G::Element b1;
  typename G::Element b2;
  typename G::Element b3;
  typename G::Element b4;
  typename G::Scalar b5;
};

template <PairingGroup G>
struct SigmaKNonces {
  typename G::Scalar a;
  std::vector<typename G::Scalar> s;
};

struct SigmaKCheck {
  bool shape = false;  // list lengths match the statement
  bool challenge = false;
  bool aux = false;  // all l auxiliary relations
  bool b1 = false;
  bool b2 = false;
  bool b3 = false;
  bool b4 = false;
  bool ok() const { return shape && challenge && aux && b1 && b2 && b3 && b4; }
};

// ---- transcripts ------------------------------------------------------------

template <PairingGroup G>
Bytes sigma_u_transcript(const typename G::Element& a1, const typename G::Element& a1_commit,
                         const typename G::Element& a2, const typename G::Element& a2_commit) {
  ByteWriter w;
  w.put_value(a1);
  w.put_value(a1_commit);
  w.put_value(a2);
  w.put_value(a2_commit);
  return std::move(w).take();
}

// mu_commit_p, mu_commit, B1, r1p, B2, r2p, B3, r3p, B4, r4p, B5, A1, A2, w2, y.
template <PairingGroup G>
Bytes sigma_k_transcript(const SigmaKStatement<G>& st, const SigmaKProof<G>& proof) {
  ByteWriter w;
  for (const auto& e : proof.mu_commit_p) w.put_value(e);
  for (const auto& e : proof.mu_commit) w.put_value(e);
  w.put_value(st.b1);
  w.put_value(proof.r1p);
  w.put_value(st.b2);
  w.put_value(proof.r2p);
  w.put_value(st.b3);
  w.put_value(proof.r3p);
  w.put_value(st.b4);
  w.put_value(proof.r4p);
  w.put_value(st.b5);
  w.put_value(st.a1);
  w.put_value(st.a2);
  w.put_value(st.w2);
  for (const auto& v : st.y) w.put_value(v);
  return std::move(w).take();
}

// Deterministic nonce: H(tag-domain, secrets || statement || index). Lets tests
// reproduce proofs byte for byte without a seeded rng.
template <PairingGroup G>
typename G::Scalar derive_nonce(const std::vector<typename G::Scalar>& secrets, ByteView statement,
                                std::uint32_t index) {
  ByteWriter w;
  for (const auto& s : secrets) w.put_value(s);
  w.put(statement);
  w.put_u32(index);
  return hash_to_scalar<G>(kNonceTag, w.bytes());
}

// ---- SigmaU ---------------------------------------------------------------

template <PairingGroup G>
SigmaUProof<G> sigma_u_prove_with(const PublicParams<G>& pp, const typename G::Element& a1,
                                  const typename G::Element& a2, const SigmaUSecrets<G>& secrets,
                                  const SigmaUSecrets<G>& nonces) {
  const auto g2b = pp.g2 * pp.tracer_pk;
  SigmaUProof<G> proof;
  proof.a1_commit = pp.h.pow(nonces.tau) * pp.tracer_pk.pow(nonces.w1);
  proof.a2_commit = g2b.pow(nonces.w1) * pp.g2.pow(nonces.theta);
  proof.c = hash_to_scalar<G>(kSigmaUTag, sigma_u_transcript<G>(a1, proof.a1_commit, a2, proof.a2_commit));
  proof.t_tau = nonces.tau - proof.c * secrets.tau;
  proof.t_theta = nonces.theta - proof.c * secrets.theta;
  proof.t_w1 = nonces.w1 - proof.c * secrets.w1;
  return proof;
}

template <PairingGroup G>
SigmaUProof<G> sigma_u_prove(const PublicParams<G>& pp, const typename G::Element& a1,
                             const typename G::Element& a2, const SigmaUSecrets<G>& secrets, Rng& rng) {
  using Scalar = typename G::Scalar;
  return sigma_u_prove_with(pp, a1, a2, secrets, {Scalar::random(rng), Scalar::random(rng), Scalar::random(rng)});
}

template <PairingGroup G>
SigmaUProof<G> sigma_u_prove_deterministic(const PublicParams<G>& pp, const typename G::Element& a1,
                                           const typename G::Element& a2, const SigmaUSecrets<G>& secrets) {
  ByteWriter st;
  st.put_value(a1);
  st.put_value(a2);
  const std::vector<typename G::Scalar> sec = {secrets.tau, secrets.theta, secrets.w1};
  return sigma_u_prove_with(pp, a1, a2, secrets,
                            {derive_nonce<G>(sec, st.bytes(), 0), derive_nonce<G>(sec, st.bytes(), 1),
                             derive_nonce<G>(sec, st.bytes(), 2)});
}

template <PairingGroup G>
SigmaUCheck sigma_u_check(const PublicParams<G>& pp, const typename G::Element& a1, const typename G::Element& a2,
                          const SigmaUProof<G>& proof) {
  SigmaUCheck out;
  out.challenge =
      proof.c == hash_to_scalar<G>(kSigmaUTag, sigma_u_transcript<G>(a1, proof.a1_commit, a2, proof.a2_commit));
  out.a1 = proof.a1_commit == pp.h.pow(proof.t_tau) * pp.tracer_pk.pow(proof.t_w1) * a1.pow(proof.c);
  out.a2 = proof.a2_commit ==
           (pp.g2 * pp.tracer_pk).pow(proof.t_w1) * pp.g2.pow(proof.t_theta) * a2.pow(proof.c);
  return out;
}

template <PairingGroup G>
bool sigma_u_verify(const PublicParams<G>& pp, const typename G::Element& a1, const typename G::Element& a2,
                    const SigmaUProof<G>& proof) {
  return sigma_u_check(pp, a1, a2, proof).ok();
}

// ---- SigmaK ---------------------------------------------------------------

// Statement values the verifier recomputes from public data.
template <PairingGroup G>
struct SigmaKTargets {
  typename G::Element x1;  // B1^d / (A1 B^w2)
  typename G::Element x2;  // g0 A2 (g2 B)^w2 / B2^d
  typename G::Element x3;  // g1 / B3^d
  typename G::Element x4;  // h / B4^d
};

template <PairingGroup G>
SigmaKTargets<G> sigma_k_targets(const PublicParams<G>& pp, const SigmaKStatement<G>& st) {
  return {st.b1.pow(st.b5) / (st.a1 * pp.tracer_pk.pow(st.w2)),
          pp.g0 * st.a2 * (pp.g2 * pp.tracer_pk).pow(st.w2) / st.b2.pow(st.b5), pp.g1 / st.b3.pow(st.b5),
          pp.h / st.b4.pow(st.b5)};
}

template <PairingGroup G>
SigmaKProof<G> sigma_k_prove_with(const PublicParams<G>& pp, const SigmaKStatement<G>& st,
                                  const typename G::Scalar& a, const std::vector<typename G::Scalar>& s,
                                  const SigmaKNonces<G>& nonces) {
  using Scalar = typename G::Scalar;
  const std::size_t l = st.y.size();
  if (s.size() != l || nonces.s.size() != l) throw DimensionError("sigma_k: secret length mismatch");

  SigmaKProof<G> proof;
  proof.mu_commit.reserve(l);
  proof.mu_commit_p.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    proof.mu_commit.push_back(pp.g0.pow(st.y[i] * a));
    proof.mu_commit_p.push_back(pp.g0.pow(st.y[i] * nonces.a));
  }
  // prod (g0^{y_i a} g0^{d y_i})^{s'_i} collapses to one exponentiation for
  // a prover that knows a.
  Scalar folded = Scalar::zero();
  for (std::size_t i = 0; i < l; ++i) folded = folded + st.y[i] * nonces.s[i];
  proof.r1p = st.b1.pow(-nonces.a) * pp.g0.pow((a + st.b5) * folded);
  proof.r2p = st.b2.pow(nonces.a);
  proof.r3p = st.b3.pow(nonces.a);
  proof.r4p = st.b4.pow(nonces.a);
  proof.c = hash_to_scalar<G>(kSigmaKTag, sigma_k_transcript(st, proof));
  proof.t_a = nonces.a - proof.c * a;
  proof.t_s.reserve(l);
  for (std::size_t i = 0; i < l; ++i) proof.t_s.push_back(nonces.s[i] - proof.c * s[i]);
  return proof;
}

template <PairingGroup G>
SigmaKProof<G> sigma_k_prove(const PublicParams<G>& pp, const SigmaKStatement<G>& st, const typename G::Scalar& a,
                             const std::vector<typename G::Scalar>& s, Rng& rng) {
  using Scalar = typename G::Scalar;
  SigmaKNonces<G> nonces{Scalar::random(rng), {}};
  nonces.s.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) nonces.s.push_back(Scalar::random(rng));
  return sigma_k_prove_with(pp, st, a, s, nonces);
}

template <PairingGroup G>
SigmaKProof<G> sigma_k_prove_deterministic(const PublicParams<G>& pp, const SigmaKStatement<G>& st,
                                           const typename G::Scalar& a, const std::vector<typename G::Scalar>& s) {
  std::vector<typename G::Scalar> secrets = {a};
  secrets.insert(secrets.end(), s.begin(), s.end());
  ByteWriter stmt;
  stmt.put_value(st.b1);
  stmt.put_value(st.b2);
  stmt.put_value(st.a1);
  stmt.put_value(st.a2);
  stmt.put_value(st.w2);
  stmt.put_value(st.b5);
  SigmaKNonces<G> nonces{derive_nonce<G>(secrets, stmt.bytes(), 0), {}};
  for (std::size_t i = 0; i < s.size(); ++i)
    nonces.s.push_back(derive_nonce<G>(secrets, stmt.bytes(), static_cast<std::uint32_t>(i + 1)));
  return sigma_k_prove_with(pp, st, a, s, nonces);
}

template <PairingGroup G>
SigmaKCheck sigma_k_check(const PublicParams<G>& pp, const SigmaKStatement<G>& st, const SigmaKProof<G>& proof) {
  using Element = typename G::Element;
  const std::size_t l = st.y.size();
  SigmaKCheck out;
  out.shape = proof.mu_commit.size() == l && proof.mu_commit_p.size() == l && proof.t_s.size() == l;
  if (!out.shape) return out;

  out.challenge = proof.c == hash_to_scalar<G>(kSigmaKTag, sigma_k_transcript(st, proof));

  out.aux = true;
  for (std::size_t i = 0; i < l; ++i) {
    const auto base = pp.g0.pow(st.y[i]);
    if (!(proof.mu_commit_p[i] == base.pow(proof.t_a) * proof.mu_commit[i].pow(proof.c))) out.aux = false;
  }

  const auto targets = sigma_k_targets(pp, st);
  // The verifier does not know mu_i, so each factor is its own exponentiation.
  Element folded = Element::identity();
  for (std::size_t i = 0; i < l; ++i)
    folded = folded * (proof.mu_commit[i] * pp.g0.pow(st.b5 * st.y[i])).pow(proof.t_s[i]);
  out.b1 = proof.r1p == st.b1.pow(-proof.t_a) * folded * targets.x1.pow(proof.c);
  out.b2 = proof.r2p == st.b2.pow(proof.t_a) * targets.x2.pow(proof.c);
  out.b3 = proof.r3p == st.b3.pow(proof.t_a) * targets.x3.pow(proof.c);
  out.b4 = proof.r4p == st.b4.pow(proof.t_a) * targets.x4.pow(proof.c);
  return out;
}

template <PairingGroup G>
bool sigma_k_verify(const PublicParams<G>& pp, const SigmaKStatement<G>& st, const SigmaKProof<G>& proof) {
  return sigma_k_check(pp, st, proof).ok();
}

}  // namespace pptfe
