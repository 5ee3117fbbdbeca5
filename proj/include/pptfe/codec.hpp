#pragma once

// Canonical byte encodings: fields in declaration order, fixed width per type,
// lists prefixed by a 4-byte big-endian count.

#include "pptfe/bytes.hpp"
#include "pptfe/ppkeygen.hpp"
#include "pptfe/scheme.hpp"
#include "pptfe/sigma.hpp"

namespace pptfe {

inline constexpr std::size_t kMaxDim = 1 << 16;

// ---- core types ---------------------------------------------------------------

template <PairingGroup G>
void write(ByteWriter& w, const PublicParams<G>& pp) {
  w.put_value(pp.g0);
  w.put_value(pp.g1);
  w.put_value(pp.g2);
  w.put_value(pp.h);
  w.put_value(pp.tracer_pk);
  w.put_value(pp.kgc_pk);
  w.put_list(pp.masks);
}

template <PairingGroup G>
PublicParams<G> read_public_params(ByteReader& r) {
  using Element = typename G::Element;
  PublicParams<G> pp;
  pp.g0 = r.get_value<Element>();
  pp.g1 = r.get_value<Element>();
  pp.g2 = r.get_value<Element>();
  pp.h = r.get_value<Element>();
  pp.tracer_pk = r.get_value<Element>();
  pp.kgc_pk = r.get_value<Element>();
  pp.masks = r.get_list<Element>(kMaxDim);
  if (pp.masks.empty()) throw DecodeError("public parameters with zero dimension");
  for (const auto* e : {&pp.g0, &pp.g1, &pp.g2, &pp.h, &pp.tracer_pk, &pp.kgc_pk})
    if (e->is_identity()) throw DecodeError("identity element in public parameters");
  pp.derive();
  return pp;
}

template <PairingGroup G>
void write(ByteWriter& w, const MasterSecretKey<G>& msk) {
  w.put_value(msk.a);
  w.put_list(msk.s);
}

template <PairingGroup G>
MasterSecretKey<G> read_master_secret(ByteReader& r) {
  using Scalar = typename G::Scalar;
  MasterSecretKey<G> msk;
  msk.a = r.get_value<Scalar>();
  msk.s = r.get_list<Scalar>(kMaxDim);
  return msk;
}

template <PairingGroup G>
void write(ByteWriter& w, const TracerSecret<G>& tsk) {
  w.put_value(tsk.b);
}

template <PairingGroup G>
TracerSecret<G> read_tracer_secret(ByteReader& r) {
  return {r.get_value<typename G::Scalar>()};
}

template <PairingGroup G>
void write(ByteWriter& w, const Ciphertext<G>& ct) {
  w.put_list(ct.body);
  w.put_value(ct.r_g1);
  w.put_value(ct.r_g2);
  w.put_value(ct.r_g0);
}

template <PairingGroup G>
Ciphertext<G> read_ciphertext(ByteReader& r) {
  using Element = typename G::Element;
  Ciphertext<G> ct;
  ct.body = r.get_list<Element>(kMaxDim);
  ct.r_g1 = r.get_value<Element>();
  ct.r_g2 = r.get_value<Element>();
  ct.r_g0 = r.get_value<Element>();
  return ct;
}

template <PairingGroup G>
void write(ByteWriter& w, const FunctionalKey<G>& key) {
  w.put_value(key.k1);
  w.put_value(key.k2);
  w.put_value(key.k3);
  w.put_value(key.k4);
  w.put_value(key.k5);
}

template <PairingGroup G>
FunctionalKey<G> read_functional_key(ByteReader& r) {
  using Element = typename G::Element;
  using Scalar = typename G::Scalar;
  FunctionalKey<G> key;
  key.k1 = r.get_value<Element>();
  key.k2 = r.get_value<Element>();
  key.k3 = r.get_value<Element>();
  key.k4 = r.get_value<Scalar>();
  key.k5 = r.get_value<Scalar>();
  return key;
}

template <PairingGroup G>
void write(ByteWriter& w, const KeyContext<G>& ctx) {
  w.put_list(ctx.y);
  w.put_value(ctx.theta);
}

template <PairingGroup G>
KeyContext<G> read_key_context(ByteReader& r) {
  using Scalar = typename G::Scalar;
  KeyContext<G> ctx;
  ctx.y = r.get_list<Scalar>(kMaxDim);
  ctx.theta = r.get_value<Scalar>();
  return ctx;
}

// ---- proofs and protocol messages ----------------------------------------------

template <PairingGroup G>
void write(ByteWriter& w, const SigmaUProof<G>& p) {
  w.put_value(p.a1_commit);
  w.put_value(p.a2_commit);
  w.put_value(p.c);
  w.put_value(p.t_tau);
  w.put_value(p.t_theta);
  w.put_value(p.t_w1);
}

template <PairingGroup G>
SigmaUProof<G> read_sigma_u(ByteReader& r) {
  using Element = typename G::Element;
  using Scalar = typename G::Scalar;
  SigmaUProof<G> p;
  p.a1_commit = r.get_value<Element>();
  p.a2_commit = r.get_value<Element>();
  p.c = r.get_value<Scalar>();
  p.t_tau = r.get_value<Scalar>();
  p.t_theta = r.get_value<Scalar>();
  p.t_w1 = r.get_value<Scalar>();
  return p;
}

template <PairingGroup G>
void write(ByteWriter& w, const SigmaKProof<G>& p) {
  w.put_list(p.mu_commit_p);
  w.put_value(p.r1p);
  w.put_value(p.r2p);
  w.put_value(p.r3p);
  w.put_value(p.r4p);
  w.put_value(p.c);
  w.put_value(p.t_a);
  w.put_list(p.t_s);
  w.put_list(p.mu_commit);
}

template <PairingGroup G>
SigmaKProof<G> read_sigma_k(ByteReader& r) {
  using Element = typename G::Element;
  using Scalar = typename G::Scalar;
  SigmaKProof<G> p;
  p.mu_commit_p = r.get_list<Element>(kMaxDim);
  p.r1p = r.get_value<Element>();
  p.r2p = r.get_value<Element>();
  p.r3p = r.get_value<Element>();
  p.r4p = r.get_value<Element>();
  p.c = r.get_value<Scalar>();
  p.t_a = r.get_value<Scalar>();
  p.t_s = r.get_list<Scalar>(kMaxDim);
  p.mu_commit = r.get_list<Element>(kMaxDim);
  return p;
}

template <PairingGroup G>
void write(ByteWriter& w, const Msg1<G>& m) {
  w.put_list(m.y);
  w.put_value(m.a1);
  w.put_value(m.a2);
  write(w, m.proof);
}

template <PairingGroup G>
Msg1<G> read_msg1(ByteReader& r) {
  using Element = typename G::Element;
  using Scalar = typename G::Scalar;
  Msg1<G> m;
  m.y = r.get_list<Scalar>(kMaxDim);
  m.a1 = r.get_value<Element>();
  m.a2 = r.get_value<Element>();
  m.proof = read_sigma_u<G>(r);
  return m;
}

template <PairingGroup G>
void write(ByteWriter& w, const Msg2<G>& m) {
  w.put_value(m.w2);
  w.put_value(m.b1);
  w.put_value(m.b2);
  w.put_value(m.b3);
  w.put_value(m.b4);
  w.put_value(m.b5);
  write(w, m.proof);
}

template <PairingGroup G>
Msg2<G> read_msg2(ByteReader& r) {
  using Element = typename G::Element;
  using Scalar = typename G::Scalar;
  Msg2<G> m;
  m.w2 = r.get_value<Scalar>();
  m.b1 = r.get_value<Element>();
  m.b2 = r.get_value<Element>();
  m.b3 = r.get_value<Element>();
  m.b4 = r.get_value<Element>();
  m.b5 = r.get_value<Scalar>();
  m.proof = read_sigma_k<G>(r);
  return m;
}

// ---- whole-buffer helpers ----------------------------------------------------------

template <class T>
Bytes encode(const T& value) {
  ByteWriter w;
  write(w, value);
  return std::move(w).take();
}

// decode<T>(bytes, read_fn) consumes the whole buffer or throws DecodeError.
template <class ReadFn>
auto decode_all(ByteView bytes, ReadFn read_fn) {
  ByteReader r(bytes);
  auto value = read_fn(r);
  r.expect_end();
  return value;
}

}  // namespace pptfe
