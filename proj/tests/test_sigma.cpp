#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "oracle.hpp"
#include "pptfe/codec.hpp"
#include "pptfe/curve_group.hpp"
#include "pptfe/ppkeygen.hpp"
#include "pptfe/sigma.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
using oracle::u64;

namespace {

constexpr u64 P = kToyModulus;
using S = Toy::Scalar;

u64 ex(const Toy::Element& e) { return e.exponent().value(); }

std::vector<std::uint8_t> enc3(u64 v) {
  return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

template <PairingGroup G>
typename G::Scalar nonzero(Rng& rng) {
  for (;;)
    if (auto s = G::Scalar::random(rng); !s.is_zero()) return s;
}

template <PairingGroup G>
struct UserStatement {
  typename G::Element a1, a2;
  SigmaUSecrets<G> secrets;
};

template <PairingGroup G>
UserStatement<G> user_statement(const PublicParams<G>& pp, Rng& rng) {
  UserStatement<G> st;
  st.secrets = {G::Scalar::random(rng), nonzero<G>(rng), G::Scalar::random(rng)};
  st.a1 = pp.h.pow(st.secrets.tau) * pp.tracer_pk.pow(st.secrets.w1);
  st.a2 = (pp.g2 * pp.tracer_pk).pow(st.secrets.w1) * pp.g2.pow(st.secrets.theta);
  return st;
}

template <PairingGroup G>
std::vector<typename G::Scalar> random_y(Rng& rng, std::size_t l) {
  std::vector<typename G::Scalar> y;
  for (std::size_t i = 0; i < l; ++i) y.push_back(G::Scalar::from_u64(rng.next_u64() % 100));
  return y;
}

// A complete honest KGC statement plus the secrets behind it.
template <PairingGroup G>
struct KgcCase {
  SetupOutput<G> sys;
  Msg1<G> msg1;
  Msg2<G> msg2;
  SigmaKStatement<G> st;
  KgcRandomness<G> rnd;
};

template <PairingGroup G>
KgcCase<G> kgc_case(std::size_t l, Rng& rng) {
  KgcCase<G> c{setup<G>(l, rng), {}, {}, {}, {}};
  c.msg1 = user_round1(c.sys.pp, nonzero<G>(rng), random_y<G>(rng, l), rng).second;
  c.rnd = sample_kgc_randomness(c.sys.msk, rng);
  c.msg2 = kgc_respond_with(c.sys.pp, c.sys.msk, c.msg1, c.rnd);
  c.st = sigma_k_statement<G>(c.msg1.y, c.msg1.a1, c.msg1.a2, c.msg2);
  return c;
}

}  // namespace

// ---- SigmaU ---------------------------------------------------------------------

TEST_CASE_TEMPLATE("sigma_u: completeness over 500 honest statements", G, Toy, Curve) {
  SeededRng rng(1);
  const auto sys = setup<G>(1, rng);
  for (int i = 0; i < 500; ++i) {
    const auto st = user_statement(sys.pp, rng);
    REQUIRE(sigma_u_verify(sys.pp, st.a1, st.a2, sigma_u_prove(sys.pp, st.a1, st.a2, st.secrets, rng)));
  }
}

TEST_CASE("sigma_u: fixed nonces give byte-identical proofs") {
  SeededRng rng(2);
  const auto sys = setup<Curve>(1, rng);
  const auto st = user_statement(sys.pp, rng);
  const SigmaUSecrets<Curve> nonces{Curve::Scalar::random(rng), Curve::Scalar::random(rng), Curve::Scalar::random(rng)};
  CHECK(encode(sigma_u_prove_with(sys.pp, st.a1, st.a2, st.secrets, nonces)) ==
        encode(sigma_u_prove_with(sys.pp, st.a1, st.a2, st.secrets, nonces)));
  CHECK(encode(sigma_u_prove_deterministic(sys.pp, st.a1, st.a2, st.secrets)) ==
        encode(sigma_u_prove_deterministic(sys.pp, st.a1, st.a2, st.secrets)));
  CHECK(sigma_u_verify(sys.pp, st.a1, st.a2, sigma_u_prove_deterministic(sys.pp, st.a1, st.a2, st.secrets)));
}

TEST_CASE("sigma_u: pencil oracle with unit nonces") {
  SeededRng rng(3);
  const auto sys = setup<Toy>(1, rng);
  const auto& pp = sys.pp;
  const auto st = user_statement(pp, rng);
  const auto proof = sigma_u_prove_with(pp, st.a1, st.a2, st.secrets, {S::one(), S::one(), S::one()});

  // A1' = h * B, A2' = (g2 B) * g2 as exponents of the generator.
  const u64 a1p = (ex(pp.h) + ex(pp.tracer_pk)) % P;
  const u64 a2p = (2 * ex(pp.g2) + ex(pp.tracer_pk)) % P;
  CHECK(ex(proof.a1_commit) == a1p);
  CHECK(ex(proof.a2_commit) == a2p);

  std::vector<std::uint8_t> transcript;
  for (u64 v : {ex(st.a1), a1p, ex(st.a2), a2p}) {
    const auto b = enc3(v);
    transcript.insert(transcript.end(), b.begin(), b.end());
  }
  const u64 c = oracle::hash_mod("SIGMA_U", transcript, P);
  CHECK(proof.c.value() == c);
  CHECK(proof.t_tau.value() == (1 + P - oracle::mulmod(c, st.secrets.tau.value(), P)) % P);
  CHECK(proof.t_theta.value() == (1 + P - oracle::mulmod(c, st.secrets.theta.value(), P)) % P);
  CHECK(proof.t_w1.value() == (1 + P - oracle::mulmod(c, st.secrets.w1.value(), P)) % P);
}

TEST_CASE_TEMPLATE("sigma_u: every field is load-bearing", G, Toy, Curve) {
  SeededRng rng(4);
  const auto sys = setup<G>(1, rng);
  const auto& pp = sys.pp;
  const auto one = G::Scalar::one();
  const auto g = G::Element::generator();
  for (int i = 0; i < 20; ++i) {
    const auto st = user_statement(pp, rng);
    const auto proof = sigma_u_prove(pp, st.a1, st.a2, st.secrets, rng);
    REQUIRE(sigma_u_check(pp, st.a1, st.a2, proof).ok());

    auto p = proof;
    p.a2_commit = p.a2_commit * g;  // changes encode(A2') inside the hash
    auto chk = sigma_u_check(pp, st.a1, st.a2, p);
    CHECK_FALSE(chk.challenge);
    CHECK_FALSE(chk.ok());

    p = proof;
    p.a1_commit = p.a1_commit * g;
    CHECK_FALSE(sigma_u_check(pp, st.a1, st.a2, p).ok());

    p = proof;
    p.t_theta = p.t_theta + one;
    chk = sigma_u_check(pp, st.a1, st.a2, p);
    CHECK(chk.challenge);
    CHECK(chk.a1);  // theta only enters the A2 relation
    CHECK_FALSE(chk.a2);

    p = proof;
    p.t_tau = p.t_tau + one;
    chk = sigma_u_check(pp, st.a1, st.a2, p);
    CHECK_FALSE(chk.a1);
    CHECK(chk.a2);

    p = proof;
    p.t_w1 = p.t_w1 + one;
    chk = sigma_u_check(pp, st.a1, st.a2, p);
    CHECK_FALSE(chk.a1);
    CHECK_FALSE(chk.a2);

    p = proof;
    p.c = p.c + one;
    CHECK_FALSE(sigma_u_check(pp, st.a1, st.a2, p).ok());

    CHECK_FALSE(sigma_u_verify(pp, st.a1 * g, st.a2, proof));
    CHECK_FALSE(sigma_u_verify(pp, st.a1, st.a2 * g, proof));
  }
}

TEST_CASE_TEMPLATE("sigma_u: serialized bit flips never verify", G, Toy, Curve) {
  SeededRng rng(5);
  const auto sys = setup<G>(1, rng);
  const auto st = user_statement(sys.pp, rng);
  const auto bytes = encode(sigma_u_prove(sys.pp, st.a1, st.a2, st.secrets, rng));
  for (std::size_t pos = 0; pos < bytes.size(); pos += (std::is_same_v<G, Toy> ? 1 : 3)) {
    auto mutated = bytes;
    mutated[pos] ^= static_cast<std::uint8_t>(1u << (rng.next_u64() % 8));
    try {
      const auto p = decode_all(mutated, [](ByteReader& r) { return read_sigma_u<G>(r); });
      REQUIRE_FALSE(sigma_u_verify(sys.pp, st.a1, st.a2, p));
    } catch (const DecodeError&) {
      // rejected at decoding, which is also a rejection
    }
  }
}

TEST_CASE("sigma_u: special soundness extracts the witness from two challenges") {
  SeededRng rng(6);
  const auto sys = setup<Toy>(1, rng);
  const auto& pp = sys.pp;
  for (int i = 0; i < 50; ++i) {
    const auto st = user_statement(pp, rng);
    const SigmaUSecrets<Toy> nonces{S::random(rng), S::random(rng), S::random(rng)};
    const auto honest = sigma_u_prove_with(pp, st.a1, st.a2, st.secrets, nonces);
    // Same commitments answered for a second challenge (the rewound run).
    auto rewound = honest;
    rewound.c = honest.c + nonzero<Toy>(rng);
    rewound.t_tau = nonces.tau - rewound.c * st.secrets.tau;
    rewound.t_theta = nonces.theta - rewound.c * st.secrets.theta;
    rewound.t_w1 = nonces.w1 - rewound.c * st.secrets.w1;
    const auto chk = sigma_u_check(pp, st.a1, st.a2, rewound);
    REQUIRE(chk.a1);
    REQUIRE(chk.a2);

    const auto dc = (rewound.c - honest.c).inverse();
    const auto tau = (honest.t_tau - rewound.t_tau) * dc;
    const auto theta = (honest.t_theta - rewound.t_theta) * dc;
    const auto w1 = (honest.t_w1 - rewound.t_w1) * dc;
    CHECK(pp.h.pow(tau) * pp.tracer_pk.pow(w1) == st.a1);
    CHECK((pp.g2 * pp.tracer_pk).pow(w1) * pp.g2.pow(theta) == st.a2);
    CHECK(theta == st.secrets.theta);
  }
}

TEST_CASE("sigma_u: challenge distribution looks uniform (diagnostic)") {
  SeededRng rng(7);
  const auto sys = setup<Toy>(1, rng);
  constexpr int kBins = 16, kProofs = 10000;
  std::array<int, kBins> bins{};
  for (int i = 0; i < kProofs; ++i) {
    const auto st = user_statement(sys.pp, rng);
    const auto c = sigma_u_prove(sys.pp, st.a1, st.a2, st.secrets, rng).c.value();
    ++bins[c * kBins / P];
  }
  double chi2 = 0;
  const double expected = static_cast<double>(kProofs) / kBins;
  for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;
  MESSAGE("challenge chi-square over 16 bins: " << chi2);
  WARN(chi2 < 37.7);  // p = 0.001 at 15 degrees of freedom
}

// ---- SigmaK ---------------------------------------------------------------------

TEST_CASE_TEMPLATE("sigma_k: completeness for l in {1, 5, 20}", G, Toy, Curve) {
  SeededRng rng(8);
  for (std::size_t l : {1u, 5u, 20u}) {
    const auto c = kgc_case<G>(l, rng);
    CHECK(sigma_k_check(c.sys.pp, c.st, c.msg2.proof).ok());
  }
}

TEST_CASE_TEMPLATE("sigma_k: completeness over 500 honest statements", G, Toy, Curve) {
  SeededRng rng(9);
  const auto sys = setup<G>(2, rng);
  for (int i = 0; i < 500; ++i) {
    const auto msg1 = user_round1(sys.pp, nonzero<G>(rng), random_y<G>(rng, 2), rng).second;
    const auto msg2 = kgc_respond(sys.pp, sys.msk, msg1, rng);
    REQUIRE(sigma_k_verify(sys.pp, sigma_k_statement<G>(msg1.y, msg1.a1, msg1.a2, msg2), msg2.proof));
  }
}

TEST_CASE("sigma_k: pencil oracle with unit nonces at l = 2") {
  SeededRng rng(10);
  auto c = kgc_case<Toy>(2, rng);
  const auto& pp = c.sys.pp;
  const auto a = c.sys.msk.a.value();
  const auto d = c.st.b5.value();
  const auto proof = sigma_k_prove_with(pp, c.st, c.sys.msk.a, c.sys.msk.s, {S::one(), {S::one(), S::one()}});
  // (g1 / B3^d)' = B3^{a'} = B3 when a' = 1; same shape for B2 and B4.
  CHECK(proof.r3p == c.st.b3);
  CHECK(proof.r2p == c.st.b2);
  CHECK(proof.r4p == c.st.b4);
  const u64 g0 = ex(pp.g0);
  u64 ysum = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const u64 yi = c.st.y[i].value();
    ysum = (ysum + yi) % P;
    CHECK(ex(proof.mu_commit_p[i]) == oracle::mulmod(g0, yi, P));
    CHECK(ex(proof.mu_commit[i]) == oracle::mulmod(g0, oracle::mulmod(yi, a, P), P));
  }
  // r1' = B1^{-1} * prod (g0^{mu_i} g0^{d y_i})^{1} = B1^{-1} * g0^{(a+d) * sum y_i}
  const u64 r1 = (P - ex(c.st.b1) + oracle::mulmod(g0, oracle::mulmod((a + d) % P, ysum, P), P)) % P;
  CHECK(ex(proof.r1p) == r1);
  CHECK(sigma_k_verify(pp, c.st, proof));
}

TEST_CASE("sigma_k: statement values satisfy the relations under the real secrets") {
  SeededRng rng(11);
  for (int i = 0; i < 30; ++i) {
    const auto c = kgc_case<Toy>(1 + i % 4, rng);
    const auto& pp = c.sys.pp;
    const auto t = sigma_k_targets(pp, c.st);
    const auto& a = c.sys.msk.a;
    const auto& d = c.st.b5;
    auto rhs = c.st.b1.pow(-a);
    for (std::size_t k = 0; k < c.st.y.size(); ++k)
      rhs = rhs * (pp.g0.pow(c.st.y[k] * a) * pp.g0.pow(d * c.st.y[k])).pow(c.sys.msk.s[k]);
    CHECK(t.x1 == rhs);
    CHECK(t.x2 == c.st.b2.pow(a));
    CHECK(t.x3 == c.st.b3.pow(a));
    CHECK(t.x4 == c.st.b4.pow(a));
  }
}

TEST_CASE_TEMPLATE("sigma_k: per-relation sensitivity matrix", G, Toy, Curve) {
  SeededRng rng(12);
  const int n = std::is_same_v<G, Toy> ? 20 : 3;
  for (int i = 0; i < n; ++i) {
    const auto c = kgc_case<G>(3, rng);
    const auto& pp = c.sys.pp;
    const auto one = G::Scalar::one();

    // Wrong s_i: only the B1 relation notices.
    auto s_bad = c.sys.msk.s;
    s_bad[i % 3] = s_bad[i % 3] + one;
    auto chk = sigma_k_check(pp, c.st, sigma_k_prove_with(pp, c.st, c.sys.msk.a, s_bad, c.rnd.nonces));
    CHECK(chk.shape);
    CHECK(chk.challenge);
    CHECK(chk.aux);
    CHECK_FALSE(chk.b1);
    CHECK(chk.b2);
    CHECK(chk.b3);
    CHECK(chk.b4);

    // Wrong a: the Schnorr relations on B2, B3, B4 all break.
    chk = sigma_k_check(pp, c.st, sigma_k_prove_with(pp, c.st, c.sys.msk.a + one, c.sys.msk.s, c.rnd.nonces));
    CHECK(chk.challenge);
    CHECK_FALSE(chk.b2);
    CHECK_FALSE(chk.b3);
    CHECK_FALSE(chk.b4);
    CHECK_FALSE(chk.ok());

    // Responses.
    auto p = c.msg2.proof;
    p.t_s[0] = p.t_s[0] + one;
    chk = sigma_k_check(pp, c.st, p);
    CHECK(chk.aux);
    CHECK_FALSE(chk.b1);
    CHECK(chk.b2);

    p = c.msg2.proof;
    p.t_a = p.t_a + one;
    chk = sigma_k_check(pp, c.st, p);
    CHECK_FALSE(chk.aux);
    CHECK_FALSE(chk.b2);
    CHECK_FALSE(chk.b3);
    CHECK_FALSE(chk.b4);

    // Auxiliary commitments are hashed and checked.
    p = c.msg2.proof;
    p.mu_commit[1] = p.mu_commit[1] * G::Element::generator();
    chk = sigma_k_check(pp, c.st, p);
    CHECK_FALSE(chk.challenge);

    // Shape.
    p = c.msg2.proof;
    p.t_s.pop_back();
    CHECK_FALSE(sigma_k_check(pp, c.st, p).shape);
  }
}

TEST_CASE_TEMPLATE("sigma_k: every statement value is bound", G, Toy, Curve) {
  SeededRng rng(13);
  const auto c = kgc_case<G>(2, rng);
  const auto& pp = c.sys.pp;
  const auto g = G::Element::generator();
  const auto one = G::Scalar::one();
  std::vector<SigmaKStatement<G>> variants;
  for (int f = 0; f < 10; ++f) {
    auto st = c.st;
    switch (f) {
      case 0: st.y[0] = st.y[0] + one; break;
      case 1: st.a1 = st.a1 * g; break;
      case 2: st.a2 = st.a2 * g; break;
      case 3: st.w2 = st.w2 + one; break;
      case 4: st.b1 = st.b1 * g; break;
      case 5: st.b2 = st.b2 * g; break;
      case 6: st.b3 = st.b3 * g; break;
      case 7: st.b4 = st.b4 * g; break;
      case 8: st.b5 = st.b5 + one; break;
      default: st.y[1] = st.y[1] + one;
    }
    CAPTURE(f);
    auto chk = sigma_k_check(pp, st, c.msg2.proof);
    CHECK_FALSE(chk.challenge);
    CHECK_FALSE(chk.ok());
  }
}

TEST_CASE_TEMPLATE("sigma_k: serialized bit flips never verify", G, Toy, Curve) {
  SeededRng rng(14);
  const auto c = kgc_case<G>(2, rng);
  const auto bytes = encode(c.msg2.proof);
  const std::size_t stride = std::is_same_v<G, Toy> ? 1 : 7;
  for (std::size_t pos = 0; pos < bytes.size(); pos += stride) {
    auto mutated = bytes;
    mutated[pos] ^= static_cast<std::uint8_t>(1u << (rng.next_u64() % 8));
    try {
      const auto p = decode_all(mutated, [](ByteReader& r) { return read_sigma_k<G>(r); });
      REQUIRE_FALSE(sigma_k_verify(c.sys.pp, c.st, p));
    } catch (const DecodeError&) {
    }
  }
}

TEST_CASE("sigma_k: deterministic mode is reproducible and valid") {
  SeededRng rng(15);
  const auto c = kgc_case<Curve>(3, rng);
  const auto p1 = sigma_k_prove_deterministic(c.sys.pp, c.st, c.sys.msk.a, c.sys.msk.s);
  const auto p2 = sigma_k_prove_deterministic(c.sys.pp, c.st, c.sys.msk.a, c.sys.msk.s);
  CHECK(encode(p1) == encode(p2));
  CHECK(sigma_k_verify(c.sys.pp, c.st, p1));
}

TEST_CASE("sigma_k: transcript order") {
  SeededRng rng(16);
  const auto c = kgc_case<Toy>(2, rng);
  const auto& p = c.msg2.proof;
  ByteWriter w;
  for (const auto* e : {&p.mu_commit_p[0], &p.mu_commit_p[1], &p.mu_commit[0], &p.mu_commit[1], &c.st.b1, &p.r1p,
                        &c.st.b2, &p.r2p, &c.st.b3, &p.r3p, &c.st.b4, &p.r4p})
    w.put_value(*e);
  w.put_value(c.st.b5);
  w.put_value(c.st.a1);
  w.put_value(c.st.a2);
  w.put_value(c.st.w2);
  w.put_value(c.st.y[0]);
  w.put_value(c.st.y[1]);
  CHECK(w.bytes() == sigma_k_transcript(c.st, p));
  CHECK(p.c.value() == oracle::hash_mod("SIGMA_K", std::vector<std::uint8_t>(w.bytes().begin(), w.bytes().end()), P));
}
