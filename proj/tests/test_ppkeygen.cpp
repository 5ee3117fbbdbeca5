#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "pptfe/codec.hpp"
#include "pptfe/curve_group.hpp"
#include "pptfe/ppkeygen.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
using oracle::u64;

namespace {

constexpr u64 P = kToyModulus;
using S = Toy::Scalar;

u64 ex(const Toy::Element& e) { return e.exponent().value(); }

template <PairingGroup G>
typename G::Scalar nonzero(Rng& rng) {
  for (;;)
    if (auto s = G::Scalar::random(rng); !s.is_zero()) return s;
}

template <PairingGroup G>
std::vector<typename G::Scalar> random_y(Rng& rng, std::size_t l) {
  std::vector<typename G::Scalar> y;
  for (std::size_t i = 0; i < l; ++i) y.push_back(G::Scalar::from_u64(rng.next_u64() % 100));
  return y;
}

template <PairingGroup G>
IssuanceStage finalize_stage(const PublicParams<G>& pp, const UserRound1State<G>& state, const Msg2<G>& msg2) {
  try {
    (void)user_finalize(pp, state, msg2);
  } catch (const IssuanceError& e) {
    return e.stage();
  }
  FAIL("finalization unexpectedly succeeded");
  return IssuanceStage::kKeyCheck;
}

}  // namespace

TEST_CASE_TEMPLATE("round 1: proof verifies and the identity domain is enforced", G, Toy, Curve) {
  SeededRng rng(1);
  const auto sys = setup<G>(3, rng);
  const auto y = random_y<G>(rng, 3);
  const auto [state, msg1] = user_round1(sys.pp, G::Scalar::from_u64(42), y, rng);
  CHECK(sigma_u_verify(sys.pp, msg1.a1, msg1.a2, msg1.proof));
  CHECK(msg1.y == y);
  CHECK(state.theta == G::Scalar::from_u64(42));
  CHECK_THROWS_AS(user_round1(sys.pp, G::Scalar::zero(), y, rng), IdentityDomainError);
  CHECK_THROWS_AS(user_round1(sys.pp, G::Scalar::one(), random_y<G>(rng, 2), rng), DimensionError);
  // Same identity, fresh randomness: commitments differ.
  const auto again = user_round1(sys.pp, G::Scalar::from_u64(42), y, rng).second;
  CHECK_FALSE(again.a2 == msg1.a2);
  CHECK_FALSE(again.a1 == msg1.a1);
}

TEST_CASE("round 1: commitment exponents") {
  SeededRng rng(2);
  const auto sys = setup<Toy>(2, rng);
  const auto& pp = sys.pp;
  UserRandomness<Toy> rnd = sample_user_randomness<Toy>(rng);
  const auto theta = S::from_u64(1234);
  const auto msg1 = user_round1_with(pp, theta, {S::one(), S::one()}, rnd).second;
  CHECK(ex(msg1.a1) == (oracle::mulmod(ex(pp.h), rnd.tau.value(), P) + oracle::mulmod(ex(pp.tracer_pk), rnd.w1.value(), P)) % P);
  const u64 g2 = ex(pp.g2), b = sys.tsk.b.value();
  const u64 want = oracle::mulmod(g2, (oracle::mulmod((1 + b) % P, rnd.w1.value(), P) + theta.value()) % P, P);
  CHECK(ex(msg1.a2) == want);
}

TEST_CASE("hiding: the re-derived w1 reproduces A2 for any other identity") {
  SeededRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto sys = setup<Toy>(1, rng);
    const auto& pp = sys.pp;
    const auto b = sys.tsk.b.value();
    const auto theta0 = nonzero<Toy>(rng), theta1 = nonzero<Toy>(rng), w1 = S::random(rng);
    // w1' = ((1+b) w1 + theta0 - theta1) / (1+b), computed in plain integers.
    const u64 one_b = (1 + b) % P;
    if (one_b == 0) continue;
    const u64 w1p = oracle::mulmod((oracle::mulmod(one_b, w1.value(), P) + theta0.value() + P - theta1.value()) % P,
                                   oracle::inv(one_b, P), P);
    const auto g2b = pp.g2 * pp.tracer_pk;
    REQUIRE(g2b.pow(w1) * pp.g2.pow(theta0) == g2b.pow(S::from_u64(w1p)) * pp.g2.pow(theta1));
  }
}

TEST_CASE("hiding: the KGC's view is identical under the randomness bijection") {
  SeededRng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto sys = setup<Toy>(2, rng);
    const auto& pp = sys.pp;
    const auto y = random_y<Toy>(rng, 2);
    const auto theta0 = nonzero<Toy>(rng);
    auto theta1 = nonzero<Toy>(rng);
    const auto rnd0 = sample_user_randomness<Toy>(rng);
    const auto [state0, msg0] = user_round1_with(pp, theta0, y, rnd0);

    // Map (tau, w1, nonces) for theta0 onto the randomness that yields the same view for theta1.
    const auto b = sys.tsk.b;
    const auto one_b = S::one() + b;
    if (one_b.is_zero()) continue;
    const auto w1p = (one_b * rnd0.w1 + theta0 - theta1) * one_b.inverse();
    const auto log_h_B = S::from_u64(ex(pp.tracer_pk)) * S::from_u64(ex(pp.h)).inverse();
    const auto taup = rnd0.tau + log_h_B * (rnd0.w1 - w1p);
    const auto& pr = msg0.proof;
    UserRandomness<Toy> rnd1{taup, w1p, {pr.t_tau + pr.c * taup, pr.t_theta + pr.c * theta1, pr.t_w1 + pr.c * w1p}};
    const auto [state1, msg1] = user_round1_with(pp, theta1, y, rnd1);

    REQUIRE(encode(msg1) == encode(msg0));
  }
}

TEST_CASE("KGC response: B1 exponent matches the unblinding algebra") {
  SeededRng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto sys = setup<Toy>(3, rng);
    const auto& pp = sys.pp;
    const auto y = random_y<Toy>(rng, 3);
    const auto urnd = sample_user_randomness<Toy>(rng);
    const auto msg1 = user_round1_with(pp, nonzero<Toy>(rng), y, urnd).second;
    const auto krnd = sample_kgc_randomness(sys.msk, rng);
    const auto msg2 = kgc_respond_with(pp, sys.msk, msg1, krnd);

    u64 ys = 0;
    for (std::size_t k = 0; k < 3; ++k) ys = (ys + oracle::mulmod(y[k].value(), sys.msk.s[k].value(), P)) % P;
    const u64 inv = oracle::inv((krnd.d.value() + sys.msk.a.value()) % P, P);
    const u64 blinded = (oracle::mulmod(ex(pp.h), urnd.tau.value(), P) +
                         oracle::mulmod(ex(pp.tracer_pk), (urnd.w1.value() + krnd.w2.value()) % P, P)) % P;
    CHECK(ex(msg2.b1) == (oracle::mulmod(ex(pp.g0), ys, P) + oracle::mulmod(blinded, inv, P)) % P);
    CHECK(ex(msg2.b3) == oracle::mulmod(ex(pp.g1), inv, P));
    CHECK(ex(msg2.b4) == oracle::mulmod(ex(pp.h), inv, P));
    CHECK(msg2.b5 == krnd.d);
    CHECK(msg2.w2 == krnd.w2);
  }
}

TEST_CASE_TEMPLATE("KGC aborts on a bad user proof or a wrong dimension", G, Toy, Curve) {
  SeededRng rng(6);
  const auto sys = setup<G>(2, rng);
  auto msg1 = user_round1(sys.pp, G::Scalar::from_u64(9), random_y<G>(rng, 2), rng).second;
  auto bad = msg1;
  bad.proof.t_theta = bad.proof.t_theta + G::Scalar::one();
  CHECK_THROWS_AS(kgc_respond(sys.pp, sys.msk, bad, rng), ProtocolAbort);
  bad = msg1;
  bad.a1 = bad.a1 * G::Element::generator();
  CHECK_THROWS_AS(kgc_respond(sys.pp, sys.msk, bad, rng), ProtocolAbort);
  bad = msg1;
  bad.y.push_back(G::Scalar::one());
  CHECK_THROWS_AS(kgc_respond(sys.pp, sys.msk, bad, rng), ProtocolAbort);
  CHECK_NOTHROW(kgc_respond(sys.pp, sys.msk, msg1, rng));
}

TEST_CASE_TEMPLATE("blind issuance equals keygen with merged randomness", G, Toy, Curve) {
  SeededRng rng(7);
  const int n = std::is_same_v<G, Toy> ? 100 : 10;
  for (int i = 0; i < n; ++i) {
    const std::size_t l = 1 + i % 4;
    const auto sys = setup<G>(l, rng);
    const auto y = random_y<G>(rng, l);
    const auto theta = nonzero<G>(rng);
    const auto urnd = sample_user_randomness<G>(rng);
    const auto krnd = sample_kgc_randomness(sys.msk, rng);
    const auto [state, msg1] = user_round1_with(sys.pp, theta, y, urnd);
    const auto key = user_finalize(sys.pp, state, kgc_respond_with(sys.pp, sys.msk, msg1, krnd));
    const auto direct = keygen_with(sys.pp, sys.msk, {y, theta}, urnd.w1 + krnd.w2, krnd.d);
    REQUIRE(key.k1 == direct.k1);
    REQUIRE(key.k2 == direct.k2);
    REQUIRE(key.k3 == direct.k3);
    REQUIRE(key.k4 == direct.k4);
    REQUIRE(key.k5 == direct.k5);
    REQUIRE(verify_key(sys.pp, key, {y, theta}));
    const std::vector<typename G::Scalar> candidates{nonzero<G>(rng), theta};
    REQUIRE(trace(sys.pp, sys.tsk, key, std::span(candidates)) == theta);
  }
}

TEST_CASE_TEMPLATE("finalization reports the failing stage", G, Toy, Curve) {
  SeededRng rng(8);
  const auto sys = setup<G>(2, rng);
  const auto& pp = sys.pp;
  const auto y = random_y<G>(rng, 2);
  const auto [state, msg1] = user_round1(pp, G::Scalar::from_u64(31), y, rng);
  const auto msg2 = kgc_respond(pp, sys.msk, msg1, rng);
  CHECK_NOTHROW(user_finalize(pp, state, msg2));

  // B4 * g1: B4 is bound by the KGC proof, so the proof stage catches it first.
  auto m = msg2;
  m.b4 = m.b4 * pp.g1;
  CHECK(finalize_stage(pp, state, m) == IssuanceStage::kKgcProof);
  m = msg2;
  m.b2 = m.b2 * G::Element::generator();
  CHECK(finalize_stage(pp, state, m) == IssuanceStage::kKgcProof);
  m = msg2;
  m.w2 = m.w2 + G::Scalar::one();
  CHECK(finalize_stage(pp, state, m) == IssuanceStage::kKgcProof);

  // A KGC that consistently uses some a* != a passes its own proof (which only
  // shows knowledge of *some* exponent) but not the pairing check against Y.
  auto rogue = sys.msk;
  rogue.a = rogue.a + G::Scalar::one();
  CHECK(finalize_stage(pp, state, kgc_respond(pp, rogue, msg1, rng)) == IssuanceStage::kPairingCheck);

  // Consistently wrong s: proof and pairings pass, the assembled key does not.
  rogue = sys.msk;
  rogue.s[1] = rogue.s[1] + G::Scalar::one();
  CHECK(finalize_stage(pp, state, kgc_respond(pp, rogue, msg1, rng)) == IssuanceStage::kKeyCheck);

  // Finalizing with state from another session fails the proof.
  const auto other = user_round1(pp, G::Scalar::from_u64(31), y, rng).first;
  CHECK(finalize_stage(pp, other, msg2) == IssuanceStage::kKgcProof);
}

TEST_CASE("finalization: every single Msg2 field mutation is rejected (toy sweep)") {
  SeededRng rng(9);
  const auto sys = setup<Toy>(2, rng);
  const auto& pp = sys.pp;
  int rejected = 0;
  for (int i = 0; i < 30; ++i) {
    const auto [state, msg1] = user_round1(pp, nonzero<Toy>(rng), random_y<Toy>(rng, 2), rng);
    const auto msg2 = kgc_respond(pp, sys.msk, msg1, rng);
    const auto bytes = encode(msg2);
    for (int j = 0; j < 10; ++j) {
      auto mutated = bytes;
      mutated[rng.next_u64() % mutated.size()] ^= static_cast<std::uint8_t>(1u << (rng.next_u64() % 8));
      try {
        const auto m = decode_all(mutated, [](ByteReader& r) { return read_msg2<Toy>(r); });
        CHECK_THROWS_AS(user_finalize(pp, state, m), IssuanceError);
      } catch (const DecodeError&) {
      }
      ++rejected;
    }
  }
  CHECK(rejected == 300);
}

TEST_CASE_TEMPLATE("protocol messages round-trip through the codec", G, Toy, Curve) {
  SeededRng rng(10);
  const auto sys = setup<G>(3, rng);
  const auto msg1 = user_round1(sys.pp, G::Scalar::from_u64(5), random_y<G>(rng, 3), rng).second;
  const auto msg2 = kgc_respond(sys.pp, sys.msk, msg1, rng);
  CHECK(decode_all(encode(msg1), [](ByteReader& r) { return read_msg1<G>(r); }) == msg1);
  CHECK(decode_all(encode(msg2), [](ByteReader& r) { return read_msg2<G>(r); }) == msg2);
  auto trailing = encode(msg1);
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_all(trailing, [](ByteReader& r) { return read_msg1<G>(r); }), DecodeError);
  auto truncated = encode(msg2);
  truncated.pop_back();
  CHECK_THROWS_AS(decode_all(truncated, [](ByteReader& r) { return read_msg2<G>(r); }), DecodeError);
}
