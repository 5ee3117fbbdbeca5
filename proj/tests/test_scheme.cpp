#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "pptfe/codec.hpp"
#include "pptfe/curve_group.hpp"
#include "pptfe/scheme.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
using oracle::u64;

namespace {

constexpr u64 P = kToyModulus;
using S = Toy::Scalar;
using Small = ToyGroup<101>;

u64 ex(const Toy::Element& e) { return e.exponent().value(); }

template <PairingGroup G>
std::vector<typename G::Scalar> to_scalars(const std::vector<std::int64_t>& v) {
  std::vector<typename G::Scalar> out;
  for (auto x : v) out.push_back(G::Scalar::from_i64(x));
  return out;
}

std::vector<std::int64_t> small_vec(Rng& rng, std::size_t l, std::int64_t lo = 0, std::int64_t hi = 50) {
  std::vector<std::int64_t> v;
  for (std::size_t i = 0; i < l; ++i) v.push_back(lo + static_cast<std::int64_t>(rng.next_u64() % (hi - lo + 1)));
  return v;
}

template <PairingGroup G>
typename G::Scalar nonzero(Rng& rng) {
  for (;;)
    if (auto s = G::Scalar::random(rng); !s.is_zero()) return s;
}

}  // namespace

TEST_CASE("setup: shape, generators and exponent relations") {
  SeededRng rng(1);
  auto sys = setup<Toy>(10, rng);
  const auto& pp = sys.pp;
  CHECK(pp.dim() == 10);
  CHECK(pp.masks.size() + 6 == 16);
  for (auto* e : {&pp.g0, &pp.g1, &pp.g2, &pp.h, &pp.tracer_pk, &pp.kgc_pk}) CHECK_FALSE(e->is_identity());
  for (std::size_t i = 0; i < 10; ++i) CHECK(ex(pp.masks[i]) == oracle::mulmod(ex(pp.g1), sys.msk.s[i].value(), P));
  CHECK(ex(pp.tracer_pk) == oracle::mulmod(ex(pp.g2), sys.tsk.b.value(), P));
  CHECK(ex(pp.kgc_pk) == oracle::mulmod(ex(pp.g0), sys.msk.a.value(), P));
  CHECK(pp.gt_base == Toy::pair(pp.g0, pp.g1));
  CHECK_THROWS_AS(setup<Toy>(0, rng), DimensionError);
}

TEST_CASE("setup is deterministic under a fixed seed") {
  SeededRng a(77), b(77), c(78);
  const auto x = encode(setup<Toy>(5, a).pp);
  CHECK(x == encode(setup<Toy>(5, b).pp));
  CHECK_FALSE(x == encode(setup<Toy>(5, c).pp));
}

TEST_CASE("encrypt: zero randomness and zero plaintext give identities") {
  SeededRng rng(2);
  const auto sys = setup<Toy>(4, rng);
  const auto ct = encrypt_with(sys.pp, std::vector<S>(4, S::zero()), S::zero());
  CHECK(ct.element_count() == 7);
  for (const auto& e : ct.body) CHECK(e.is_identity());
  CHECK(ct.r_g0.is_identity());
  CHECK(ct.r_g1.is_identity());
  CHECK(ct.r_g2.is_identity());
}

TEST_CASE("encrypt: exponent of each component matches s_i*r + x_i") {
  SeededRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t l = 1 + trial % 7;
    const auto sys = setup<Toy>(l, rng);
    const auto xs = small_vec(rng, l, -1000, 1000);
    const auto r = S::random(rng);
    const auto ct = encrypt_with(sys.pp, to_scalars<Toy>(xs), r);
    REQUIRE(ct.element_count() == l + 3);
    const u64 g1 = ex(sys.pp.g1);
    for (std::size_t i = 0; i < l; ++i) {
      const u64 want = oracle::mulmod(g1, (oracle::mulmod(sys.msk.s[i].value(), r.value(), P) + oracle::modp(xs[i], P)) % P, P);
      REQUIRE(ex(ct.body[i]) == want);
    }
    CHECK(ex(ct.r_g1) == oracle::mulmod(g1, r.value(), P));
    CHECK(ex(ct.r_g2) == oracle::mulmod(ex(sys.pp.g2), r.value(), P));
    CHECK(ex(ct.r_g0) == oracle::mulmod(ex(sys.pp.g0), r.value(), P));
  }
  SeededRng r2(4);
  const auto sys = setup<Toy>(3, r2);
  CHECK_THROWS_AS(encrypt(sys.pp, std::vector<S>(2), r2), DimensionError);
}

TEST_CASE("keygen: exponent oracles for K1, K2, K3") {
  SeededRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t l = 1 + trial % 5;
    const auto sys = setup<Toy>(l, rng);
    const auto& pp = sys.pp;
    const auto ys = small_vec(rng, l, -20, 20);
    const auto theta = nonzero<Toy>(rng);
    const auto w = S::random(rng);
    auto d = S::random(rng);
    while ((d + sys.msk.a).is_zero()) d = S::random(rng);
    const auto key = keygen_with(pp, sys.msk, {to_scalars<Toy>(ys), theta}, w, d);

    const u64 a = sys.msk.a.value(), b = sys.tsk.b.value();
    const u64 inv = oracle::inv((d.value() + a) % P, P);
    u64 ys_dot = 0;
    for (std::size_t i = 0; i < l; ++i) ys_dot = (ys_dot + oracle::mulmod(oracle::modp(ys[i], P), sys.msk.s[i].value(), P)) % P;
    const u64 g0 = ex(pp.g0), g1 = ex(pp.g1), g2 = ex(pp.g2);
    const u64 k1 = (oracle::mulmod(g0, ys_dot, P) + oracle::mulmod(oracle::mulmod(g2, b, P), oracle::mulmod(w.value(), inv, P), P)) % P;
    const u64 k2_inner = (g0 + oracle::mulmod(oracle::mulmod(g2, (1 + b) % P, P), w.value(), P) + oracle::mulmod(g2, theta.value(), P)) % P;
    REQUIRE(ex(key.k1) == k1);
    REQUIRE(ex(key.k2) == oracle::mulmod(k2_inner, inv, P));
    REQUIRE(ex(key.k3) == oracle::mulmod(g1, inv, P));
    REQUIRE(key.k4 == w);
    REQUIRE(key.k5 == d);
  }
}

TEST_CASE("keygen: identity domain and d + a = 0") {
  SeededRng rng(6);
  const auto sys = setup<Toy>(2, rng);
  const KeyContext<Toy> zero_id{{S::one(), S::one()}, S::zero()};
  CHECK_THROWS_AS(keygen(sys.pp, sys.msk, zero_id, rng), IdentityDomainError);
  const KeyContext<Toy> ok{{S::one(), S::one()}, S::one()};
  CHECK_THROWS_AS(keygen_with(sys.pp, sys.msk, ok, S::one(), -sys.msk.a), std::domain_error);
  CHECK_THROWS_AS(keygen(sys.pp, sys.msk, KeyContext<Toy>{{S::one()}, S::one()}, rng), DimensionError);
}

TEST_CASE("keygen resamples d on a small group where d + a = 0 is reachable") {
  SeededRng rng(7);
  const auto sys = setup<Small>(2, rng);
  const KeyContext<Small> ctx{{Small::Scalar::one(), Small::Scalar::from_u64(2)}, Small::Scalar::from_u64(9)};
  for (int i = 0; i < 3000; ++i) {
    const auto key = keygen(sys.pp, sys.msk, ctx, rng);
    REQUIRE_FALSE((key.k5 + sys.msk.a).is_zero());
    REQUIRE(verify_key(sys.pp, key, ctx));
  }
}

TEST_CASE_TEMPLATE("verify_key: completeness over 100 random contexts", G, Toy, Curve) {
  SeededRng rng(8);
  const auto sys = setup<G>(5, rng);
  const int n = std::is_same_v<G, Toy> ? 100 : 20;
  for (int i = 0; i < n; ++i) {
    const KeyContext<G> ctx{to_scalars<G>(small_vec(rng, 5, -100, 100)), nonzero<G>(rng)};
    REQUIRE(verify_key(sys.pp, keygen(sys.pp, sys.msk, ctx, rng), ctx));
  }
}

TEST_CASE_TEMPLATE("verify_key: single-field perturbations are rejected", G, Toy, Curve) {
  SeededRng rng(9);
  const auto sys = setup<G>(3, rng);
  const auto& pp = sys.pp;
  const int n = std::is_same_v<G, Toy> ? 50 : 5;
  for (int i = 0; i < n; ++i) {
    const KeyContext<G> ctx{to_scalars<G>(small_vec(rng, 3)), nonzero<G>(rng)};
    const auto key = keygen(pp, sys.msk, ctx, rng);
    const auto delta = nonzero<G>(rng);
    const auto bump = G::Element::generator().pow(delta);
    auto k = key;
    k.k1 = k.k1 * bump;
    REQUIRE_FALSE(verify_key(pp, k, ctx));
    k = key;
    k.k2 = k.k2 * bump;
    REQUIRE_FALSE(verify_key(pp, k, ctx));
    k = key;
    k.k3 = k.k3 * bump;
    REQUIRE_FALSE(verify_key(pp, k, ctx));
    k = key;
    k.k4 = k.k4 + delta;
    REQUIRE_FALSE(verify_key(pp, k, ctx));
    k = key;
    k.k5 = k.k5 + delta;
    REQUIRE_FALSE(verify_key(pp, k, ctx));
    auto c = ctx;
    c.theta = c.theta + delta;
    if (!c.theta.is_zero()) REQUIRE_FALSE(verify_key(pp, key, c));
    c = ctx;
    c.y[i % 3] = c.y[i % 3] + delta;
    REQUIRE_FALSE(verify_key(pp, key, c));
  }
}

TEST_CASE("verify_key: K1 times g0 and theta + 1 are rejected") {
  SeededRng rng(10);
  const auto sys = setup<Toy>(4, rng);
  const KeyContext<Toy> ctx{to_scalars<Toy>({1, 2, 3, 4}), S::from_u64(42)};
  auto key = keygen(sys.pp, sys.msk, ctx, rng);
  CHECK(verify_key(sys.pp, key, ctx));
  auto bad = key;
  bad.k1 = bad.k1 * sys.pp.g0;
  CHECK_FALSE(verify_key(sys.pp, bad, ctx));
  CHECK_FALSE(verify_key(sys.pp, key, KeyContext<Toy>{ctx.y, S::from_u64(43)}));
}

TEST_CASE_TEMPLATE("collusion: components from two keys do not combine", G, Toy, Curve) {
  SeededRng rng(11);
  const auto sys = setup<G>(3, rng);
  const KeyContext<G> ctx{to_scalars<G>({1, 2, 3}), G::Scalar::from_u64(5)};
  const auto ka = keygen(sys.pp, sys.msk, ctx, rng);
  const auto kb = keygen(sys.pp, sys.msk, ctx, rng);
  auto mixed = kb;
  mixed.k1 = ka.k1;
  CHECK_FALSE(verify_key(sys.pp, mixed, ctx));
  mixed = kb;
  mixed.k3 = ka.k3;
  CHECK_FALSE(verify_key(sys.pp, mixed, ctx));
  mixed = ka;
  mixed.k4 = kb.k4;
  mixed.k5 = kb.k5;
  CHECK_FALSE(verify_key(sys.pp, mixed, ctx));
}

TEST_CASE_TEMPLATE("decrypt: worked examples", G, Toy, Curve) {
  SeededRng rng(12);
  const auto sys = setup<G>(2, rng);
  const KeyContext<G> ctx{to_scalars<G>({3, 4}), G::Scalar::from_u64(77)};
  const auto key = keygen(sys.pp, sys.msk, ctx, rng);
  CHECK(decrypt(sys.pp, key, ctx, encrypt(sys.pp, to_scalars<G>({1, 2}), rng)) == 11);
  const KeyContext<G> zero_ctx{to_scalars<G>({0, 0}), G::Scalar::from_u64(77)};
  const auto zero_key = keygen(sys.pp, sys.msk, zero_ctx, rng);
  CHECK(decrypt(sys.pp, zero_key, zero_ctx, encrypt(sys.pp, to_scalars<G>({0, 0}), rng)) == 0);
  CHECK(decrypt(sys.pp, key, ctx, encrypt(sys.pp, to_scalars<G>({-5, 1}), rng)) == -11);
}

TEST_CASE_TEMPLATE("decrypt: 100 random pairs at l = 10 match the integer inner product", G, Toy, Curve) {
  SeededRng rng(13);
  const auto sys = setup<G>(10, rng);
  const int n = std::is_same_v<G, Toy> ? 100 : 10;
  for (int i = 0; i < n; ++i) {
    const auto xs = small_vec(rng, 10), ys = small_vec(rng, 10);
    const KeyContext<G> ctx{to_scalars<G>(ys), nonzero<G>(rng)};
    const auto key = keygen(sys.pp, sys.msk, ctx, rng);
    const auto got = decrypt(sys.pp, key, ctx, encrypt(sys.pp, to_scalars<G>(xs), rng), 1 << 20);
    REQUIRE(got == oracle::dot(xs, ys));
  }
}

TEST_CASE("decrypt: out of bound gives no value, and the toy bound is clamped") {
  SeededRng rng(14);
  const auto sys = setup<Toy>(1, rng);
  const KeyContext<Toy> ctx{to_scalars<Toy>({1000}), S::from_u64(3)};
  const auto key = keygen(sys.pp, sys.msk, ctx, rng);
  const auto ct = encrypt(sys.pp, to_scalars<Toy>({7}), rng);
  CHECK(decrypt(sys.pp, key, ctx, ct, 7000) == 7000);
  CHECK_FALSE(decrypt(sys.pp, key, ctx, ct, 6999).has_value());
  CHECK_THROWS(decrypt(sys.pp, key, ctx, ct, 0));
  // A value just past (p-1)/2 reads back as its negative representative.
  const KeyContext<Toy> big{to_scalars<Toy>({1}), S::from_u64(3)};
  const auto kb = keygen(sys.pp, sys.msk, big, rng);
  const auto ct_big = encrypt_with(sys.pp, {S::from_u64((P - 1) / 2 + 1)}, S::from_u64(5));
  CHECK(decrypt(sys.pp, kb, big, ct_big, 1ULL << 40) == -static_cast<std::int64_t>((P - 1) / 2));
}

TEST_CASE("decrypt: tampering with a ciphertext component changes the result") {
  SeededRng rng(15);
  const auto sys = setup<Toy>(3, rng);
  const auto xs = std::vector<std::int64_t>{4, 5, 6};
  const KeyContext<Toy> ctx{to_scalars<Toy>({1, 2, 3}), S::from_u64(8)};
  const auto key = keygen(sys.pp, sys.msk, ctx, rng);
  const auto ct = encrypt(sys.pp, to_scalars<Toy>(xs), rng);
  REQUIRE(decrypt(sys.pp, key, ctx, ct) == 32);
  for (int i = 0; i < 50; ++i) {
    const auto bump = Toy::Element::generator().pow(nonzero<Toy>(rng));
    for (std::size_t slot = 0; slot < ct.element_count(); ++slot) {
      auto bad = ct;
      if (slot < 3) bad.body[slot] = bad.body[slot] * bump;
      else if (slot == 3) bad.r_g1 = bad.r_g1 * bump;
      else if (slot == 4) bad.r_g2 = bad.r_g2 * bump;
      else bad.r_g0 = bad.r_g0 * bump;
      REQUIRE_FALSE(decrypt_to_gt(sys.pp, key, ctx, bad) == decrypt_to_gt(sys.pp, key, ctx, ct));
    }
  }
}

TEST_CASE_TEMPLATE("trace: finds the embedded identity and misses otherwise", G, Toy, Curve) {
  SeededRng rng(16);
  const auto sys = setup<G>(3, rng);
  const auto s = [](u64 v) { return G::Scalar::from_u64(v); };
  const KeyContext<G> ctx{to_scalars<G>({1, 2, 3}), s(42)};
  const auto key = keygen(sys.pp, sys.msk, ctx, rng);
  const std::vector<typename G::Scalar> hit{s(7), s(42), s(99)};
  const std::vector<typename G::Scalar> miss{s(7), s(99)};
  CHECK(trace(sys.pp, sys.tsk, key, std::span(hit)) == s(42));
  CHECK_FALSE(trace(sys.pp, sys.tsk, key, std::span(miss)).has_value());
  CHECK_FALSE(trace(sys.pp, sys.tsk, key, std::span<const typename G::Scalar>()).has_value());
  const auto t = trace_target(sys.pp, sys.tsk, key);
  CHECK(t.base.pow(s(42)) == t.target);
}

TEST_CASE("cost counts: encrypt, decrypt, trace, key size") {
  SeededRng rng(17);
  for (std::size_t l : {1u, 10u, 50u}) {
    const auto sys = setup<Toy>(l, rng);
    const auto xs = small_vec(rng, l), ys = small_vec(rng, l);
    const KeyContext<Toy> ctx{to_scalars<Toy>(ys), S::from_u64(5)};
    const auto key = keygen(sys.pp, sys.msk, ctx, rng);

    CountScope enc;
    const auto ct = encrypt(sys.pp, to_scalars<Toy>(xs), rng);
    CHECK(enc.delta() == OpCounts{0, 2 * l + 3, 0, 0});

    CountScope dec;
    CHECK(decrypt(sys.pp, key, ctx, ct) == oracle::dot(xs, ys));
    CHECK(dec.delta().pairings == 5);
    CHECK(dec.delta().exps == l + 2);
    CHECK(dec.delta().gt_exps == 0);

    const std::vector<S> first{S::from_u64(5), S::from_u64(6), S::from_u64(7)};
    CountScope tr;
    CHECK(trace(sys.pp, sys.tsk, key, std::span(first)) == S::from_u64(5));
    CHECK(tr.delta() == OpCounts{4, 2, 1, 0});

    const std::vector<S> last{S::from_u64(6), S::from_u64(7), S::from_u64(5)};
    CountScope tr3;
    CHECK(trace(sys.pp, sys.tsk, key, std::span(last)) == S::from_u64(5));
    CHECK(tr3.delta() == OpCounts{4, 2, 3, 0});
  }
  CHECK(encode(FunctionalKey<Toy>{}).size() == 2 * Toy::Scalar::kBytes + 3 * Toy::Element::kBytes);
  CHECK(encode(FunctionalKey<Curve>{}).size() == 2 * Curve::Scalar::kBytes + 3 * Curve::Element::kBytes);
}

TEST_CASE("setup cost: one exponentiation per mask plus two, one pairing") {
  SeededRng rng(18);
  CountScope scope;
  (void)setup<Toy>(10, rng);
  CHECK(scope.delta() == OpCounts{1, 12, 0, 0});
}
