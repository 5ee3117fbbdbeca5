// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "pptfe/bench.hpp"
#include "pptfe/codec.hpp"
#include "pptfe/curve_group.hpp"
#include "pptfe/net/client.hpp"
#include "pptfe/net/kgc_service.hpp"
#include "pptfe/ppkeygen.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
using namespace std::chrono_literals;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

template <PairingGroup G>
typename G::Scalar nonzero(Rng& rng) {
  for (;;)
    if (auto s = G::Scalar::random(rng); !s.is_zero()) return s;
}

// ---- 1: functional round trip ---------------------------------------------------

void functional_round_trip(Verdict& v) {
  SeededRng rng(101);
  std::size_t cases = 0;
  for (const std::size_t l : {1, 10, 50}) {
    const auto sys = setup<Toy>(l, rng);
    for (int i = 0; i < 200; ++i, ++cases) {
      std::vector<Toy::Scalar> x, y;
      std::int64_t expected = 0;
      for (std::size_t k = 0; k < l; ++k) {
        const auto xi = static_cast<std::int64_t>(rng.next_u64() % 51);
        const auto yi = static_cast<std::int64_t>(rng.next_u64() % 51);
        expected += xi * yi;
        x.push_back(Toy::Scalar::from_i64(xi));
        y.push_back(Toy::Scalar::from_i64(yi));
      }
      const KeyContext<Toy> ctx{y, nonzero<Toy>(rng)};
      const auto key = keygen(sys.pp, sys.msk, ctx, rng);
      const auto got = decrypt(sys.pp, key, ctx, encrypt(sys.pp, x, rng));
      v.expect(got == expected, "l=" + std::to_string(l) + " case " + std::to_string(i));
    }
  }
  v.detail << cases << " decryptions exact";
}

// ---- 2: trace correctness -------------------------------------------------------

void trace_correctness(Verdict& v) {
  SystemRng rng;
  const auto sys = setup<Curve>(4, rng);
  const std::vector<Curve::Scalar> y{Curve::Scalar::from_u64(1), Curve::Scalar::from_u64(2),
                                     Curve::Scalar::from_u64(3), Curve::Scalar::from_u64(4)};
  int recovered = 0, rejected = 0;
  for (int i = 0; i < 100; ++i) {
    const auto theta = nonzero<Curve>(rng);
    const auto key = keygen(sys.pp, sys.msk, {y, theta}, rng);
    std::vector<Curve::Scalar> registry;
    while (registry.size() < 49) {
      const auto c = nonzero<Curve>(rng);
      if (!(c == theta)) registry.push_back(c);
    }
    const auto without = trace(sys.pp, sys.tsk, key, std::span<const Curve::Scalar>(registry));
    rejected += !without.has_value();
    registry.insert(registry.begin() + static_cast<std::ptrdiff_t>(rng.next_u64() % 50), theta);
    const auto with = trace(sys.pp, sys.tsk, key, std::span<const Curve::Scalar>(registry));
    recovered += with && *with == theta;
  }
  v.expect(recovered == 100, "recovery");
  v.expect(rejected == 100, "bottom on exclusion");
  v.detail << recovered << "/100 recovered, " << rejected << "/100 misses reported (curve, 50 candidates)";
}

// ---- 3: blind issuance equivalence ----------------------------------------------

template <PairingGroup G>
int equivalence_sessions(int n, Rng& rng) {
  int identical = 0;
  for (int i = 0; i < n; ++i) {
    const std::size_t l = 1 + static_cast<std::size_t>(i) % 5;
    const auto sys = setup<G>(l, rng);
    std::vector<typename G::Scalar> y;
    for (std::size_t k = 0; k < l; ++k) y.push_back(G::Scalar::random(rng));
    const auto theta = nonzero<G>(rng);
    const auto urnd = sample_user_randomness<G>(rng);
    const auto krnd = sample_kgc_randomness(sys.msk, rng);
    const auto [state, msg1] = user_round1_with(sys.pp, theta, y, urnd);
    const auto key = user_finalize(sys.pp, state, kgc_respond_with(sys.pp, sys.msk, msg1, krnd));
    const auto direct = keygen_with(sys.pp, sys.msk, {y, theta}, urnd.w1 + krnd.w2, krnd.d);
    identical += key.k1 == direct.k1 && key.k2 == direct.k2 && key.k3 == direct.k3 && key.k4 == direct.k4 &&
                 key.k5 == direct.k5;
  }
  return identical;
}

void issuance_equivalence(Verdict& v) {
  SeededRng toy_rng(303);
  SystemRng curve_rng;
  const int toy = equivalence_sessions<Toy>(100, toy_rng);
  const int curve = equivalence_sessions<Curve>(100, curve_rng);
  v.expect(toy == 100, "toy sessions");
  v.expect(curve == 100, "curve sessions");
  v.detail << "field-identical: toy " << toy << "/100, curve " << curve << "/100";
}

// ---- 4: mutation matrix ---------------------------------------------------------

enum class Stage { kAccepted, kKgcAbort, kUserProof, kUserPairing, kUserKeyCheck, kKeyInvalid };

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kAccepted: return "accepted";
    case Stage::kKgcAbort: return "kgc-abort";
    case Stage::kUserProof: return "user-proof";
    case Stage::kUserPairing: return "user-pairing";
    case Stage::kUserKeyCheck: return "user-keycheck";
    case Stage::kKeyInvalid: return "key-invalid";
  }
  return "?";
}

Stage from_issuance(IssuanceStage s) {
  switch (s) {
    case IssuanceStage::kKgcProof: return Stage::kUserProof;
    case IssuanceStage::kPairingCheck: return Stage::kUserPairing;
    case IssuanceStage::kKeyCheck: return Stage::kUserKeyCheck;
  }
  return Stage::kAccepted;
}

template <PairingGroup G>
struct MutationRun {
  using Scalar = typename G::Scalar;
  using Element = typename G::Element;

  explicit MutationRun(Rng& r) : rng(r) {}

  Rng& rng;
  std::size_t cases = 0, wrong = 0;
  std::ostringstream misses;

  Scalar delta() { return nonzero<G>(rng); }
  Element shift() { return Element::generator().pow(nonzero<G>(rng)); }

  void record(const std::string& field, Stage want, Stage got) {
    ++cases;
    if (want != got) {
      if (wrong++ < 3) misses << field << " -> " << stage_name(got) << " (want " << stage_name(want) << ") ";
    }
  }

  Stage run_session(const SetupOutput<G>& sys, const UserRound1State<G>& state, const Msg1<G>& msg1,
                    const std::function<void(Msg2<G>&)>& tamper2) {
    Msg2<G> msg2;
    try {
      msg2 = kgc_respond(sys.pp, sys.msk, msg1, rng);
    } catch (const ProtocolAbort&) {
      return Stage::kKgcAbort;
    }
    tamper2(msg2);
    try {
      (void)user_finalize(sys.pp, state, msg2);
    } catch (const IssuanceError& e) {
      return from_issuance(e.stage());
    }
    return Stage::kAccepted;
  }

  void sweep(const SetupOutput<G>& sys, std::size_t l) {
    std::vector<Scalar> y;
    for (std::size_t k = 0; k < l; ++k) y.push_back(Scalar::from_u64(rng.next_u64() % 50));
    const auto theta = nonzero<G>(rng);
    const auto [state, msg1] = user_round1(sys.pp, theta, y, rng);
    const auto none = [](Msg2<G>&) {};
    const auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.next_u64() % n); };

    // Msg1 and its proof, mutated in transit. The KGC's check covers A1, A2
    // and the proof; y is not part of the user proof, so a changed y is only
    // noticed by the user when the KGC's proof (which binds y) fails.
    auto m1 = [&](const std::string& f, auto mutate, Stage want) {
      auto m = msg1;
      mutate(m);
      record("Msg1." + f, want, run_session(sys, state, m, none));
    };
    m1("a1", [&](Msg1<G>& m) { m.a1 = m.a1 * shift(); }, Stage::kKgcAbort);
    m1("a2", [&](Msg1<G>& m) { m.a2 = m.a2 * shift(); }, Stage::kKgcAbort);
    m1("y[i]", [&](Msg1<G>& m) { auto& e = m.y[pick(l)]; e = e + delta(); }, Stage::kUserProof);
    m1("sigmaU.a1_commit", [&](Msg1<G>& m) { m.proof.a1_commit = m.proof.a1_commit * shift(); }, Stage::kKgcAbort);
    m1("sigmaU.a2_commit", [&](Msg1<G>& m) { m.proof.a2_commit = m.proof.a2_commit * shift(); }, Stage::kKgcAbort);
    m1("sigmaU.c", [&](Msg1<G>& m) { m.proof.c = m.proof.c + delta(); }, Stage::kKgcAbort);
    m1("sigmaU.t_tau", [&](Msg1<G>& m) { m.proof.t_tau = m.proof.t_tau + delta(); }, Stage::kKgcAbort);
    m1("sigmaU.t_theta", [&](Msg1<G>& m) { m.proof.t_theta = m.proof.t_theta + delta(); }, Stage::kKgcAbort);
    m1("sigmaU.t_w1", [&](Msg1<G>& m) { m.proof.t_w1 = m.proof.t_w1 + delta(); }, Stage::kKgcAbort);

    // Msg2 and its proof: every field is bound by the KGC's proof.
    auto m2 = [&](const std::string& f, std::function<void(Msg2<G>&)> mutate) {
      record("Msg2." + f, Stage::kUserProof, run_session(sys, state, msg1, mutate));
    };
    m2("w2", [&](Msg2<G>& m) { m.w2 = m.w2 + delta(); });
    m2("b1", [&](Msg2<G>& m) { m.b1 = m.b1 * shift(); });
    m2("b2", [&](Msg2<G>& m) { m.b2 = m.b2 * shift(); });
    m2("b3", [&](Msg2<G>& m) { m.b3 = m.b3 * shift(); });
    m2("b4", [&](Msg2<G>& m) { m.b4 = m.b4 * shift(); });
    m2("b5", [&](Msg2<G>& m) { m.b5 = m.b5 + delta(); });
    m2("sigmaK.mu_commit_p[i]", [&](Msg2<G>& m) { auto& e = m.proof.mu_commit_p[pick(l)]; e = e * shift(); });
    m2("sigmaK.mu_commit[i]", [&](Msg2<G>& m) { auto& e = m.proof.mu_commit[pick(l)]; e = e * shift(); });
    m2("sigmaK.r1p", [&](Msg2<G>& m) { m.proof.r1p = m.proof.r1p * shift(); });
    m2("sigmaK.r2p", [&](Msg2<G>& m) { m.proof.r2p = m.proof.r2p * shift(); });
    m2("sigmaK.r3p", [&](Msg2<G>& m) { m.proof.r3p = m.proof.r3p * shift(); });
    m2("sigmaK.r4p", [&](Msg2<G>& m) { m.proof.r4p = m.proof.r4p * shift(); });
    m2("sigmaK.c", [&](Msg2<G>& m) { m.proof.c = m.proof.c + delta(); });
    m2("sigmaK.t_a", [&](Msg2<G>& m) { m.proof.t_a = m.proof.t_a + delta(); });
    m2("sigmaK.t_s[i]", [&](Msg2<G>& m) { auto& e = m.proof.t_s[pick(l)]; e = e + delta(); });

    // A finished key: each component is checked by the key's pairing equations.
    const auto key = keygen(sys.pp, sys.msk, {y, theta}, rng);
    auto k = [&](const std::string& f, auto mutate) {
      auto bad = key;
      mutate(bad);
      record("Key." + f, Stage::kKeyInvalid, verify_key(sys.pp, bad, {y, theta}) ? Stage::kAccepted : Stage::kKeyInvalid);
    };
    k("k1", [&](FunctionalKey<G>& m) { m.k1 = m.k1 * shift(); });
    k("k2", [&](FunctionalKey<G>& m) { m.k2 = m.k2 * shift(); });
    k("k3", [&](FunctionalKey<G>& m) { m.k3 = m.k3 * shift(); });
    k("k4", [&](FunctionalKey<G>& m) { m.k4 = m.k4 + delta(); });
    k("k5", [&](FunctionalKey<G>& m) { m.k5 = m.k5 + delta(); });
  }
};

void mutation_matrix(Verdict& v) {
  SeededRng toy_rng(404);
  MutationRun<Toy> toy{toy_rng};
  for (int i = 0; i < 16; ++i) toy.sweep(setup<Toy>(1 + i % 4, toy_rng), 1 + i % 4);

  SystemRng curve_rng;
  MutationRun<Curve> curve{curve_rng};
  for (int i = 0; i < 8; ++i) curve.sweep(setup<Curve>(1 + i % 3, curve_rng), 1 + i % 3);

  const std::size_t cases = toy.cases + curve.cases;
  v.expect(cases >= 500, "at least 500 cases");
  v.expect(toy.wrong == 0, "toy: " + toy.misses.str());
  v.expect(curve.wrong == 0, "curve: " + curve.misses.str());
  v.detail << cases << " mutations (" << toy.cases << " toy, " << curve.cases << " curve), "
           << toy.wrong + curve.wrong << " wrong-stage or accepted";
}

// ---- 5: hiding bijection --------------------------------------------------------

void hiding_bijection(Verdict& v) {
  using S = Toy::Scalar;
  SeededRng rng(505);
  int a2_same = 0, transcript_same = 0, sessions = 0;
  while (sessions < 100) {
    const auto sys = setup<Toy>(2, rng);
    const auto& pp = sys.pp;
    const auto one_b = S::one() + sys.tsk.b;
    if (one_b.is_zero()) continue;
    ++sessions;
    const std::vector<S> y{S::from_u64(3), S::from_u64(9)};
    const auto theta0 = nonzero<Toy>(rng), theta1 = nonzero<Toy>(rng);
    const auto rnd0 = sample_user_randomness<Toy>(rng);
    const auto msg0 = user_round1_with(pp, theta0, y, rnd0).second;

    const auto w1p = (one_b * rnd0.w1 + theta0 - theta1) * one_b.inverse();
    const auto g2b = pp.g2 * pp.tracer_pk;
    a2_same += g2b.pow(w1p) * pp.g2.pow(theta1) == msg0.a2;

    // tau absorbs the change in B^w1; the nonces are rebased so the proof's
    // commitments and responses stay the same.
    const auto log_h_b = pp.tracer_pk.exponent() * pp.h.exponent().inverse();
    const auto taup = rnd0.tau + log_h_b * (rnd0.w1 - w1p);
    const auto& pr = msg0.proof;
    const UserRandomness<Toy> rnd1{taup, w1p, {pr.t_tau + pr.c * taup, pr.t_theta + pr.c * theta1, pr.t_w1 + pr.c * w1p}};
    const auto msg1 = user_round1_with(pp, theta1, y, rnd1).second;
    transcript_same += encode(msg1) == encode(msg0);
  }
  v.expect(a2_same == 100, "A2 reproduction");
  v.expect(transcript_same == 100, "transcript identity");
  v.detail << "A2 identical " << a2_same << "/100, Msg1 bytes identical " << transcript_same << "/100";
}

// ---- 6: operation counts --------------------------------------------------------

void cost_counts(Verdict& v) {
  SystemRng rng;
  for (const std::size_t l : {10, 50}) {
    const auto sys = setup<Curve>(l, rng);
    std::vector<Curve::Scalar> x, y;
    for (std::size_t k = 0; k < l; ++k) {
      x.push_back(Curve::Scalar::from_u64(k % 7));
      y.push_back(Curve::Scalar::from_u64(k % 5));
    }
    const auto theta = nonzero<Curve>(rng);
    const KeyContext<Curve> ctx{y, theta};
    const auto key = keygen(sys.pp, sys.msk, ctx, rng);

    CountScope enc_scope;
    const auto ct = encrypt(sys.pp, x, rng);
    const auto enc = enc_scope.delta();

    CountScope dec_scope;
    (void)decrypt(sys.pp, key, ctx, ct);
    const auto dec = dec_scope.delta();

    const std::vector<Curve::Scalar> candidates{theta};
    CountScope tr_scope;
    (void)trace(sys.pp, sys.tsk, key, std::span<const Curve::Scalar>(candidates));
    const auto tr = tr_scope.delta();

    const std::string at = " at l=" + std::to_string(l);
    v.expect(enc.exps + enc.gt_exps == 2 * l + 3 && enc.pairings == 0, "encrypt" + at);
    v.expect(dec.pairings == 5 && dec.exps + dec.gt_exps == l + 2, "decrypt" + at);
    // Trace: 4 pairings, 2 source-group exponentiations and one target-group
    // exponentiation for the (first, matching) candidate.
    v.expect(tr.pairings == 4 && tr.exps + tr.gt_exps == 3, "trace" + at);
    v.expect(encode(key).size() == 2 * Curve::Scalar::kBytes + 3 * Curve::Element::kBytes, "key size" + at);
    v.detail << "l=" << l << ": enc " << enc.exps + enc.gt_exps << "E, dec " << dec.pairings << "P+"
             << dec.exps + dec.gt_exps << "E, trace " << tr.pairings << "P+" << tr.exps + tr.gt_exps << "E; ";
  }
  v.detail << "key " << 2 * Curve::Scalar::kBytes + 3 * Curve::Element::kBytes << " bytes";
}

// ---- 7: timing shape ------------------------------------------------------------

void timing_shape(Verdict& v) {
  SystemRng rng;
  const auto report = run_bench<Curve>(kDefaultBenchGrid, kMinBenchReps, rng);
  for (const auto& c : check_shape(report)) {
    v.expect(c.ok, c.name + " (" + c.detail + ")");
    if (c.name.find("linear") != std::string::npos || c.name.find("trace") != std::string::npos)
      v.detail << c.name << " " << c.detail << ";";
  }
}

// ---- 8: networked issuance ------------------------------------------------------

void networked(Verdict& v) {
  using namespace pptfe::net;
  SystemRng rng;
  const auto sys = setup<Curve>(5, rng);
  KgcService<Curve> svc(sys.pp, sys.msk, ServiceOptions{});
  std::vector<Curve::Scalar> y;
  for (std::uint64_t k = 0; k < 5; ++k) y.push_back(Curve::Scalar::from_u64(k + 1));

  constexpr int kGood = 8;
  std::vector<Curve::Scalar> thetas;
  for (int i = 0; i < kGood; ++i) thetas.push_back(nonzero<Curve>(rng));
  std::vector<std::optional<FunctionalKey<Curve>>> keys(kGood);
  std::atomic<int> garbage_ok{0}, proof_ok{0}, client_errors{0};

  auto raw = [&](const Bytes& wire) {
    auto sock = Socket::connect(svc.endpoint(), 10s);
    sock.send_all(wire);
    sock.shutdown_write();
    const auto reply = read_frame(sock);
    return reply.type == MsgType::kError ? decode_error_payload(reply.payload).code : std::uint16_t{0};
  };
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < kGood; ++i) {
      threads.emplace_back([&, i] {
        try {
          SystemRng local;
          keys[i] = request_key(sys.pp, thetas[i], y, svc.endpoint(), local);
        } catch (...) {
          ++client_errors;
        }
      });
      threads.emplace_back([&, i] {
        try {
          if (i % 2 == 0) {
            garbage_ok += raw(Bytes(64, static_cast<std::uint8_t>(0xA0 + i))) == 0x0001;
          } else {
            SystemRng local;
            auto msg1 = user_round1(sys.pp, Curve::Scalar::from_u64(7), y, local).second;
            msg1.proof.t_theta = msg1.proof.t_theta + Curve::Scalar::one();
            proof_ok += raw(encode_frame(Frame{Curve::kId, MsgType::kIssueRequest, encode(msg1)})) == 0x0002;
          }
        } catch (...) {
          ++client_errors;
        }
      });
    }
  }

  int valid = 0, traced = 0;
  for (int i = 0; i < kGood; ++i) {
    if (!keys[i]) continue;
    valid += verify_key(sys.pp, *keys[i], {y, thetas[i]});
    const auto hit = trace(sys.pp, sys.tsk, *keys[i], std::span<const Curve::Scalar>(thetas));
    traced += hit && *hit == thetas[i];
  }
  v.expect(client_errors == 0, "client exceptions");
  v.expect(valid == kGood && traced == kGood, "honest sessions");
  v.expect(garbage_ok == kGood / 2, "malformed sessions answered 0x0001");
  v.expect(proof_ok == kGood / 2, "bad-proof sessions answered 0x0002");
  v.detail << valid << "/8 keys valid, " << traced << "/8 traced to their holder; malformed->0x0001 " << garbage_ok
           << "/4, bad proof->0x0002 " << proof_ok << "/4";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    void (*fn)(Verdict&);
  };
  const Criterion criteria[] = {
      {1, "functional round trip", functional_round_trip},
      {2, "trace correctness", trace_correctness},
      {3, "blind issuance equivalence", issuance_equivalence},
      {4, "mutation matrix", mutation_matrix},
      {5, "hiding bijection", hiding_bijection},
      {6, "operation counts", cost_counts},
      {7, "timing shape", timing_shape},
      {8, "networked issuance", networked},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.fn(v);
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail << "exception: " << e.what();
    }
    const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
    failed += !v.ok;
    std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail.str()
              << " [" << secs.count() << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
