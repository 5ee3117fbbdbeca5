#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "pptfe/curve_group.hpp"
#include "pptfe/net/client.hpp"
#include "pptfe/net/kgc_service.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
using namespace pptfe::net;
using namespace std::chrono_literals;

namespace {

template <PairingGroup G>
std::vector<typename G::Scalar> small_y(std::size_t l) {
  std::vector<typename G::Scalar> y;
  for (std::size_t i = 0; i < l; ++i) y.push_back(G::Scalar::from_u64(i + 1));
  return y;
}

// Session records land just after the reply is written.
bool wait_for_sessions(const SessionLog& log, std::size_t n) {
  for (int i = 0; i < 200; ++i) {
    if (log.snapshot().size() >= n) return true;
    std::this_thread::sleep_for(10ms);
  }
  return false;
}

bool contains(const Bytes& hay, const Bytes& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

Frame exchange_raw(const Endpoint& ep, const Bytes& wire) {
  auto sock = Socket::connect(ep, 5s);
  sock.send_all(wire);
  sock.shutdown_write();
  return read_frame(sock);
}

}  // namespace

TEST_CASE("frames round-trip and report structural errors by kind") {
  const Frame f{BackendId::kCurve, MsgType::kIssueResponse, Bytes{1, 2, 3, 4, 5}};
  const auto wire = encode_frame(f);
  REQUIRE(wire.size() == kFrameHeaderBytes + 5);
  CHECK(wire[0] == 0);
  CHECK(wire[3] == 8);  // 3 header bytes + payload
  CHECK(wire[4] == kProtocolVersion);
  const auto d = decode_frame(wire);
  CHECK(d.frame == f);
  CHECK(d.consumed == wire.size());

  auto kind_of = [](ByteView in, std::optional<BackendId> expected = std::nullopt) {
    try {
      (void)decode_frame(in, expected);
    } catch (const FrameError& e) {
      return std::optional(e.kind());
    }
    return std::optional<FrameErrorKind>();
  };

  Bytes truncated(wire.begin(), wire.end() - 1);
  CHECK(kind_of(truncated) == FrameErrorKind::kIncomplete);
  CHECK(kind_of(ByteView(wire.data(), 3)) == FrameErrorKind::kIncomplete);

  auto bad = wire;
  bad[4] = 0x02;
  CHECK(kind_of(bad) == FrameErrorKind::kNegotiation);
  bad = wire;
  bad[5] = 0x09;
  CHECK(kind_of(bad) == FrameErrorKind::kNegotiation);
  CHECK(kind_of(wire, BackendId::kToy) == FrameErrorKind::kNegotiation);
  bad = wire;
  bad[6] = 0x33;
  CHECK(kind_of(bad) == FrameErrorKind::kUnknownType);
  bad = wire;
  bad[3] = 2;  // cannot hold version/backend/type
  CHECK(kind_of(bad) == FrameErrorKind::kMalformed);

  // Declared size one past the limit is refused from the header alone.
  const std::uint32_t len = static_cast<std::uint32_t>(3 + kMaxPayload + 1);
  Bytes big{static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
            static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len), kProtocolVersion,
            static_cast<std::uint8_t>(BackendId::kToy), 0x01};
  CHECK(kind_of(big) == FrameErrorKind::kSize);
  CHECK_THROWS_AS(encode_frame(Frame{BackendId::kToy, MsgType::kIssueRequest, Bytes(kMaxPayload + 1)}), FrameError);
  const auto ok = encode_frame(Frame{BackendId::kToy, MsgType::kIssueRequest, Bytes(16)});
  CHECK(check_frame_header(ByteView(ok).first(kFrameHeaderBytes), BackendId::kToy) == 16);
  CHECK_THROWS_AS(check_frame_header(ByteView(big).first(kFrameHeaderBytes), std::nullopt), FrameError);
}

TEST_CASE("two frames back to back decode in sequence") {
  const Frame a{BackendId::kToy, MsgType::kIssueRequest, Bytes{9}};
  const Frame b = make_error_frame(BackendId::kToy, ErrorCode::kProofRejected, "nope");
  auto wire = encode_frame(a);
  const auto wb = encode_frame(b);
  wire.insert(wire.end(), wb.begin(), wb.end());
  const auto first = decode_frame(wire);
  CHECK(first.frame == a);
  const auto second = decode_frame(ByteView(wire).subspan(first.consumed));
  CHECK(second.frame == b);
  const auto err = decode_error_payload(second.frame.payload);
  CHECK(err.code == 0x0002);
  CHECK(err.detail == "nope");
}

TEST_CASE("endpoint parsing") {
  const auto ep = parse_endpoint("127.0.0.1:7000");
  CHECK(ep.host == "127.0.0.1");
  CHECK(ep.port == 7000);
  CHECK(to_string(ep) == "127.0.0.1:7000");
  CHECK_THROWS_AS(parse_endpoint("nohost"), std::invalid_argument);
  CHECK_THROWS_AS(parse_endpoint("h:99999"), std::invalid_argument);
  CHECK_THROWS_AS(parse_endpoint("h:"), std::invalid_argument);
}

TEST_CASE("request handling without sockets maps failures to error codes") {
  SeededRng rng(1);
  const auto sys = setup<Toy>(2, rng);
  auto msg1 = user_round1(sys.pp, Toy::Scalar::from_u64(77), small_y<Toy>(2), rng).second;
  const Frame good{BackendId::kToy, MsgType::kIssueRequest, encode(msg1)};

  auto h = handle_request_frame(sys.pp, sys.msk, good, rng);
  CHECK(h.outcome == SessionOutcome::kIssued);
  CHECK(h.reply.type == MsgType::kIssueResponse);

  auto code_of = [&](const Frame& f) {
    const auto r = handle_request_frame(sys.pp, sys.msk, f, rng);
    REQUIRE(r.reply.type == MsgType::kError);
    return decode_error_payload(r.reply.payload).code;
  };
  CHECK(code_of(Frame{BackendId::kCurve, MsgType::kIssueRequest, good.payload}) == 0x0001);
  CHECK(code_of(Frame{BackendId::kToy, MsgType::kIssueResponse, good.payload}) == 0x0001);
  CHECK(code_of(Frame{BackendId::kToy, MsgType::kIssueRequest, Bytes{1, 2, 3}}) == 0x0001);
  auto wrong_dim = msg1;
  wrong_dim.y.push_back(Toy::Scalar::one());
  CHECK(code_of(Frame{BackendId::kToy, MsgType::kIssueRequest, encode(wrong_dim)}) == 0x0001);
  auto bad_proof = msg1;
  bad_proof.proof.c = bad_proof.proof.c + Toy::Scalar::one();
  CHECK(code_of(Frame{BackendId::kToy, MsgType::kIssueRequest, encode(bad_proof)}) == 0x0002);
}

TEST_CASE("loopback issuance: two frames, identity never on the wire") {
  SystemRng rng;
  const auto sys = setup<Curve>(3, rng);
  KgcService<Curve> svc(sys.pp, sys.msk, ServiceOptions{});
  const auto theta = Curve::Scalar::random(rng);
  const auto y = small_y<Curve>(3);

  WireCapture cap;
  const auto key = request_key(sys.pp, theta, y, svc.endpoint(), rng, &cap);
  CHECK(cap.frames_sent == 1);
  CHECK(cap.frames_received == 1);
  CHECK(verify_key(sys.pp, key, {y, theta}));

  const auto tb = theta.to_bytes();
  const Bytes theta_bytes(tb.begin(), tb.end());
  CHECK_FALSE(contains(cap.sent, theta_bytes));
  CHECK_FALSE(contains(cap.received, theta_bytes));

  const std::vector<Curve::Scalar> candidates{Curve::Scalar::from_u64(5), theta};
  CHECK(trace(sys.pp, sys.tsk, key, std::span(candidates)) == theta);

  REQUIRE(wait_for_sessions(svc.log(), 1));
  CHECK(svc.log().count(SessionOutcome::kIssued) == 1);
}

TEST_CASE("garbage and bad proofs get error frames and the server keeps serving") {
  SystemRng rng;
  const auto sys = setup<Toy>(2, rng);
  KgcService<Toy> svc(sys.pp, sys.msk, ServiceOptions{});
  const auto ep = svc.endpoint();

  // Random bytes: the header is nonsense.
  const auto garbage = exchange_raw(ep, Bytes{0xde, 0xad, 0xbe, 0xef, 0x00, 0x11, 0x22, 0x33});
  REQUIRE(garbage.type == MsgType::kError);
  CHECK(decode_error_payload(garbage.payload).code == 0x0001);

  // Connection dropped mid-frame.
  auto partial = encode_frame(Frame{BackendId::kToy, MsgType::kIssueRequest, Bytes(40, 7)});
  partial.resize(20);
  const auto cut = exchange_raw(ep, partial);
  CHECK(decode_error_payload(cut.payload).code == 0x0001);

  auto [st, msg1] = user_round1(sys.pp, Toy::Scalar::from_u64(3), small_y<Toy>(2), rng);
  msg1.proof.t_w1 = msg1.proof.t_w1 + Toy::Scalar::one();
  const auto rejected = exchange_raw(ep, encode_frame(Frame{BackendId::kToy, MsgType::kIssueRequest, encode(msg1)}));
  CHECK(decode_error_payload(rejected.payload).code == 0x0002);

  const auto theta = Toy::Scalar::from_u64(4242);
  const auto key = request_key(sys.pp, theta, small_y<Toy>(2), ep, rng);
  CHECK(verify_key(sys.pp, key, {small_y<Toy>(2), theta}));

  REQUIRE(wait_for_sessions(svc.log(), 4));
  CHECK(svc.log().count(SessionOutcome::kMalformed) == 2);
  CHECK(svc.log().count(SessionOutcome::kProofRejected) == 1);
  CHECK(svc.log().count(SessionOutcome::kIssued) == 1);
  for (const auto& r : svc.log().snapshot()) CHECK(r.finished >= r.started);
}

TEST_CASE("client surfaces remote errors") {
  SystemRng rng;
  const auto sys = setup<Toy>(2, rng);
  const auto other = setup<Toy>(3, rng);
  KgcService<Toy> svc(sys.pp, sys.msk, ServiceOptions{});
  // Params of the wrong dimension produce a request the KGC refuses.
  try {
    (void)request_key(other.pp, Toy::Scalar::one(), small_y<Toy>(3), svc.endpoint(), rng);
    FAIL("expected a remote error");
  } catch (const RemoteError& e) {
    CHECK(e.code() == 0x0001);
  }
  // A backend mismatch is caught on the client before decoding the reply.
  const auto curve = setup<Curve>(2, rng);
  CHECK_THROWS_AS(request_key(curve.pp, Curve::Scalar::one(), small_y<Curve>(2), svc.endpoint(), rng), FrameError);
}

TEST_CASE("concurrent clients each receive their own key") {
  SystemRng rng;
  const auto sys = setup<Toy>(3, rng);
  KgcService<Toy> svc(sys.pp, sys.msk, ServiceOptions{{"127.0.0.1", 0}, 4, 10000ms});
  constexpr int kClients = 8;
  std::vector<Toy::Scalar> thetas;
  for (int i = 0; i < kClients; ++i) thetas.push_back(Toy::Scalar::from_u64(1000 + 17 * i));
  std::vector<std::optional<FunctionalKey<Toy>>> keys(kClients);
  std::atomic<int> failures{0};
  {
    std::vector<std::jthread> clients;
    for (int i = 0; i < kClients; ++i)
      clients.emplace_back([&, i] {
        try {
          SystemRng local;
          keys[i] = request_key(sys.pp, thetas[i], small_y<Toy>(3), svc.endpoint(), local);
        } catch (...) {
          ++failures;
        }
      });
  }
  REQUIRE(failures.load() == 0);
  for (int i = 0; i < kClients; ++i) {
    REQUIRE(keys[i]);
    CHECK(verify_key(sys.pp, *keys[i], {small_y<Toy>(3), thetas[i]}));
    CHECK(trace(sys.pp, sys.tsk, *keys[i], std::span(thetas)) == thetas[i]);
  }
  REQUIRE(wait_for_sessions(svc.log(), kClients));
  CHECK(svc.log().count(SessionOutcome::kIssued) == kClients);
  std::vector<std::uint64_t> ids;
  for (const auto& r : svc.log().snapshot()) ids.push_back(r.id);
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("good and bad clients interleaved concurrently") {
  SystemRng rng;
  const auto sys = setup<Toy>(2, rng);
  KgcService<Toy> svc(sys.pp, sys.msk, ServiceOptions{});
  std::atomic<int> good_ok{0}, bad_ok{0};
  {
    std::vector<std::jthread> clients;
    for (int i = 0; i < 12; ++i)
      clients.emplace_back([&, i] {
        SystemRng local;
        if (i % 2 == 0) {
          const auto theta = Toy::Scalar::from_u64(500 + i);
          const auto key = request_key(sys.pp, theta, small_y<Toy>(2), svc.endpoint(), local);
          if (verify_key(sys.pp, key, {small_y<Toy>(2), theta})) ++good_ok;
        } else {
          const auto reply = exchange_raw(svc.endpoint(), Bytes(32, static_cast<std::uint8_t>(i)));
          if (reply.type == MsgType::kError) ++bad_ok;
        }
      });
  }
  CHECK(good_ok.load() == 6);
  CHECK(bad_ok.load() == 6);
}

TEST_CASE("a KGC that tampers with its response is caught by the user") {
  SystemRng rng;
  const auto sys = setup<Toy>(2, rng);
  Listener listener(Endpoint{"127.0.0.1", 0});
  std::jthread server([&] {
    auto sock = listener.accept_for(5000ms);
    if (!sock) return;
    const auto req = read_frame(*sock, BackendId::kToy);
    SystemRng srng;
    auto msg1 = decode_all(req.payload, [](ByteReader& r) { return read_msg1<Toy>(r); });
    auto msg2 = kgc_respond(sys.pp, sys.msk, msg1, srng);
    msg2.b2 = msg2.b2 * Toy::Element::generator();
    write_frame(*sock, Frame{BackendId::kToy, MsgType::kIssueResponse, encode(msg2)});
  });
  try {
    (void)request_key(sys.pp, Toy::Scalar::from_u64(8), small_y<Toy>(2), Endpoint{"127.0.0.1", listener.port()},
                      rng);
    FAIL("tampered response accepted");
  } catch (const IssuanceError& e) {
    CHECK(e.stage() == IssuanceStage::kKgcProof);
  }
}

TEST_CASE("service options from the environment") {
  ::setenv("PPTFE_LISTEN", "127.0.0.1:9123", 1);
  ::setenv("PPTFE_MAX_SESSIONS", "3", 1);
  const auto o = options_from_env(ServiceOptions{});
  CHECK(o.listen.port == 9123);
  CHECK(o.max_sessions == 3);
  ::setenv("PPTFE_MAX_SESSIONS", "0", 1);
  CHECK_THROWS(options_from_env(ServiceOptions{}));
  ::unsetenv("PPTFE_LISTEN");
  ::unsetenv("PPTFE_MAX_SESSIONS");
  const auto d = options_from_env(ServiceOptions{});
  CHECK(d.listen.port == 0);
  CHECK(d.max_sessions == 16);
}

TEST_CASE("stopping the service with no traffic returns promptly") {
  SystemRng rng;
  const auto sys = setup<Toy>(1, rng);
  const auto t0 = std::chrono::steady_clock::now();
  {
    KgcService<Toy> svc(sys.pp, sys.msk, ServiceOptions{});
    CHECK(svc.port() != 0);
  }
  CHECK(std::chrono::steady_clock::now() - t0 < 2s);
}
