#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <openssl/sha.h>

#include "pptfe/curve_group.hpp"
#include "pptfe/keystore.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("pptfe_ks_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

template <PairingGroup G>
struct Fixture {
  SetupOutput<G> sys;
  std::vector<typename G::Scalar> y;
  typename G::Scalar theta;
  FunctionalKey<G> key;
  Ciphertext<G> ct;
  IdentityRegistry<G> reg;

  explicit Fixture(std::uint64_t seed) {
    SeededRng rng(seed);
    if constexpr (std::is_same_v<G, Toy>) {
      sys = setup<G>(3, rng);
    } else {
      SystemRng srng;
      sys = setup<G>(3, srng);
    }
    y = {G::Scalar::from_u64(1), G::Scalar::from_u64(2), G::Scalar::from_u64(3)};
    theta = G::Scalar::from_u64(77);
    key = keygen(sys.pp, sys.msk, {y, theta}, rng);
    ct = encrypt(sys.pp, {G::Scalar::from_u64(4), G::Scalar::from_u64(5), G::Scalar::from_u64(6)}, rng);
    reg.register_identity("alice", theta);
    reg.register_identity("bob", G::Scalar::from_u64(78));
  }
};

template <PairingGroup G, Artifact T>
void round_trip(const fs::path& dir, const std::string& name, const T& value) {
  const auto path = dir / name;
  save_artifact<G>(path, value, 3);
  const auto first = read_file(path);
  const auto loaded = load_artifact<G, T>(path, 3);
  CHECK(loaded == value);
  save_artifact<G>(dir / (name + ".again"), loaded, 3);
  CHECK(read_file(dir / (name + ".again")) == first);
}

}  // namespace

TEST_CASE_TEMPLATE("every artifact type round-trips byte for byte", G, Toy, Curve) {
  TempDir tmp;
  Fixture<G> f(11);
  round_trip<G>(tmp.path, "params", f.sys.pp);
  round_trip<G>(tmp.path, "msk", f.sys.msk);
  round_trip<G>(tmp.path, "tsk", f.sys.tsk);
  round_trip<G>(tmp.path, "key", f.key);
  round_trip<G>(tmp.path, "ct", f.ct);
  round_trip<G>(tmp.path, "reg", f.reg);

  // Loaded artifacts are usable together.
  const auto pp = load_artifact<G, PublicParams<G>>(tmp.path / "params");
  const auto key = load_artifact<G, FunctionalKey<G>>(tmp.path / "key");
  const auto ct = load_artifact<G, Ciphertext<G>>(tmp.path / "ct");
  CHECK(decrypt(pp, key, {f.y, f.theta}, ct) == 32);
}

TEST_CASE("header layout and digest trailer") {
  Fixture<Toy> f(12);
  const auto bytes = serialize_artifact<Toy>(f.ct, 3);
  REQUIRE(bytes.size() > kArtifactHeaderBytes + SHA256_DIGEST_LENGTH);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "PPTFEIP1");
  CHECK(bytes[8] == 5);
  CHECK(bytes[9] == static_cast<std::uint8_t>(BackendId::kToy));
  CHECK(bytes[10] == 0);
  CHECK(bytes[13] == 3);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(bytes.data(), bytes.size() - SHA256_DIGEST_LENGTH, digest);
  CHECK(std::equal(digest, digest + SHA256_DIGEST_LENGTH, bytes.end() - SHA256_DIGEST_LENGTH));
  const auto peek = open_artifact(bytes).header;
  CHECK(peek.type == 5);
  CHECK(peek.dim == 3);
}

TEST_CASE_TEMPLATE("any flipped byte is detected", G, Toy, Curve) {
  Fixture<G> f(13);
  const auto bytes = serialize_artifact<G>(f.key, 3);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    auto bad = bytes;
    bad[i] ^= 0x01;
    CHECK_THROWS_AS((deserialize_artifact<G, FunctionalKey<G>>(bad)), Error);
  }
  auto bad = bytes;
  bad[kArtifactHeaderBytes + 2] ^= 0x80;
  CHECK_THROWS_AS((deserialize_artifact<G, FunctionalKey<G>>(bad)), CorruptionError);
  bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS((deserialize_artifact<G, FunctionalKey<G>>(bad)), CorruptionError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS((deserialize_artifact<G, FunctionalKey<G>>(bad)), CorruptionError);
  CHECK_THROWS_AS((deserialize_artifact<G, FunctionalKey<G>>(Bytes(10))), CorruptionError);
}

TEST_CASE("a valid digest over an unparseable body is still corruption") {
  const auto sealed = seal_artifact(ArtifactType::kKey, BackendId::kToy, 3, Bytes{1, 2, 3});
  CHECK_THROWS_AS((deserialize_artifact<Toy, FunctionalKey<Toy>>(sealed)), CorruptionError);
}

TEST_CASE("wrong type, backend or dimension") {
  TempDir tmp;
  Fixture<Toy> f(14);
  save_artifact<Toy>(tmp.path / "key", f.key, 3);
  CHECK_THROWS_AS((load_artifact<Toy, Ciphertext<Toy>>(tmp.path / "key")), ArtifactTypeError);
  CHECK_THROWS_AS((load_artifact<Toy, PublicParams<Toy>>(tmp.path / "key")), ArtifactTypeError);
  CHECK_THROWS_AS((load_artifact<Curve, FunctionalKey<Curve>>(tmp.path / "key")), ArtifactMismatchError);
  CHECK_THROWS_AS((load_artifact<Toy, FunctionalKey<Toy>>(tmp.path / "key", 4)), ArtifactMismatchError);
  CHECK(peek_artifact(tmp.path / "key").backend == BackendId::kToy);

  // Inherent dimension must match the declared one on both save and load.
  CHECK_THROWS_AS(serialize_artifact<Toy>(f.sys.pp, 4), DimensionError);
  const auto forged = seal_artifact(ArtifactType::kParams, BackendId::kToy, 4, encode(f.sys.pp));
  CHECK_THROWS_AS((deserialize_artifact<Toy, PublicParams<Toy>>(forged)), ArtifactMismatchError);

  const auto unknown_backend = seal_artifact(ArtifactType::kKey, static_cast<BackendId>(0x42), 3, encode(f.key));
  CHECK_THROWS_AS(open_artifact(unknown_backend), Error);

  CHECK_THROWS_AS(read_file(tmp.path / "missing"), IoError);
  CHECK_THROWS_AS(write_file(tmp.path / "no" / "such" / "dir", Bytes{1}), IoError);
}

TEST_CASE("error families map to the format exit code") {
  CHECK(CorruptionError("x").family() == ErrorFamily::kFormat);
  CHECK(ArtifactTypeError(ArtifactType::kKey, 5).family() == ErrorFamily::kFormat);
  CHECK(ArtifactMismatchError("x").family() == ErrorFamily::kFormat);
  CHECK(IoError("x").family() == ErrorFamily::kFormat);
  CHECK(RegistryConflict("x").family() == ErrorFamily::kUsage);
}

TEST_CASE("registry uniqueness and lookups") {
  IdentityRegistry<Toy> reg;
  reg.register_identity("alice", Toy::Scalar::from_u64(10));
  CHECK_THROWS_AS(reg.register_identity("alice", Toy::Scalar::from_u64(11)), RegistryConflict);
  CHECK_THROWS_AS(reg.register_identity("carol", Toy::Scalar::from_u64(10)), RegistryConflict);
  CHECK_THROWS_AS(reg.register_identity("zero", Toy::Scalar::zero()), IdentityDomainError);
  CHECK_THROWS_AS(reg.register_identity("", Toy::Scalar::from_u64(12)), RegistryConflict);
  CHECK_THROWS_AS(reg.register_identity(std::string(1025, 'x'), Toy::Scalar::from_u64(12)), RegistryConflict);
  CHECK_NOTHROW(reg.register_identity(std::string(1024, 'x'), Toy::Scalar::from_u64(12)));
  CHECK(reg.size() == 2);
  CHECK(reg.resolve(Toy::Scalar::from_u64(10)) == "alice");
  CHECK_FALSE(reg.resolve(Toy::Scalar::from_u64(13)));
  CHECK(reg.lookup("alice") == Toy::Scalar::from_u64(10));
  CHECK_FALSE(reg.lookup("nobody"));
  CHECK(reg.candidates() == std::vector{Toy::Scalar::from_u64(10), Toy::Scalar::from_u64(12)});
}

TEST_CASE("registry: a thousand insert and lookup cycles through disk") {
  TempDir tmp;
  SystemRng rng;
  IdentityRegistry<Curve> reg;
  std::vector<std::pair<std::string, Curve::Scalar>> expected;
  for (int i = 0; i < 1000; ++i) {
    auto theta = Curve::Scalar::random(rng);
    while (theta.is_zero()) theta = Curve::Scalar::random(rng);
    const std::string label = "user-" + std::to_string(i);
    reg.register_identity(label, theta);
    expected.emplace_back(label, theta);
  }
  save_artifact<Curve>(tmp.path / "reg", reg, 2);
  const auto loaded = load_artifact<Curve, IdentityRegistry<Curve>>(tmp.path / "reg");
  REQUIRE(loaded.size() == 1000);
  for (const auto& [label, theta] : expected) {
    REQUIRE(loaded.resolve(theta) == label);
    REQUIRE(loaded.lookup(label) == theta);
  }
  CHECK(loaded == reg);
}

TEST_CASE("registry bodies with duplicates are rejected on load") {
  ByteWriter w;
  w.put_u32(2);
  for (int i = 0; i < 2; ++i) {
    w.put_u16(1);
    w.put(Bytes{'a'});
    w.put_value(Toy::Scalar::from_u64(5 + i));
  }
  const auto body = std::move(w).take();
  const auto sealed = seal_artifact(ArtifactType::kRegistry, BackendId::kToy, 1, body);
  CHECK_THROWS_AS((deserialize_artifact<Toy, IdentityRegistry<Toy>>(sealed)), CorruptionError);
}

TEST_CASE_TEMPLATE("trace then resolve returns the holder's label", G, Toy, Curve) {
  TempDir tmp;
  Fixture<G> f(15);
  save_artifact<G>(tmp.path / "reg", f.reg, 3);
  save_artifact<G>(tmp.path / "key", f.key, 3);
  const auto reg = load_artifact<G, IdentityRegistry<G>>(tmp.path / "reg");
  const auto key = load_artifact<G, FunctionalKey<G>>(tmp.path / "key");
  const auto cands = reg.candidates();
  const auto hit = trace(f.sys.pp, f.sys.tsk, key, std::span(cands));
  REQUIRE(hit);
  CHECK(reg.resolve(*hit) == "alice");
}
