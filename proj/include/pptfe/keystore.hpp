#pragma once

// On-disk artifacts:
//   "PPTFEIP1" | type (u8) | backend (u8) | dim (u32 BE) | body | SHA-256(all preceding)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "pptfe/codec.hpp"
#include "pptfe/registry.hpp"

namespace pptfe {

enum class ArtifactType : std::uint8_t {
  kParams = 1,
  kMasterSecret = 2,
  kTracerSecret = 3,
  kKey = 4,
  kCiphertext = 5,
  kRegistry = 6,
};

const char* to_string(ArtifactType type) noexcept;

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorFamily::kFormat, what) {}
};

// Digest mismatch, bad magic, or a body that does not parse.
class CorruptionError : public Error {
 public:
  explicit CorruptionError(const std::string& what) : Error(ErrorFamily::kFormat, what) {}
};

class ArtifactTypeError : public Error {
 public:
  ArtifactTypeError(ArtifactType expected, std::uint8_t found)
      : Error(ErrorFamily::kFormat, std::string("expected ") + to_string(expected) + " artifact, found type " +
                                        std::to_string(found)) {}
};

// Header backend or dimension disagrees with the caller or the body.
class ArtifactMismatchError : public Error {
 public:
  explicit ArtifactMismatchError(const std::string& what) : Error(ErrorFamily::kFormat, what) {}
};

inline constexpr char kArtifactMagic[8] = {'P', 'P', 'T', 'F', 'E', 'I', 'P', '1'};
inline constexpr std::size_t kArtifactHeaderBytes = 8 + 1 + 1 + 4;

struct ArtifactHeader {
  std::uint8_t type = 0;
  BackendId backend = BackendId::kToy;
  std::uint32_t dim = 0;
};

struct OpenedArtifact {
  ArtifactHeader header;
  Bytes body;
};

Bytes seal_artifact(ArtifactType type, BackendId backend, std::uint32_t dim, ByteView body);
// Verifies magic, digest and backend byte; does not interpret the body.
OpenedArtifact open_artifact(ByteView file);

Bytes read_file(const std::filesystem::path& path);
// Writes through a temporary file and rename.
void write_file(const std::filesystem::path& path, ByteView data);

// Header of a file on disk, used to pick the backend before typed loading.
ArtifactHeader peek_artifact(const std::filesystem::path& path);

template <class T>
struct ArtifactTraits;

template <PairingGroup G>
struct ArtifactTraits<PublicParams<G>> {
  static constexpr ArtifactType kType = ArtifactType::kParams;
  static std::optional<std::size_t> dim(const PublicParams<G>& v) { return v.dim(); }
  static PublicParams<G> read(ByteReader& r) { return read_public_params<G>(r); }
};

template <PairingGroup G>
struct ArtifactTraits<MasterSecretKey<G>> {
  static constexpr ArtifactType kType = ArtifactType::kMasterSecret;
  static std::optional<std::size_t> dim(const MasterSecretKey<G>& v) { return v.s.size(); }
  static MasterSecretKey<G> read(ByteReader& r) { return read_master_secret<G>(r); }
};

template <PairingGroup G>
struct ArtifactTraits<TracerSecret<G>> {
  static constexpr ArtifactType kType = ArtifactType::kTracerSecret;
  static std::optional<std::size_t> dim(const TracerSecret<G>&) { return std::nullopt; }
  static TracerSecret<G> read(ByteReader& r) { return read_tracer_secret<G>(r); }
};

template <PairingGroup G>
struct ArtifactTraits<FunctionalKey<G>> {
  static constexpr ArtifactType kType = ArtifactType::kKey;
  static std::optional<std::size_t> dim(const FunctionalKey<G>&) { return std::nullopt; }
  static FunctionalKey<G> read(ByteReader& r) { return read_functional_key<G>(r); }
};

template <PairingGroup G>
struct ArtifactTraits<Ciphertext<G>> {
  static constexpr ArtifactType kType = ArtifactType::kCiphertext;
  static std::optional<std::size_t> dim(const Ciphertext<G>& v) { return v.body.size(); }
  static Ciphertext<G> read(ByteReader& r) { return read_ciphertext<G>(r); }
};

template <PairingGroup G>
struct ArtifactTraits<IdentityRegistry<G>> {
  static constexpr ArtifactType kType = ArtifactType::kRegistry;
  static std::optional<std::size_t> dim(const IdentityRegistry<G>&) { return std::nullopt; }
  static IdentityRegistry<G> read(ByteReader& r) { return read_registry<G>(r); }
};

template <class T>
concept Artifact = requires { ArtifactTraits<T>::kType; };

// `dim` is the params dimension the artifact belongs to. Types that carry
// their own dimension must agree with it.
template <PairingGroup G, Artifact T>
Bytes serialize_artifact(const T& value, std::uint32_t dim) {
  if (const auto inherent = ArtifactTraits<T>::dim(value); inherent && *inherent != dim)
    throw DimensionError("artifact dimension " + std::to_string(*inherent) + " does not match " +
                         std::to_string(dim));
  return seal_artifact(ArtifactTraits<T>::kType, G::kId, dim, encode(value));
}

template <PairingGroup G, Artifact T>
T deserialize_artifact(ByteView file, std::optional<std::uint32_t> expected_dim = std::nullopt) {
  const auto opened = open_artifact(file);
  if (opened.header.type != static_cast<std::uint8_t>(ArtifactTraits<T>::kType))
    throw ArtifactTypeError(ArtifactTraits<T>::kType, opened.header.type);
  if (opened.header.backend != G::kId)
    throw ArtifactMismatchError(std::string("artifact is for backend ") + std::string(to_string(opened.header.backend)));
  if (expected_dim && opened.header.dim != *expected_dim)
    throw ArtifactMismatchError("artifact dimension " + std::to_string(opened.header.dim) + ", expected " +
                                std::to_string(*expected_dim));
  T value;
  try {
    value = decode_all(opened.body, [](ByteReader& r) { return ArtifactTraits<T>::read(r); });
  } catch (const DecodeError& e) {
    throw CorruptionError(std::string("artifact body does not parse: ") + e.what());
  }
  if (const auto inherent = ArtifactTraits<T>::dim(value); inherent && *inherent != opened.header.dim)
    throw ArtifactMismatchError("header dimension disagrees with body");
  return value;
}

template <PairingGroup G, Artifact T>
void save_artifact(const std::filesystem::path& path, const T& value, std::uint32_t dim) {
  write_file(path, serialize_artifact<G>(value, dim));
}

template <PairingGroup G, Artifact T>
T load_artifact(const std::filesystem::path& path, std::optional<std::uint32_t> expected_dim = std::nullopt) {
  return deserialize_artifact<G, T>(read_file(path), expected_dim);
}

}  // namespace pptfe
