#include "pptfe/keystore.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pptfe {

const char* to_string(ArtifactType type) noexcept {
  switch (type) {
    case ArtifactType::kParams: return "params";
    case ArtifactType::kMasterSecret: return "master-secret";
    case ArtifactType::kTracerSecret: return "tracer-secret";
    case ArtifactType::kKey: return "key";
    case ArtifactType::kCiphertext: return "ciphertext";
    case ArtifactType::kRegistry: return "registry";
  }
  return "unknown";
}

Bytes seal_artifact(ArtifactType type, BackendId backend, std::uint32_t dim, ByteView body) {
  ByteWriter w;
  w.put(ByteView(reinterpret_cast<const std::uint8_t*>(kArtifactMagic), sizeof(kArtifactMagic)));
  w.put_u8(static_cast<std::uint8_t>(type));
  w.put_u8(static_cast<std::uint8_t>(backend));
  w.put_u32(dim);
  w.put(body);
  const Digest digest = sha256(w.bytes());
  w.put(digest);
  return std::move(w).take();
}

OpenedArtifact open_artifact(ByteView file) {
  if (file.size() < kArtifactHeaderBytes + 32) throw CorruptionError("artifact too short");
  if (!std::equal(std::begin(kArtifactMagic), std::end(kArtifactMagic), file.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
    throw CorruptionError("bad artifact magic");
  const auto covered = file.first(file.size() - 32);
  const Digest digest = sha256(covered);
  if (!std::equal(digest.begin(), digest.end(), file.end() - 32)) throw CorruptionError("artifact digest mismatch");

  ByteReader r(covered.subspan(8));
  OpenedArtifact out;
  out.header.type = r.get_u8();
  const std::uint8_t backend = r.get_u8();
  if (backend != static_cast<std::uint8_t>(BackendId::kToy) && backend != static_cast<std::uint8_t>(BackendId::kCurve))
    throw CorruptionError("unknown backend id in artifact");
  out.header.backend = static_cast<BackendId>(backend);
  out.header.dim = r.get_u32();
  const auto body = r.take(r.remaining());
  out.body.assign(body.begin(), body.end());
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return data;
}

void write_file(const std::filesystem::path& path, ByteView data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string() + ": " + std::strerror(errno));
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
}

ArtifactHeader peek_artifact(const std::filesystem::path& path) { return open_artifact(read_file(path)).header; }

}  // namespace pptfe
