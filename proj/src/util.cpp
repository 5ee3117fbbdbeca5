#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>

#include "pptfe/bytes.hpp"
#include "pptfe/errors.hpp"
#include "pptfe/group.hpp"
#include "pptfe/hash.hpp"
#include "pptfe/rng.hpp"

namespace pptfe {

const char* to_string(IssuanceStage stage) noexcept {
  switch (stage) {
    case IssuanceStage::kKgcProof: return "kgc-proof";
    case IssuanceStage::kPairingCheck: return "pairing-check";
    case IssuanceStage::kKeyCheck: return "key-check";
  }
  return "unknown";
}

std::string_view to_string(BackendId id) {
  switch (id) {
    case BackendId::kToy: return "toy";
    case BackendId::kCurve: return "curve";
  }
  return "unknown";
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Digest sha256(std::initializer_list<ByteView> parts) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  for (auto part : parts)
    if (!part.empty() && EVP_DigestUpdate(ctx.get(), part.data(), part.size()) != 1)
      throw std::runtime_error("sha256 update failed");
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
    throw std::runtime_error("sha256 final failed");
  return out;
}

void SystemRng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) throw std::runtime_error("RAND_bytes failed");
}

}  // namespace pptfe
