#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's arithmetic, so agreement is meaningful.

#include <openssl/sha.h>

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  for (; e; e >>= 1, b = mulmod(b, b, m))
    if (e & 1) r = mulmod(r, b, m);
  return r;
}

// Trial division; fine for the small moduli used here.
inline bool prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline u64 smallest_field(u64 p) {
  for (u64 k = 1;; ++k)
    if (prime(k * p + 1)) return k * p + 1;
}

inline u64 inv(u64 a, u64 p) { return powmod(a, p - 2, p); }

inline u64 modp(std::int64_t v, u64 p) {
  const auto m = static_cast<std::int64_t>(p);
  return static_cast<u64>(((v % m) + m) % m);
}

// SHA-256(tag || 0x00 || msg) as a big-endian integer, reduced mod p.
inline u64 hash_mod(const std::string& tag, const std::vector<std::uint8_t>& msg, u64 p) {
  std::vector<std::uint8_t> buf(tag.begin(), tag.end());
  buf.push_back(0);
  buf.insert(buf.end(), msg.begin(), msg.end());
  unsigned char d[SHA256_DIGEST_LENGTH];
  SHA256(buf.data(), buf.size(), d);
  u64 acc = 0;
  for (unsigned char b : d) acc = static_cast<u64>((static_cast<u128>(acc) * 256 + b) % p);
  return acc;
}

inline std::int64_t dot(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace oracle
