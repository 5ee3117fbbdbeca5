#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>

namespace pptfe {

// Baby-step/giant-step: smallest n in [0, bound] with base^n == target.
// O(sqrt(bound)) multiplications and table entries; uses only group
// multiplication and inversion, never exponentiation.
template <class Gt>
std::optional<std::uint64_t> dlog_bsgs(const Gt& base, const Gt& target, std::uint64_t bound) {
  if (bound == 0) return target.is_identity() ? std::optional<std::uint64_t>(0) : std::nullopt;
  auto step = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<long double>(bound) + 1)));
  while (step * step < bound + 1) ++step;

  auto key = [](const Gt& v) {
    const auto bytes = v.to_bytes();
    return std::string(bytes.begin(), bytes.end());
  };

  std::unordered_map<std::string, std::uint64_t> baby;
  baby.reserve(step);
  Gt cur = Gt::identity();
  for (std::uint64_t j = 0; j < step; ++j) {
    baby.emplace(key(cur), j);  // keeps the smallest j on collision
    cur = cur * base;
  }
  const Gt giant = cur.inverse();  // base^-step

  Gt gamma = target;
  for (std::uint64_t i = 0; i <= bound / step; ++i) {
    if (auto it = baby.find(key(gamma)); it != baby.end()) {
      const std::uint64_t n = i * step + it->second;
      if (n <= bound) return n;
      return std::nullopt;
    }
    gamma = gamma * giant;
  }
  return std::nullopt;
}

}  // namespace pptfe
