#pragma once

// The tracer's label <-> identity table. Insertion order is preserved and is
// the order candidates are tried during tracing.

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pptfe/bytes.hpp"
#include "pptfe/errors.hpp"
#include "pptfe/group.hpp"

namespace pptfe {

class RegistryConflict : public Error {
 public:
  explicit RegistryConflict(const std::string& what) : Error(ErrorFamily::kUsage, what) {}
};

inline constexpr std::size_t kMaxLabelBytes = 1024;
inline constexpr std::size_t kMaxRegistryEntries = 1 << 20;

template <PairingGroup G>
class IdentityRegistry {
 public:
  using Scalar = typename G::Scalar;

  struct Entry {
    std::string label;
    Scalar theta;
    bool operator==(const Entry&) const = default;
  };

  void register_identity(std::string label, const Scalar& theta) {
    if (theta.is_zero()) throw IdentityDomainError("identity must be nonzero");
    if (label.empty() || label.size() > kMaxLabelBytes) throw RegistryConflict("label must be 1..1024 bytes");
    const auto key = theta_key(theta);
    if (by_theta_.contains(key)) throw RegistryConflict("identity already registered");
    if (by_label_.contains(label)) throw RegistryConflict("label '" + label + "' already registered");
    by_theta_.emplace(key, entries_.size());
    by_label_.emplace(label, entries_.size());
    entries_.push_back({std::move(label), theta});
  }

  std::optional<std::string> resolve(const Scalar& theta) const {
    const auto it = by_theta_.find(theta_key(theta));
    if (it == by_theta_.end()) return std::nullopt;
    return entries_[it->second].label;
  }

  std::optional<Scalar> lookup(std::string_view label) const {
    const auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return entries_[it->second].theta;
  }

  std::vector<Scalar> candidates() const {
    std::vector<Scalar> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.theta);
    return out;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const IdentityRegistry& o) const { return entries_ == o.entries_; }

  Bytes to_bytes() const {
    ByteWriter w;
    w.put_u32(static_cast<std::uint32_t>(entries_.size()));
    for (const auto& e : entries_) {
      w.put_u16(static_cast<std::uint16_t>(e.label.size()));
      w.put(as_bytes(e.label));
      w.put_value(e.theta);
    }
    return std::move(w).take();
  }

 private:
  static std::string theta_key(const Scalar& theta) {
    const auto b = theta.to_bytes();
    return std::string(b.begin(), b.end());
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> by_theta_;
  std::unordered_map<std::string, std::size_t> by_label_;
};

template <PairingGroup G>
void write(ByteWriter& w, const IdentityRegistry<G>& reg) {
  w.put(reg.to_bytes());
}

template <PairingGroup G>
IdentityRegistry<G> read_registry(ByteReader& r) {
  IdentityRegistry<G> reg;
  const std::uint32_t n = r.get_u32();
  if (n > kMaxRegistryEntries) throw DecodeError("registry too large");
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint16_t len = r.get_u16();
    const auto label = r.take(len);
    auto theta = r.get_value<typename G::Scalar>();
    try {
      reg.register_identity(std::string(label.begin(), label.end()), theta);
    } catch (const Error& e) {
      throw DecodeError(std::string("invalid registry entry: ") + e.what());
    }
  }
  return reg;
}

}  // namespace pptfe
