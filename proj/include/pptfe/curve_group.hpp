#pragma once

// BLS12-381 backend over blst. The scheme is written for a single source group,
// so each Element carries a synchronized pair (P in G1, Q in G2) with the same
// discrete log w.r.t. the standard generators; e(x, y) := e(x.P, y.Q). Every
// group operation is applied to both halves, and decoding rejects pairs whose
// halves disagree.

#include <array>
#include <cstdint>
#include <optional>

#include <blst.h>

#include "pptfe/group.hpp"

namespace pptfe {

class CurveScalar {
 public:
  static constexpr std::size_t kBytes = 32;

  CurveScalar();

  static CurveScalar zero() { return CurveScalar(); }
  static CurveScalar one() { return from_u64(1); }
  static CurveScalar from_u64(std::uint64_t v);
  static CurveScalar from_i64(std::int64_t v);
  static CurveScalar random(Rng& rng);
  static CurveScalar from_digest(const Digest& digest);

  bool is_zero() const;
  std::optional<std::uint64_t> to_u64() const;

  friend CurveScalar operator+(const CurveScalar& a, const CurveScalar& b);
  friend CurveScalar operator-(const CurveScalar& a, const CurveScalar& b);
  friend CurveScalar operator*(const CurveScalar& a, const CurveScalar& b);
  CurveScalar operator-() const;
  bool operator==(const CurveScalar& o) const;

  CurveScalar inverse() const;

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static CurveScalar from_bytes(ByteView in);

  // Little-endian form blst's point multiplication expects.
  blst_scalar to_blst() const;

 private:
  blst_fr v_;
};

class CurveElement {
 public:
  using Scalar = CurveScalar;
  static constexpr std::size_t kBytes = 48 + 96;  // compressed G1 || compressed G2

  CurveElement();  // identity

  static CurveElement identity() { return CurveElement(); }
  static CurveElement generator();
  static CurveElement random(Rng& rng);

  bool is_identity() const;

  friend CurveElement operator*(const CurveElement& a, const CurveElement& b);
  friend CurveElement operator/(const CurveElement& a, const CurveElement& b) { return a * b.inverse(); }
  CurveElement inverse() const;
  CurveElement pow(const Scalar& k) const;
  bool operator==(const CurveElement& o) const;

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static CurveElement from_bytes(ByteView in);

  const blst_p1& g1_half() const { return p1_; }
  const blst_p2& g2_half() const { return p2_; }

 private:
  CurveElement pow_uncounted(const Scalar& k) const;

  blst_p1 p1_;
  blst_p2 p2_;
};

class CurveGt {
 public:
  using Scalar = CurveScalar;
  static constexpr std::size_t kBytes = 12 * 48;

  CurveGt();  // identity

  static CurveGt identity() { return CurveGt(); }
  static CurveGt from_fp12(const blst_fp12& v);

  bool is_identity() const;

  friend CurveGt operator*(const CurveGt& a, const CurveGt& b);
  friend CurveGt operator/(const CurveGt& a, const CurveGt& b) { return a * b.inverse(); }
  CurveGt inverse() const;
  CurveGt pow(const Scalar& k) const;
  bool operator==(const CurveGt& o) const;

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static CurveGt from_bytes(ByteView in);

 private:
  blst_fp12 v_;
};

struct CurveGroup {
  static constexpr BackendId kId = BackendId::kCurve;
  using Scalar = CurveScalar;
  using Element = CurveElement;
  using Gt = CurveGt;

  static Gt pair(const Element& x, const Element& y);
};

using Curve = CurveGroup;

}  // namespace pptfe
