#include "pptfe/curve_group.hpp"

#include <algorithm>
#include <cstring>

namespace pptfe {

// ---- scalar ---------------------------------------------------------------

CurveScalar::CurveScalar() { std::memset(&v_, 0, sizeof(v_)); }

CurveScalar CurveScalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  CurveScalar out;
  blst_fr_from_uint64(&out.v_, limbs);
  return out;
}

CurveScalar CurveScalar::from_i64(std::int64_t v) {
  const auto mag = from_u64(v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v));
  return v < 0 ? -mag : mag;
}

CurveScalar CurveScalar::random(Rng& rng) {
  // 512 bits reduced mod r; the bias is far below 2^-128.
  std::uint8_t wide[64];
  rng.fill(wide);
  blst_scalar s;
  blst_scalar_from_be_bytes(&s, wide, sizeof(wide));
  CurveScalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

CurveScalar CurveScalar::from_digest(const Digest& digest) {
  blst_scalar s;
  blst_scalar_from_be_bytes(&s, digest.data(), digest.size());
  CurveScalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

bool CurveScalar::is_zero() const { return *this == CurveScalar(); }

std::optional<std::uint64_t> CurveScalar::to_u64() const {
  const auto be = to_bytes();
  if (!std::all_of(be.begin(), be.end() - 8, [](std::uint8_t b) { return b == 0; })) return std::nullopt;
  std::uint64_t v = 0;
  for (std::size_t i = kBytes - 8; i < kBytes; ++i) v = (v << 8) | be[i];
  return v;
}

CurveScalar operator+(const CurveScalar& a, const CurveScalar& b) {
  CurveScalar out;
  blst_fr_add(&out.v_, &a.v_, &b.v_);
  return out;
}

CurveScalar operator-(const CurveScalar& a, const CurveScalar& b) {
  CurveScalar out;
  blst_fr_sub(&out.v_, &a.v_, &b.v_);
  return out;
}

CurveScalar operator*(const CurveScalar& a, const CurveScalar& b) {
  CurveScalar out;
  blst_fr_mul(&out.v_, &a.v_, &b.v_);
  return out;
}

CurveScalar CurveScalar::operator-() const {
  CurveScalar out;
  blst_fr_cneg(&out.v_, &v_, true);
  return out;
}

bool CurveScalar::operator==(const CurveScalar& o) const { return std::memcmp(&v_, &o.v_, sizeof(v_)) == 0; }

CurveScalar CurveScalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero scalar");
  CurveScalar out;
  blst_fr_eucl_inverse(&out.v_, &v_);
  return out;
}

std::array<std::uint8_t, CurveScalar::kBytes> CurveScalar::to_bytes() const {
  blst_scalar s;
  blst_scalar_from_fr(&s, &v_);
  std::array<std::uint8_t, kBytes> out{};
  blst_bendian_from_scalar(out.data(), &s);
  return out;
}

CurveScalar CurveScalar::from_bytes(ByteView in) {
  if (in.size() != kBytes) throw DecodeError("wrong scalar width");
  blst_scalar s;
  blst_scalar_from_bendian(&s, in.data());
  if (!blst_scalar_fr_check(&s)) throw DecodeError("scalar not reduced");
  CurveScalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

blst_scalar CurveScalar::to_blst() const {
  blst_scalar s;
  blst_scalar_from_fr(&s, &v_);
  return s;
}

// ---- source group (dual pair) ---------------------------------------------

CurveElement::CurveElement() {
  std::memset(&p1_, 0, sizeof(p1_));
  std::memset(&p2_, 0, sizeof(p2_));
}

CurveElement CurveElement::generator() {
  CurveElement out;
  out.p1_ = *blst_p1_generator();
  out.p2_ = *blst_p2_generator();
  return out;
}

CurveElement CurveElement::random(Rng& rng) { return generator().pow_uncounted(Scalar::random(rng)); }

bool CurveElement::is_identity() const { return blst_p1_is_inf(&p1_) && blst_p2_is_inf(&p2_); }

CurveElement operator*(const CurveElement& a, const CurveElement& b) {
  CurveElement out;
  blst_p1_add_or_double(&out.p1_, &a.p1_, &b.p1_);
  blst_p2_add_or_double(&out.p2_, &a.p2_, &b.p2_);
  return out;
}

CurveElement CurveElement::inverse() const {
  CurveElement out = *this;
  blst_p1_cneg(&out.p1_, true);
  blst_p2_cneg(&out.p2_, true);
  return out;
}

CurveElement CurveElement::pow_uncounted(const Scalar& k) const {
  const blst_scalar s = k.to_blst();
  CurveElement out;
  blst_p1_mult(&out.p1_, &p1_, s.b, 255);
  blst_p2_mult(&out.p2_, &p2_, s.b, 255);
  return out;
}

CurveElement CurveElement::pow(const Scalar& k) const {
  ++op_counts().exps;
  return pow_uncounted(k);
}

bool CurveElement::operator==(const CurveElement& o) const {
  return blst_p1_is_equal(&p1_, &o.p1_) && blst_p2_is_equal(&p2_, &o.p2_);
}

std::array<std::uint8_t, CurveElement::kBytes> CurveElement::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  blst_p1_compress(out.data(), &p1_);
  blst_p2_compress(out.data() + 48, &p2_);
  return out;
}

CurveElement CurveElement::from_bytes(ByteView in) {
  if (in.size() != kBytes) throw DecodeError("wrong element width");
  blst_p1_affine a1;
  blst_p2_affine a2;
  if (blst_p1_uncompress(&a1, in.data()) != BLST_SUCCESS || !blst_p1_affine_in_g1(&a1))
    throw DecodeError("invalid G1 half");
  if (blst_p2_uncompress(&a2, in.data() + 48) != BLST_SUCCESS || !blst_p2_affine_in_g2(&a2))
    throw DecodeError("invalid G2 half");

  CurveElement out;
  blst_p1_from_affine(&out.p1_, &a1);
  blst_p2_from_affine(&out.p2_, &a2);
  if (!std::equal(in.begin(), in.end(), out.to_bytes().begin())) throw DecodeError("non-canonical element encoding");

  // Both halves must share one discrete log: e(P, g2) == e(g1, Q).
  blst_fp12 lhs;
  blst_fp12 rhs;
  blst_miller_loop(&lhs, blst_p2_affine_generator(), &a1);
  blst_miller_loop(&rhs, &a2, blst_p1_affine_generator());
  if (!blst_fp12_finalverify(&lhs, &rhs)) throw DecodeError("element halves have different exponents");
  return out;
}

// ---- target group -----------------------------------------------------------

CurveGt::CurveGt() : v_(*blst_fp12_one()) {}

CurveGt CurveGt::from_fp12(const blst_fp12& v) {
  CurveGt out;
  out.v_ = v;
  return out;
}

bool CurveGt::is_identity() const { return blst_fp12_is_one(&v_); }

CurveGt operator*(const CurveGt& a, const CurveGt& b) {
  CurveGt out;
  blst_fp12_mul(&out.v_, &a.v_, &b.v_);
  return out;
}

// Elements live in the cyclotomic subgroup, where the inverse is the conjugate.
CurveGt CurveGt::inverse() const {
  CurveGt out = *this;
  blst_fp12_conjugate(&out.v_);
  return out;
}

CurveGt CurveGt::pow(const Scalar& k) const {
  ++op_counts().gt_exps;
  const auto be = k.to_bytes();
  CurveGt acc;
  bool started = false;
  for (std::uint8_t byte : be) {
    for (int bit = 7; bit >= 0; --bit) {
      if (started) blst_fp12_cyclotomic_sqr(&acc.v_, &acc.v_);
      if ((byte >> bit) & 1) {
        blst_fp12_mul(&acc.v_, &acc.v_, &v_);
        started = true;
      }
    }
  }
  return acc;
}

bool CurveGt::operator==(const CurveGt& o) const { return blst_fp12_is_equal(&v_, &o.v_); }

std::array<std::uint8_t, CurveGt::kBytes> CurveGt::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  std::uint8_t* cursor = out.data();
  for (const auto& f6 : v_.fp6)
    for (const auto& f2 : f6.fp2)
      for (const auto& f : f2.fp) {
        blst_bendian_from_fp(cursor, &f);
        cursor += 48;
      }
  return out;
}

CurveGt CurveGt::from_bytes(ByteView in) {
  if (in.size() != kBytes) throw DecodeError("wrong target-group width");
  CurveGt out;
  const std::uint8_t* cursor = in.data();
  for (auto& f6 : out.v_.fp6)
    for (auto& f2 : f6.fp2)
      for (auto& f : f2.fp) {
        blst_fp_from_bendian(&f, cursor);
        cursor += 48;
      }
  if (!std::equal(in.begin(), in.end(), out.to_bytes().begin())) throw DecodeError("non-canonical field element");
  if (!blst_fp12_in_group(&out.v_)) throw DecodeError("not in the target group");
  return out;
}

CurveGt CurveGroup::pair(const CurveElement& x, const CurveElement& y) {
  ++op_counts().pairings;
  blst_p1_affine a;
  blst_p2_affine b;
  blst_p1_to_affine(&a, &x.g1_half());
  blst_p2_to_affine(&b, &y.g2_half());
  blst_fp12 ml;
  blst_fp12 out;
  blst_miller_loop(&ml, &b, &a);
  blst_final_exp(&out, &ml);
  return CurveGt::from_fp12(out);
}

}  // namespace pptfe
