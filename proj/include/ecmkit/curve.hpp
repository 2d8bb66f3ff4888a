#pragma once

// Elliptic-curve arithmetic modulo a composite N: affine and projective
// Weierstrass forms y^2 = x^3 + ax + b, and x-only Montgomery form
// by^2 = x^3 + ax^2 + x. All arithmetic is mod N; a failed inversion is how a
// factor of N shows up.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ecmkit/bigmod.hpp"
#include "ecmkit/rng.hpp"

namespace ecmkit {

struct WeierstrassCurve {
  Modulus n;
  Residue a;
  Residue b;
};

/// A point on a Weierstrass curve, or the point at infinity I.
class AffinePoint {
 public:
  static AffinePoint infinity() { return AffinePoint(); }
  AffinePoint(Residue x, Residue y) : coords_(std::in_place, std::move(x), std::move(y)) {}

  [[nodiscard]] bool is_infinity() const { return !coords_.has_value(); }
  [[nodiscard]] const Residue& x() const { return coords_->first; }
  [[nodiscard]] const Residue& y() const { return coords_->second; }

  friend bool operator==(const AffinePoint& p, const AffinePoint& q) {
    if (p.is_infinity() || q.is_infinity()) return p.is_infinity() == q.is_infinity();
    return p.x() == q.x() && p.y() == q.y();
  }

 private:
  AffinePoint() = default;
  std::optional<std::pair<Residue, Residue>> coords_;
};

inline bool on_curve(const AffinePoint& p, const WeierstrassCurve& c) {
  if (p.is_infinity()) return true;
  const Natural& n = c.n.value();
  Natural lhs = p.y().value() * p.y().value();
  Natural rhs = p.x().value() * p.x().value() * p.x().value() + c.a.value() * p.x().value() + c.b.value();
  return ((lhs - rhs) % n) == 0;
}

namespace detail {

// Inversion that treats a zero residue as the trivial factor N instead of a
// caller error; inside the group law a zero denominator means exactly that.
inline Outcome<Residue> invert_in_group(const Residue& t, WorkLedger& ledger) {
  if (t.is_zero()) {
    ++ledger.inversions;
    return FactorEvent{t.n()};
  }
  return inv_mod(t, ledger);
}

}  // namespace detail

/// The group law. Distinct x costs (3+K) units, doubling (4+K).
/// When x1 = x2 but y1 != +-y2 (only possible mod a composite) the doubling
/// branch is taken; whatever inversion fails there is reported.
inline Outcome<AffinePoint> add(const AffinePoint& p1, const AffinePoint& p2,
                                const WeierstrassCurve& c, WorkLedger& ledger) {
  if (p1.is_infinity()) return p2;
  if (p2.is_infinity()) return p1;
  const Residue& x1 = p1.x();
  const Residue& y1 = p1.y();
  const Residue& x2 = p2.x();
  const Residue& y2 = p2.y();

  if (x1 == x2 && y1 == neg_mod(y2)) return AffinePoint::infinity();

  Residue lambda = x1;
  if (x1 == x2) {
    const Residue num = add_mod(mul_small(sqr_mod(x1, ledger), 3), c.a);
    auto inv = detail::invert_in_group(mul_small(y1, 2), ledger);
    if (inv.has_factor()) return inv.factor();
    lambda = mul_mod(inv.value(), num, ledger);
  } else {
    auto inv = detail::invert_in_group(sub_mod(x1, x2), ledger);
    if (inv.has_factor()) return inv.factor();
    lambda = mul_mod(inv.value(), sub_mod(y1, y2), ledger);
  }
  Residue x3 = sub_mod(sub_mod(sqr_mod(lambda, ledger), x1), x2);
  Residue y3 = sub_mod(detail::mul_plain(lambda, sub_mod(x1, x3), ledger), y1);
  return AffinePoint(std::move(x3), std::move(y3));
}

inline AffinePoint negate(const AffinePoint& p) {
  if (p.is_infinity()) return p;
  return AffinePoint(p.x(), neg_mod(p.y()));
}

/// k-fold group combination by left-to-right binary powering.
inline Outcome<AffinePoint> scalar_mul(const AffinePoint& p, const Natural& k,
                                       const WeierstrassCurve& c, WorkLedger& ledger) {
  if (k < 0) throw std::invalid_argument("negative multiplier");
  if (sgn(k) == 0 || p.is_infinity()) return AffinePoint::infinity();
  const auto bits = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 2));
  AffinePoint acc = p;
  for (long i = bits - 2; i >= 0; --i) {
    auto d = add(acc, acc, c, ledger);
    if (d.has_factor()) return d;
    acc = std::move(d).value();
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0) {
      auto s = add(acc, p, c, ledger);
      if (s.has_factor()) return s;
      acc = std::move(s).value();
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Projective coordinates (x/z, y/z). No inversions; a factor shows up later
// as gcd(z, N) > 1.

struct ProjectivePoint {
  Residue x;
  Residue y;
  Residue z;

  static ProjectivePoint from_affine(const AffinePoint& p, const Modulus& n) {
    if (p.is_infinity()) return {n(0), n(1), n(0)};
    return {p.x(), p.y(), n(1)};
  }

  [[nodiscard]] bool is_infinity() const { return z.is_zero(); }
};

namespace detail {

inline Residue times_coeff(const Residue& v, const Residue& coeff, WorkLedger& ledger) {
  // Coefficients that fit a machine word count as single-precision products.
  if (mpz_fits_slong_p(coeff.value().get_mpz_t()) != 0) return mul_small(v, coeff.value().get_si());
  return mul_plain(v, coeff, ledger);
}

// Co-z doubling: 12 multiplications when the curve coefficient a is small.
inline ProjectivePoint double_projective(const ProjectivePoint& p, const WeierstrassCurve& c,
                                         WorkLedger& ledger) {
  const Residue xx = sqr_mod(p.x, ledger);
  const Residue zz = sqr_mod(p.z, ledger);
  const Residue num = add_mod(mul_small(xx, 3), times_coeff(zz, c.a, ledger));
  const Residue d = mul_small(mul_plain(p.y, p.z, ledger), 2);
  const Residue dd = sqr_mod(d, ledger);
  const Residue ddd = mul_plain(dd, d, ledger);
  const Residue nn = sqr_mod(num, ledger);
  const Residue xdd = mul_plain(p.x, dd, ledger);
  const Residue a_term = sub_mod(mul_plain(nn, p.z, ledger), mul_small(xdd, 2));
  Residue x3 = mul_plain(a_term, d, ledger);
  Residue z3 = mul_plain(ddd, p.z, ledger);
  Residue y3 = sub_mod(mul_plain(num, sub_mod(xdd, a_term), ledger), mul_plain(p.y, ddd, ledger));
  return {std::move(x3), std::move(y3), std::move(z3)};
}

// Co-z addition of points with equal z and distinct x: 9 multiplications.
inline ProjectivePoint add_coz(const ProjectivePoint& p1, const ProjectivePoint& p2,
                               WorkLedger& ledger) {
  const Residue u = sub_mod(p1.y, p2.y);
  const Residue v = sub_mod(p1.x, p2.x);
  const Residue w = sqr_mod(v, ledger);
  const Residue c1 = mul_plain(p1.x, w, ledger);
  const Residue c2 = mul_plain(p2.x, w, ledger);
  const Residue t = sub_mod(c1, c2);  // v^3
  const Residue uu = sqr_mod(u, ledger);
  const Residue a_term = sub_mod(sub_mod(mul_plain(uu, p1.z, ledger), c1), c2);
  Residue x3 = mul_plain(v, a_term, ledger);
  Residue y3 = sub_mod(mul_plain(u, sub_mod(c1, a_term), ledger), mul_plain(p1.y, t, ledger));
  Residue z3 = mul_plain(p1.z, t, ledger);
  return {std::move(x3), std::move(y3), std::move(z3)};
}

}  // namespace detail

/// Brings two points to a common z. Costs 2 units when the second point has
/// z = 1 (the usual case: a fixed base point), 5 otherwise, 0 if already equal.
inline std::pair<ProjectivePoint, ProjectivePoint> co_normalize(const ProjectivePoint& p1,
                                                                const ProjectivePoint& p2,
                                                                WorkLedger& ledger) {
  if (p1.z == p2.z) return {p1, p2};
  if (p2.z.is_one()) {
    return {p1, {detail::mul_plain(p2.x, p1.z, ledger), detail::mul_plain(p2.y, p1.z, ledger), p1.z}};
  }
  if (p1.z.is_one()) {
    return {{detail::mul_plain(p1.x, p2.z, ledger), detail::mul_plain(p1.y, p2.z, ledger), p2.z}, p2};
  }
  Residue z = detail::mul_plain(p1.z, p2.z, ledger);
  return {{detail::mul_plain(p1.x, p2.z, ledger), detail::mul_plain(p1.y, p2.z, ledger), z},
          {detail::mul_plain(p2.x, p1.z, ledger), detail::mul_plain(p2.y, p1.z, ledger), z}};
}

/// Inversion-free group law: 12 units to double, 9 to add co-z points, plus
/// the co-normalisation cost when the z coordinates differ.
inline ProjectivePoint add_projective(const ProjectivePoint& p1, const ProjectivePoint& p2,
                                      const WeierstrassCurve& c, WorkLedger& ledger) {
  if (p1.is_infinity()) return p2;
  if (p2.is_infinity()) return p1;
  if (&p1 == &p2) return detail::double_projective(p1, c, ledger);
  auto [q1, q2] = co_normalize(p1, p2, ledger);
  if (q1.x == q2.x) {
    if (q1.y == neg_mod(q2.y)) return {c.n(0), c.n(1), c.n(0)};
    return detail::double_projective(q1, c, ledger);
  }
  return detail::add_coz(q1, q2, ledger);
}

/// (x/z, y/z) with one inversion; a z sharing a factor with N is reported.
inline Outcome<AffinePoint> normalize(const ProjectivePoint& p, WorkLedger& ledger) {
  if (p.is_infinity()) return AffinePoint::infinity();
  auto inv = inv_mod(p.z, ledger);
  if (inv.has_factor()) return inv.factor();
  return AffinePoint(detail::mul_plain(p.x, inv.value(), ledger),
                     detail::mul_plain(p.y, inv.value(), ledger));
}

inline ProjectivePoint scalar_mul_projective(const AffinePoint& p, const Natural& k,
                                             const WeierstrassCurve& c, WorkLedger& ledger) {
  const ProjectivePoint base = ProjectivePoint::from_affine(p, c.n);
  if (sgn(k) == 0 || p.is_infinity()) return {c.n(0), c.n(1), c.n(0)};
  const auto bits = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 2));
  ProjectivePoint acc = base;
  for (long i = bits - 2; i >= 0; --i) {
    acc = add_projective(acc, acc, c, ledger);
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0) acc = add_projective(acc, base, c, ledger);
  }
  return acc;
}

/// Random point (x, y) and single-precision a; b is forced so the point lies
/// on the curve. The discriminant is not checked.
inline std::pair<WeierstrassCurve, AffinePoint> random_curve_through_point(const Natural& n,
                                                                           Rng& rng) {
  if (n < 5) throw std::invalid_argument("curve modulus must be at least 5");
  const Modulus mod(n);
  Residue x = random_residue(mod, rng);
  Residue y = random_residue(mod, rng);
  Residue a = mod(static_cast<long>(rng() >> 33));
  // b = y^2 - x^3 - a x; setup arithmetic, not charged to a trial.
  Natural b = y.value() * y.value() - x.value() * x.value() * x.value() - a.value() * x.value();
  WeierstrassCurve c{mod, a, mod(b)};
  return {std::move(c), AffinePoint(std::move(x), std::move(y))};
}

// ---------------------------------------------------------------------------
// Montgomery form by^2 = x^3 + ax^2 + x, x-only arithmetic.

struct MontgomeryCurve {
  Modulus n;
  Residue a;
  Residue b;
  Residue a24;  // (a + 2) / 4
};

/// The x-coordinate X/Z of a Montgomery-curve point; Z = 0 is the identity.
struct XZPoint {
  Residue x;
  Residue z;
};

inline XZPoint xz_double(const XZPoint& p, const MontgomeryCurve& c, WorkLedger& ledger) {
  const Residue ss = sqr_mod(add_mod(p.x, p.z), ledger);
  const Residue dd = sqr_mod(sub_mod(p.x, p.z), ledger);
  const Residue t = sub_mod(ss, dd);
  Residue x2 = detail::mul_plain(ss, dd, ledger);
  Residue z2 = detail::mul_plain(t, add_mod(dd, detail::mul_plain(c.a24, t, ledger)), ledger);
  return {std::move(x2), std::move(z2)};
}

/// x(P + Q) from x(P), x(Q) and x(P - Q). 5 units when diff has z = 1.
inline XZPoint xz_add(const XZPoint& p, const XZPoint& q, const XZPoint& diff, WorkLedger& ledger) {
  const Residue u = detail::mul_plain(sub_mod(p.x, p.z), add_mod(q.x, q.z), ledger);
  const Residue v = detail::mul_plain(add_mod(p.x, p.z), sub_mod(q.x, q.z), ledger);
  Residue sum2 = sqr_mod(add_mod(u, v), ledger);
  Residue dif2 = sqr_mod(sub_mod(u, v), ledger);
  Residue x = diff.z.is_one() ? std::move(sum2) : detail::mul_plain(diff.z, sum2, ledger);
  Residue z = detail::mul_plain(diff.x, dif2, ledger);
  return {std::move(x), std::move(z)};
}

/// Ladder returning both kP and (k+1)P, as needed by recover_point.
inline std::pair<XZPoint, XZPoint> xz_ladder_pair(const XZPoint& p, const Natural& k, const MontgomeryCurve& c,
                                                  WorkLedger& ledger) {
  if (k < 1) throw std::invalid_argument("ladder multiplier must be at least 1");
  XZPoint r0 = p;
  XZPoint r1 = xz_double(p, c, ledger);
  const auto bits = static_cast<long>(mpz_sizeinbase(k.get_mpz_t(), 2));
  for (long i = bits - 2; i >= 0; --i) {
    if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0) {
      r0 = xz_add(r1, r0, p, ledger);
      r1 = xz_double(r1, c, ledger);
    } else {
      r1 = xz_add(r0, r1, p, ledger);
      r0 = xz_double(r0, c, ledger);
    }
  }
  return {std::move(r0), std::move(r1)};
}

/// Montgomery ladder: one doubling and one differential addition per bit,
/// 10 units per bit for a normalised input.
inline XZPoint xz_ladder(const XZPoint& p, const Natural& k, const MontgomeryCurve& c,
                         WorkLedger& ledger) {
  if (k == 1) return p;
  return xz_ladder_pair(p, k, c, ledger).first;
}

/// Full point kP on by^2 = x^3 + ax^2 + x from x(kP), x((k+1)P) and the affine
/// base point P = (xp, yp) (Okeya-Sakurai). The three denominators share one
/// inversion.
inline Outcome<AffinePoint> recover_point(const MontgomeryCurve& c, const Residue& xp, const Residue& yp,
                                          const XZPoint& q, const XZPoint& q_next, WorkLedger& ledger) {
  if (q.z.is_zero()) return AffinePoint::infinity();
  if (q_next.z.is_zero()) return AffinePoint(xp, neg_mod(yp));  // kP = -P
  const Residue two_by = mul_small(detail::mul_plain(c.b, yp, ledger), 2);
  if (two_by.is_zero()) return FactorEvent{c.n.value()};
  const std::vector<Residue> den{q.z, q_next.z, two_by};
  auto inv = batch_inverse(den, ledger);
  if (inv.has_factor()) return inv.factor();
  const auto& iv = inv.value();
  const Residue x1 = detail::mul_plain(q.x, iv[0], ledger);
  const Residue x2 = detail::mul_plain(q_next.x, iv[1], ledger);
  const Residue two_a = mul_small(c.a, 2);
  const Residue t1 = detail::mul_plain(add_mod(detail::mul_plain(x1, xp, ledger), c.n(1)),
                                       add_mod(add_mod(x1, xp), two_a), ledger);
  const Residue t2 = detail::mul_plain(sqr_mod(sub_mod(x1, xp), ledger), x2, ledger);
  Residue y1 = detail::mul_plain(sub_mod(sub_mod(t1, two_a), t2), iv[2], ledger);
  return AffinePoint(x1, std::move(y1));
}

/// Suyama's parameterisation: u = s^2 - 5, v = 4s, x0 = u^3 / v^3,
/// (a + 2) / 4 = (v - u)^3 (3u + v) / (16 u^3 v). The group order mod every
/// prime p | N is divisible by 12. Returns a normalised starting point; b is
/// chosen so the point has y = 1.
inline Outcome<std::pair<MontgomeryCurve, XZPoint>> suyama_curve(const Natural& sigma,
                                                                 const Natural& n,
                                                                 WorkLedger& ledger) {
  if (sigma == 0 || sigma == 1 || sigma == 3 || sigma == 5)
    throw std::invalid_argument("Suyama sigma must avoid 0, 1, 3 and 5");
  const Modulus mod(n);
  const Residue s = mod(sigma);
  const Residue u = sub_mod(sqr_mod(s, ledger), mod(5));
  const Residue v = mul_small(s, 4);
  const Residue u3 = detail::mul_plain(sqr_mod(u, ledger), u, ledger);
  const Residue v3 = detail::mul_plain(sqr_mod(v, ledger), v, ledger);
  const Residue den = mul_small(detail::mul_plain(u3, v, ledger), 16);
  // One inversion serves both denominators.
  const Residue both = detail::mul_plain(den, v3, ledger);
  auto inv = detail::invert_in_group(both, ledger);
  if (inv.has_factor()) return inv.factor();
  const Residue inv_den = detail::mul_plain(inv.value(), v3, ledger);
  const Residue inv_v3 = detail::mul_plain(inv.value(), den, ledger);
  const Residue vmu = sub_mod(v, u);
  const Residue num =
      detail::mul_plain(detail::mul_plain(sqr_mod(vmu, ledger), vmu, ledger), add_mod(mul_small(u, 3), v), ledger);
  Residue a24 = detail::mul_plain(num, inv_den, ledger);
  Residue a = sub_mod(mul_small(a24, 4), mod(2));
  Residue x0 = detail::mul_plain(u3, inv_v3, ledger);
  const Residue x2 = sqr_mod(x0, ledger);
  Residue b = add_mod(add_mod(detail::mul_plain(x2, x0, ledger), detail::mul_plain(a, x2, ledger)), x0);
  MontgomeryCurve curve{mod, std::move(a), std::move(b), std::move(a24)};
  return std::pair{std::move(curve), XZPoint{std::move(x0), mod(1)}};
}

/// Random a and x0 over Z/N; b follows from putting the point at y = 1.
inline std::pair<MontgomeryCurve, XZPoint> random_montgomery_curve(const Natural& n, Rng& rng,
                                                                   WorkLedger& ledger) {
  if (n < 5 || mpz_even_p(n.get_mpz_t()) != 0) throw std::invalid_argument("odd modulus >= 5 required");
  const Modulus mod(n);
  Residue a = random_residue(mod, rng);
  while (a == mod(2) || a == mod(-2)) a = random_residue(mod, rng);
  Residue x0 = random_residue(mod, rng);
  const Natural half = (n + 1) / 2;
  const Residue inv4 = mod(half * half);
  Residue a24 = detail::mul_plain(add_mod(a, mod(2)), inv4, ledger);
  const Residue x2 = sqr_mod(x0, ledger);
  Residue b = add_mod(add_mod(detail::mul_plain(x2, x0, ledger), detail::mul_plain(a, x2, ledger)), x0);
  MontgomeryCurve curve{mod, std::move(a), std::move(b), std::move(a24)};
  return {std::move(curve), XZPoint{std::move(x0), mod(1)}};
}

/// Birational map (x, y) -> (x/b + a/(3b), y/b) onto
/// Y^2 = X^3 + (3 - a^2)/(3b^2) X + (2a^3 - 9a)/(27b^3).
inline Outcome<std::pair<WeierstrassCurve, AffinePoint>> montgomery_to_weierstrass(
    const MontgomeryCurve& c, const Residue& x, const Residue& y, WorkLedger& ledger) {
  const Modulus& mod = c.n;
  auto inv = detail::invert_in_group(mul_small(c.b, 3), ledger);
  if (inv.has_factor()) return inv.factor();
  const Residue inv3b = inv.value();
  const Residue invb = mul_small(inv3b, 3);
  const Residue aa = sqr_mod(c.a, ledger);
  const Residue inv3b2 = detail::mul_plain(inv3b, invb, ledger);  // 1/(3b^2)
  Residue big_a = detail::mul_plain(sub_mod(mod(3), aa), inv3b2, ledger);
  const Residue inv27b3 = detail::mul_plain(sqr_mod(inv3b, ledger), inv3b, ledger);
  const Residue a3 = detail::mul_plain(aa, c.a, ledger);
  Residue big_b = detail::mul_plain(sub_mod(mul_small(a3, 2), mul_small(c.a, 9)), inv27b3, ledger);
  Residue px = add_mod(detail::mul_plain(x, invb, ledger), detail::mul_plain(c.a, inv3b, ledger));
  Residue py = detail::mul_plain(y, invb, ledger);
  WeierstrassCurve w{mod, std::move(big_a), std::move(big_b)};
  return std::pair{std::move(w), AffinePoint(std::move(px), std::move(py))};
}

// ---------------------------------------------------------------------------
// Brute-force point counting over a small prime field (test oracle scale).

namespace detail {

inline std::vector<std::uint32_t> square_root_counts(std::uint64_t p) {
  std::vector<std::uint32_t> cnt(p, 0);
  for (std::uint64_t y = 0; y < p; ++y) ++cnt[(y * y) % p];
  return cnt;
}

inline std::uint64_t small_prime_of(const Modulus& n) {
  const std::uint64_t p = to_u64(n.value());
  if (p < 5 || p > (1ULL << 24)) throw std::invalid_argument("brute-force counting needs 5 <= p <= 2^24");
  return p;
}

}  // namespace detail

/// |G| for y^2 = x^3 + ax + b over a prime field, by counting square roots.
inline std::uint64_t group_order_bruteforce(const WeierstrassCurve& c) {
  const std::uint64_t p = detail::small_prime_of(c.n);
  const std::uint64_t a = to_u64(c.a.value());
  const std::uint64_t b = to_u64(c.b.value());
  const std::uint64_t disc = (4 * (a * a % p) % p * a + 27 * (b * b % p)) % p;
  if (disc == 0) throw std::invalid_argument("singular curve");
  const auto cnt = detail::square_root_counts(p);
  std::uint64_t total = 1;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t f = ((x * x % p) * x + a * x + b) % p;
    total += cnt[f];
  }
  return total;
}

/// |G| for by^2 = x^3 + ax^2 + x over a prime field.
inline std::uint64_t montgomery_order_bruteforce(const MontgomeryCurve& c) {
  const std::uint64_t p = detail::small_prime_of(c.n);
  const std::uint64_t a = to_u64(c.a.value());
  const std::uint64_t b = to_u64(c.b.value());
  if (b == 0 || (a * a) % p == 4) throw std::invalid_argument("singular curve");
  const Natural binv_n = [&] {
    Natural r;
    mpz_invert(r.get_mpz_t(), c.b.value().get_mpz_t(), c.n.value().get_mpz_t());
    return r;
  }();
  const std::uint64_t binv = to_u64(binv_n);
  const auto cnt = detail::square_root_counts(p);
  std::uint64_t total = 1;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t f = (((x * x % p) * x) % p + (a * (x * x % p)) % p + x) % p;
    total += cnt[f * binv % p];
  }
  return total;
}

}  // namespace ecmkit
