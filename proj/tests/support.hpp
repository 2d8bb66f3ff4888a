#pragma once

// Helpers shared by the unit tests and the acceptance runner: small-prime
// oracles and instances with a planted subgroup modulo one prime factor.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ecmkit/bigmod.hpp"
#include "ecmkit/curve.hpp"
#include "ecmkit/rng.hpp"

namespace ecmkit::testing {

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline Natural next_prime(const Natural& from) {
  Natural p;
  mpz_nextprime(p.get_mpz_t(), from.get_mpz_t());
  return p;
}

// x with x = a mod p and x = b mod q.
inline Natural crt(const Natural& a, const Natural& p, const Natural& b, const Natural& q) {
  Natural pinv;
  mpz_invert(pinv.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  Natural t = ((b - a) % q + q) % q;
  t = (t * pinv) % q;
  return a + p * t;
}

// Order of a point on a curve over a small prime field, by repeated addition.
inline std::uint64_t point_order(const AffinePoint& p, const WeierstrassCurve& c, std::uint64_t limit) {
  if (p.is_infinity()) return 1;
  WorkLedger l;
  AffinePoint acc = p;
  for (std::uint64_t k = 1; k <= limit; ++k) {
    if (acc.is_infinity()) return k;
    auto next = add(acc, p, c, l);
    if (next.has_factor()) return 0;
    acc = std::move(next).value();
  }
  return 0;
}

// All affine points of a curve over a small prime field.
inline std::vector<AffinePoint> enumerate_points(const WeierstrassCurve& c) {
  const std::uint64_t p = to_u64(c.n.value());
  std::vector<std::vector<std::uint64_t>> roots(p);
  for (std::uint64_t y = 0; y < p; ++y) roots[(y * y) % p].push_back(y);
  const std::uint64_t a = to_u64(c.a.value()), b = to_u64(c.b.value());
  std::vector<AffinePoint> out;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t rhs = ((x * x % p) * x + a * x + b) % p;
    for (std::uint64_t y : roots[rhs]) out.emplace_back(c.n(natural_from_u64(x)), c.n(natural_from_u64(y)));
  }
  return out;
}

// A curve mod N = p q and a point whose reduction mod p has exactly the
// order n1 found on a curve over F_p; mod q the curve is random.
struct PlantedCurve {
  WeierstrassCurve curve;
  AffinePoint point;
  Natural p;
  std::uint64_t order_mod_p = 0;
};

inline std::optional<PlantedCurve> plant_curve(std::uint64_t p, const Natural& q, std::uint64_t min_order,
                                               std::uint64_t max_order, Rng& rng) {
  const Modulus mp(natural_from_u64(p));
  for (int attempt = 0; attempt < 200; ++attempt) {
    const std::uint64_t a = rng() % p, b = rng() % p;
    if ((4 * a % p * a % p * a + 27 * b % p * b) % p == 0) continue;
    WeierstrassCurve cp{mp, mp(natural_from_u64(a)), mp(natural_from_u64(b))};
    const auto pts = enumerate_points(cp);
    if (pts.empty()) continue;
    const AffinePoint& pt = pts[rng() % pts.size()];
    const std::uint64_t ord = point_order(pt, cp, 2 * p + 2);
    if (ord < min_order || ord > max_order) continue;

    const Natural P = natural_from_u64(p);
    const Natural N = P * q;
    const Modulus mn(N);
    const Natural xq = random_below(q, rng), yq = random_below(q, rng);
    const Natural aq = natural_from_u64(a);  // same single-word a on both sides
    const Natural x = crt(pt.x().value(), P, xq, q);
    const Natural y = crt(pt.y().value(), P, yq, q);
    const Residue X = mn(x), Y = mn(y), A = mn(aq);
    WorkLedger l;
    const Residue B = sub_mod(sub_mod(sqr_mod(Y, l), mul_mod(sqr_mod(X, l), X, l)), mul_mod(A, X, l));
    PlantedCurve out{WeierstrassCurve{mn, A, B}, AffinePoint(X, Y), P, ord};
    return out;
  }
  return std::nullopt;
}

// An element of (Z/N)^*, N = p q, of order exactly n1 mod p (n1 | p-1) and
// random mod q.
inline Residue plant_residue(const Natural& p, std::uint64_t n1, const Natural& q, Rng& rng) {
  const Natural cof = (p - 1) / natural_from_u64(n1);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t d = 2, m = n1; d <= m; ++d) {
    if (m % d) continue;
    primes.push_back(d);
    while (m % d == 0) m /= d;
  }
  Natural h, t;
  for (bool exact = false; !exact;) {
    const Natural g = 2 + random_below(p - 3, rng);
    mpz_powm(h.get_mpz_t(), g.get_mpz_t(), cof.get_mpz_t(), p.get_mpz_t());
    exact = true;
    for (auto l : primes) {
      const Natural e = natural_from_u64(n1 / l);
      mpz_powm(t.get_mpz_t(), h.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
      if (t == 1) exact = false;
    }
  }
  const Natural other = 2 + random_below(q - 3, rng);
  return Modulus(p * q)(crt(h, p, other, q));
}

}  // namespace ecmkit::testing
