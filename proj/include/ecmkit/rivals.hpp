#pragma once

// Competing methods on the same accounting: Brent's variant of Pollard rho,
// and Pollard p-1 whose second phase is the same birthday walk, run in
// (Z/N)^* instead of on a curve.

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "ecmkit/bigmod.hpp"
#include "ecmkit/phase2.hpp"
#include "ecmkit/primegen.hpp"
#include "ecmkit/rng.hpp"
#include "ecmkit/trial.hpp"

namespace ecmkit {

// Differences accumulated between gcds in the rho loop.
inline constexpr std::uint64_t kRhoBatch = 128;

/// Brent's cycle finding on x <- x^2 + c. A gcd equal to N backtracks one
/// step at a time; if that also yields N, c is redrawn. iterations counts
/// applications of the map.
inline TrialOutcome pollard_rho(const Natural& n, std::uint64_t seed, std::uint64_t max_iters) {
  if (n < 4) throw std::invalid_argument("pollard_rho needs N >= 4");
  TrialOutcome out;
  if (mpz_even_p(n.get_mpz_t()) != 0) return TrialOutcome::found(2, 0);
  Rng rng = make_stream(seed, 0);
  mpz_class y, x, ys, q, g, c, t;
  const auto step = [&](mpz_class& v) {
    mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
    mpz_add(v.get_mpz_t(), v.get_mpz_t(), c.get_mpz_t());
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    ++out.ledger.squarings;
    ++out.iterations;
  };

  while (out.iterations < max_iters) {
    c = 1 + random_below(n - 3, rng);
    y = random_below(n, rng);
    q = 1;
    g = 1;
    std::uint64_t r = 1;
    while (g == 1 && out.iterations < max_iters) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) step(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += kRhoBatch) {
        ys = y;
        const std::uint64_t lim = std::min(kRhoBatch, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          step(y);
          t = x - y;
          q *= t;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
          ++out.ledger.multiplications;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      r *= 2;
    }
    if (g == 1) break;
    if (g == n) {
      do {
        step(ys);
        t = x - ys;
        mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) {
      out.status = TrialStatus::factor_found;
      out.divisor = g;
      return out;
    }
  }
  return out;
}

/// a^E mod N over the schedule, then gcd(a^E - 1, N).
inline Outcome<Residue> pminus1_phase1(const Residue& a, const PrimePowerSchedule& s, WorkLedger& ledger) {
  const Natural& n = a.n();
  if (gcd(a.value(), n) != 1) throw std::invalid_argument("p-1 base must be coprime to N");
  Residue q = a;
  for (const auto& e : s.entries) q = pow_mod(q, natural_from_u64(e.power), ledger);
  Natural g = gcd(sub_mod(q, a.modulus()(1)).value(), n);
  if (g != 1) return FactorEvent{std::move(g)};
  return q;
}

/// Birthday walk in <Q> inside (Z/N)^*, then gcd(N, prod_{i<j} (Q_i - Q_j)).
inline Phase2Result pminus1_birthday_phase2(const Residue& q, std::size_t r, Rng& rng, WorkLedger& ledger,
                                            unsigned window_bits = kWalkWindowBits) {
  if (q.is_one()) throw std::invalid_argument("p-1 phase 2 needs Q != 1");
  if (r < 2) throw std::invalid_argument("phase 2 needs r >= 2");
  MultiplicativeGroup g{q.modulus()};
  auto walk = random_walk(g, q, r, rng, ledger, window_bits);
  if (walk.has_factor()) return detail::from_event(walk.factor(), q.n());
  const Residue d = pairwise_product(walk.value(), ledger);
  return detail::classify_product(d, walk.value());
}

/// One p-1 trial: random base on stream (seed, index), phase 1, then phase 2
/// with walk length r (skipped when r < 2).
inline TrialOutcome pminus1_trial(const Natural& n, const PrimePowerSchedule& s, std::size_t r, std::uint64_t seed,
                                  std::uint64_t index, unsigned window_bits = kWalkWindowBits) {
  Rng rng = make_stream(seed, index);
  const Modulus mod(n);
  TrialOutcome out;
  const Residue a = mod(2 + random_below(n - 3, rng));
  Natural g = gcd(a.value(), n);
  if (g != 1) {
    out = TrialOutcome::found(std::move(g), 1);
    return out;
  }
  auto q = pminus1_phase1(a, s, out.ledger);
  if (q.has_factor()) {
    WorkLedger l = out.ledger;
    out = classify(q.factor(), n, 1);
    out.ledger = l;
    return out;
  }
  if (r < 2) return out;
  const Phase2Result p2 = pminus1_birthday_phase2(q.value(), r, rng, out.ledger, window_bits);
  if (p2.status == Phase2Status::factor) {
    out.status = TrialStatus::factor_found;
    out.divisor = p2.divisor;
    out.phase = 2;
  } else if (p2.status == Phase2Status::trivial) {
    out.status = TrialStatus::trivial;
    out.divisor = n;
    out.phase = 2;
  }
  return out;
}

}  // namespace ecmkit
