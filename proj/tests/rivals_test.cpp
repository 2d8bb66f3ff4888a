#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ecmkit/rivals.hpp"
#include "support.hpp"

using namespace ecmkit;
using namespace ecmkit::testing;

namespace {

// A prime p with p - 1 = 2^a 3^b l, 2^a and 3^b at most 100, l the given
// prime; nullopt when no such p exists for this l.
std::optional<Natural> prime_with_cofactor(std::uint64_t l) {
  for (std::uint64_t two = 2; two <= 64; two *= 2) {
    for (std::uint64_t three = 1; three <= 81; three *= 3) {
      const Natural p = natural_from_u64(two * three * l + 1);
      if (mpz_probab_prime_p(p.get_mpz_t(), 32) > 0) return p;
    }
  }
  return std::nullopt;
}

struct PlantedPm1 {
  Natural p;
  Natural n;
  std::uint64_t l;
};

PlantedPm1 planted_pm1(std::uint64_t l_from) {
  for (std::uint64_t l = l_from;; ++l) {
    if (!is_prime_u64(l)) continue;
    if (auto p = prime_with_cofactor(l)) return {*p, *p * next_prime(Natural(1) << 61), l};
  }
}

}  // namespace

TEST(Rho, Examples) {
  const TrialOutcome a = pollard_rho(Natural(8051), 1, 1 << 20);
  ASSERT_EQ(a.status, TrialStatus::factor_found);
  EXPECT_TRUE(a.divisor == 83 || a.divisor == 97);
  const TrialOutcome b = pollard_rho(Natural(91), 1, 1 << 20);
  ASSERT_EQ(b.status, TrialStatus::factor_found);
  EXPECT_TRUE(b.divisor == 7 || b.divisor == 13);
  EXPECT_THROW(pollard_rho(Natural(3), 1, 10), std::invalid_argument);
}

TEST(Rho, SameSeedSameTrace) {
  const Natural n = next_prime(Natural(1000000)) * next_prime(Natural(2000000));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const TrialOutcome a = pollard_rho(n, seed, 1 << 24), b = pollard_rho(n, seed, 1 << 24);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.ledger, b.ledger);
    EXPECT_EQ(a.divisor, b.divisor);
  }
}

TEST(Rho, BudgetStops) {
  const Natural n = next_prime(Natural(1) << 40) * next_prime(Natural(1) << 41);
  const TrialOutcome t = pollard_rho(n, 4, 1000);
  EXPECT_EQ(t.status, TrialStatus::no_factor);
  EXPECT_LE(t.iterations, 1000u + 128u);
}

TEST(Rho, IterationsScaleWithSquareRoot) {
  Rng gen = make_stream(555, 0);
  double iters = 0, roots = 0;
  for (int i = 0; i < 100; ++i) {
    const Natural p = next_prime(Natural(1000000) + random_below(Natural(1000000), gen));
    const Natural q = next_prime(Natural(100000000) + random_below(Natural(100000000), gen));
    const TrialOutcome t = pollard_rho(p * q, mix_seed(555, i), 1ULL << 30);
    ASSERT_EQ(t.status, TrialStatus::factor_found);
    iters += static_cast<double>(t.iterations);
    roots += std::sqrt(p.get_d());
  }
  EXPECT_GE(iters / roots, 0.8);
  EXPECT_LE(iters / roots, 2.5);
}

TEST(PminusOne, PhaseOneExamples) {
  const Modulus n(Natural(1271));
  const PrimePowerSchedule s = build_schedule(7, 7);
  WorkLedger l;
  auto q = pminus1_phase1(n(2), s, l);
  ASSERT_TRUE(q.has_factor());
  EXPECT_EQ(q.factor().divisor % 31, 0);

  auto one = pminus1_phase1(n(1), s, l);
  ASSERT_TRUE(one.has_factor());
  EXPECT_TRUE(one.factor().is_trivial(n.value()));

  EXPECT_THROW((void)pminus1_phase1(n(31), s, l), std::invalid_argument);
}

TEST(PminusOne, PrimeModulusNeverSplits) {
  const Natural p = next_prime(Natural(1000003));
  const Modulus mp(p);
  const PrimePowerSchedule s = build_schedule(50, 50);
  for (long a = 2; a < 60; ++a) {
    WorkLedger l;
    auto q = pminus1_phase1(mp(a), s, l);
    if (q.has_factor()) {
      EXPECT_EQ(q.factor().divisor, p);
    }
  }
}

TEST(PminusOne, PhaseOneSucceedsExactlyOnSmoothPrimes) {
  // 2 * 3^3 * 5^2 * 7^2 * 17 + 1 = 1124551 is prime, and 100-smooth with powers <= 100.
  const Natural smooth(1124551);
  ASSERT_TRUE(mpz_probab_prime_p(smooth.get_mpz_t(), 32) > 0);
  const Natural big = next_prime(Natural(1) << 61);
  const PrimePowerSchedule s = build_schedule(100, 100);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const TrialOutcome t = pminus1_trial(smooth * big, s, 0, 9, i);
    ASSERT_EQ(t.status, TrialStatus::factor_found);
    EXPECT_EQ(t.divisor, smooth);
    EXPECT_EQ(t.phase, 1);
  }
  // One prime factor of p - 1 above m: phase 1 only succeeds when the base
  // happens to have order prime to it, about 1 time in l.
  const PlantedPm1 inst = planted_pm1(400);
  int phase_one = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    if (pminus1_trial(inst.n, s, 0, 9, i).status == TrialStatus::factor_found) ++phase_one;
  }
  EXPECT_LE(phase_one, 2);
}

TEST(PminusOne, BirthdayPhaseTwoOnPlantedPrime) {
  const PlantedPm1 inst = planted_pm1(300);
  ASSERT_GT(inst.l, 100u);
  ASSERT_LT(inst.l, 1000u);  // inside (m, m^1.5)
  const PrimePowerSchedule s = build_schedule(100, 100);
  const auto r = static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(inst.l) * std::log(2.0))));
  int hits = 0;
  const int trials = 300;
  for (int i = 0; i < trials; ++i) {
    const TrialOutcome t = pminus1_trial(inst.n, s, r, 31, i);
    if (t.status == TrialStatus::factor_found) {
      ++hits;
      EXPECT_EQ(t.divisor, inst.p);
    }
  }
  const double rate = static_cast<double>(hits) / trials;
  EXPECT_GE(rate, 0.3);
  EXPECT_NEAR(rate, success_probability(static_cast<double>(inst.l), static_cast<double>(r), false), 0.1);
}

TEST(PminusOne, ShortWalkRarelySucceeds) {
  const PlantedPm1 inst = planted_pm1(400);
  const PrimePowerSchedule s = build_schedule(100, 100);
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    if (pminus1_trial(inst.n, s, 2, 5, i).status == TrialStatus::factor_found) ++hits;
  }
  EXPECT_LE(hits, 6);
}

TEST(PminusOne, WalkStaysInSubgroup) {
  const PlantedPm1 inst = planted_pm1(200);
  ASSERT_LE(inst.l, 500u);
  Rng rng = make_stream(8, 0);
  const Natural q = inst.n / inst.p;
  const Residue base = plant_residue(inst.p, inst.l, q, rng);
  std::set<Natural> group;
  Natural x = 1;
  for (std::uint64_t k = 0; k < inst.l; ++k) {
    group.insert(x);
    x = x * (base.value() % inst.p) % inst.p;
  }
  ASSERT_EQ(group.size(), inst.l);
  WorkLedger l;
  auto walk = random_walk(MultiplicativeGroup{base.modulus()}, base, 60, rng, l);
  ASSERT_FALSE(walk.has_factor());
  for (const Residue& v : walk.value()) EXPECT_TRUE(group.count(v.value() % inst.p)) << v.value();
}

TEST(PminusOne, PhaseTwoPreconditions) {
  const Modulus n(Natural(1271));
  Rng rng = make_stream(1, 1);
  WorkLedger l;
  EXPECT_THROW(pminus1_birthday_phase2(n(1), 10, rng, l), std::invalid_argument);
  EXPECT_THROW(pminus1_birthday_phase2(n(2), 1, rng, l), std::invalid_argument);
}
