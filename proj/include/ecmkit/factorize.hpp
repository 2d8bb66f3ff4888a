#pragma once

// Complete factorisation: strip small primes, test primality, detect perfect
// powers, and split remaining composites with the selected method.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecmkit/bigmod.hpp"
#include "ecmkit/ecm.hpp"
#include "ecmkit/primegen.hpp"
#include "ecmkit/rivals.hpp"
#include "ecmkit/trial.hpp"

namespace ecmkit {

enum class Algorithm { rho, ecm1, ecm2, ecm2_fast, ecm2_cross, pm1 };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::rho: return "rho";
    case Algorithm::ecm1: return "ecm1";
    case Algorithm::ecm2: return "ecm2";
    case Algorithm::ecm2_fast: return "ecm2-fast";
    case Algorithm::ecm2_cross: return "ecm2-cross";
    case Algorithm::pm1: return "pm1";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::rho, Algorithm::ecm1, Algorithm::ecm2, Algorithm::ecm2_fast, Algorithm::ecm2_cross,
                 Algorithm::pm1}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

inline std::optional<CurveForm> parse_curve_form(const std::string& s) {
  for (auto f : {CurveForm::weierstrass, CurveForm::montgomery, CurveForm::suyama}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

inline bool probable_prime(const Natural& n) { return mpz_probab_prime_p(n.get_mpz_t(), 32) > 0; }

inline constexpr std::uint64_t kTrialDivisionBound = 10000;

struct FactorPolicy {
  Algorithm algorithm = Algorithm::ecm2;
  CurveForm curve_form = CurveForm::suyama;
  std::optional<std::uint64_t> m;
  std::optional<std::uint64_t> mprime;
  std::optional<std::size_t> r;
  std::optional<double> beta;
  unsigned e = 2;
  double hint_digits = 20;
  std::uint64_t seed = 0;
  SearchOptions search;
  std::uint64_t rho_max_iterations = 1ULL << 32;
};

struct FactorRecord {
  Natural value;
  unsigned multiplicity = 1;
  bool prime = true;
  std::string method;      // how the split isolating this factor was found
  int phase = 0;
  std::uint64_t trials_used = 0;
  std::uint64_t work_units = 0;  // cost of that split
};

struct Factorization {
  Natural n;
  std::vector<FactorRecord> factors;  // ascending by value
  bool complete = true;
  WorkLedger ledger;
  std::uint64_t trials_used = 0;
};

namespace detail {

// Base r with k-th power equal to n, for the largest such k (k = 1 if none).
inline std::pair<Natural, unsigned> perfect_power_root(const Natural& n) {
  if (mpz_perfect_power_p(n.get_mpz_t()) == 0) return {n, 1};
  const auto bits = static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
  for (unsigned k = bits; k >= 2; --k) {
    Natural root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0 && root > 1) return {root, k};
  }
  return {n, 1};
}

inline std::size_t walk_length_for(const FactorPolicy& pol, std::uint64_t m) {
  if (pol.r) return *pol.r;
  if (pol.beta) return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(r_from_beta(static_cast<double>(m), *pol.beta))));
  return balanced_r(m);
}

inline Variant variant_of(Algorithm a) {
  switch (a) {
    case Algorithm::ecm1: return Variant::ecm1;
    case Algorithm::ecm2_fast: return Variant::ecm2_fast;
    case Algorithm::ecm2_cross: return Variant::ecm2_cross;
    default: return Variant::ecm2;
  }
}

}  // namespace detail

/// The plan a fixed-m ECM run would use; m defaults to the first adaptive step.
inline TrialPlan plan_from_policy(const FactorPolicy& pol, std::uint64_t seed) {
  TrialPlan plan;
  plan.variant = detail::variant_of(pol.algorithm);
  plan.curve_form = pol.curve_form;
  plan.seed = seed;
  plan.e = pol.e;
  plan.m = pol.m.value_or(adaptive_policy(1, pol.hint_digits).m);
  plan.mprime = std::max(plan.m, pol.mprime.value_or(plan.m));
  plan.r = detail::walk_length_for(pol, plan.m);
  if (pol.beta) plan.beta = *pol.beta;
  if (plan.variant == Variant::ecm2_fast && (plan.r & (plan.r - 1)) != 0) plan.r = round_to_power_of_two(static_cast<double>(plan.r));
  if (plan.variant == Variant::ecm2_cross) {
    plan.r = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(plan.r) / std::sqrt(2.0))));
    plan.s = plan.r;
  }
  return plan;
}

/// Looks for one divisor of the odd composite n (coprime to 6).
inline SearchResult find_divisor(const Natural& n, const FactorPolicy& pol, std::uint64_t seed) {
  switch (pol.algorithm) {
    case Algorithm::rho: {
      TrialOutcome t = pollard_rho(n, seed, pol.rho_max_iterations);
      SearchResult res;
      res.status = t.status;
      res.divisor = t.divisor;
      res.trials_used = 1;
      res.iterations = t.iterations;
      res.ledger = t.ledger;
      return res;
    }
    case Algorithm::pm1: {
      if (pol.m) {
        const auto data = phase_one_data(*pol.m, std::max(*pol.m, pol.mprime.value_or(*pol.m)));
        const std::size_t r = detail::walk_length_for(pol, *pol.m);
        return run_search([&](std::uint64_t i) { return pminus1_trial(n, data->schedule, r, seed, i); }, pol.search);
      }
      return run_search(
          [&](std::uint64_t i) {
            const AdaptiveStep step = adaptive_policy(i + 1, pol.hint_digits);
            return pminus1_trial(n, phase_one_data(step.m, step.m)->schedule, step.r, seed, i);
          },
          pol.search);
    }
    default: {
      const TrialPlan plan = plan_from_policy(pol, seed);
      if (pol.m) return ecm_search(n, plan, pol.search);
      return ecm_search_adaptive(n, plan, pol.hint_digits, pol.search);
    }
  }
}

/// Full factorisation. Budget exhaustion leaves a composite record with
/// prime = false and complete = false.
inline Factorization factorize(const Natural& n, const FactorPolicy& pol) {
  if (n < 2) throw std::invalid_argument("factorize needs N >= 2");
  Factorization out;
  out.n = n;
  std::map<Natural, FactorRecord> found;
  const auto record = [&](const Natural& v, unsigned mult, bool prime, const FactorRecord& how) {
    auto [it, fresh] = found.try_emplace(v, how);
    if (fresh) {
      it->second.value = v;
      it->second.multiplicity = mult;
      it->second.prime = prime;
    } else {
      it->second.multiplicity += mult;
    }
  };

  Natural rest = n;
  FactorRecord by_division;
  by_division.method = "trial-division";
  for (std::uint64_t p : primes_below(kTrialDivisionBound)) {
    if (rest == 1) break;
    const Natural pp = natural_from_u64(p);
    unsigned k = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), pp.get_mpz_t()) != 0) {
      rest /= pp;
      ++k;
    }
    if (k > 0) record(pp, k, true, by_division);
  }

  struct Pending {
    Natural value;
    unsigned mult;
    FactorRecord how;
  };
  std::vector<Pending> stack;
  FactorRecord direct;
  direct.method = "primality";
  if (rest > 1) stack.push_back({rest, 1, direct});
  std::uint64_t splits = 0;
  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();
    if (cur.value == 1) continue;
    if (probable_prime(cur.value)) {
      record(cur.value, cur.mult, true, cur.how);
      continue;
    }
    auto [root, k] = detail::perfect_power_root(cur.value);
    if (k > 1) {
      FactorRecord how;
      how.method = "perfect-power";
      stack.push_back({root, cur.mult * k, how});
      continue;
    }
    const std::uint64_t seed = splits == 0 ? pol.seed : mix_seed(pol.seed, splits);
    ++splits;
    SearchResult res = find_divisor(cur.value, pol, seed);
    out.ledger += res.ledger;
    out.trials_used += res.trials_used;
    if (res.status != TrialStatus::factor_found) {
      FactorRecord how;
      how.method = to_string(pol.algorithm);
      how.trials_used = res.trials_used;
      how.work_units = res.ledger.units();
      record(cur.value, cur.mult, false, how);
      out.complete = false;
      continue;
    }
    FactorRecord how;
    how.method = to_string(pol.algorithm);
    how.phase = res.phase;
    how.trials_used = res.trials_used;
    how.work_units = res.ledger.units();
    Natural other = cur.value / res.divisor;
    stack.push_back({other, cur.mult, how});
    stack.push_back({res.divisor, cur.mult, how});
  }
  for (auto& [v, rec] : found) out.factors.push_back(std::move(rec));
  return out;
}

}  // namespace ecmkit
