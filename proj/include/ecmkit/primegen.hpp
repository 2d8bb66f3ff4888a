#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ecmkit {

/// All primes p < m, ascending. Segmented sieve of Eratosthenes.
inline std::vector<std::uint64_t> primes_below(std::uint64_t m) {
  std::vector<std::uint64_t> out;
  if (m <= 2) return out;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
  while (root * root < m) ++root;

  std::vector<char> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }

  constexpr std::uint64_t kSegment = 1 << 16;
  std::vector<char> seg(kSegment);
  for (std::uint64_t lo = 2; lo < m; lo += kSegment) {
    const std::uint64_t hi = std::min(lo + kSegment, m);
    std::fill(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(hi - lo), 1);
    for (std::uint64_t p : base) {
      if (p * p >= hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t j = start; j < hi; j += p) seg[j - lo] = 0;
    }
    for (std::uint64_t i = lo; i < hi; ++i) {
      if (seg[i - lo]) out.push_back(i);
    }
  }
  return out;
}

/// Largest e with p^e <= mprime (0 when mprime < p). Integer comparisons only.
inline unsigned exponent_for(std::uint64_t p, std::uint64_t mprime) {
  if (p < 2) throw std::invalid_argument("exponent_for needs p >= 2");
  unsigned e = 0;
  std::uint64_t power = 1;
  while (power <= mprime / p) {
    power *= p;
    ++e;
  }
  return e;
}

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  std::uint64_t power;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// The phase-1 multiplier E = prod p_i^{e_i} over primes p_i < m, with
/// p_i^{e_i} <= m' < p_i^{e_i+1}. E itself is never formed.
struct PrimePowerSchedule {
  std::uint64_t bound_m = 2;
  std::uint64_t bound_mprime = 2;
  std::vector<PrimePower> entries;

  /// ln E.
  [[nodiscard]] double log_multiplier() const {
    double s = 0;
    for (const auto& e : entries) s += static_cast<double>(e.exponent) * std::log(static_cast<double>(e.prime));
    return s;
  }
};

inline PrimePowerSchedule build_schedule(std::uint64_t m, std::uint64_t mprime) {
  if (m < 2) throw std::invalid_argument("schedule bound m must be at least 2");
  if (mprime < m) throw std::invalid_argument("schedule needs m <= m'");
  PrimePowerSchedule s;
  s.bound_m = m;
  s.bound_mprime = mprime;
  for (std::uint64_t p : primes_below(m)) {
    const unsigned e = exponent_for(p, mprime);
    std::uint64_t power = 1;
    for (unsigned i = 0; i < e; ++i) power *= p;
    s.entries.push_back({p, e, power});
  }
  return s;
}

}  // namespace ecmkit
