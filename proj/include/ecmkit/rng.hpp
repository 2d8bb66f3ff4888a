#pragma once

// Seeded, splittable randomness: stream (seed, i) is independent of the order
// in which streams are created, so serial and parallel trial loops agree.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ecmkit/bigmod.hpp"

namespace ecmkit {

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9U};
  return Rng(seq);
}

/// SplitMix64 finaliser; derives child seeds from a parent seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Near-uniform value in [0, bound): 64 surplus random bits are drawn before
/// reduction, so the bias is below 2^-64.
inline Natural random_below(const Natural& bound, Rng& rng) {
  if (bound <= 0) throw std::invalid_argument("random_below needs a positive bound");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 64;
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  for (auto& w : buf) w = rng();
  Natural v;
  mpz_import(v.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
  mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), bound.get_mpz_t());
  return v;
}

inline Residue random_residue(const Modulus& m, Rng& rng) { return m(random_below(m.value(), rng)); }

}  // namespace ecmkit
