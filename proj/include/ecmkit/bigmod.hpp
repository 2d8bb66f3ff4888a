#pragma once

// Modular arithmetic over arbitrary-precision integers, with every
// multiplication and inversion tallied in a WorkLedger. One unit of work is
// one multiplication mod N; an inversion is charged kInversionCost units.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ecmkit {

using Natural = mpz_class;

inline constexpr std::uint64_t kInversionCost = 8;

/// Parses a non-negative integer written in decimal, or in hex with a "0x"
/// prefix. Signs, whitespace and empty strings are rejected.
inline Natural parse_natural(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  for (char ch : text) {
    const bool ok = base == 10 ? (ch >= '0' && ch <= '9')
                               : ((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f') ||
                                  (ch >= 'A' && ch <= 'F'));
    if (!ok) throw std::invalid_argument("malformed integer literal: " + std::string(text));
  }
  return Natural(std::string(text), base);
}

inline std::string to_decimal(const Natural& n) { return n.get_str(10); }

inline Natural natural_from_u64(std::uint64_t v) {
  Natural out;
  mpz_import(out.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
  return out;
}

inline std::uint64_t to_u64(const Natural& n) {
  if (sgn(n) < 0 || mpz_sizeinbase(n.get_mpz_t(), 2) > 64)
    throw std::out_of_range("value does not fit in 64 bits");
  std::uint64_t v = 0;
  mpz_export(&v, nullptr, -1, sizeof v, 0, 0, n.get_mpz_t());
  return v;
}

struct WorkLedger {
  std::uint64_t multiplications = 0;
  std::uint64_t squarings = 0;
  std::uint64_t inversions = 0;

  [[nodiscard]] std::uint64_t units() const {
    return multiplications + squarings + kInversionCost * inversions;
  }

  WorkLedger& operator+=(const WorkLedger& other) {
    multiplications += other.multiplications;
    squarings += other.squarings;
    inversions += other.inversions;
    return *this;
  }

  friend bool operator==(const WorkLedger&, const WorkLedger&) = default;
};

/// A divisor of N uncovered by a failed inversion or a gcd. divisor == N is
/// the trivial case (every prime factor was hit at once).
struct FactorEvent {
  Natural divisor;

  [[nodiscard]] bool is_trivial(const Natural& n) const { return divisor == n; }
};

/// Either a value or the FactorEvent that interrupted its computation.
/// A FactorEvent is the success signal of the factoring algorithms, so it is
/// carried as data rather than thrown.
template <class T>
class [[nodiscard]] Outcome {
 public:
  Outcome(T value) : state_(std::move(value)) {}          // NOLINT(google-explicit-constructor)
  Outcome(FactorEvent event) : state_(std::move(event)) {}  // NOLINT(google-explicit-constructor)

  [[nodiscard]] bool has_factor() const { return std::holds_alternative<FactorEvent>(state_); }
  [[nodiscard]] const FactorEvent& factor() const { return std::get<FactorEvent>(state_); }
  [[nodiscard]] T& value() & { return std::get<T>(state_); }
  [[nodiscard]] const T& value() const& { return std::get<T>(state_); }
  [[nodiscard]] T&& value() && { return std::get<T>(std::move(state_)); }

 private:
  std::variant<T, FactorEvent> state_;
};

class Residue;

/// The modulus N shared by a family of residues. Copies share storage.
class Modulus {
 public:
  explicit Modulus(Natural n) {
    if (n < 2) throw std::invalid_argument("modulus must be at least 2");
    n_ = std::make_shared<const Natural>(std::move(n));
  }

  [[nodiscard]] const Natural& value() const { return *n_; }

  [[nodiscard]] Residue operator()(const Natural& v) const;
  [[nodiscard]] Residue operator()(long v) const;

  friend bool operator==(const Modulus& a, const Modulus& b) {
    return a.n_ == b.n_ || *a.n_ == *b.n_;
  }

 private:
  std::shared_ptr<const Natural> n_;
};

/// Canonical representative in [0, N).
class Residue {
 public:
  Residue(Natural v, Modulus m) : value_(std::move(v)), modulus_(std::move(m)) {
    if (value_ < 0 || value_ >= modulus_.value()) {
      mpz_fdiv_r(value_.get_mpz_t(), value_.get_mpz_t(), modulus_.value().get_mpz_t());
    }
  }

  [[nodiscard]] const Natural& value() const { return value_; }
  [[nodiscard]] const Modulus& modulus() const { return modulus_; }
  [[nodiscard]] const Natural& n() const { return modulus_.value(); }
  [[nodiscard]] bool is_zero() const { return sgn(value_) == 0; }
  [[nodiscard]] bool is_one() const { return value_ == 1; }

  friend bool operator==(const Residue& a, const Residue& b) {
    return a.value_ == b.value_ && a.modulus_ == b.modulus_;
  }

 private:
  Natural value_;
  Modulus modulus_;
};

inline Residue Modulus::operator()(const Natural& v) const { return Residue(v, *this); }
inline Residue Modulus::operator()(long v) const { return Residue(Natural(v), *this); }

namespace detail {

inline void require_same_modulus(const Residue& a, const Residue& b) {
  if (!(a.modulus() == b.modulus())) throw std::invalid_argument("residues have different moduli");
}

inline Residue reduce(Natural v, const Modulus& m) {
  mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.value().get_mpz_t());
  return Residue(std::move(v), m);
}

// Product tallied as a multiplication regardless of operand equality.
inline Residue mul_plain(const Residue& a, const Residue& b, WorkLedger& ledger) {
  ++ledger.multiplications;
  return reduce(a.value() * b.value(), a.modulus());
}

}  // namespace detail

// Additions, subtractions and multiplications by single-precision integers are
// free in the accounting model.

inline Residue add_mod(const Residue& a, const Residue& b) {
  detail::require_same_modulus(a, b);
  Natural s = a.value() + b.value();
  if (s >= a.n()) s -= a.n();
  return Residue(std::move(s), a.modulus());
}

inline Residue sub_mod(const Residue& a, const Residue& b) {
  detail::require_same_modulus(a, b);
  Natural s = a.value() - b.value();
  if (s < 0) s += a.n();
  return Residue(std::move(s), a.modulus());
}

inline Residue neg_mod(const Residue& a) {
  if (a.is_zero()) return a;
  return Residue(a.n() - a.value(), a.modulus());
}

inline Residue mul_small(const Residue& a, long k) {
  return detail::reduce(a.value() * k, a.modulus());
}

inline Residue sqr_mod(const Residue& a, WorkLedger& ledger) {
  ++ledger.squarings;
  return detail::reduce(a.value() * a.value(), a.modulus());
}

/// (a*b) mod N. Counted as a squaring when the operands are equal.
inline Residue mul_mod(const Residue& a, const Residue& b, WorkLedger& ledger) {
  detail::require_same_modulus(a, b);
  if (&a == &b || a.value() == b.value()) return sqr_mod(a, ledger);
  ++ledger.multiplications;
  return detail::reduce(a.value() * b.value(), a.modulus());
}

/// Left-to-right binary powering: floor(log2 e) squarings plus one
/// multiplication per further set bit of e.
inline Residue pow_mod(const Residue& a, const Natural& e, WorkLedger& ledger) {
  if (e < 0) throw std::invalid_argument("negative exponent");
  if (sgn(e) == 0) return a.modulus()(1);
  const auto bits = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2));
  Residue acc = a;
  for (long i = bits - 2; i >= 0; --i) {
    acc = sqr_mod(acc, ledger);
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) != 0) {
      acc = detail::mul_plain(acc, a, ledger);
    }
  }
  return acc;
}

inline Natural gcd(const Natural& a, const Natural& b) {
  Natural g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

struct ExtGcd {
  Natural g;
  Natural u;  // signed
  Natural v;  // signed
};

/// Extended Euclid: g = gcd(a, n) with a*u + n*v = g.
inline ExtGcd ext_gcd(const Natural& a, const Natural& n) {
  Natural r0 = a, r1 = n;
  Natural s0 = 1, s1 = 0;
  Natural t0 = 0, t1 = 1;
  Natural q, tmp;
  while (sgn(r1) != 0) {
    mpz_fdiv_q(q.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
    tmp = r0 - q * r1;
    r0 = std::move(r1);
    r1 = std::move(tmp);
    tmp = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(tmp);
    tmp = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(tmp);
  }
  return {std::move(r0), std::move(s0), std::move(t0)};
}

/// a^-1 mod N, or the FactorEvent gcd(a, N) when that gcd exceeds 1. The
/// extended gcd is charged kInversionCost units either way.
inline Outcome<Residue> inv_mod(const Residue& a, WorkLedger& ledger) {
  if (a.is_zero()) throw std::invalid_argument("inverse of zero requested");
  ++ledger.inversions;
  ExtGcd eg = ext_gcd(a.value(), a.n());
  if (eg.g != 1) return FactorEvent{std::move(eg.g)};
  return detail::reduce(std::move(eg.u), a.modulus());
}

/// Element-wise inverses via prefix products: one inversion and 3(k-1)
/// multiplications for k items.
inline Outcome<std::vector<Residue>> batch_inverse(std::span<const Residue> items,
                                                    WorkLedger& ledger) {
  std::vector<Residue> out;
  if (items.empty()) return out;
  for (const auto& it : items) {
    detail::require_same_modulus(items.front(), it);
    if (it.is_zero()) throw std::invalid_argument("inverse of zero requested");
  }
  std::vector<Residue> prefix;
  prefix.reserve(items.size());
  prefix.push_back(items.front());
  for (std::size_t i = 1; i < items.size(); ++i) {
    prefix.push_back(detail::mul_plain(prefix.back(), items[i], ledger));
  }
  if (prefix.back().is_zero()) {
    // The running product vanished mod N; a single item still carries a
    // divisor, or the factors were split across items.
    for (const auto& it : items) {
      Natural g = gcd(it.value(), it.n());
      if (g != 1) return FactorEvent{std::move(g)};
    }
    return FactorEvent{items.front().n()};
  }
  auto inv = inv_mod(prefix.back(), ledger);
  if (inv.has_factor()) {
    const Natural& n = items.front().n();
    if (inv.factor().divisor != n) return inv.factor();
    for (const auto& it : items) {
      Natural g = gcd(it.value(), n);
      if (g != 1 && g != n) return FactorEvent{std::move(g)};
    }
    return inv.factor();
  }
  out.assign(items.size(), items.front());
  Residue u = std::move(inv).value();
  for (std::size_t i = items.size() - 1; i > 0; --i) {
    out[i] = detail::mul_plain(u, prefix[i - 1], ledger);
    u = detail::mul_plain(u, items[i], ledger);
  }
  out[0] = std::move(u);
  return out;
}

}  // namespace ecmkit
