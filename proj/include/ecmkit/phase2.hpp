#pragma once

// Birthday-paradox second phase: a pseudo-random walk in <Q>, the product of
// pairwise coordinate differences (or D^2 via the product tree), and the
// cross-product variant with e-th power exponents.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecmkit/bigmod.hpp"
#include "ecmkit/curve.hpp"
#include "ecmkit/polyeval.hpp"
#include "ecmkit/rng.hpp"

namespace ecmkit {

// Default walk multiplier window: Q_{j+1} = Q_j^2 * Q^c, c uniform in [0, 2^w).
// w = 1 is the plain square / square-and-multiply coin flip. Larger w breaks
// up the runs of repeated collisions that the coin-flip walk produces.
inline constexpr unsigned kWalkWindowBits = 6;

/// Affine Weierstrass points under the group law.
struct EllipticGroup {
  using Element = AffinePoint;
  const WeierstrassCurve& curve;

  Outcome<Element> op(const Element& a, const Element& b, WorkLedger& ledger) const {
    return add(a, b, curve, ledger);
  }
  Outcome<Element> power(const Element& a, const Natural& k, WorkLedger& ledger) const {
    return scalar_mul(a, k, curve, ledger);
  }
  [[nodiscard]] bool is_identity(const Element& a) const { return a.is_infinity(); }
};

/// (Z/N)^* under multiplication.
struct MultiplicativeGroup {
  using Element = Residue;
  Modulus n;

  Outcome<Element> op(const Element& a, const Element& b, WorkLedger& ledger) const {
    return detail::mul_plain(a, b, ledger);
  }
  Outcome<Element> power(const Element& a, const Natural& k, WorkLedger& ledger) const {
    return pow_mod(a, k, ledger);
  }
  [[nodiscard]] bool is_identity(const Element& a) const { return a.is_one(); }
};

namespace detail {
inline const Natural& modulus_of(const AffinePoint& p) { return p.x().n(); }
inline const Natural& modulus_of(const Residue& r) { return r.n(); }
}  // namespace detail

/// Q_1 = Q, Q_{j+1} = Q_j^2 * Q^{c_j}. A walk point equal to the identity
/// mod N is reported as the trivial factor N.
template <class Group>
Outcome<std::vector<typename Group::Element>> random_walk(const Group& g, const typename Group::Element& q,
                                                          std::size_t r, Rng& rng, WorkLedger& ledger,
                                                          unsigned window_bits = kWalkWindowBits) {
  using Element = typename Group::Element;
  if (g.is_identity(q)) throw std::invalid_argument("walk generator is the identity");
  if (r < 1) throw std::invalid_argument("walk length must be positive");
  if (window_bits < 1 || window_bits > 16) throw std::invalid_argument("walk window must be 1..16 bits");
  const std::size_t width = std::size_t{1} << window_bits;

  std::vector<Element> table{q};  // table[c - 1] = Q^c
  for (std::size_t c = 2; c < width; ++c) {
    auto next = g.op(table.back(), q, ledger);
    if (next.has_factor()) return next.factor();
    if (g.is_identity(next.value())) return FactorEvent{detail::modulus_of(q)};
    table.push_back(std::move(next).value());
  }

  std::vector<Element> walk{q};
  walk.reserve(r);
  while (walk.size() < r) {
    auto sq = g.op(walk.back(), walk.back(), ledger);
    if (sq.has_factor()) return sq.factor();
    Element cur = std::move(sq).value();
    const std::size_t c = static_cast<std::size_t>(rng() >> (64 - window_bits));
    if (c != 0 && !g.is_identity(cur)) {
      auto m = g.op(cur, table[c - 1], ledger);
      if (m.has_factor()) return m.factor();
      cur = std::move(m).value();
    }
    if (g.is_identity(cur)) return FactorEvent{detail::modulus_of(q)};
    walk.push_back(std::move(cur));
  }
  return walk;
}

enum class Coordinate { x_diff, y_diff };

inline std::vector<Residue> walk_coordinates(std::span<const AffinePoint> walk, Coordinate mode) {
  std::vector<Residue> out;
  out.reserve(walk.size());
  for (const auto& p : walk) out.push_back(mode == Coordinate::x_diff ? p.x() : p.y());
  return out;
}

/// prod_{i<j} (c_i - c_j) mod N; r(r-1)/2 units.
inline Residue pairwise_product(std::span<const Residue> coords, WorkLedger& ledger) {
  if (coords.empty()) throw std::invalid_argument("pairwise_product needs coordinates");
  Residue d = coords.front().modulus()(1);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) d = detail::mul_plain(d, sub_mod(coords[i], coords[j]), ledger);
  }
  return d;
}

/// Pair-by-pair gcd scan used when the accumulated product is 0 mod N.
/// Returns the first divisor in (1, N), else N if some difference vanished,
/// else 1.
inline Natural pairwise_gcd_scan(std::span<const Residue> coords) {
  if (coords.empty()) return 1;
  const Natural& n = coords.front().n();
  Natural found = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      Natural g = gcd(sub_mod(coords[i], coords[j]).value(), n);
      if (g != 1 && g != n) return g;
      if (g == n) found = n;
    }
  }
  return found;
}

enum class Phase2Status { factor, trivial, none };

struct Phase2Result {
  Phase2Status status = Phase2Status::none;
  Natural divisor = 1;
};

namespace detail {

inline Phase2Result classify_product(const Residue& d, std::span<const Residue> coords) {
  const Natural& n = d.n();
  Natural g = gcd(d.value(), n);
  if (g == 1) return {};
  if (g != n) return {Phase2Status::factor, std::move(g)};
  Natural s = pairwise_gcd_scan(coords);
  if (s != 1 && s != n) return {Phase2Status::factor, std::move(s)};
  return {Phase2Status::trivial, n};
}

inline Phase2Result from_event(const FactorEvent& ev, const Natural& n) {
  if (ev.is_trivial(n)) return {Phase2Status::trivial, n};
  return {Phase2Status::factor, ev.divisor};
}

}  // namespace detail

enum class Evaluation { naive, dsquared };

struct Phase2Config {
  std::size_t r = 2;
  Coordinate coordinate = Coordinate::x_diff;
  Evaluation evaluation = Evaluation::naive;
  unsigned window_bits = kWalkWindowBits;
};

/// Walk r points from Q, multiply the pairwise coordinate differences (or
/// compute D^2 by the tree method), and take one gcd with N.
inline Phase2Result birthday_phase2(const WeierstrassCurve& c, const AffinePoint& q, const Phase2Config& cfg,
                                    Rng& rng, WorkLedger& ledger) {
  if (cfg.r < 2) throw std::invalid_argument("phase 2 needs r >= 2");
  const Natural& n = c.n.value();
  EllipticGroup g{c};
  auto walk = random_walk(g, q, cfg.r, rng, ledger, cfg.window_bits);
  if (walk.has_factor()) return detail::from_event(walk.factor(), n);
  const auto coords = walk_coordinates(walk.value(), cfg.coordinate);
  const Residue d = cfg.evaluation == Evaluation::naive ? pairwise_product(coords, ledger) : dsquared(coords, ledger);
  return detail::classify_product(d, coords);
}

/// Probability of a repeated class among r draws from n1 (unfolded) or n1/2
/// (folded) classes, in the r << n1 approximation. 0 for r < 2.
inline double success_probability(double n1, double r, bool folded) {
  if (r < 2) return 0.0;
  return 1.0 - std::exp(-(r * r) / (folded ? n1 : 2.0 * n1));
}

/// 1 - prod_{k<r} (1 - k/n) for n classes.
inline double success_probability_exact(double classes, std::size_t r) {
  double none = 1.0;
  for (std::size_t k = 1; k < r; ++k) none *= std::max(0.0, 1.0 - static_cast<double>(k) / classes);
  return 1.0 - none;
}

// ---------------------------------------------------------------------------
// Cross-product variant: d = prod_j prod_i (x_i - xbar_j) with x_i = x(Q^{a_i}),
// a_i = b_i^e and b_i = b0 + b1 i.

struct LinearForm {
  Natural b0 = 0;
  Natural b1 = 1;
};

struct ProgressionPoints {
  std::vector<AffinePoint> points;
  std::uint64_t setup_ops = 0;  // scalar multiplications building the table
  std::uint64_t step_ops = 0;   // group additions advancing the table
};

/// Q^{a(i)} for i = 1..count with a(i) = (b0 + b1 i)^e, advancing a table of
/// e+1 running points whose e-th difference is constant.
inline Outcome<ProgressionPoints> progression_points(const WeierstrassCurve& c, const AffinePoint& q,
                                                     const LinearForm& form, unsigned e, std::size_t count,
                                                     WorkLedger& ledger) {
  if (e < 1) throw std::invalid_argument("exponent e must be at least 1");
  // Forward differences of a at i = 1: delta^k a(1) = sum_j (-1)^{k-j} C(k,j) a(1+j).
  std::vector<Natural> vals(e + 1);
  for (unsigned j = 0; j <= e; ++j) {
    Natural b = form.b0 + form.b1 * (j + 1);
    mpz_pow_ui(vals[j].get_mpz_t(), b.get_mpz_t(), e);
  }
  std::vector<Natural> diffs;
  for (unsigned k = 0; k <= e; ++k) {
    diffs.push_back(vals[0]);
    for (unsigned j = 0; j + 1 < vals.size(); ++j) vals[j] = vals[j + 1] - vals[j];
    vals.pop_back();
  }

  ProgressionPoints out;
  std::vector<AffinePoint> table;
  for (const auto& dk : diffs) {
    if (dk < 0) throw std::invalid_argument("progression needs non-negative differences");
    auto p = scalar_mul(q, dk, c, ledger);
    if (p.has_factor()) return p.factor();
    ++out.setup_ops;
    table.push_back(std::move(p).value());
  }
  out.points.reserve(count);
  if (count > 0) out.points.push_back(table[0]);
  while (out.points.size() < count) {
    for (unsigned k = 0; k < e; ++k) {
      auto s = add(table[k], table[k + 1], c, ledger);
      if (s.has_factor()) return s.factor();
      ++out.step_ops;
      table[k] = std::move(s).value();
    }
    out.points.push_back(table[0]);
  }
  return out;
}

enum class CrossEvaluation { streaming, tree };

struct CrossConfig {
  std::size_t r = 1;
  std::size_t s = 1;
  unsigned e = 2;
  CrossEvaluation evaluation = CrossEvaluation::streaming;
};

struct CrossResult {
  Phase2Result result;
  std::uint64_t setup_ops = 0;
  std::uint64_t step_ops = 0;
};

namespace detail {

inline LinearForm random_form(Rng& rng) {
  LinearForm f;
  f.b0 = natural_from_u64(rng() >> 32);
  f.b1 = natural_from_u64((rng() >> 32) | 1);
  return f;
}

}  // namespace detail

/// Streaming mode never stores the right-hand points; tree mode evaluates
/// prod (x - x_i) at every xbar_j through the product tree.
inline CrossResult cross_phase2(const WeierstrassCurve& c, const AffinePoint& q, const CrossConfig& cfg, Rng& rng,
                                WorkLedger& ledger) {
  if (cfg.r < 1 || cfg.s < 1) throw std::invalid_argument("cross phase needs r, s >= 1");
  const Natural& n = c.n.value();
  const LinearForm left = detail::random_form(rng);
  const LinearForm right = detail::random_form(rng);
  CrossResult out;

  auto lp = progression_points(c, q, left, cfg.e, cfg.r, ledger);
  if (lp.has_factor()) {
    out.result = detail::from_event(lp.factor(), n);
    return out;
  }
  out.setup_ops += lp.value().setup_ops;
  out.step_ops += lp.value().step_ops;
  std::vector<Residue> xs;
  for (const auto& p : lp.value().points) {
    if (p.is_infinity()) {
      out.result = {Phase2Status::trivial, n};
      return out;
    }
    xs.push_back(p.x());
  }

  auto rp = progression_points(c, q, right, cfg.e, cfg.s, ledger);
  if (rp.has_factor()) {
    out.result = detail::from_event(rp.factor(), n);
    return out;
  }
  out.setup_ops += rp.value().setup_ops;
  out.step_ops += rp.value().step_ops;

  Residue d = c.n(1);
  std::vector<Residue> xbar;
  for (const auto& p : rp.value().points) {
    if (p.is_infinity()) {
      out.result = {Phase2Status::trivial, n};
      return out;
    }
    xbar.push_back(p.x());
  }
  if (cfg.evaluation == CrossEvaluation::streaming) {
    for (const auto& xb : xbar) {
      for (const auto& x : xs) d = detail::mul_plain(d, sub_mod(x, xb), ledger);
    }
  } else {
    const auto values = multipoint_eval(product_tree(xs, ledger), xbar, ledger);
    for (const auto& v : values) d = detail::mul_plain(d, v, ledger);
  }

  Natural g = gcd(d.value(), n);
  if (g == 1) return out;
  if (g != n) {
    out.result = {Phase2Status::factor, std::move(g)};
    return out;
  }
  for (const auto& xb : xbar) {
    for (const auto& x : xs) {
      Natural h = gcd(sub_mod(x, xb).value(), n);
      if (h != 1 && h != n) {
        out.result = {Phase2Status::factor, std::move(h)};
        return out;
      }
    }
  }
  out.result = {Phase2Status::trivial, n};
  return out;
}

}  // namespace ecmkit
