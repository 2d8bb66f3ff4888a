#pragma once

// Polynomials with coefficients mod N: Karatsuba multiplication, the product
// tree of prod (x - x_j), remainder-tree multipoint evaluation, and the
// squared difference product D^2 = +-prod_j P'(x_j).
//
// Ledger convention: every coefficient product charged one unit. Additions,
// shifts and reductions are free.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecmkit/bigmod.hpp"

namespace ecmkit {

// Operands of at most this many coefficients are multiplied by schoolbook.
inline constexpr std::size_t kKaratsubaThreshold = 4;
// Divisors of at most this degree are handled by schoolbook long division.
inline constexpr std::size_t kNewtonDivisionCutoff = 32;

struct PolyModN {
  Modulus modulus;
  std::vector<Natural> coeffs;  // ascending, reduced, no trailing zeros

  PolyModN(Modulus m, std::vector<Natural> c) : modulus(std::move(m)), coeffs(std::move(c)) { tidy(); }

  static PolyModN from_residues(std::span<const Residue> c) {
    if (c.empty()) throw std::invalid_argument("from_residues needs at least one coefficient");
    std::vector<Natural> v;
    v.reserve(c.size());
    for (const auto& r : c) v.push_back(r.value());
    return PolyModN(c.front().modulus(), std::move(v));
  }

  /// -1 for the zero polynomial.
  [[nodiscard]] long degree() const { return static_cast<long>(coeffs.size()) - 1; }
  [[nodiscard]] bool is_zero() const { return coeffs.empty(); }
  [[nodiscard]] Residue coefficient(std::size_t i) const {
    return i < coeffs.size() ? modulus(coeffs[i]) : modulus(0);
  }

  /// Horner evaluation; deg P units.
  [[nodiscard]] Residue evaluate(const Residue& x, WorkLedger& ledger) const {
    if (coeffs.empty()) return modulus(0);
    Natural acc = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
      ++ledger.multiplications;
      acc = acc * x.value() + coeffs[i];
      mpz_fdiv_r(acc.get_mpz_t(), acc.get_mpz_t(), modulus.value().get_mpz_t());
    }
    return modulus(acc);
  }

  friend bool operator==(const PolyModN& a, const PolyModN& b) {
    return a.modulus == b.modulus && a.coeffs == b.coeffs;
  }

 private:
  void tidy() {
    for (auto& c : coeffs) {
      if (c < 0 || c >= modulus.value()) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus.value().get_mpz_t());
    }
    while (!coeffs.empty() && sgn(coeffs.back()) == 0) coeffs.pop_back();
  }
};

namespace detail {

using Coeffs = std::vector<Natural>;

inline void reduce_all(Coeffs& v, const Natural& n) {
  for (auto& c : v) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), n.get_mpz_t());
}

// out[i + j] += a[i] * b[j]; out must hold na + nb - 1 entries.
inline void schoolbook_acc(const Natural* a, std::size_t na, const Natural* b, std::size_t nb, Natural* out,
                           WorkLedger& ledger) {
  ledger.multiplications += na * nb;
  for (std::size_t i = 0; i < na; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < nb; ++j) mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
}

// Karatsuba on two operands of equal length n. Intermediate values are left
// unreduced (possibly negative); the caller reduces once at the end.
inline void karatsuba_acc(const Natural* a, const Natural* b, std::size_t n, Natural* out, std::size_t threshold,
                          WorkLedger& ledger) {
  if (n <= threshold || n < 2) {
    schoolbook_acc(a, n, b, n, out, ledger);
    return;
  }
  const std::size_t lo = n / 2;
  const std::size_t hi = n - lo;  // hi >= lo
  Coeffs sa(hi), sb(hi);
  for (std::size_t i = 0; i < hi; ++i) {
    sa[i] = a[lo + i];
    sb[i] = b[lo + i];
    if (i < lo) {
      sa[i] += a[i];
      sb[i] += b[i];
    }
  }
  Coeffs z0(2 * lo - 1), z2(2 * hi - 1), z1(2 * hi - 1);
  karatsuba_acc(a, b, lo, z0.data(), threshold, ledger);
  karatsuba_acc(a + lo, b + lo, hi, z2.data(), threshold, ledger);
  karatsuba_acc(sa.data(), sb.data(), hi, z1.data(), threshold, ledger);
  for (std::size_t i = 0; i < z0.size(); ++i) z1[i] -= z0[i];
  for (std::size_t i = 0; i < z2.size(); ++i) z1[i] -= z2[i];
  for (std::size_t i = 0; i < z0.size(); ++i) out[i] += z0[i];
  for (std::size_t i = 0; i < z1.size(); ++i) out[lo + i] += z1[i];
  for (std::size_t i = 0; i < z2.size(); ++i) out[2 * lo + i] += z2[i];
}

// Unequal lengths: the longer operand is cut into blocks of the shorter length.
inline void mul_acc(const Natural* a, std::size_t na, const Natural* b, std::size_t nb, Natural* out,
                    std::size_t threshold, WorkLedger& ledger) {
  if (na == 0 || nb == 0) return;
  if (na < nb) {
    std::swap(a, b);
    std::swap(na, nb);
  }
  if (nb <= threshold) {
    schoolbook_acc(a, na, b, nb, out, ledger);
    return;
  }
  std::size_t off = 0;
  for (; off + nb <= na; off += nb) karatsuba_acc(a + off, b, nb, out + off, threshold, ledger);
  if (off < na) mul_acc(a + off, na - off, b, nb, out + off, threshold, ledger);
}

inline Coeffs mul_coeffs(const Coeffs& a, const Coeffs& b, const Natural& n, std::size_t threshold,
                         WorkLedger& ledger) {
  if (a.empty() || b.empty()) return {};
  Coeffs out(a.size() + b.size() - 1);
  mul_acc(a.data(), a.size(), b.data(), b.size(), out.data(), threshold, ledger);
  reduce_all(out, n);
  return out;
}

inline Coeffs truncate(Coeffs v, std::size_t len) {
  if (v.size() > len) v.resize(len);
  return v;
}

inline void trim(Coeffs& v) {
  while (!v.empty() && sgn(v.back()) == 0) v.pop_back();
}

// Monic times monic: only the parts below the leading terms are multiplied.
inline Coeffs mul_monic(const Coeffs& a, const Coeffs& b, const Natural& n, std::size_t threshold,
                        WorkLedger& ledger) {
  const std::size_t da = a.size() - 1;
  const std::size_t db = b.size() - 1;
  Coeffs out(da + db + 1);
  if (da > 0 && db > 0) mul_acc(a.data(), da, b.data(), db, out.data(), threshold, ledger);
  for (std::size_t i = 0; i < da; ++i) out[db + i] += a[i];
  for (std::size_t i = 0; i < db; ++i) out[da + i] += b[i];
  out[da + db] = 1;
  reduce_all(out, n);
  return out;
}

// 1 / rev(b) mod x^k for monic b (so rev(b) has constant term 1).
inline Coeffs reversed_inverse(const Coeffs& b, std::size_t k, const Natural& n, std::size_t threshold,
                               WorkLedger& ledger) {
  Coeffs f(b.rbegin(), b.rend());
  Coeffs g{Natural(1)};
  std::size_t l = 1;
  while (l < k) {
    const std::size_t l2 = std::min(2 * l, k);
    Coeffs e = truncate(mul_coeffs(truncate(f, l2), g, n, threshold, ledger), l2);
    e.resize(l2);
    // f g = 1 + x^l h; g <- g - x^l (g h) mod x^l2.
    Coeffs h(e.begin() + static_cast<std::ptrdiff_t>(l), e.end());
    Coeffs gh = truncate(mul_coeffs(g, h, n, threshold, ledger), l2 - l);
    g.resize(l2);
    for (std::size_t i = 0; i < gh.size(); ++i) g[l + i] -= gh[i];
    reduce_all(g, n);
    l = l2;
  }
  return g;
}

// a mod b for monic b, schoolbook long division.
inline Coeffs rem_schoolbook(Coeffs a, const Coeffs& b, const Natural& n, WorkLedger& ledger) {
  const std::size_t d = b.size() - 1;
  if (a.size() <= d) return a;
  for (std::size_t i = a.size() - 1; i >= d; --i) {
    const Natural q = a[i];
    if (sgn(q) != 0) {
      ledger.multiplications += d;
      for (std::size_t j = 0; j < d; ++j) mpz_submul(a[i - d + j].get_mpz_t(), q.get_mpz_t(), b[j].get_mpz_t());
      for (std::size_t j = 0; j < d; ++j) mpz_fdiv_r(a[i - d + j].get_mpz_t(), a[i - d + j].get_mpz_t(), n.get_mpz_t());
    }
    if (i == d) break;
  }
  a.resize(d);
  trim(a);
  return a;
}

// a mod b for monic b via a precomputed reversed inverse (Newton division).
inline Coeffs rem_newton(const Coeffs& a, const Coeffs& b, const Coeffs& binv, const Natural& n,
                         std::size_t threshold, WorkLedger& ledger) {
  const std::size_t d = b.size() - 1;
  if (a.size() <= d) return a;
  const std::size_t qlen = a.size() - d;
  Coeffs ra(a.rbegin(), a.rend());
  Coeffs q = truncate(mul_coeffs(truncate(ra, qlen), truncate(binv, qlen), n, threshold, ledger), qlen);
  q.resize(qlen);
  std::reverse(q.begin(), q.end());
  trim(q);
  // Only the low d coefficients of q*b are needed.
  Coeffs qb = truncate(mul_coeffs(truncate(q, d), truncate(b, d), n, threshold, ledger), d);
  Coeffs r(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(d));
  for (std::size_t i = 0; i < qb.size(); ++i) r[i] -= qb[i];
  reduce_all(r, n);
  trim(r);
  return r;
}

}  // namespace detail

/// Coefficient-exact product; Karatsuba above the threshold.
inline PolyModN poly_mul(const PolyModN& a, const PolyModN& b, WorkLedger& ledger,
                         std::size_t threshold = kKaratsubaThreshold) {
  if (!(a.modulus == b.modulus)) throw std::invalid_argument("polynomials have different moduli");
  return PolyModN(a.modulus, detail::mul_coeffs(a.coeffs, b.coeffs, a.modulus.value(), threshold, ledger));
}

inline PolyModN poly_mul_schoolbook(const PolyModN& a, const PolyModN& b, WorkLedger& ledger) {
  if (!(a.modulus == b.modulus)) throw std::invalid_argument("polynomials have different moduli");
  if (a.is_zero() || b.is_zero()) return PolyModN(a.modulus, {});
  detail::Coeffs out(a.coeffs.size() + b.coeffs.size() - 1);
  detail::schoolbook_acc(a.coeffs.data(), a.coeffs.size(), b.coeffs.data(), b.coeffs.size(), out.data(), ledger);
  return PolyModN(a.modulus, std::move(out));
}

inline PolyModN derivative(const PolyModN& p) {
  std::vector<Natural> d;
  for (std::size_t j = 1; j < p.coeffs.size(); ++j) d.push_back(p.coeffs[j] * static_cast<unsigned long>(j));
  return PolyModN(p.modulus, std::move(d));
}

/// Binary tree whose node i holds prod (x - x_j) over its range of roots.
class ProductTree {
 public:
  ProductTree(std::span<const Residue> roots, WorkLedger& ledger, std::size_t threshold = kKaratsubaThreshold)
      : threshold_(threshold) {
    if (roots.empty()) throw std::invalid_argument("product tree needs at least one root");
    modulus_ = std::make_unique<Modulus>(roots.front().modulus());
    for (const auto& x : roots) {
      detail::require_same_modulus(roots.front(), x);
      points_.push_back(x.value());
    }
    build(0, points_.size(), ledger);
  }

  [[nodiscard]] PolyModN root() const { return PolyModN(*modulus_, nodes_.front().poly); }
  [[nodiscard]] std::size_t size() const { return points_.size(); }

  /// P(x_j) for every root x_j, by reducing P down the tree.
  [[nodiscard]] std::vector<Residue> evaluate(const PolyModN& p, WorkLedger& ledger) {
    if (!(p.modulus == *modulus_)) throw std::invalid_argument("polynomial and points have different moduli");
    std::vector<Natural> out(points_.size());
    descend(0, remainder(0, p.coeffs, ledger), out, ledger);
    std::vector<Residue> res;
    res.reserve(out.size());
    for (auto& v : out) res.push_back((*modulus_)(v));
    return res;
  }

 private:
  struct Node {
    std::size_t lo, hi;
    long left = -1, right = -1;
    detail::Coeffs poly;
    detail::Coeffs rev_inverse;  // filled on first Newton division
  };

  std::size_t build(std::size_t lo, std::size_t hi, WorkLedger& ledger) {
    const std::size_t idx = nodes_.size();
    nodes_.push_back({lo, hi, -1, -1, {}, {}});
    const Natural& n = modulus_->value();
    if (hi - lo == 1) {
      Natural c = n - points_[lo];
      if (c == n) c = 0;
      nodes_[idx].poly = {c, Natural(1)};
      return idx;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t l = build(lo, mid, ledger);
    const std::size_t r = build(mid, hi, ledger);
    nodes_[idx].left = static_cast<long>(l);
    nodes_[idx].right = static_cast<long>(r);
    nodes_[idx].poly = detail::mul_monic(nodes_[l].poly, nodes_[r].poly, n, threshold_, ledger);
    return idx;
  }

  detail::Coeffs remainder(std::size_t idx, const detail::Coeffs& a, WorkLedger& ledger) {
    Node& node = nodes_[idx];
    const std::size_t d = node.poly.size() - 1;
    if (a.size() <= d) return a;
    const Natural& n = modulus_->value();
    if (d <= kNewtonDivisionCutoff) return detail::rem_schoolbook(a, node.poly, n, ledger);
    const std::size_t need = a.size() - d;
    if (node.rev_inverse.size() < need) node.rev_inverse = detail::reversed_inverse(node.poly, std::max(need, d), n, threshold_, ledger);
    return detail::rem_newton(a, node.poly, node.rev_inverse, n, threshold_, ledger);
  }

  void descend(std::size_t idx, const detail::Coeffs& rem, std::vector<Natural>& out, WorkLedger& ledger) {
    const Node& node = nodes_[idx];
    if (node.left < 0) {
      out[node.lo] = rem.empty() ? Natural(0) : rem.front();
      return;
    }
    const auto l = static_cast<std::size_t>(node.left);
    const auto r = static_cast<std::size_t>(node.right);
    descend(l, remainder(l, rem, ledger), out, ledger);
    descend(r, remainder(r, rem, ledger), out, ledger);
  }

  std::size_t threshold_;
  std::unique_ptr<Modulus> modulus_;
  std::vector<Natural> points_;
  std::vector<Node> nodes_;
};

/// Monic P(x) = prod (x - x_j).
inline PolyModN product_tree(std::span<const Residue> roots, WorkLedger& ledger) {
  return ProductTree(roots, ledger).root();
}

inline std::vector<Residue> multipoint_eval(const PolyModN& p, std::span<const Residue> points,
                                            WorkLedger& ledger) {
  if (points.empty()) return {};
  ProductTree tree(points, ledger);
  return tree.evaluate(p, ledger);
}

/// prod_j P'(x_j) with P = prod (x - x_j). This equals
/// (-1)^{r(r-1)/2} prod_{i<j} (x_i - x_j)^2; the sign is not corrected since
/// only gcd(N, .) is ever taken.
inline Residue dsquared(std::span<const Residue> points, WorkLedger& ledger,
                        std::size_t threshold = kKaratsubaThreshold) {
  if (points.size() < 2) throw std::invalid_argument("dsquared needs at least two points");
  ProductTree tree(points, ledger, threshold);
  const auto values = tree.evaluate(derivative(tree.root()), ledger);
  Residue acc = values.front();
  for (std::size_t i = 1; i < values.size(); ++i) acc = detail::mul_plain(acc, values[i], ledger);
  return acc;
}

inline constexpr double kKaratsubaEpsilon = 0.5849625007211562;  // log2(3) - 1

/// Predicted units for D^2 by the tree method.
inline double fast_cost_model(double r, double epsilon = kKaratsubaEpsilon) {
  return 8.0 * std::pow(r, 1.0 + epsilon);
}

/// Predicted units for the pairwise product.
inline double naive_cost_model(double r) { return r * r / 2.0; }

}  // namespace ecmkit
