#pragma once

// Dickman's rho, the two-bound smoothness density mu(alpha, beta), the
// phase-2 success integral, work models for the four algorithms and the
// parameter optimiser behind the two regenerated tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecmkit/bigmod.hpp"

namespace ecmkit {

/// rho on a uniform mesh. rho = 1 - ln u on [1, 2]; past that each node
/// solves u rho(u) = int_{u-1}^{u} rho(t) dt, the right-hand side summed
/// interval by interval with a four-point rule. Every term is positive, so
/// the error stays relative even where rho is tiny (the differential form
/// keeps an absolute error and falls apart near alpha = 10).
class RhoTable {
 public:
  explicit RhoTable(double max_alpha = 64.0, int steps_per_unit = 256)
      : k_(steps_per_unit), panels_(std::max(2, static_cast<int>(std::ceil(max_alpha)))) {
    if (steps_per_unit < 4) throw std::invalid_argument("rho mesh needs at least 4 steps per unit");
    const long k = k_;
    const long total = static_cast<long>(panels_) * k + 1;
    const double h = 1.0 / k_;
    v_.assign(static_cast<std::size_t>(total), 1.0);
    for (long i = k + 1; i <= 2 * k && i < total; ++i) v_[i] = 1.0 - std::log(static_cast<double>(i) * h);

    static constexpr std::array<std::array<double, 4>, 3> w{{{9, 19, -5, 1}, {-1, 13, 13, -1}, {1, -5, 19, 9}}};
    // Stencil for [t_j, t_{j+1}] kept inside its unit panel.
    const auto home = [k](long j) {
      const long p = j / k;
      return std::clamp(j - 1, p * k, p * k + k - 3);
    };
    std::vector<double> piece(static_cast<std::size_t>(total), 0.0);
    long done = 0;  // pieces below this index are final
    for (long i = 2 * k + 1; i < total; ++i) {
      for (; done < i && home(done) + 3 <= i - 1; ++done) {
        const long s = home(done);
        const auto& wo = w[done - s];
        double acc = 0;
        for (int q = 0; q < 4; ++q) acc += wo[q] * v_[s + q];
        piece[done] = acc * h / 24.0;
      }
      double known = 0, open = 0, self = 0;
      for (long j = i - k; j < done; ++j) known += piece[j];
      for (long j = done; j < i; ++j) {
        const long s = std::min(home(j), i - 3);
        const auto& wo = w[j - s];
        for (int q = 0; q < 4; ++q) {
          if (s + q == i) self += wo[q];
          else open += wo[q] * v_[s + q];
        }
      }
      const double u = static_cast<double>(i) * h;
      v_[i] = (known + open * h / 24.0) / (u - self * h / 24.0);
    }
  }

  [[nodiscard]] double max_alpha() const { return panels_; }
  [[nodiscard]] int steps_per_unit() const { return k_; }

  /// Cubic interpolation inside the panel holding alpha.
  [[nodiscard]] double operator()(double alpha) const {
    if (!(alpha >= 0)) throw std::invalid_argument("rho needs alpha >= 0");
    if (alpha <= 1.0) return 1.0;
    if (alpha > max_alpha()) throw std::out_of_range("alpha beyond rho table");
    const double x = alpha * k_;
    const int n = std::min(static_cast<int>(alpha), panels_ - 1);
    const long lo = static_cast<long>(n) * k_;
    const long start = std::clamp(static_cast<long>(std::floor(x)) - 1, lo, lo + k_ - 3);
    double out = 0;
    for (int i = 0; i < 4; ++i) {
      double li = 1;
      for (int j = 0; j < 4; ++j) {
        if (j != i) li *= (x - static_cast<double>(start + j)) / static_cast<double>(i - j);
      }
      out += li * v_[static_cast<std::size_t>(start + i)];
    }
    return out;
  }

 private:
  int k_;
  int panels_;
  std::vector<double> v_;
};

/// Dickman rho from a shared table (alpha <= 64), extended on demand.
inline double rho(double alpha) {
  static const RhoTable base(64.0);
  if (alpha <= base.max_alpha()) return base(alpha);
  static std::mutex mu;
  static std::unique_ptr<RhoTable> wide;
  std::lock_guard lock(mu);
  if (!wide || wide->max_alpha() < alpha) wide = std::make_unique<RhoTable>(std::ceil(alpha * 1.5));
  return (*wide)(alpha);
}

/// Composite Simpson over [a, b], split at the given breakpoints and at every
/// integer; pieces use steps of at most 1/256.
template <class F>
double integrate(const F& f, double a, double b, std::vector<double> breaks = {}) {
  if (!(b > a)) return 0.0;
  for (double t = std::floor(a) + 1; t < b; t += 1) breaks.push_back(t);
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (!(hi > lo)) continue;
    int n = static_cast<int>(std::ceil((hi - lo) * 256.0));
    n = std::max(2, n + (n & 1));
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int j = 1; j < n; ++j) s += f(lo + j * h) * ((j & 1) ? 4.0 : 2.0);
    total += s * h / 3.0;
  }
  return total;
}

/// Probability that the largest prime factor of a random integer M is below
/// M^{beta/alpha} and the second largest below M^{1/alpha}.
inline double mu(double alpha, double beta) {
  if (alpha < 1 || beta < 0) throw std::invalid_argument("mu needs alpha >= 1 and beta >= 0");
  const double lo = std::max(alpha - beta, 0.0);
  const double hi = alpha - 1.0;
  const double base = rho(alpha);
  if (!(hi > lo)) return base;
  return base + integrate([alpha](double t) { return rho(t) / (alpha - t); }, lo, hi);
}

/// Phase-2 success probability with the birthday step smoothed out:
/// rho(alpha) + int_0^{alpha-1} (1 - 2^{-p^{(t+beta-alpha)/alpha}}) rho(t)/(alpha-t) dt.
inline double phase2_success(double log10p, double alpha, double beta) {
  if (alpha < 1) throw std::invalid_argument("phase2_success needs alpha >= 1");
  const double lnp = log10p * std::log(10.0);
  const double base = rho(alpha);
  if (alpha <= 1.0) return base;
  const auto f = [=](double t) {
    const double x = std::exp(lnp * (t + beta - alpha) / alpha);
    return -std::expm1(-x * std::log(2.0)) * rho(t) / (alpha - t);
  };
  std::vector<double> br;
  if (alpha - beta > 0 && alpha - beta < alpha - 1) br.push_back(alpha - beta);
  return base + integrate(f, 0.0, alpha - 1.0, br);
}

inline constexpr double kEpsilon = 0.5849625007211562;  // log2(3) - 1

/// Units per phase-1 prime-power bit: (11/3 + K) group-law units at 3/2
/// operations per bit, per ln 2 of exponent growth.
inline double phase1_constant() {
  return (11.0 / 3.0 + static_cast<double>(kInversionCost)) * 3.0 / (2.0 * std::log(2.0));
}

// sqrt(p) scale of the rho method, fitted to the half-slope line.
inline constexpr double kRhoConstant = 3.09;
// Units per phase-2 walk point: a doubling and (almost always) an addition.
inline constexpr double kWalkCost = 22.0;

/// Exponent ratio of phase 2 from the walk length: r^2 = m^beta ln 2 when
/// folded (x-coordinates), r^2 = m^beta 2 ln 2 otherwise.
inline double beta_from_r(double m, double r, bool folded = true) {
  if (m < 2 || r < 2) throw std::invalid_argument("beta_from_r needs m >= 2 and r >= 2");
  const double shift = folded ? std::log(std::log(2.0)) : std::log(2.0 * std::log(2.0));
  return (2.0 * std::log(r) - shift) / std::log(m);
}

inline double r_from_beta(double m, double beta, bool folded = true) {
  return std::sqrt(std::pow(m, beta) * std::log(2.0) * (folded ? 1.0 : 2.0));
}

enum class ProbabilityModel { step, smooth };

struct PlanEstimate {
  double log10p = 0;
  int algorithm = 0;
  double alpha = 0;
  double beta = 0;
  double m = 0;
  double r = 0;
  double success_prob = 1;
  double trial_cost = 0;
  double work = 0;
  double trials = 1;
  double w21 = 0;
  double speedup = 1;

  [[nodiscard]] double log10_work() const { return std::log10(work); }
  [[nodiscard]] double m_over_t() const { return m / trials; }

  friend bool operator==(const PlanEstimate&, const PlanEstimate&) = default;
};

namespace detail {

inline double phase2_cost(int algorithm, double r) {
  const double pairs = algorithm == 4 ? 8.0 * std::pow(r, 1.0 + kEpsilon) : r * r / 2.0;
  return pairs + kWalkCost * r;
}

inline double probability(ProbabilityModel model, double log10p, double alpha, double beta) {
  return model == ProbabilityModel::step ? mu(alpha, beta) : phase2_success(log10p, alpha, beta);
}

// Golden-section minimum of f on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-7) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

// Grid scan followed by golden refinement in the neighbouring cells.
inline double grid_golden_min(const std::function<double(double)>& f, double lo, double hi, double step,
                              double tol = 1e-7) {
  double best_x = lo;
  double best = std::numeric_limits<double>::infinity();
  for (double x = lo; x <= hi + 1e-12; x += step) {
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return golden_min(f, std::max(lo, best_x - step), std::min(hi, best_x + step), tol);
}

inline double alg2_log_work(double log10p, double alpha) {
  const double lnp = log10p * std::log(10.0);
  return std::log(phase1_constant()) + lnp / alpha - std::log(rho(alpha));
}

}  // namespace detail

/// Expected-work estimate. For algorithms 2 and 3 the last argument is beta
/// (ignored by 2); for algorithm 4 it is the walk length r.
inline PlanEstimate work_model(int algorithm, double log10p, double alpha, double beta_or_r,
                               ProbabilityModel model = ProbabilityModel::smooth) {
  PlanEstimate e;
  e.log10p = log10p;
  e.algorithm = algorithm;
  const double lnp = log10p * std::log(10.0);
  const double c1 = phase1_constant();
  switch (algorithm) {
    case 1:
      e.trial_cost = kRhoConstant * std::exp(lnp / 2.0);
      e.work = e.trial_cost;
      return e;
    case 2:
      e.alpha = alpha;
      e.beta = 1.0;
      e.m = std::exp(lnp / alpha);
      e.trial_cost = c1 * e.m;
      e.success_prob = rho(alpha);
      break;
    case 3:
      e.alpha = alpha;
      e.beta = beta_or_r;
      e.m = std::exp(lnp / alpha);
      e.r = r_from_beta(e.m, e.beta);
      e.trial_cost = c1 * e.m + detail::phase2_cost(3, e.r);
      e.success_prob = detail::probability(model, log10p, alpha, e.beta);
      break;
    case 4:
      e.alpha = alpha;
      e.r = beta_or_r;
      e.m = std::exp(lnp / alpha);
      e.beta = beta_from_r(e.m, e.r);
      e.trial_cost = c1 * e.m + detail::phase2_cost(4, e.r);
      e.success_prob = detail::probability(model, log10p, alpha, e.beta);
      break;
    default:
      throw std::invalid_argument("algorithm must be 1, 2, 3 or 4");
  }
  e.trials = 1.0 / e.success_prob;
  e.work = e.trial_cost * e.trials;
  if (algorithm >= 3) e.w21 = detail::phase2_cost(algorithm, e.r) / (c1 * e.m);
  return e;
}

/// Parameters minimising expected work. Algorithms 3 and 4 are selected on
/// the step model (mu) and then reported with the smooth success integral;
/// algorithm 4 restricts r to powers of 2.
inline PlanEstimate optimize(int algorithm, double log10p) {
  if (!(log10p >= 4 && log10p <= 60)) throw std::invalid_argument("log10 p must lie in [4, 60]");
  if (algorithm == 1) return work_model(1, log10p, 0, 0);

  const double a2 = detail::grid_golden_min([&](double a) { return detail::alg2_log_work(log10p, a); }, 1.5, 20.0, 0.05);
  PlanEstimate alg2 = work_model(2, log10p, a2, 1.0);
  if (algorithm == 2) return alg2;

  const double lnp = log10p * std::log(10.0);
  const double c1 = phase1_constant();
  PlanEstimate best;
  if (algorithm == 3) {
    const auto inner = [&](double a, double& b_out) {
      const double m = std::exp(lnp / a);
      const auto obj = [&](double b) {
        const double r = r_from_beta(m, b);
        return std::log(c1 * m + detail::phase2_cost(3, r)) - std::log(mu(a, b));
      };
      b_out = detail::grid_golden_min(obj, 1.0, 3.0, 0.1, 1e-6);
      return obj(b_out);
    };
    double b_tmp = 0;
    const double a = detail::grid_golden_min([&](double x) { return inner(x, b_tmp); }, 1.5, 20.0, 0.25, 1e-6);
    double b = 0;
    inner(a, b);
    best = work_model(3, log10p, a, b);
  } else if (algorithm == 4) {
    double best_obj = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 48; ++k) {
      const double r = std::ldexp(1.0, k);
      const double a_min = std::max(1.5, lnp / (2.0 * std::log(r) - std::log(std::log(2.0))));
      if (a_min >= 20.0) continue;
      const auto obj = [&](double a) {
        const double m = std::exp(lnp / a);
        if (m < 2) return std::numeric_limits<double>::infinity();
        return std::log(c1 * m + detail::phase2_cost(4, r)) - std::log(mu(a, beta_from_r(m, r)));
      };
      const double a = detail::grid_golden_min(obj, a_min, 20.0, 0.25, 1e-6);
      const double v = obj(a);
      if (v < best_obj) {
        best_obj = v;
        best = work_model(4, log10p, a, r);
      }
    }
  } else {
    throw std::invalid_argument("algorithm must be 1, 2, 3 or 4");
  }
  best.speedup = alg2.work / best.work;
  return best;
}

struct Tables {
  std::string table1;
  std::string table2;
};

inline const std::vector<double>& table1_rows() {
  static const std::vector<double> rows{6, 8, 10, 12, 14, 16, 18, 20, 30, 40, 50};
  return rows;
}

inline const std::vector<double>& table2_rows() {
  static const std::vector<double> rows{10, 20, 30};
  return rows;
}

/// Both tables as CSV text with a header row and LF line endings.
inline Tables emit_tables() {
  Tables t;
  t.table1 = "log10p,alg1,alg2,alg3,alg4\n";
  char buf[256];
  for (double l : table1_rows()) {
    std::snprintf(buf, sizeof buf, "%.0f,%.2f,%.2f,%.2f,%.2f\n", l, optimize(1, l).log10_work(),
                  optimize(2, l).log10_work(), optimize(3, l).log10_work(), optimize(4, l).log10_work());
    t.table1 += buf;
  }
  t.table2 = "log10p,alpha,beta,m,r,T,w21,m_over_T,S\n";
  for (double l : table2_rows()) {
    const PlanEstimate e = optimize(3, l);
    std::snprintf(buf, sizeof buf, "%.0f,%.3f,%.3f,%.0f,%.0f,%.1f,%.3f,%.0f,%.2f\n", l, e.alpha, e.beta, e.m, e.r,
                  e.trials, e.w21, e.m_over_t(), e.speedup);
    t.table2 += buf;
  }
  return t;
}

}  // namespace ecmkit
