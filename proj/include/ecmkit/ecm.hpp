#pragma once

// Elliptic curve trials: curve draw, phase 1 over the prime-power schedule,
// hand-off to phase 2, and the adaptive (m, r) policy.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "ecmkit/analysis.hpp"
#include "ecmkit/bigmod.hpp"
#include "ecmkit/curve.hpp"
#include "ecmkit/phase2.hpp"
#include "ecmkit/primegen.hpp"
#include "ecmkit/rng.hpp"
#include "ecmkit/trial.hpp"

namespace ecmkit {

enum class Variant { ecm1, ecm2, ecm2_fast, ecm2_cross };
enum class CurveForm { weierstrass, montgomery, suyama };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::ecm1: return "ecm1";
    case Variant::ecm2: return "ecm2";
    case Variant::ecm2_fast: return "ecm2-fast";
    case Variant::ecm2_cross: return "ecm2-cross";
  }
  return "?";
}

inline std::string to_string(CurveForm f) {
  switch (f) {
    case CurveForm::weierstrass: return "weierstrass";
    case CurveForm::montgomery: return "montgomery";
    case CurveForm::suyama: return "suyama";
  }
  return "?";
}

struct TrialPlan {
  double alpha = 0;
  double beta = 0;
  std::uint64_t m = 2;
  std::uint64_t mprime = 2;
  std::size_t r = 2;
  std::size_t s = 1;
  unsigned e = 2;
  Variant variant = Variant::ecm2;
  CurveForm curve_form = CurveForm::suyama;
  std::uint64_t seed = 0;
  unsigned window_bits = kWalkWindowBits;
  double predicted_work = 0;
  double predicted_trials = 0;

  void validate() const {
    if (m < 2) throw std::invalid_argument("plan needs m >= 2");
    if (mprime < m) throw std::invalid_argument("plan needs m <= m'");
    if (variant != Variant::ecm1) {
      if (variant == Variant::ecm2_cross) {
        if (r < 1 || s < 1 || e < 1 || e > 6) throw std::invalid_argument("cross plan needs r, s >= 1 and e in 1..6");
      } else if (r < 2) {
        throw std::invalid_argument("two-phase plan needs r >= 2");
      }
      if (variant == Variant::ecm2_fast && (r & (r - 1)) != 0) throw std::invalid_argument("ecm2-fast needs r a power of 2");
    }
  }
};

/// Schedule plus the exponent E itself (only the x-only ladder needs E).
struct PhaseOneData {
  PrimePowerSchedule schedule;
  Natural exponent = 1;
};

inline std::shared_ptr<const PhaseOneData> phase_one_data(std::uint64_t m, std::uint64_t mprime) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const PhaseOneData>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{m, mprime}];
  if (!slot) {
    auto d = std::make_shared<PhaseOneData>();
    d->schedule = build_schedule(m, mprime);
    for (const auto& e : d->schedule.entries) d->exponent *= natural_from_u64(e.power);
    slot = std::move(d);
    if (cache.size() > 256) {
      auto keep = slot;
      cache.clear();
      cache[{m, mprime}] = keep;
      return keep;
    }
  }
  return slot;
}

/// P^E by successive multiplication with each p_i^{e_i}. Reaching the
/// identity mod N is reported as the trivial factor N.
inline Outcome<AffinePoint> phase1(const WeierstrassCurve& c, const AffinePoint& p, const PrimePowerSchedule& s,
                                   WorkLedger& ledger) {
  AffinePoint q = p;
  for (const auto& e : s.entries) {
    auto next = scalar_mul(q, natural_from_u64(e.power), c, ledger);
    if (next.has_factor()) return next.factor();
    q = std::move(next).value();
    if (q.is_infinity()) return FactorEvent{c.n.value()};
  }
  return q;
}

/// x-only variant: one ladder over E from a base point with y = 1, a gcd of
/// the final z, then recovery of the full point for phase 2.
inline Outcome<AffinePoint> phase1(const MontgomeryCurve& c, const XZPoint& p, const Natural& exponent,
                                   WorkLedger& ledger) {
  const Natural& n = c.n.value();
  auto [q, q1] = xz_ladder_pair(p, exponent, c, ledger);
  Natural g = gcd(q.z.value(), n);
  if (g != 1) return FactorEvent{std::move(g)};
  return recover_point(c, p.x, c.n(1), q, q1, ledger);
}

namespace detail {

inline Natural random_sigma(Rng& rng) { return natural_from_u64(6 + (rng() >> 33)); }

inline TrialOutcome run_phase2(const WeierstrassCurve& c, const AffinePoint& q, const TrialPlan& plan, Rng& rng,
                               WorkLedger& ledger) {
  const Natural& n = c.n.value();
  Phase2Result res;
  if (plan.variant == Variant::ecm2_cross) {
    res = cross_phase2(c, q, {plan.r, plan.s, plan.e, CrossEvaluation::streaming}, rng, ledger).result;
  } else {
    Phase2Config cfg;
    cfg.r = plan.r;
    cfg.evaluation = plan.variant == Variant::ecm2_fast ? Evaluation::dsquared : Evaluation::naive;
    cfg.window_bits = plan.window_bits;
    res = birthday_phase2(c, q, cfg, rng, ledger);
  }
  switch (res.status) {
    case Phase2Status::factor: return TrialOutcome::found(res.divisor, 2);
    case Phase2Status::trivial: return TrialOutcome::trivial(n, 2);
    case Phase2Status::none: break;
  }
  return {};
}

}  // namespace detail

/// One trial on stream (plan.seed, index). N must be odd and coprime to 3.
inline TrialOutcome run_trial(const Natural& n, const TrialPlan& plan, const PhaseOneData& data,
                              std::uint64_t index) {
  Rng rng = make_stream(plan.seed, index);
  WorkLedger ledger;
  TrialOutcome out;
  const auto finish = [&](TrialOutcome t) {
    t.ledger = ledger;
    return t;
  };

  if (plan.curve_form == CurveForm::weierstrass) {
    auto [curve, p] = random_curve_through_point(n, rng);
    auto q = phase1(curve, p, data.schedule, ledger);
    if (q.has_factor()) return finish(classify(q.factor(), n, 1));
    if (plan.variant == Variant::ecm1) return finish(out);
    return finish(detail::run_phase2(curve, q.value(), plan, rng, ledger));
  }

  auto drawn = plan.curve_form == CurveForm::suyama
                   ? suyama_curve(detail::random_sigma(rng), n, ledger)
                   : Outcome<std::pair<MontgomeryCurve, XZPoint>>(random_montgomery_curve(n, rng, ledger));
  if (drawn.has_factor()) return finish(classify(drawn.factor(), n, 1));
  const auto& [mc, p] = drawn.value();
  auto q = phase1(mc, p, data.exponent, ledger);
  if (q.has_factor()) return finish(classify(q.factor(), n, 1));
  if (plan.variant == Variant::ecm1) return finish(out);
  if (q.value().is_infinity()) return finish(TrialOutcome::trivial(n, 1));
  auto mapped = montgomery_to_weierstrass(mc, q.value().x(), q.value().y(), ledger);
  if (mapped.has_factor()) return finish(classify(mapped.factor(), n, 2));
  const auto& [wc, wq] = mapped.value();
  return finish(detail::run_phase2(wc, wq, plan, rng, ledger));
}

inline TrialOutcome run_trial(const Natural& n, const TrialPlan& plan, std::uint64_t index) {
  return run_trial(n, plan, *phase_one_data(plan.m, plan.mprime), index);
}

/// Walk length putting phase-2 work at half of phase-1 work under the cost
/// model: r^2/2 + c_w r = c1 m / 2.
inline std::size_t balanced_r(std::uint64_t m, double w21 = 0.5) {
  const double target = w21 * phase1_constant() * static_cast<double>(m);
  const double r = -kWalkCost + std::sqrt(kWalkCost * kWalkCost + 2.0 * target);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(r)));
}

/// m/T from the optimal plan for primes of the hinted size (135 near 20 digits).
inline double m_per_trial(double hint_digits) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(hint_digits);
  if (it != cache.end()) return it->second;
  const double v = optimize(3, hint_digits).m_over_t();
  cache.emplace(hint_digits, v);
  return v;
}

struct AdaptiveStep {
  std::uint64_t m;
  std::size_t r;
};

/// Trial T (1-based) uses m = (m/T) * T and a walk balanced at w21 = 0.5.
inline AdaptiveStep adaptive_policy(std::uint64_t trial, double hint_digits = 20) {
  if (trial < 1) throw std::invalid_argument("adaptive policy trials count from 1");
  const double ratio = m_per_trial(hint_digits);
  const auto m = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(trial))));
  return {m, balanced_r(m)};
}

inline std::size_t round_to_power_of_two(double r) {
  std::size_t p = 2;
  while (static_cast<double>(p) * 1.41421356 < r) p <<= 1;
  return p;
}

/// Fixed plan from the optimiser for primes of about log10p digits.
inline TrialPlan optimized_plan(double log10p, Variant variant, CurveForm form, std::uint64_t seed) {
  const int alg = variant == Variant::ecm1 ? 2 : variant == Variant::ecm2_fast ? 4 : 3;
  const PlanEstimate e = optimize(alg, std::clamp(log10p, 4.0, 60.0));
  TrialPlan plan;
  plan.alpha = e.alpha;
  plan.beta = e.beta;
  plan.m = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::llround(e.m)));
  plan.mprime = plan.m;
  plan.variant = variant;
  plan.curve_form = form;
  plan.seed = seed;
  plan.r = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(e.r)));
  if (variant == Variant::ecm2_fast) plan.r = round_to_power_of_two(e.r);
  if (variant == Variant::ecm2_cross) {
    // r s cross pairs match the r^2/2 pairs of the walk.
    const auto side = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(e.r / std::sqrt(2.0))));
    plan.r = side;
    plan.s = side;
  }
  plan.predicted_work = e.work;
  plan.predicted_trials = e.trials;
  return plan;
}

/// ECM search on one composite with a fixed plan.
inline SearchResult ecm_search(const Natural& n, const TrialPlan& plan, const SearchOptions& opt) {
  plan.validate();
  const auto data = phase_one_data(plan.m, plan.mprime);
  return run_search([&](std::uint64_t i) { return run_trial(n, plan, *data, i); }, opt);
}

/// ECM search where trial T uses the adaptive (m, r); the plan supplies
/// everything else.
inline SearchResult ecm_search_adaptive(const Natural& n, const TrialPlan& base, double hint_digits,
                                        const SearchOptions& opt) {
  return run_search(
      [&](std::uint64_t i) {
        const AdaptiveStep step = adaptive_policy(i + 1, hint_digits);
        TrialPlan plan = base;
        plan.m = step.m;
        plan.mprime = std::max(step.m, base.mprime);
        plan.r = base.variant == Variant::ecm2_fast ? round_to_power_of_two(static_cast<double>(step.r)) : step.r;
        if (base.variant == Variant::ecm2_cross) {
          plan.r = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(step.r) / std::sqrt(2.0))));
          plan.s = plan.r;
        }
        return run_trial(n, plan, *phase_one_data(plan.m, plan.mprime), i);
      },
      opt);
}

}  // namespace ecmkit
