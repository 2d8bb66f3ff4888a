#pragma once

// The four front-end commands, written against streams so they can be driven
// from tests as well as from the executable.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecmkit/analysis.hpp"
#include "ecmkit/ecm.hpp"
#include "ecmkit/factorize.hpp"
#include "ecmkit/rivals.hpp"

namespace ecmkit {

inline constexpr int kExitComplete = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct FactorArgs {
  std::string n;
  FactorPolicy policy;
  bool json = false;
  bool timing = false;
};

inline nlohmann::ordered_json report_json(const Factorization& f, const FactorPolicy& pol,
                                          std::optional<double> wall_seconds) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["n"] = to_decimal(f.n);
  j["complete"] = f.complete;
  ordered_json list = ordered_json::array();
  for (const auto& r : f.factors) {
    list.push_back({{"value", to_decimal(r.value)},
                    {"multiplicity", r.multiplicity},
                    {"prime", r.prime && probable_prime(r.value)},
                    {"method", r.method},
                    {"phase", r.phase},
                    {"trials_used", r.trials_used},
                    {"work_units", r.work_units}});
  }
  j["factors"] = std::move(list);
  j["total_work_units"] = f.ledger.units();
  j["ledger"] = {{"multiplications", f.ledger.multiplications},
                 {"squarings", f.ledger.squarings},
                 {"inversions", f.ledger.inversions}};
  j["trials_used"] = f.trials_used;
  j["seed"] = pol.seed;

  ordered_json plan;
  plan["algorithm"] = to_string(pol.algorithm);
  if (pol.algorithm != Algorithm::rho) {
    const TrialPlan p = plan_from_policy(pol, pol.seed);
    plan["adaptive"] = !pol.m.has_value();
    plan["m"] = p.m;
    plan["mprime"] = p.mprime;
    if (pol.algorithm != Algorithm::ecm1) {
      plan["r"] = p.r;
      if (pol.algorithm == Algorithm::ecm2_cross) {
        plan["s"] = p.s;
        plan["e"] = p.e;
      }
      plan["beta"] = p.m >= 2 ? beta_from_r(static_cast<double>(p.m), static_cast<double>(p.r)) : 0.0;
    }
    if (pol.algorithm != Algorithm::pm1) plan["curve_form"] = to_string(pol.curve_form);
    plan["hint_digits"] = pol.hint_digits;
  } else {
    plan["max_iterations"] = pol.rho_max_iterations;
  }
  plan["threads"] = pol.search.threads;
  plan["max_trials"] = pol.search.max_trials;
  j["plan"] = std::move(plan);
  if (wall_seconds) j["wall_seconds"] = *wall_seconds;
  return j;
}

inline int cmd_factor(const FactorArgs& args, std::ostream& out) {
  const Natural n = parse_natural(args.n);
  if (n < 2) throw std::invalid_argument("N must be at least 2");
  const auto t0 = std::chrono::steady_clock::now();
  const Factorization f = factorize(n, args.policy);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::optional<double> wall = args.timing ? std::optional<double>(secs) : std::nullopt;

  if (args.json) {
    out << report_json(f, args.policy, wall).dump() << '\n';
  } else {
    out << "N = " << to_decimal(n) << '\n';
    for (const auto& r : f.factors) {
      out << "  " << to_decimal(r.value);
      if (r.multiplicity > 1) out << " ^" << r.multiplicity;
      out << (r.prime ? "  prime" : "  composite") << "  via " << r.method;
      if (r.phase > 0) out << " (phase " << r.phase << ")";
      if (r.trials_used > 0) out << "  trials " << r.trials_used;
      out << '\n';
    }
    out << "work units: " << f.ledger.units() << "  seed: " << args.policy.seed << '\n';
    if (wall) out << "wall seconds: " << *wall << '\n';
    if (!f.complete) out << "incomplete: budget exhausted\n";
  }
  return f.complete ? kExitComplete : kExitPartial;
}

struct PlanArgs {
  double hint_digits = 20;
  int algorithm = 3;
  bool json = false;
};

inline int cmd_plan(const PlanArgs& args, std::ostream& out) {
  if (!(args.hint_digits >= 4 && args.hint_digits <= 60)) throw std::invalid_argument("hint digits must lie in [4, 60]");
  if (args.algorithm < 1 || args.algorithm > 4) throw std::invalid_argument("algorithm must be 1..4");
  const PlanEstimate e = optimize(args.algorithm, args.hint_digits);
  if (args.json) {
    nlohmann::ordered_json j{{"log10p", e.log10p}, {"algorithm", e.algorithm}, {"alpha", e.alpha},
                             {"beta", e.beta},     {"m", e.m},                 {"r", e.r},
                             {"trials", e.trials}, {"w21", e.w21},             {"log10_work", e.log10_work()},
                             {"m_over_T", e.m_over_t()}, {"speedup", e.speedup}};
    out << j.dump() << '\n';
    return kExitComplete;
  }
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "algorithm  %d\nlog10p     %.2f\nalpha      %.3f\nbeta       %.3f\nm          %.0f\nr          %.0f\n"
                "T          %.1f\nw21        %.3f\nlog10W     %.2f\nm/T        %.0f\nS          %.2f\n",
                e.algorithm, e.log10p, e.alpha, e.beta, e.m, e.r, e.trials, e.w21, e.log10_work(), e.m_over_t(),
                e.speedup);
  out << buf;
  return kExitComplete;
}

/// Writes table1.csv and table2.csv into dir; returns the paths written.
inline std::vector<std::filesystem::path> cmd_tables(const std::filesystem::path& dir, std::ostream& out) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const Tables t = emit_tables();
  std::vector<std::filesystem::path> written;
  for (const auto& [name, body] : {std::pair{"table1.csv", &t.table1}, std::pair{"table2.csv", &t.table2}}) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << *body;
    if (!f) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
    out << path.string() << '\n';
  }
  return written;
}

struct BenchArgs {
  int p_digits = 6;
  unsigned count = 10;
  Algorithm algorithm = Algorithm::ecm2;
  CurveForm curve_form = CurveForm::weierstrass;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct BenchRow {
  Natural n;
  Natural p;
  double log10p = 0;
  double observed = 0;
  double predicted = 0;
};

struct BenchSummary {
  std::vector<BenchRow> rows;
  double mean_observed = 0;
  double mean_predicted = 0;
  [[nodiscard]] double ratio() const { return mean_predicted > 0 ? mean_observed / mean_predicted : 0.0; }
};

namespace detail {

inline Natural random_prime_from(const Natural& lo, Rng& rng) {
  Natural x = lo + random_below(lo * 9, rng);
  Natural p;
  mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
  return p;
}

inline int model_algorithm(Algorithm a) {
  switch (a) {
    case Algorithm::rho: return 1;
    case Algorithm::ecm1: return 2;
    case Algorithm::ecm2_fast: return 4;
    default: return 3;
  }
}

}  // namespace detail

/// Semiprimes p q with p drawn from [10^k, 10^(k+1)) and q two digits longer,
/// each factored with the optimiser's fixed plan for its p.
inline BenchSummary run_bench(const BenchArgs& args) {
  if (args.p_digits < 2 || args.p_digits > 9) throw std::invalid_argument("bench p digits must lie in [2, 9]");
  if (args.algorithm == Algorithm::pm1) throw std::invalid_argument("bench has no work model for pm1");
  BenchSummary s;
  Natural lo_p = 1;
  for (int i = 0; i < args.p_digits; ++i) lo_p *= 10;
  const Natural lo_q = lo_p * 100;
  Rng gen = make_stream(args.seed, 0);
  for (unsigned i = 0; i < args.count; ++i) {
    BenchRow row;
    row.p = detail::random_prime_from(lo_p, gen);
    row.n = row.p * detail::random_prime_from(lo_q, gen);
    row.log10p = std::log10(row.p.get_d());
    const std::uint64_t seed = mix_seed(args.seed, i + 1);
    const double lp = std::clamp(row.log10p, 4.0, 60.0);
    if (args.algorithm == Algorithm::rho) {
      const TrialOutcome t = pollard_rho(row.n, seed, 1ULL << 40);
      if (t.status != TrialStatus::factor_found) throw std::runtime_error("rho failed on a bench semiprime");
      row.observed = static_cast<double>(t.ledger.units());
      row.predicted = optimize(1, lp).work;
    } else {
      const TrialPlan plan = optimized_plan(lp, detail::variant_of(args.algorithm), args.curve_form, seed);
      SearchOptions opt;
      opt.threads = args.threads;
      opt.max_trials = 1000000;
      const SearchResult r = ecm_search(row.n, plan, opt);
      if (r.status != TrialStatus::factor_found) throw std::runtime_error("ecm failed on a bench semiprime");
      row.observed = static_cast<double>(r.ledger.units());
      row.predicted = optimize(detail::model_algorithm(args.algorithm), lp).work;
    }
    s.mean_observed += row.observed;
    s.mean_predicted += row.predicted;
    s.rows.push_back(std::move(row));
  }
  if (!s.rows.empty()) {
    s.mean_observed /= static_cast<double>(s.rows.size());
    s.mean_predicted /= static_cast<double>(s.rows.size());
  }
  return s;
}

inline void write_bench_csv(const BenchSummary& s, std::ostream& out) {
  out << "index,n,p,log10p,observed_work,predicted_work,ratio\n";
  char buf[160];
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& r = s.rows[i];
    std::snprintf(buf, sizeof buf, ",%.4f,%.0f,%.0f,%.4f\n", r.log10p, r.observed, r.predicted,
                  r.observed / r.predicted);
    out << i << ',' << to_decimal(r.n) << ',' << to_decimal(r.p) << buf;
  }
  if (!s.rows.empty()) {
    std::snprintf(buf, sizeof buf, "mean,,,,%.1f,%.1f,%.4f\n", s.mean_observed, s.mean_predicted, s.ratio());
    out << buf;
  }
}

inline int cmd_bench(const BenchArgs& args, std::ostream& out) {
  write_bench_csv(run_bench(args), out);
  return kExitComplete;
}

}  // namespace ecmkit
