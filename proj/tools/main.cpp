// ecmkit: factor, plan, tables, bench.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "ecmkit/commands.hpp"

using namespace ecmkit;

namespace {

const std::map<std::string, Algorithm> kAlgorithms{
    {"rho", Algorithm::rho},         {"ecm1", Algorithm::ecm1},
    {"ecm2", Algorithm::ecm2},       {"ecm2-fast", Algorithm::ecm2_fast},
    {"ecm2-cross", Algorithm::ecm2_cross}, {"pm1", Algorithm::pm1}};

const std::map<std::string, CurveForm> kForms{
    {"weierstrass", CurveForm::weierstrass}, {"montgomery", CurveForm::montgomery}, {"suyama", CurveForm::suyama}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elliptic curve factoring with a birthday-paradox second phase"};
  app.require_subcommand(1);

  FactorArgs fa;
  std::optional<std::uint64_t> factor_seed;
  std::optional<std::uint64_t> m, mprime;
  std::optional<std::size_t> r;
  std::optional<double> beta;
  auto* factor = app.add_subcommand("factor", "factor N completely");
  factor->add_option("N", fa.n, "decimal, or hex with 0x")->required();
  factor->add_option("--algorithm", fa.policy.algorithm)->transform(CLI::CheckedTransformer(kAlgorithms));
  factor->add_option("--curve-form", fa.policy.curve_form)->transform(CLI::CheckedTransformer(kForms));
  factor->add_option("--m", m, "phase-1 bound (fixed plan; default adaptive)")->check(CLI::Range(2ULL, 1ULL << 40));
  factor->add_option("--mprime", mprime, "bound for the largest prime powers");
  factor->add_option("--r", r, "phase-2 walk length")->check(CLI::PositiveNumber);
  factor->add_option("--beta", beta, "phase-2 reach, r derived from it")->check(CLI::Range(1.0, 4.0));
  factor->add_option("--e", fa.policy.e, "cross variant exponent")->check(CLI::Range(1, 6));
  factor->add_option("--threads", fa.policy.search.threads)->check(CLI::Range(1, 256));
  factor->add_option("--seed", factor_seed);
  factor->add_option("--max-trials", fa.policy.search.max_trials)->check(CLI::PositiveNumber);
  factor->add_option("--hint-digits", fa.policy.hint_digits)->check(CLI::Range(4.0, 60.0));
  factor->add_option("--rho-max-iterations", fa.policy.rho_max_iterations);
  factor->add_flag("--json", fa.json);
  factor->add_flag("--timing", fa.timing, "report wall-clock seconds (breaks byte reproducibility)");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "optimal parameters for primes of D digits");
  plan->add_option("--hint-digits", pa.hint_digits)->check(CLI::Range(4.0, 60.0));
  plan->add_option("--algorithm", pa.algorithm, "model 1 (rho), 2, 3 or 4")->check(CLI::Range(1, 4));
  plan->add_flag("--json", pa.json);

  std::string out_dir = ".";
  auto* tables = app.add_subcommand("tables", "write table1.csv and table2.csv");
  tables->add_option("--out-dir", out_dir);

  BenchArgs ba;
  std::optional<std::uint64_t> bench_seed;
  auto* bench = app.add_subcommand("bench", "observed against predicted work on random semiprimes");
  bench->add_option("--p-digits", ba.p_digits)->check(CLI::Range(2, 9));
  bench->add_option("--count", ba.count);
  bench->add_option("--algorithm", ba.algorithm)->transform(CLI::CheckedTransformer(kAlgorithms));
  bench->add_option("--curve-form", ba.curve_form)->transform(CLI::CheckedTransformer(kForms));
  bench->add_option("--seed", bench_seed);
  bench->add_option("--threads", ba.threads)->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*factor) {
      fa.policy.seed = factor_seed ? *factor_seed : entropy_seed();
      fa.policy.m = m;
      fa.policy.mprime = mprime;
      fa.policy.r = r;
      fa.policy.beta = beta;
      return cmd_factor(fa, std::cout);
    }
    if (*plan) return cmd_plan(pa, std::cout);
    if (*tables) {
      cmd_tables(out_dir, std::cout);
      return kExitComplete;
    }
    ba.seed = bench_seed ? *bench_seed : entropy_seed();
    return cmd_bench(ba, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
