#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ecmkit/analysis.hpp"

using namespace ecmkit;

namespace {

// Same recurrence at a sixteenth of the default step.
const RhoTable& fine_rho() {
  static const RhoTable t(4.0, 4096);
  return t;
}

// Plain Simpson on the fine table, independent of integrate().
double fine_mu(double alpha, double beta) {
  const auto& r = fine_rho();
  const double lo = alpha - beta, hi = alpha - 1.0;
  const int n = 1 << 14;
  const double h = (hi - lo) / n;
  double s = 0;
  for (int j = 0; j <= n; ++j) {
    const double t = lo + j * h;
    const double w = (j == 0 || j == n) ? 1.0 : (j & 1) ? 4.0 : 2.0;
    s += w * r(t) / (alpha - t);
  }
  return r(alpha) + s * h / 3.0;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Rho, FirstPanels) {
  EXPECT_EQ(rho(0.0), 1.0);
  EXPECT_EQ(rho(0.5), 1.0);
  EXPECT_EQ(rho(1.0), 1.0);
  EXPECT_NEAR(rho(2.0), 1.0 - std::log(2.0), 1e-9);
  EXPECT_NEAR(rho(1.5), 1.0 - std::log(1.5), 1e-9);
  EXPECT_NEAR(rho(3.0), 0.0486, 1e-4);
}

TEST(Rho, AgreesWithRefinedMesh) {
  for (double a : {2.25, 2.5, 3.0, 3.3, 3.75, 4.0}) EXPECT_NEAR(rho(a), fine_rho()(a), 1e-9) << a;
}

TEST(Rho, RelativeAccuracyFarOut) {
  // Known value rho(10) = 2.77017183772596e-11.
  EXPECT_NEAR(rho(10.0) / 2.77017183772596e-11, 1.0, 1e-7);
  const RhoTable coarse(24.0, 128), fine(24.0, 1024);
  for (double a : {12.0, 16.5, 20.0, 24.0}) EXPECT_NEAR(coarse(a) / fine(a), 1.0, 1e-6) << a;
}

TEST(Rho, StrictlyDecreasingInUnitInterval) {
  double prev = rho(1.0);
  for (double a = 1.01; a <= 30.0; a += 0.01) {
    const double v = rho(a);
    ASSERT_LT(v, prev) << a;
    ASSERT_GT(v, 0.0) << a;
    prev = v;
  }
}

TEST(Rho, SatisfiesIntegralEquation) {
  for (double a : {2.5, 4.0, 7.3, 11.0}) {
    const double rhs = integrate([](double t) { return rho(t); }, a - 1.0, a);
    EXPECT_NEAR(a * rho(a) / rhs, 1.0, 1e-6) << a;
  }
}

TEST(Rho, ExtendsPastDefaultTable) {
  const double a = 70.0;
  EXPECT_GT(rho(a), 0.0);
  EXPECT_LT(rho(a), rho(64.0));
  EXPECT_THROW(rho(-1.0), std::invalid_argument);
  RhoTable small(5.0);
  EXPECT_THROW((void)small(6.0), std::out_of_range);
}

TEST(Rho, RatioGrowth) {
  // rho(a-1)/rho(a) ~ a (ln a + ln ln a); the bare a ln a leaves a factor
  // near 1.8 at a = 4, so the check uses the second-order form.
  double prev = 0;
  for (double a = 4.0; a <= 10.0; a += 0.5) {
    const double ratio = rho(a - 1.0) / rho(a);
    EXPECT_GT(ratio, prev);
    prev = ratio;
    const double scaled = ratio / (a * (std::log(a) + std::log(std::log(a))));
    EXPECT_GE(scaled, 0.8) << a;
    EXPECT_LE(scaled, 1.6) << a;
  }
}

TEST(Rho, LogAsymptotics) {
  const auto q = [](double a) { return std::log(rho(a)) / (-a * (std::log(a) + std::log(std::log(a)) - 1.0)); };
  EXPECT_GE(q(10.0), 0.9);
  EXPECT_LE(q(10.0), 1.15);
  EXPECT_LT(std::abs(q(20.0) - 1.0), std::abs(q(10.0) - 1.0));
  EXPECT_LT(std::abs(q(40.0) - 1.0), std::abs(q(20.0) - 1.0));
}

TEST(Mu, Examples) {
  for (double a : {1.5, 2.0, 3.7, 6.0}) EXPECT_DOUBLE_EQ(mu(a, 1.0), rho(a));
  for (double b : {1.0, 1.5, 3.0}) EXPECT_DOUBLE_EQ(mu(1.0, b), 1.0);
  EXPECT_NEAR(mu(3.0, 2.0), fine_mu(3.0, 2.0), 1e-5);
  EXPECT_NEAR(mu(3.5, 1.7), fine_mu(3.5, 1.7), 1e-5);
}

TEST(Mu, ClipsPastZero) {
  // beta > alpha: the lower limit stops at 0.
  EXPECT_DOUBLE_EQ(mu(2.0, 5.0), mu(2.0, 2.0));
  EXPECT_NEAR(mu(2.0, 2.0), rho(2.0) + std::log(2.0), 1e-6);
}

TEST(Mu, BoundsAndDirection) {
  for (double a : {2.0, 3.5, 5.0, 8.0}) {
    double prev_ratio = 2.0;
    for (double b = 1.0; b <= a; b += 0.25) {
      EXPECT_GE(mu(a, b), rho(a));
      const double ratio = rho(a) / mu(a, b);
      EXPECT_LE(ratio, prev_ratio + 1e-15);
      prev_ratio = ratio;
    }
  }
}

TEST(PhaseTwoSuccess, NoBudgetApproachesRho) {
  // 1 - 2^-x <= x ln 2, so the excess over rho is at most
  // ln 2 * int_0^{a-1} p^{(t-a)/a} rho(t)/(a-t) dt, which vanishes as p grows.
  const auto& r = fine_rho();
  for (double lp : {10.0, 20.0, 40.0}) {
    const double lnp = lp * std::log(10.0);
    for (double a : {3.0, 4.65}) {
      const int n = 1 << 14;
      const double h = (a - 1.0) / n;
      double s = 0;
      for (int j = 0; j <= n; ++j) {
        const double t = j * h;
        const double w = (j == 0 || j == n) ? 1.0 : (j & 1) ? 4.0 : 2.0;
        s += w * std::exp(lnp * (t - a) / a) * r(t) / (a - t);
      }
      const double bound = std::log(2.0) * s * h / 3.0;
      const double excess = phase2_success(lp, a, 0.0) - rho(a);
      EXPECT_GE(excess, -1e-12) << lp << ' ' << a;
      EXPECT_LE(excess, bound * (1 + 1e-6)) << lp << ' ' << a;
      if (lp >= 20) {
        EXPECT_LT(excess / rho(a), 2e-3) << lp << ' ' << a;
      }
    }
  }
}

TEST(PhaseTwoSuccess, MonotoneInBeta) {
  for (double lp : {10.0, 20.0, 30.0}) {
    double prev = 0;
    for (double b = 0.0; b <= 3.0; b += 0.1) {
      const double v = phase2_success(lp, 4.5, b);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(PhaseTwoSuccess, Bounds) {
  // The smooth integrand is below rho(t)/(alpha - t) on all of [0, alpha-1],
  // so mu(alpha, alpha) bounds it; it can exceed the step model mu(alpha, beta).
  for (double lp : {10.0, 20.0, 30.0}) {
    for (double a : {3.0, 4.0, 5.5}) {
      for (double b : {1.0, 1.3, 1.6}) {
        const double v = phase2_success(lp, a, b);
        EXPECT_GE(v, rho(a));
        EXPECT_LE(v, mu(a, a));
      }
    }
  }
}

TEST(PhaseTwoSuccess, NearStepModelOnOptimalRows) {
  for (double lp : table2_rows()) {
    const PlanEstimate e = optimize(3, lp);
    const double smooth = phase2_success(lp, e.alpha, e.beta);
    const double step = mu(e.alpha, e.beta);
    EXPECT_LE(std::abs(smooth / step - 1.0), 0.12) << lp;
  }
}

TEST(BetaFromR, Examples) {
  EXPECT_NEAR(beta_from_r(484, 104), 1.56, 0.01);
  EXPECT_NEAR(beta_from_r(19970, 669), 1.35, 0.01);
  for (double m : {100.0, 484.0, 1e5}) {
    EXPECT_NEAR(beta_from_r(m, std::sqrt(m * std::log(2.0))), 1.0, 1e-12);
    EXPECT_NEAR(beta_from_r(m, std::sqrt(2.0 * m * std::log(2.0)), false), 1.0, 1e-12);
    EXPECT_NEAR(beta_from_r(m, r_from_beta(m, 1.4)), 1.4, 1e-12);
  }
  EXPECT_THROW(beta_from_r(1, 10), std::invalid_argument);
  EXPECT_THROW(beta_from_r(100, 1), std::invalid_argument);
}

TEST(WorkModel, Examples) {
  EXPECT_NEAR(work_model(1, 10, 0, 0).log10_work(), 5.49, 0.01);
  EXPECT_NEAR(work_model(1, 6, 0, 0).log10_work(), 3.49, 0.01);
  EXPECT_NEAR(phase1_constant(), 25.25, 0.01);

  const PlanEstimate e3 = work_model(3, 20, 4.65, 1.35);
  EXPECT_NEAR(e3.w21, 0.47, 0.05);
  EXPECT_DOUBLE_EQ(e3.trials, 1.0 / e3.success_prob);
  EXPECT_DOUBLE_EQ(e3.work, e3.trial_cost / e3.success_prob);

  const PlanEstimate e2 = work_model(2, 20, 5.0, 1.0);
  EXPECT_NEAR(e2.trial_cost, phase1_constant() * e2.m, 1e-6 * e2.trial_cost);
  EXPECT_DOUBLE_EQ(e2.success_prob, rho(5.0));

  const PlanEstimate e4 = work_model(4, 20, 4.65, 512);
  EXPECT_DOUBLE_EQ(e4.r, 512);
  EXPECT_NEAR(e4.beta, beta_from_r(e4.m, 512), 1e-12);
  EXPECT_THROW(work_model(5, 20, 4, 1), std::invalid_argument);
}

TEST(Optimize, AlgorithmTwoExamples) {
  EXPECT_NEAR(optimize(2, 6).log10_work(), 4.67, 0.1);
  EXPECT_NEAR(optimize(2, 20).log10_work(), 8.69, 0.1);
}

TEST(Optimize, AlgorithmTwoStationarity) {
  for (double lp : {6.0, 10.0, 20.0, 30.0, 50.0}) {
    const PlanEstimate e = optimize(2, lp);
    const double lhs = lp * std::log(10.0);
    const double rhs = e.alpha * rho(e.alpha - 1.0) / rho(e.alpha);
    EXPECT_NEAR(rhs / lhs, 1.0, 0.02) << lp;
  }
}

TEST(Optimize, AlphaGrowsLikeAsymptoticForm) {
  // a ~ sqrt(2 ln p / ln ln p); only the order of magnitude is checked.
  for (double lp : {20.0, 40.0, 60.0}) {
    const double lnp = lp * std::log(10.0);
    const double ratio = optimize(2, lp).alpha / std::sqrt(2.0 * lnp / std::log(lnp));
    EXPECT_GT(ratio, 0.6) << lp;
    EXPECT_LT(ratio, 1.4) << lp;
  }
}

TEST(Optimize, AlgorithmThreeExamples) {
  const PlanEstimate e = optimize(3, 20);
  EXPECT_NEAR(e.alpha, 4.65, 0.05);
  EXPECT_NEAR(e.beta, 1.35, 0.05);
  EXPECT_NEAR(e.m / 19970, 1.0, 0.1);
  EXPECT_NEAR(e.r / 669, 1.0, 0.1);
  EXPECT_NEAR(e.speedup, 4.46, 0.2);

  const PlanEstimate t = optimize(3, 10);
  EXPECT_NEAR(t.beta, 1.56, 0.05);
  EXPECT_NEAR(t.m / 484, 1.0, 0.1);
  EXPECT_NEAR(t.r / 104, 1.0, 0.1);
}

TEST(Optimize, AlgorithmFourUsesPowersOfTwo) {
  for (double lp : {10.0, 20.0, 30.0}) {
    const double r = optimize(4, lp).r;
    EXPECT_DOUBLE_EQ(std::exp2(std::round(std::log2(r))), r) << lp;
  }
}

TEST(Optimize, Deterministic) {
  for (int alg = 1; alg <= 4; ++alg) EXPECT_EQ(optimize(alg, 17.0), optimize(alg, 17.0));
}

TEST(Optimize, RejectsOutOfRange) {
  EXPECT_THROW(optimize(3, 3.0), std::invalid_argument);
  EXPECT_THROW(optimize(3, 61.0), std::invalid_argument);
}

TEST(Tables, FirstTableMatchesReferenceRows) {
  struct Row {
    double lp, a1, a2, a3, a4;
  };
  const std::vector<Row> reference{{6, 3.49, 4.67, 4.09, 4.26},    {8, 4.49, 5.38, 4.76, 4.91},
                                   {10, 5.49, 6.03, 5.39, 5.53},   {12, 6.49, 6.62, 5.97, 6.07},
                                   {14, 7.49, 7.18, 6.53, 6.60},   {16, 8.49, 7.71, 7.05, 7.12},
                                   {18, 9.49, 8.21, 7.56, 7.59},   {20, 10.49, 8.69, 8.04, 8.05},
                                   {30, 15.49, 10.85, 10.22, 10.14}, {40, 20.49, 12.74, 12.11, 11.97},
                                   {50, 25.49, 14.44, 13.82, 13.62}};
  ASSERT_EQ(table1_rows().size(), reference.size());
  for (const Row& r : reference) {
    EXPECT_NEAR(optimize(1, r.lp).log10_work(), r.a1, 0.02) << r.lp;
    EXPECT_NEAR(optimize(2, r.lp).log10_work(), r.a2, 0.10) << r.lp;
    EXPECT_NEAR(optimize(3, r.lp).log10_work(), r.a3, 0.10) << r.lp;
    EXPECT_NEAR(optimize(4, r.lp).log10_work(), r.a4, 0.15) << r.lp;
  }
}

TEST(Tables, SecondTableMatchesReferenceRows) {
  struct Row {
    double lp, alpha, beta, m, r, t, w21, s;
  };
  const std::vector<Row> reference{{10, 3.72, 1.56, 484, 104, 12.1, 0.64, 4.37},
                                   {20, 4.65, 1.35, 19970, 669, 147.5, 0.47, 4.46},
                                   {30, 5.36, 1.27, 397600, 2939, 1141, 0.44, 4.32}};
  for (const Row& r : reference) {
    const PlanEstimate e = optimize(3, r.lp);
    EXPECT_NEAR(e.alpha, r.alpha, 0.05) << r.lp;
    EXPECT_NEAR(e.beta, r.beta, 0.05) << r.lp;
    EXPECT_NEAR(e.m / r.m, 1.0, 0.1) << r.lp;
    EXPECT_NEAR(e.r / r.r, 1.0, 0.1) << r.lp;
    EXPECT_NEAR(e.trials / r.t, 1.0, 0.1) << r.lp;
    EXPECT_NEAR(e.w21, r.w21, 0.05) << r.lp;
    EXPECT_NEAR(e.speedup, r.s, 0.2) << r.lp;
  }
}

TEST(Tables, CsvFormat) {
  const Tables t = emit_tables();
  EXPECT_EQ(t.table1.find('\r'), std::string::npos);
  EXPECT_EQ(t.table2.find('\r'), std::string::npos);
  const auto one = parse_csv(t.table1);
  const auto two = parse_csv(t.table2);
  ASSERT_EQ(one.size(), 12u);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(one[0], (std::vector<std::string>{"log10p", "alg1", "alg2", "alg3", "alg4"}));
  EXPECT_EQ(two[0],
            (std::vector<std::string>{"log10p", "alpha", "beta", "m", "r", "T", "w21", "m_over_T", "S"}));
  for (std::size_t i = 1; i < one.size(); ++i) EXPECT_EQ(one[i].size(), 5u);
  for (std::size_t i = 1; i < two.size(); ++i) EXPECT_EQ(two[i].size(), 9u);

  // Row 14 of the first table.
  ASSERT_EQ(one[5][0], "14");
  const double expect[] = {7.49, 7.18, 6.53, 6.60};
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::stod(one[5][c + 1]), expect[c], 0.1);
  EXPECT_NEAR(std::stod(two[3][1]), 5.36, 0.05);
  EXPECT_EQ(emit_tables().table1, t.table1);
  EXPECT_EQ(emit_tables().table2, t.table2);
}
