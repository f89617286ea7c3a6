// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trtc/config.hpp"
#include "trtc/sweep.hpp"
#include "trtc/ul_opt.hpp"

using namespace trtc;
using namespace trtc::ul;

namespace {

UlProblem random_problem(Rng& rng, int n, int k, int s, double noise = 1.0, double budget = 1.0) {
  UlProblem pr;
  pr.g = cscg_vector(rng, n);
  for (int u = 0; u < k; ++u) {
    CMat h(n, s);
    for (int c = 0; c < s; ++c) h.col(c) = cscg_vector(rng, n);
    pr.h.push_back(h);
  }
  pr.noise_power = noise;
  pr.budgets = RVec::Constant(k, budget);
  return pr;
}

UlProblem default_problem(int n, int trial) {
  ExperimentConfig c;
  return make_ul_problem(c, n, trial_seed(c.sweep.seed, n, trial));
}

// Stationarity of the water-filling Lagrangian on assigned entries plus
// complementary slackness of every budget. Returns the largest residual.
double kkt_residual(const UlSolution& sol, const UlProblem& pr) {
  const RMat gamma = gain_table(sol.ris, pr);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < pr.users(); ++k) {
    if (sol.assignment.row(k).sum() == 0) continue;
    const double level = 1.0 / (sol.duals(k) * kLn2);
    for (Eigen::Index s = 0; s < pr.subcarriers(); ++s) {
      if (!sol.assignment(k, s)) continue;
      const double want = std::max(0.0, level - 1.0 / gamma(k, s));
      worst = std::max(worst, std::abs(sol.powers(k, s) - want) / pr.budgets(k));
    }
    worst = std::max(worst, std::abs(sol.powers.row(k).sum() - pr.budgets(k)) / pr.budgets(k));
  }
  // a subcarrier nobody uses must sit above every active user's water level
  for (Eigen::Index s = 0; s < pr.subcarriers(); ++s) {
    if (sol.assignment.col(s).sum() != 0) continue;
    for (Eigen::Index k = 0; k < pr.users(); ++k) {
      if (sol.assignment.row(k).sum() == 0 || gamma(k, s) <= 0.0) continue;
      const double level = 1.0 / (sol.duals(k) * kLn2);
      worst = std::max(worst, (level - 1.0 / gamma(k, s)) / pr.budgets(k));
    }
  }
  return worst;
}

}  // namespace

TEST(EffectiveGain, WorkedExampleAndCoPhasing) {
  CVec g(2), h(2), f(2);
  g << 1.0, cplx(0.0, 1.0);
  h << 1.0, 1.0;
  f << 1.0, cplx(0.0, -1.0);
  EXPECT_NEAR(effective_gain(f, g, h, 0.5), 8.0, 1e-14);
  f << 1.0, 1.0;
  EXPECT_NEAR(effective_gain(f, g, h, 1.0), 2.0, 1e-14);

  Rng rng(1);
  const CVec gg = cscg_vector(rng, 8), hh = cscg_vector(rng, 8);
  CVec best(8);
  for (int n = 0; n < 8; ++n) best(n) = std::polar(1.0, -std::arg(gg(n) * hh(n)));
  const double top = effective_gain(best, gg, hh, 1.0);
  EXPECT_NEAR(top, std::pow(gg.cwiseProduct(hh).cwiseAbs().sum(), 2), 1e-10);
  for (int i = 0; i < 200; ++i) {
    CVec r(8);
    for (int n = 0; n < 8; ++n) r(n) = std::polar(uniform(rng), uniform(rng, 0.0, 2 * kPi));
    EXPECT_LE(effective_gain(r, gg, hh, 1.0), top + 1e-10);
  }
  EXPECT_THROW(effective_gain(CVec::Ones(3), gg, hh, 1.0), Error);
}

TEST(GainTable, MatchesScalarHelper) {
  Rng rng(2);
  const UlProblem pr = random_problem(rng, 4, 3, 5, 0.7);
  const CVec f = cscg_vector(rng, 4);
  const RMat t = gain_table(f, pr);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 5; ++s)
      EXPECT_NEAR(t(k, s), effective_gain(f, pr.g, pr.h[k].col(s), 0.7), 1e-12);
}

TEST(WaterLevel, MatchesBisectionOracle) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> g(7);
    for (auto& x : g) x = uniform(rng) < 0.2 ? 0.0 : std::exp(uniform(rng, -4.0, 4.0));
    const double w = water_level(g);
    const auto ref = oracle::water_fill(g, 1.0);
    for (std::size_t j = 0; j < g.size(); ++j)
      EXPECT_NEAR(g[j] > 0.0 ? std::max(0.0, w - 1.0 / g[j]) : 0.0, ref[j], 1e-10);
  }
  EXPECT_EQ(water_level({0.0, 0.0}), 0.0);
}

TEST(Dual, SingleUserIsWaterFilling) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    RMat gamma(1, 6);
    for (int s = 0; s < 6; ++s) gamma(0, s) = std::exp(uniform(rng, -3.0, 3.0));
    const double budget = uniform(rng, 0.1, 5.0);
    const DualResult d = dual_subcarrier_power(gamma, RVec::Constant(1, budget));
    std::vector<double> g(gamma.data(), gamma.data() + 6);
    const auto ref = oracle::water_fill(g, budget);
    for (int s = 0; s < 6; ++s) EXPECT_NEAR(d.powers(0, s), ref[static_cast<std::size_t>(s)], 1e-9);
    EXPECT_NEAR(d.sum_rate, oracle::water_fill_rate(g, budget), 1e-9);
  }
}

TEST(Dual, ZeroGainsAssignNothing) {
  const DualResult d = dual_subcarrier_power(RMat::Zero(3, 4), RVec::Ones(3));
  EXPECT_EQ(d.assignment.sum(), 0);
  EXPECT_EQ(d.powers.sum(), 0.0);
  EXPECT_EQ(d.sum_rate, 0.0);
  EXPECT_THROW(dual_subcarrier_power(RMat::Zero(3, 4), RVec::Ones(2)), Error);
}

TEST(Dual, ExclusiveFeasibleAndNearOptimalOnSmallTables) {
  // exhaustive over assignments, each user water-filled on its set
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    RMat gamma(2, 4);
    for (int k = 0; k < 2; ++k)
      for (int s = 0; s < 4; ++s) gamma(k, s) = std::exp(uniform(rng, -2.0, 3.0));
    const RVec budgets = (RVec(2) << uniform(rng, 0.2, 2.0), uniform(rng, 0.2, 2.0)).finished();
    const DualResult d = dual_subcarrier_power(gamma, budgets);
    double best = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
      std::vector<double> g0, g1;
      for (int s = 0; s < 4; ++s) ((mask >> s) & 1 ? g1 : g0).push_back(gamma((mask >> s) & 1, s));
      best = std::max(best, oracle::water_fill_rate(g0, budgets(0)) + oracle::water_fill_rate(g1, budgets(1)));
    }
    EXPECT_GE(d.sum_rate, 0.95 * best) << i;
    EXPECT_LE(d.sum_rate, best + 1e-9);
    for (int s = 0; s < 4; ++s) EXPECT_LE(d.assignment.col(s).sum(), 1);
    for (int k = 0; k < 2; ++k) EXPECT_LE(d.powers.row(k).sum(), budgets(k) * (1 + 1e-12));
  }
}

TEST(Dual, IdleSubcarriersGoToUsersWhoGainFromThem) {
  // user 0 is strong everywhere but its budget cannot reach subcarrier 1;
  // user 1 is weak but has nothing else, so subcarrier 1 must not stay idle
  RMat gamma(2, 2);
  gamma << 12.4, 3.41, 4.0, 0.204;
  const RVec budgets = RVec::Constant(2, 0.1);
  IMat a(2, 2);
  a << 1, 0, 0, 0;
  ul::detail::fill_idle(a, gamma, budgets);
  EXPECT_EQ(a(1, 1), 1);
  EXPECT_EQ(a(0, 1), 0);
  const DualResult d = dual_subcarrier_power(gamma, budgets);
  EXPECT_EQ(d.assignment.colwise().sum().minCoeff(), 1);
}

TEST(Dual, NoIdleSubcarrierBelowAnActiveWaterLevel) {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    RMat gamma(5, 16);
    for (int k = 0; k < 5; ++k)
      for (int s = 0; s < 16; ++s) gamma(k, s) = std::exp(uniform(rng, -1.0, 4.0));
    const RVec budgets = RVec::Constant(5, 0.1);
    const DualResult d = dual_subcarrier_power(gamma, budgets);
    for (int s = 0; s < 16; ++s) {
      if (d.assignment.col(s).sum() != 0) continue;
      for (int k = 0; k < 5; ++k) {
        if (d.assignment.row(k).sum() == 0) continue;
        const double level = 1.0 / (d.duals(k) * kLn2);
        EXPECT_LE(level - 1.0 / gamma(k, s), 1e-6 * budgets(k)) << "table " << i << " s " << s << " k " << k;
      }
    }
  }
}

TEST(RisUpdate, SingleTermCoPhases) {
  Rng rng(6);
  const UlProblem pr = random_problem(rng, 6, 1, 1, 1.0);
  const IMat a = IMat::Ones(1, 1);
  const RMat p = RMat::Ones(1, 1);
  UlSettings s;
  s.block_max = 200;
  s.block_tol = 1e-14;
  s.inner.tol = 1e-12;
  const CVec f = solve_ris_block(CVec::Ones(6), a, p, pr, s);
  const CVec v = pr.g.cwiseProduct(pr.h[0].col(0));
  // every term g_n f_n h_n lands on one common phase
  const double ref = std::arg(v(0) * f(0));
  for (int n = 0; n < 6; ++n) {
    EXPECT_NEAR(std::abs(f(n)), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(std::remainder(std::arg(v(n) * f(n)) - ref, 2 * kPi)), 0.0, 1e-4);
  }
}

TEST(RisUpdate, EmptyAssignmentLeavesSurfaceAlone) {
  Rng rng(7);
  const UlProblem pr = random_problem(rng, 4, 2, 3);
  const CVec f = cscg_vector(rng, 4);
  EXPECT_EQ(sca_update_f_ul(f, IMat::Zero(2, 3), RMat::Zero(2, 3), pr), f);
}

TEST(RisUpdate, MonotoneAndWithinUnitModulus) {
  Rng rng(8);
  const UlProblem pr = random_problem(rng, 5, 2, 4, 1.0);
  const DualResult d = dual_subcarrier_power(gain_table(CVec::Ones(5), pr), pr.budgets);
  CVec f = CVec::Ones(5);
  double prev = rate_of(d.assignment, d.powers, gain_table(f, pr));
  for (int i = 0; i < 10; ++i) {
    f = sca_update_f_ul(f, d.assignment, d.powers, pr);
    const double next = rate_of(d.assignment, d.powers, gain_table(f, pr));
    EXPECT_GE(next, prev - 1e-9);
    EXPECT_LE(f.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
    prev = next;
  }
}

TEST(RisUpdate, TwoElementsNearPhaseGridOptimum) {
  Rng rng(9);
  const UlProblem pr = random_problem(rng, 2, 2, 3, 1.0);
  const IMat a = (IMat(2, 3) << 1, 0, 1, 0, 1, 0).finished();
  const RMat p = (RMat(2, 3) << 0.5, 0, 0.5, 0, 1.0, 0).finished();
  UlSettings s;
  s.block_max = 200;
  s.block_tol = 1e-12;
  const CVec f = solve_ris_block(CVec::Ones(2), a, p, pr, s);
  const double got = rate_of(a, p, gain_table(f, pr));
  double grid = 0.0;
  for (int i = 0; i < 360; ++i) {
    for (int j = 0; j < 360; ++j) {
      const CVec x = (CVec(2) << std::polar(1.0, 2 * kPi * i / 360), std::polar(1.0, 2 * kPi * j / 360)).finished();
      grid = std::max(grid, rate_of(a, p, gain_table(x, pr)));
    }
  }
  // MM finds a stationary point; with two elements it should match the grid
  EXPECT_GE(got, grid - 1e-3);
}

TEST(Alternating, ScalarProblemIsWaterFilling) {
  UlProblem pr;
  pr.g = CVec::Constant(1, cplx(0.6, 0.8));
  pr.h.push_back((CMat(1, 3) << cplx(1.0, 0.0), cplx(0.0, 2.0), cplx(-0.5, 0.0)).finished());
  pr.noise_power = 0.5;
  pr.budgets = RVec::Constant(1, 2.0);
  const UlSolution sol = alternating_optimize_ul(pr);
  EXPECT_NEAR(sol.sum_rate, oracle::water_fill_rate({2.0, 8.0, 0.5}, 2.0), 1e-9);
  EXPECT_NEAR(std::abs(sol.ris(0)), 1.0, 1e-12);
}

TEST(Alternating, TraceMonotoneFeasibleKktDeterministic) {
  for (int t = 0; t < 5; ++t) {
    const UlProblem pr = default_problem(16, t);
    const UlSolution a = alternating_optimize_ul(pr);
    for (std::size_t i = 1; i < a.trace.size(); ++i) EXPECT_GE(a.trace[i], a.trace[i - 1] - 1e-6);
    EXPECT_LE(ul_violation(a, pr), 1e-9);
    EXPECT_NEAR(a.sum_rate, sum_rate_ul(a, pr), 1e-9);
    EXPECT_LT(kkt_residual(a, pr), 1e-6);
    const UlSolution b = alternating_optimize_ul(pr);
    EXPECT_EQ(a.sum_rate, b.sum_rate);
    EXPECT_EQ(a.assignment, b.assignment);
  }
}

TEST(Alternating, UserStartsNeverHurt) {
  for (int t = 0; t < 5; ++t) {
    const UlProblem pr = default_problem(9, t);
    UlSettings s;
    s.user_starts = false;
    const double single = alternating_optimize_ul(pr, s).sum_rate;
    const CVec f0 = aggregate_init(pr);
    EXPECT_EQ(alternating_optimize_ul(pr, s, &f0).sum_rate, single);
    EXPECT_GE(alternating_optimize_ul(pr).sum_rate, single);
  }
}

TEST(Alternating, InitIsHonoured) {
  Rng rng(10);
  const UlProblem pr = random_problem(rng, 3, 2, 2);
  UlSettings s;
  s.max_outer = 0;
  const CVec f0 = (CVec(3) << 1.0, cplx(0.0, 1.0), -1.0).finished();
  const UlSolution sol = alternating_optimize_ul(pr, s, &f0);
  EXPECT_EQ(sol.ris, f0);
  const CVec bad = CVec::Ones(2);
  EXPECT_THROW(alternating_optimize_ul(pr, s, &bad), Error);
}

TEST(BruteForce, ScalarCaseAndSupersetGrid) {
  UlProblem pr;
  pr.g = CVec::Ones(1);
  pr.h.push_back(CMat::Constant(1, 1, cplx(0.0, 3.0)));
  pr.noise_power = 1.0;
  pr.budgets = RVec::Constant(1, 0.5);
  EXPECT_NEAR(brute_force_ul(pr, 1, 2).sum_rate, std::log2(1.0 + 4.5), 1e-12);

  Rng rng(11);
  const UlProblem q = random_problem(rng, 2, 2, 2);
  // 8 phases contain 4 phases, 5 power levels contain 3
  EXPECT_GE(brute_force_ul(q, 8, 5).sum_rate, brute_force_ul(q, 4, 3).sum_rate - 1e-12);
  EXPECT_THROW(brute_force_ul(default_problem(25, 0), 8, 8), Error);
}

TEST(BruteForce, TinyInstancesMatchAlternating) {
  Rng rng(12);
  int good = 0;
  const int trials = 10;
  for (int t = 0; t < trials; ++t) {
    const UlProblem pr = random_problem(rng, 2, 2, 2, uniform(rng, 0.2, 2.0));
    const double bf = brute_force_ul(pr, 16, 17).sum_rate;
    const double got = alternating_optimize_ul(pr).sum_rate;
    if (got >= 0.95 * bf) ++good;
  }
  EXPECT_GE(good, 9);
}

TEST(Benchmarks, ProposedWinsOnSeededTrials) {
  ExperimentConfig c;
  const auto settings = ul_settings(c);
  int wins[4] = {0, 0, 0, 0};
  double prop = 0.0, b2 = 0.0;
  for (int t = 0; t < 100; ++t) {
    const UlProblem pr = default_problem(25, t);
    const double p = alternating_optimize_ul(pr, settings).sum_rate;
    prop += p;
    for (int b = 1; b <= 3; ++b) {
      Rng rng = make_rng(c.sweep.seed, {25, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(Purpose::Benchmark),
                                        static_cast<std::uint64_t>(b)});
      const double r = benchmark_ul(pr, b, rng, settings).sum_rate;
      wins[b] += p >= r;
      if (b == 2) b2 += r;
    }
  }
  for (int b = 1; b <= 3; ++b) EXPECT_GE(wins[b], 95) << "benchmark " << b;
  EXPECT_GT(prop, b2);
}

TEST(Benchmarks, DefinitionsAndFeasibility) {
  const UlProblem pr = default_problem(16, 2);
  Rng rng(13);
  const UlSolution prop = alternating_optimize_ul(pr);
  const UlSolution b1 = benchmark_ul(pr, 1, rng);
  EXPECT_LE(b1.sum_rate, prop.sum_rate + 1e-9);
  EXPECT_LE(b1.trace.size(), 2u);
  for (int i = 0; i < 1000; ++i) {
    const UlSolution b3 = benchmark_ul(pr, 3, rng);
    ASSERT_LE(ul_violation(b3, pr), 1e-9);
    EXPECT_NEAR(b3.powers.sum(), pr.budgets.sum(), 1e-9 * pr.budgets.sum() + (b3.powers.rowwise().sum().array() == 0.0).count() * pr.budgets.maxCoeff());
  }
  const UlSolution b2 = benchmark_ul(pr, 2, rng);
  EXPECT_LE(ul_violation(b2, pr), 1e-9);
  EXPECT_NEAR(b2.ris.cwiseAbs().minCoeff(), 1.0, 1e-12);
  EXPECT_THROW(benchmark_ul(pr, 0, rng), Error);
}
