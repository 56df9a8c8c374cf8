#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mnlmatch/inclusive.hpp"
#include "mnlmatch/reward.hpp"
#include "test_support.hpp"

using namespace mnlmatch;

namespace {

ChoiceMatrix to_choice(const testref::Grid& g) {
  return ChoiceMatrix(Matrix::from_rows(g));
}

Instance random_instance(std::uint64_t seed, std::size_t n, std::size_t m) {
  GenParams p;
  p.seed = seed;
  return generate_random(n, m, p);
}

}  // namespace

TEST(ExactReward, TwoByTwoMenus) {
  const Instance inst = preset_two_by_two();
  const auto x = menu_to_choice_matrix(inst, Menu{{{0}, {0, 1}}});
  EXPECT_NEAR(exact_reward(inst, x, Model::inclusive), 2.0 / 9.0, 1e-15);
  const auto x1 = menu_to_choice_matrix(inst, Menu{{{0}, {0}}});
  const auto x2 = menu_to_choice_matrix(inst, Menu{{{}, {1}}});
  EXPECT_NEAR(exact_reward(inst, x1, Model::inclusive) +
                  exact_reward(inst, x2, Model::inclusive),
              5.0 / 24.0, 1e-15);
}

TEST(ExactReward, ZeroPoint) {
  const Instance inst = random_instance(1, 3, 3);
  EXPECT_EQ(exact_reward(inst, ChoiceMatrix(3, 3), Model::inclusive), 0.0);
  EXPECT_EQ(exact_reward(inst, ChoiceMatrix(3, 3), Model::customized), 0.0);
}

TEST(ExactReward, MatchesJointEnumeration) {
  SplitMix64 rng(53);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = random_instance(rng(), 3, 3);
    const auto g = testref::random_feasible_x(inst, rng);
    const auto x = to_choice(g);
    EXPECT_NEAR(exact_reward(inst, x, Model::inclusive),
                testref::joint_reward(inst, g, false), 1e-12);
    EXPECT_NEAR(exact_reward(inst, x, Model::customized),
                testref::joint_reward(inst, g, true), 1e-12);
    EXPECT_GE(exact_reward(inst, x, Model::customized),
              exact_reward(inst, x, Model::inclusive) - 1e-15);
  }
}

TEST(ExactReward, MenuMatchesDirectExpectation) {
  SplitMix64 rng(59);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = random_instance(rng(), 3, 3);
    Menu m;
    m.offers.resize(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (rng.uniform01() < 0.5) m.offers[i].push_back(j);
    const auto x = menu_to_choice_matrix(inst, m);
    EXPECT_NEAR(exact_reward(inst, x, Model::inclusive),
                testref::menu_reward(inst, m.offers, false), 1e-10);
  }
}

TEST(ExactReward, RestrictionDropsEdges) {
  const Instance inst = random_instance(61, 3, 2);
  SplitMix64 rng(61);
  const auto g = testref::random_feasible_x(inst, rng);
  const auto x = to_choice(g);
  EdgeMask mask(3, 2);
  mask.set(0, 0, true);
  mask.set(2, 1, true);
  testref::Grid masked = testref::zeros(3, 2);
  masked[0][0] = g[0][0];
  masked[2][1] = g[2][1];
  EXPECT_NEAR(exact_reward(inst, x, Model::inclusive, &mask),
              testref::joint_reward(inst, masked, false), 1e-14);
}

TEST(ExactReward, RefusesBeyondCutoff) {
  const Instance inst = random_instance(3, 6, 1);
  ChoiceMatrix x(6, 1);
  for (std::size_t i = 0; i < 6; ++i) x(i, 0) = 0.01;
  EXPECT_THROW(exact_reward(inst, x, Model::inclusive, nullptr, 5), EnumerationLimit);
  EXPECT_NO_THROW(exact_reward(inst, x, Model::inclusive, nullptr, 6));
}

TEST(Simulation, EmptyMenu) {
  SplitMix64 rng(1);
  const auto out = simulate_once(preset_two_by_two(), Menu{{{}, {}}},
                                 Model::inclusive, rng);
  EXPECT_TRUE(out.matching.empty());
  EXPECT_EQ(out.reward, 0.0);
}

TEST(Simulation, MatchingIsPartial) {
  const Instance inst = random_instance(5, 4, 3);
  SplitMix64 rng(5);
  Menu full;
  full.offers.assign(4, SupplierSet{0, 1, 2});
  for (int t = 0; t < 2000; ++t) {
    const auto out = simulate_once(inst, full, t % 2 ? Model::inclusive : Model::customized, rng);
    std::set<std::size_t> cs, ss;
    double r = 0.0;
    for (const auto& e : out.matching) {
      EXPECT_TRUE(cs.insert(e.customer).second);
      EXPECT_TRUE(ss.insert(e.supplier).second);
      r += inst.r(e.customer, e.supplier);
    }
    EXPECT_DOUBLE_EQ(r, out.reward);
  }
}

TEST(Simulation, MeansMatchExactValues) {
  const int n = 1000000;
  struct Case {
    Instance inst;
    Menu menu;
    double expect;
  } cases[] = {{preset_two_by_two(), Menu{{{0}, {0, 1}}}, 2.0 / 9.0},
               {preset_unit(), Menu{{{0}}}, 0.25}};
  for (auto& c : cases) {
    SplitMix64 rng(7);
    double sum = 0.0;
    for (int t = 0; t < n; ++t)
      sum += simulate_once(c.inst, c.menu, Model::inclusive, rng).reward;
    const double sigma = std::sqrt(c.expect * (1 - c.expect) / n);  // 0/1 rewards
    EXPECT_NEAR(sum / n, c.expect, 3.0 * sigma);
  }
}

TEST(MonteCarlo, ZeroPoint) {
  const Instance inst = random_instance(9, 2, 2);
  const auto rep = mc_reward(inst, ChoiceMatrix(2, 2), Model::inclusive, {1000, 1, 1});
  EXPECT_EQ(rep.value, 0.0);
  EXPECT_EQ(rep.lower, 0.0);
  EXPECT_EQ(rep.upper, 0.0);
  EXPECT_EQ(rep.method, EstimateMethod::monte_carlo);
}

TEST(MonteCarlo, BracketsContainKnownValues) {
  const Instance cx = preset_two_by_two();
  const auto x = menu_to_choice_matrix(cx, Menu{{{0}, {0, 1}}});
  const auto rep = mc_reward(cx, x, Model::inclusive, {1000000, 3, 4});
  EXPECT_LE(rep.lower, 2.0 / 9.0);
  EXPECT_GE(rep.upper, 2.0 / 9.0);

  ChoiceMatrix half(1, 1);
  half(0, 0) = 0.5;
  const auto unit = mc_reward(preset_unit(), half, Model::inclusive, {100000, 4, 1});
  EXPECT_LE(unit.lower, 0.25);
  EXPECT_GE(unit.upper, 0.25);
}

TEST(MonteCarlo, SingleSampleHasWideBracket) {
  const Instance inst = random_instance(13, 2, 2);
  SplitMix64 rng(13);
  const auto x = to_choice(testref::random_feasible_x(inst, rng));
  const auto rep = mc_reward(inst, x, Model::customized, {1, 0, 1});
  EXPECT_EQ(rep.samples, 1u);
  EXPECT_EQ(rep.lower, 0.0);
  EXPECT_DOUBLE_EQ(rep.upper, reward_upper_bound(inst));
  EXPECT_LE(rep.lower, rep.value);
  EXPECT_LE(rep.value, rep.upper);
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
  const Instance inst = random_instance(17, 3, 3);
  SplitMix64 rng(17);
  const auto x = to_choice(testref::random_feasible_x(inst, rng));
  const auto a = mc_reward(inst, x, Model::customized, {20000, 99, 1});
  const auto b = mc_reward(inst, x, Model::customized, {20000, 99, 8});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  const auto c = mc_reward(inst, x, Model::customized, {20000, 100, 1});
  EXPECT_NE(a.value, c.value);
}

TEST(MonteCarlo, RejectsZeroSamples) {
  EXPECT_THROW(mc_reward(preset_unit(), ChoiceMatrix(1, 1), Model::inclusive, {0, 0, 1}),
               std::invalid_argument);
}

TEST(Grid, SmallExample) {
  const DpGrid g = build_grid(1, 0.5, 1.0);
  ASSERT_EQ(g.points.size(), 3u);
  EXPECT_EQ(g.L(), 2u);
  EXPECT_DOUBLE_EQ(g.points[0], 1.0);
  EXPECT_DOUBLE_EQ(g.points[1], 1.5);
  EXPECT_DOUBLE_EQ(g.points[2], 2.25);
  EXPECT_EQ(g.round_up(1.0), 1.0);
  EXPECT_EQ(g.round_up(1.2), 1.5);
  EXPECT_THROW(g.round_up(3.0), std::out_of_range);
}

TEST(Grid, Invariants) {
  for (std::size_t n : {1u, 3u, 10u}) {
    for (double eps : {0.5, 0.1, 0.01}) {
      const double w_max = 2.5;
      const DpGrid g = build_grid(n, eps, w_max);
      const double q = 1.0 + eps / n;
      EXPECT_EQ(g.points.front(), 1.0);
      for (std::size_t k = 1; k < g.points.size(); ++k)
        EXPECT_NEAR(g.points[k] / g.points[k - 1], q, 1e-14);
      EXPECT_GE(g.points.back(), 1.0 + n * w_max);
      EXPECT_LT(g.points[g.L() - 1], 1.0 + n * w_max);
      SplitMix64 rng(n);
      for (int t = 0; t < 200; ++t) {
        const double v = 1.0 + n * w_max * rng.uniform01();
        const double up = g.round_up(v);
        EXPECT_GE(up, v);
        EXPECT_LE(up / v, q * (1 + 1e-15));
      }
    }
  }
  EXPECT_THROW(build_grid(0, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(build_grid(2, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_grid(2, 0.1, 0.0), std::invalid_argument);
}

TEST(Dp, SingleEdgeBase) {
  const Instance inst = preset_unit();
  ChoiceMatrix x(1, 1);
  x(0, 0) = 0.5;
  const double eps = 0.1;
  const auto rep = dp_estimate_inclusive(inst, x, eps);
  EXPECT_LE(rep.value, 0.25 + 1e-15);
  EXPECT_GE(rep.value, (1 - eps) * 0.25);
  EXPECT_EQ(rep.lower, rep.value);
  EXPECT_NEAR(rep.upper, rep.value / (1 - eps), 1e-15);
  EXPECT_EQ(rep.method, EstimateMethod::dp);
  // 1 + w = 2 lies on the grid only by accident; the value is r w x / up(2).
  EXPECT_GT(rep.value, 0.0);
}

TEST(Dp, BracketAgainstExact) {
  SplitMix64 rng(67);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = random_instance(rng(), 8, 4);
    const auto x = to_choice(testref::random_feasible_x(inst, rng));
    const double exact = exact_reward(inst, x, Model::inclusive);
    const auto rep = dp_estimate_inclusive(inst, x, 0.02);
    EXPECT_LE(rep.value, exact * (1 + 1e-12));
    EXPECT_GE(rep.value, 0.98 * exact);
    EXPECT_LE(rep.lower, exact * (1 + 1e-12));
    EXPECT_GE(rep.upper, exact * (1 - 1e-12));
  }
}

TEST(Dp, RestrictedMatchesRestrictedExact) {
  SplitMix64 rng(71);
  for (int t = 0; t < 50; ++t) {
    const Instance inst = random_instance(rng(), 4, 3);
    const auto split = split_edges(inst);
    const auto x = to_choice(testref::random_feasible_x(inst, rng));
    for (const EdgeMask* m : {&split.low, &split.high}) {
      const double exact = exact_reward(inst, x, Model::inclusive, m);
      const auto rep = dp_estimate_inclusive(inst, x, 0.1, m);
      EXPECT_LE(rep.value, exact * (1 + 1e-12));
      EXPECT_GE(rep.value, 0.9 * exact);
    }
  }
}

TEST(Dp, CustomizedUnsupported) {
  EXPECT_THROW(dp_estimate(preset_unit(), ChoiceMatrix(1, 1), Model::customized, 0.1),
               UnsupportedModel);
  EXPECT_THROW(dp_estimate_inclusive(preset_unit(), ChoiceMatrix(1, 1), 0.0),
               std::invalid_argument);
}

TEST(Poisson, Values) {
  EXPECT_EQ(poisson_inverse_moment(0.0), 1.0);
  EXPECT_NEAR(poisson_inverse_moment(1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_LE(poisson_inverse_moment(1.0), 1.3 / 2.0);
  EXPECT_NEAR(poisson_inverse_moment(1e-10), 1.0, 1e-10);
  EXPECT_THROW(poisson_inverse_moment(-1.0), std::invalid_argument);
}

TEST(Poisson, MatchesSeriesAndBound) {
  for (int k = 0; k < 1000; ++k) {
    const double lambda = std::pow(10.0, -6.0 + 12.0 * k / 999.0);
    const double v = poisson_inverse_moment(lambda);
    EXPECT_LE((1.0 + lambda) * v, 1.3);
    if (lambda < 30.0) {
      // E[1/(1+Y)] summed term by term.
      double term = std::exp(-lambda);
      double sum = 0.0;
      for (int y = 0; y < 400; ++y) {
        sum += term / (1.0 + y);
        term *= lambda / (y + 1.0);
      }
      EXPECT_NEAR(v, sum, 1e-12);
    }
  }
}

TEST(ConvexOrder, HighWeightCounterexample) {
  // X ~ Bernoulli(1/3) scaled by w = 3 against Y ~ Poisson(1), phi(z) = z^2.
  const double w = 3.0, p = 1.0 / 3.0;
  const double scaled = p * w * w;          // E[(wX)^2]
  const double poisson = 1.0 + 1.0;         // Var + mean^2 for lambda = w p = 1
  EXPECT_DOUBLE_EQ(scaled, 3.0);
  EXPECT_DOUBLE_EQ(poisson, 2.0);
  EXPECT_GT(scaled, poisson);
}

TEST(Subadditivity, PointwiseSplit) {
  SplitMix64 rng(73);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = random_instance(rng(), 3, 3);
    const auto split = split_edges(inst);
    const auto x = to_choice(testref::random_feasible_x(inst, rng));
    const double whole = exact_reward(inst, x, Model::inclusive);
    const double low = exact_reward(inst, x.restricted(split.low), Model::inclusive, &split.low);
    const double high = exact_reward(inst, x.restricted(split.high), Model::inclusive, &split.high);
    EXPECT_LE(whole, low + high + 1e-10);
  }
}
