#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "rshape/agents.hpp"

namespace rshape {
namespace {

TEST(EpsilonScheduleTest, LinearFromInitialToFinal) {
  const ExplorationSchedule sched{0.1, 0.0, 100};
  EXPECT_DOUBLE_EQ(epsilon_at(sched, 1), 0.1);
  EXPECT_DOUBLE_EQ(epsilon_at(sched, 100), 0.0);
  EXPECT_DOUBLE_EQ(epsilon_at(sched, 150), 0.0);
  EXPECT_NEAR(epsilon_at(sched, 51), 0.1 * 49.0 / 99.0, 1e-15);
  for (int e = 2; e <= 100; ++e) EXPECT_LE(epsilon_at(sched, e), epsilon_at(sched, e - 1));
}

TEST(EpsilonScheduleTest, Validation) {
  EXPECT_THROW((ExplorationSchedule{0.1, 0.2, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((ExplorationSchedule{1.5, 0.0, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((ExplorationSchedule{0.1, 0.0, 0}.validate()), std::invalid_argument);
  EXPECT_DOUBLE_EQ(epsilon_at(ExplorationSchedule{0.3, 0.0, 1}, 1), 0.0);
}

TEST(SelectActionTest, GreedyPicksUniqueMaximum) {
  Rng rng(1);
  const std::array<double, 4> v{0.1, 0.7, -2.0, 0.3};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(select_action(v, 0.0, rng), 1);
}

TEST(SelectActionTest, TiesAreBrokenUniformly) {
  Rng rng(2);
  const std::array<double, 4> v{0.5, 0.0, 0.5, 0.5};
  std::array<int, 4> counts{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(select_action(v, 0.0, rng))];
  EXPECT_EQ(counts[1], 0);
  for (int a : {0, 2, 3}) EXPECT_NEAR(counts[static_cast<std::size_t>(a)] / double(n), 1.0 / 3.0, 0.015);
}

TEST(SelectActionTest, ExplorationRateMatchesEpsilon) {
  Rng rng(3);
  const std::array<double, 4> v{1.0, 0.0, 0.0, 0.0};
  const int n = 40000;
  int non_greedy = 0;
  for (int i = 0; i < n; ++i) non_greedy += select_action(v, 0.2, rng) != 0 ? 1 : 0;
  // Random draws hit the greedy action a quarter of the time.
  EXPECT_NEAR(non_greedy / double(n), 0.2 * 0.75, 0.01);
  EXPECT_THROW(select_action(std::span<const double>{}, 0.1, rng), std::invalid_argument);
}

TEST(TabularQTest, HandComputedUpdates) {
  TabularQ q(3, 2, 0.5, 0.3);
  EXPECT_DOUBLE_EQ(q.update(0, 1, 1.0, 2, 0, true), 1.0);
  EXPECT_DOUBLE_EQ(q.value(0, 1), 0.5);
  q.update(0, 1, 1.0, 2, 0, true);
  EXPECT_DOUBLE_EQ(q.value(0, 1), 0.75);
  // Bootstrapping: delta = 0 + 0.3 * 0.75 - 0.
  EXPECT_DOUBLE_EQ(q.update(1, 0, 0.0, 0, 1, false), 0.3 * 0.75);
  EXPECT_DOUBLE_EQ(q.value(1, 0), 0.5 * 0.3 * 0.75);
  // A terminal successor ignores its stored value.
  q.at(2, 0) = 100.0;
  EXPECT_DOUBLE_EQ(q.update(1, 1, 0.0, 2, 0, true), 0.0);
}

TEST(TabularQTest, RejectsBadArguments) {
  EXPECT_THROW(TabularQ(0, 2, 0.1, 0.9), std::invalid_argument);
  EXPECT_THROW(TabularQ(2, 2, 0.0, 0.9), std::invalid_argument);
  EXPECT_THROW(TabularQ(2, 2, 0.1, 1.5), std::invalid_argument);
  TabularQ q(2, 2, 0.1, 0.9);
  EXPECT_THROW(q.value(2, 0), std::out_of_range);
  EXPECT_THROW(q.update(0, 0, NAN, 1, 0, false), std::domain_error);
}

TEST(TabularQPropertyTest, ValuesStayWithinRewardBounds) {
  // Rewards in [0, 1] with alpha <= 1 keep Q in [0, 1 / (1 - gamma)].
  Rng rng(4);
  for (double gamma : {0.0, 0.3, 0.9, 0.99}) {
    TabularQ q(6, 3, 0.7, gamma);
    for (int i = 0; i < 20000; ++i) {
      const int s = static_cast<int>(uniform_index(rng, 6));
      const int a = static_cast<int>(uniform_index(rng, 3));
      q.update(s, a, uniform01(rng), static_cast<int>(uniform_index(rng, 6)), static_cast<int>(uniform_index(rng, 3)),
               uniform01(rng) < 0.1);
    }
    for (double v : q.table()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 / (1.0 - gamma) + 1e-9);
    }
  }
}

ActiveFeatures feats(std::initializer_list<std::uint32_t> idx) { return ActiveFeatures{std::vector<std::uint32_t>(idx)}; }

TEST(LinearQTest, HandComputedReplacingTraces) {
  LinearQ q(4, 2, 2, 0.1, 1.0, 0.5);  // step size 0.05 per feature
  EXPECT_DOUBLE_EQ(q.update(feats({0, 1}), 0, 1.0, feats({2, 3}), 1, false), 1.0);
  EXPECT_DOUBLE_EQ(q.weights(0)[0], 0.05);
  EXPECT_DOUBLE_EQ(q.weights(0)[1], 0.05);
  EXPECT_DOUBLE_EQ(q.traces(0)[0], 0.5);

  // delta = 0 + (0.05 + 0.05) - 0. Feature 1 now belongs to action 1, so
  // action 0's trace there is cleared while feature 0 keeps its decayed trace.
  EXPECT_DOUBLE_EQ(q.update(feats({1, 2}), 1, 0.0, feats({0, 1}), 0, false), 0.1);
  EXPECT_DOUBLE_EQ(q.weights(0)[0], 0.05 + 0.05 * 0.1 * 0.5);
  EXPECT_DOUBLE_EQ(q.weights(0)[1], 0.05);
  EXPECT_DOUBLE_EQ(q.weights(1)[1], 0.005);
  EXPECT_DOUBLE_EQ(q.weights(1)[2], 0.005);
  EXPECT_DOUBLE_EQ(q.traces(0)[0], 0.25);
  EXPECT_DOUBLE_EQ(q.traces(0)[1], 0.0);
  EXPECT_DOUBLE_EQ(q.traces(1)[1], 0.5);

  q.begin_episode();
  for (int a = 0; a < 2; ++a)
    for (double e : q.traces(a)) EXPECT_EQ(e, 0.0);
}

TEST(LinearQTest, OneHotWithoutTracesEqualsTabularSarsa) {
  Rng rng(5);
  TabularQ tab(5, 3, 0.3, 0.9);
  LinearQ lin(5, 3, 1, 0.3, 0.9, 0.0);
  for (int i = 0; i < 5000; ++i) {
    const auto s = static_cast<std::uint32_t>(uniform_index(rng, 5));
    const auto s2 = static_cast<std::uint32_t>(uniform_index(rng, 5));
    const int a = static_cast<int>(uniform_index(rng, 3));
    const int a2 = static_cast<int>(uniform_index(rng, 3));
    const double r = uniform_real(rng, -1.0, 1.0);
    const bool term = uniform01(rng) < 0.2;
    tab.update(static_cast<int>(s), a, r, static_cast<int>(s2), a2, term);
    lin.update(feats({s}), a, r, feats({s2}), a2, term);
    if (term) lin.begin_episode();
  }
  for (int s = 0; s < 5; ++s)
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(lin.value(feats({static_cast<std::uint32_t>(s)}), a), tab.value(s, a), 1e-12);
}

TEST(LinearQPropertyTest, TracesStayInUnitInterval) {
  Rng rng(6);
  LinearQ q(50, 2, 4, 0.1, 1.0, 0.9);
  for (int i = 0; i < 2000; ++i) {
    ActiveFeatures f;
    for (int t = 0; t < 4; ++t) f.indices.push_back(static_cast<std::uint32_t>(t * 12 + uniform_index(rng, 12)));
    q.update(f, static_cast<int>(uniform_index(rng, 2)), 1.0, f, 0, false);
    for (int a = 0; a < 2; ++a)
      for (double e : q.traces(a)) ASSERT_TRUE(e >= 0.0 && e <= 1.0);
  }
}

TEST(LinearQTest, UniformInitialisationRange) {
  Rng rng(7);
  LinearQ q(432, 2, 8, 0.1, 1.0, 0.9);
  q.initialize_uniform(rng, 0.001);
  for (int a = 0; a < 2; ++a)
    for (double w : q.weights(a)) {
      EXPECT_GE(w, 0.0);
      EXPECT_LT(w, 0.001);
    }
  EXPECT_THROW(q.value(feats({432}), 0), std::out_of_range);
}

}  // namespace
}  // namespace rshape
