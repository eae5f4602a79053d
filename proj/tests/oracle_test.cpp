#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rshape/envs.hpp"
#include "rshape/oracle.hpp"
#include "rshape/random.hpp"
#include "rshape/verify.hpp"

namespace rshape {
namespace {

using grid_action::kDown;
using grid_action::kLeft;
using grid_action::kRight;
using grid_action::kUp;

FiniteMDP load_fixture(const std::string& name) {
  std::ifstream in(std::string(RSHAPE_TEST_DATA) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return read_mdp(in);
}

TEST(OracleTest, ToyQStarByHand) {
  const FiniteMDP toy = grid_to_mdp(toy_grid(), 0.3);
  const Matrix q = value_iteration(toy).values;
  // Goal-ward first move: 0 + 0.3 * 1. Bumping first costs one more discount.
  EXPECT_NEAR(q(0, kRight), 0.3, 1e-12);
  EXPECT_NEAR(q(0, kDown), 0.3, 1e-12);
  EXPECT_NEAR(q(0, kUp), 0.09, 1e-12);
  EXPECT_NEAR(q(1, kDown), 1.0, 1e-12);
  EXPECT_NEAR(q(1, kLeft), 0.09, 1e-12);
  EXPECT_NEAR(q(2, kRight), 1.0, 1e-12);
  for (int a = 0; a < 4; ++a) EXPECT_EQ(q(3, static_cast<std::size_t>(a)), 0.0);
}

TEST(OracleTest, ConstantRewardGivesGeometricSum) {
  FiniteMDP mdp(3, 2, 0.5);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) {
      mdp.p(s, a, (s + a) % 3) = 1.0;
      mdp.reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) = 1.0;
    }
  const ExactQ q = value_iteration(mdp);
  for (double v : q.values.data()) EXPECT_NEAR(v, 2.0, 1e-11);
  EXPECT_LE(q.residual, 1e-12);
}

TEST(OracleTest, PolicyEvaluationOfStochasticChain) {
  // One state looping on itself with probability 0.5: V = 1 / (1 - 0.9 * 0.5).
  FiniteMDP mdp(2, 1, 0.9);
  mdp.p(0, 0, 0) = 0.5;
  mdp.p(0, 0, 1) = 0.5;
  mdp.p(1, 0, 1) = 1.0;
  mdp.reward(0, 0) = 1.0;
  mdp.terminal_states = {1};
  const ExactQ q = policy_evaluation(mdp, {0, 0});
  EXPECT_NEAR(q.values(0, 0), 1.0 / (1.0 - 0.45), 1e-10);
  EXPECT_EQ(q.values(1, 0), 0.0);
}

TEST(OracleTest, GreedyPolicyRollsOutShortestPath) {
  for (const GridSpec& grid : {toy_grid(), gridworld20()}) {
    const FiniteMDP mdp = grid_to_mdp(grid, 0.99);
    const Matrix q = value_iteration(mdp).values;
    const auto policy = greedy_policy(q);
    Cell c = grid.start;
    int steps = 0;
    while (c != grid.goal && steps < 1000) {
      c = grid.move(c, policy[static_cast<std::size_t>(grid.index(c))]);
      ++steps;
    }
    EXPECT_EQ(steps, optimal_episode_length(grid));
  }
  const Matrix q20 = value_iteration(grid_to_mdp(gridworld20(), 0.99)).values;
  EXPECT_NEAR(q20(0, kRight), std::pow(0.99, 37), 1e-10);
}

TEST(OracleTest, GreedyTiesResolveToLowestIndex) {
  Matrix q(2, 3);
  q(0, 1) = 1.0;
  q(0, 2) = 1.0;
  EXPECT_EQ(greedy_policy(q), (std::vector<int>{1, 0}));
  EXPECT_EQ(greedy_action_set(q, 0, 1e-12), (std::vector<int>{1, 2}));
  Matrix bias(2, 3);
  bias(0, 2) = 0.5;
  EXPECT_EQ(greedy_policy(q, bias)[0], 2);
}

TEST(OracleTest, ValidationRejectsMalformedMdps) {
  FiniteMDP mdp(2, 1, 0.9);
  mdp.p(0, 0, 0) = 0.7;
  mdp.p(1, 0, 1) = 1.0;
  EXPECT_THROW(value_iteration(mdp), std::invalid_argument);
  mdp.p(0, 0, 1) = 0.3;
  mdp.terminal_states = {1};
  mdp.reward(1, 0) = 1.0;
  EXPECT_THROW(mdp.validate(), std::invalid_argument);
  mdp.reward(1, 0) = 0.0;
  EXPECT_NO_THROW(mdp.validate());
  mdp.gamma = 1.0;
  EXPECT_THROW(mdp.validate(), std::invalid_argument);
}

TEST(StaticShapingOracleTest, StateOnlyPotentialShiftsQByPhi) {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const FiniteMDP mdp = random_deterministic_mdp(rng, 6, 3, 0.8);
    const Matrix phi = random_state_potential(mdp, rng, 3.0);
    const Matrix q = value_iteration(mdp).values;
    const Matrix qs = value_iteration(shape_statically(mdp, phi)).values;
    for (std::size_t s = 0; s < q.rows(); ++s)
      for (std::size_t a = 0; a < q.cols(); ++a) ASSERT_NEAR(qs(s, a), q(s, a) - phi(s, a), 1e-9);
  }
}

TEST(StaticShapingOracleTest, StateActionPotentialIsInvariantAfterBiasCorrection) {
  Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    const FiniteMDP mdp = random_deterministic_mdp(rng, 5, 3, 0.9);
    Matrix phi(5, 3);
    for (int s = 0; s < 5; ++s)
      for (int a = 0; a < 3; ++a)
        phi(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) = mdp.is_terminal(s) ? 0.0 : uniform_real(rng, -4, 4);
    const FiniteMDP shaped = shape_statically(mdp, phi);
    ASSERT_TRUE(shaped.successor_potential.has_value());
    const Matrix q = value_iteration(mdp).values;
    const Matrix qs = value_iteration(shaped).values;
    for (std::size_t s = 0; s < 4; ++s) {
      for (std::size_t a = 0; a < 3; ++a) ASSERT_NEAR(qs(s, a) + phi(s, a), q(s, a), 1e-9);
      ASSERT_EQ(greedy_action_set(q, s, 1e-9), greedy_action_set(qs, s, 1e-9, phi));
    }
  }
}

TEST(StaticShapingOracleTest, NonzeroTerminalPotentialIsRejected) {
  const FiniteMDP toy = grid_to_mdp(toy_grid(), 0.3);
  Matrix phi(4, 4);
  phi(3, 0) = 1.0;
  EXPECT_THROW(shape_statically(toy, phi), std::invalid_argument);
}

TEST(MdpFileTest, FixtureMatchesGridConstruction) {
  const FiniteMDP fixture = load_fixture("toy.mdp");
  const FiniteMDP built = grid_to_mdp(toy_grid(), 0.3);
  EXPECT_EQ(fixture.n_states, 4);
  EXPECT_EQ(fixture.terminal_states, built.terminal_states);
  EXPECT_EQ(fixture.transition, built.transition);
  EXPECT_EQ(fixture.reward, built.reward);
  EXPECT_NEAR(value_iteration(fixture).values(0, kDown), 0.3, 1e-12);
}

TEST(MdpFileTest, WriteReadRoundTrip) {
  Rng rng(33);
  const FiniteMDP mdp = random_deterministic_mdp(rng);
  std::stringstream buf;
  write_mdp(buf, mdp);
  const FiniteMDP back = read_mdp(buf);
  EXPECT_EQ(back.gamma, mdp.gamma);
  EXPECT_EQ(back.transition, mdp.transition);
  EXPECT_EQ(back.reward, mdp.reward);
  EXPECT_EQ(back.terminal_states, mdp.terminal_states);
}

TEST(MdpFileTest, MalformedInputIsReported) {
  std::stringstream truncated("2 1 0.5\nterminals 0\n1\n");
  EXPECT_THROW(read_mdp(truncated), std::runtime_error);
  std::stringstream keyword("2 1 0.5\nterminal 0\n");
  EXPECT_THROW(read_mdp(keyword), std::runtime_error);
}

}  // namespace
}  // namespace rshape
