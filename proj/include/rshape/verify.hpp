#pragma once

// Property checks over the oracle, the shaping machinery and the tile coder.
// Each check is self-contained and deterministic in its seed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rshape/envs.hpp"
#include "rshape/features.hpp"
#include "rshape/harness/config.hpp"
#include "rshape/harness/runner.hpp"
#include "rshape/oracle.hpp"
#include "rshape/random.hpp"
#include "rshape/shaping.hpp"

namespace rshape {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

template <class F>
CheckResult timed(std::string name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{std::move(name), false, {}, 0.0};
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

// Deterministic MDP with the last state terminal, random successors and
// rewards in [-1, 1].
inline FiniteMDP random_deterministic_mdp(Rng& rng, int n_states = 5, int n_actions = 3, double gamma = 0.9) {
  FiniteMDP mdp(n_states, n_actions, gamma);
  const int terminal = n_states - 1;
  mdp.terminal_states = {terminal};
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) {
      if (s == terminal) {
        mdp.p(s, a, s) = 1.0;
        continue;
      }
      mdp.p(s, a, static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_states)))) = 1.0;
      mdp.reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) = uniform_real(rng, -1.0, 1.0);
    }
  return mdp;
}

// State-only potential in [-scale, scale], zero at terminals.
inline Matrix random_state_potential(const FiniteMDP& mdp, Rng& rng, double scale = 5.0) {
  Matrix phi(static_cast<std::size_t>(mdp.n_states), static_cast<std::size_t>(mdp.n_actions));
  for (int s = 0; s < mdp.n_states; ++s) {
    const double v = mdp.is_terminal(s) ? 0.0 : uniform_real(rng, -scale, scale);
    for (int a = 0; a < mdp.n_actions; ++a) phi(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) = v;
  }
  return phi;
}

// Static shaping keeps the optimal policy and shifts Q* by exactly -phi.
inline CheckResult check_static_invariance(int trials = 100, std::uint64_t seed = 2024, double tol = 1e-8) {
  return detail::timed("static PBRS invariance", [&](CheckResult& r) {
    Rng rng(seed);
    int policy_mismatches = 0;
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
      const FiniteMDP mdp = random_deterministic_mdp(rng);
      const Matrix phi = random_state_potential(mdp, rng);
      const FiniteMDP shaped = shape_statically(mdp, phi);
      const Matrix q = value_iteration(mdp, 1e-13).values;
      const Matrix q_shaped = value_iteration(shaped, 1e-13).values;

      Matrix restored = q_shaped;
      for (std::size_t s = 0; s < restored.rows(); ++s)
        for (std::size_t a = 0; a < restored.cols(); ++a) restored(s, a) += phi(s, a);
      worst = std::max(worst, sup_distance(restored, q));

      for (int s = 0; s < mdp.n_states; ++s) {
        if (mdp.is_terminal(s)) continue;
        const auto su = static_cast<std::size_t>(s);
        if (greedy_action_set(q, su, 1e-9) != greedy_action_set(q_shaped, su, 1e-9, phi)) ++policy_mismatches;
      }
    }
    std::ostringstream d;
    d << trials << " MDPs, policy mismatches " << policy_mismatches << ", max |Q*' + phi - Q*| " << worst;
    r.detail = d.str();
    r.passed = policy_mismatches == 0 && worst <= tol;
  });
}

// With all-zero advice every mode must reproduce plain Sarsa exactly.
inline CheckResult check_zero_advice_reduction(int runs = 3, std::uint64_t seed = 7) {
  return detail::timed("zero-advice reduction", [&](CheckResult& r) {
    int mismatches = 0;
    int compared = 0;
    for (EnvId env : {EnvId::Toy, EnvId::GridWorld20, EnvId::CartPole}) {
      ExperimentConfig base = default_config(env);
      base.advice = {AdviceKind::Zero, 1.0};
      base.base_seed = seed;
      base.phi_init_max = 0.0;
      base.c = 10;
      for (int run = 0; run < runs; ++run) {
        ExperimentConfig none = base;
        none.mode = ShapingMode::None;
        const auto reference = run_single(none, run);
        for (ShapingMode mode : kAllModes) {
          ExperimentConfig cfg = base;
          cfg.mode = mode;
          ++compared;
          if (run_single(cfg, run) != reference) ++mismatches;
        }
      }
    }
    r.detail = std::to_string(compared) + " (env, run, mode) vectors, " + std::to_string(mismatches) + " differ";
    r.passed = mismatches == 0;
  });
}

// xi_e for C=5: 1, 0.8, 0.6, 0.4, 0.2, then 0 forever.
inline CheckResult check_xi_schedule(int horizon = 1000, double tol = 1e-12) {
  return detail::timed("xi schedule", [&](CheckResult& r) {
    const double expected_head[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
    DecaySchedule xi(5);
    double worst = 0.0;
    for (int e = 0; e < horizon; ++e) {
      const double want = e < 6 ? expected_head[e] : 0.0;
      worst = std::max(worst, std::abs(xi.xi() - want));
      if (e >= 5 && xi.xi() != 0.0) worst = std::max(worst, 1.0);
      xi.advance();
    }

    // The learner must advance xi exactly once per episode.
    ExperimentConfig cfg = default_config(EnvId::Toy);
    cfg.mode = ShapingMode::PIES;
    cfg.c = 5;
    Rng rng(1);
    Rng phi_rng(2);
    ShapedLearner<GridTask> learner(make_grid_task(cfg), cfg, rng, phi_rng);
    for (int e = 1; e <= 10; ++e) {
      const double want = e <= 6 ? expected_head[e - 1] : 0.0;
      worst = std::max(worst, std::abs(*learner.xi() - want));
      learner.run_episode(e, rng);
    }
    std::ostringstream d;
    d << "max deviation " << worst << " over " << horizon << " episodes";
    r.detail = d.str();
    r.passed = worst <= tol;
  });
}

// Sum_k gamma^k F_k + Phi(s_0, a_0) = 0 for a frozen potential, checked both on
// the shaping the learner itself received and on random potentials replayed
// over the same trajectories.
inline CheckResult check_telescoping(int trajectories = 1000, std::uint64_t seed = 99, double tol = 1e-10) {
  return detail::timed("telescoping identity", [&](CheckResult& r) {
    ExperimentConfig cfg = default_config(EnvId::Toy);
    cfg.mode = ShapingMode::StaticPBRS;
    cfg.gamma = 0.3;
    cfg.episodes = trajectories;
    cfg.epsilon = {0.5, 0.1, trajectories};
    const GridSpec grid = toy_grid();
    const auto n_states = static_cast<std::size_t>(grid.num_states());
    Rng rng(seed);
    Rng phi_rng(derive_seed(seed, 1));
    Rng table_rng(derive_seed(seed, 2));
    double worst = 0.0;
    long steps = 0;
    for (int half = 0; half < 2; ++half) {
      cfg.advice.kind = half == 0 ? AdviceKind::GridGood : AdviceKind::GridBad;
      ShapedLearner<GridTask> learner(make_grid_task(cfg), cfg, rng, phi_rng);
      for (int e = 1; e <= trajectories / 2 + (half == 0 ? trajectories % 2 : 0); ++e) {
        std::vector<StepRecord<GridTask>> trace;
        learner.run_episode(e, rng, [&](const StepRecord<GridTask>& rec) { trace.push_back(rec); });
        steps += static_cast<long>(trace.size());

        const auto& first = trace.front().transition;
        double sum = 0.0;
        double discount = 1.0;
        for (const auto& rec : trace) {
          sum += discount * rec.shaping;
          discount *= cfg.gamma;
        }
        worst = std::max(worst, std::abs(sum + learner.task().static_potential(first.state, first.action)));

        Matrix phi(n_states, grid_action::kCount);
        for (std::size_t s = 0; s < n_states; ++s)
          for (std::size_t a = 0; a < grid_action::kCount; ++a)
            phi(s, a) = grid.cell(static_cast<int>(s)) == grid.goal ? 0.0 : uniform_real(table_rng, -10.0, 10.0);
        auto at = [&](Cell c, int a) { return phi(static_cast<std::size_t>(grid.index(c)), static_cast<std::size_t>(a)); };
        sum = 0.0;
        discount = 1.0;
        for (const auto& rec : trace) {
          const auto& tr = rec.transition;
          const double next = tr.terminal ? 0.0 : at(tr.next_state, rec.next_action);
          sum += discount * shaping_reward_static(at(tr.state, tr.action), next, cfg.gamma, tr.terminal);
          discount *= cfg.gamma;
        }
        worst = std::max(worst, std::abs(sum + at(first.state, first.action)));
      }
    }
    std::ostringstream d;
    d << trajectories << " trajectories (" << steps << " steps), max |residual| " << worst;
    r.detail = d.str();
    r.passed = worst <= tol;
  });
}

// Exactly num_tilings distinct in-range features, determinism and wrap
// periodicity over a 10^4-point grid spanning and exceeding the bounds.
inline CheckResult check_tile_coder(int points_per_dim = 10) {
  return detail::timed("tile coder invariants", [&](CheckResult& r) {
    const TileCoder coder(cartpole_tile_config());
    const auto& cfg = coder.config();
    const double period = 2.0 * std::numbers::pi;
    long violations = 0;
    long points = 0;
    std::vector<double> axis[4];
    for (std::size_t d = 0; d < 4; ++d) {
      const auto [lo, hi] = cfg.bounds_per_dim[d];
      const double margin = 0.1 * (hi - lo);
      for (int i = 0; i < points_per_dim; ++i)
        axis[d].push_back(lo - margin + (hi - lo + 2 * margin) * i / (points_per_dim - 1));
    }
    for (double x : axis[0])
      for (double xd : axis[1])
        for (double th : axis[2])
          for (double thd : axis[3]) {
            ++points;
            const double s[4] = {x, xd, th, thd};
            const ActiveFeatures f = coder.encode(s);
            bool ok = f.size() == static_cast<std::size_t>(coder.num_tilings());
            std::vector<std::uint32_t> sorted = f.indices;
            std::sort(sorted.begin(), sorted.end());
            ok = ok && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
            for (std::size_t t = 0; t < f.size(); ++t) {
              const std::size_t lo = t * cfg.tiles_per_tiling();
              ok = ok && f.indices[t] >= lo && f.indices[t] < lo + cfg.tiles_per_tiling();
            }
            ok = ok && coder.encode(s) == f;
            for (int k : {-2, -1, 1, 3}) {
              const double shifted[4] = {x, xd, th + k * period, thd};
              ok = ok && coder.encode(shifted) == f;
            }
            if (!ok) ++violations;
          }
    r.detail = std::to_string(points) + " points, " + std::to_string(violations) + " violations";
    r.passed = violations == 0;
  });
}

inline std::vector<CheckResult> run_property_checks() {
  return {check_static_invariance(), check_zero_advice_reduction(), check_xi_schedule(), check_telescoping(),
          check_tile_coder()};
}

}  // namespace rshape
