#pragma once

// Seeded execution of shaped learners. A run is fully determined by the
// config and base_seed + run_index.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "rshape/agents.hpp"
#include "rshape/envs.hpp"
#include "rshape/features.hpp"
#include "rshape/harness/config.hpp"
#include "rshape/harness/stats.hpp"
#include "rshape/random.hpp"
#include "rshape/shaping.hpp"

namespace rshape {

// Tabular learner on a grid; the observation is the cell index.
struct GridTask {
  using Env = GridWorld;
  using Q = TabularQ;

  GridWorld env;
  AdviceSpec advice;

  int observe(Cell c) const { return env.spec().index(c); }

  TabularQ make_values(double rate, double gamma, double /*lambda*/, double init_max, Rng& rng) const {
    TabularQ q(env.spec().num_states(), GridWorld::kNumActions, rate, gamma);
    if (init_max > 0.0)
      for (int s = 0; s < q.num_states(); ++s)
        for (int a = 0; a < q.num_actions(); ++a) q.at(s, a) = uniform_real(rng, 0.0, init_max);
    return q;
  }

  double expert(Cell s, int a, Cell s_next) const { return expert_reward(advice, env.spec(), s, a, s_next); }

  // Static potential: the negated one-step advice on the deterministic successor.
  double static_potential(Cell s, int a) const {
    if (s == env.spec().goal) return 0.0;
    return -expert(s, a, env.spec().move(s, a));
  }
};

// Sarsa(lambda) on tile-coded cart-pole state.
struct CartPoleTask {
  using Env = CartPole;
  using Q = LinearQ;

  CartPole env;
  AdviceSpec advice;
  TileCoder coder{cartpole_tile_config()};

  ActiveFeatures observe(const CartPoleState& s) const {
    const auto v = s.as_array();
    return coder.encode(v);
  }

  LinearQ make_values(double rate, double gamma, double lambda, double init_max, Rng& rng) const {
    LinearQ q(coder.table_size(), CartPole::kNumActions, coder.num_tilings(), rate, gamma, lambda);
    q.initialize_uniform(rng, init_max);
    return q;
  }

  double expert(const CartPoleState& s, int a, const CartPoleState& s_next) const {
    return expert_reward(advice, env, s, a, s_next);
  }

  double static_potential(const CartPoleState& s, int a) const { return -expert(s, a, s); }
};

// Everything observable about one learning step.
template <class Task>
struct StepRecord {
  Transition<typename Task::Env::State> transition;
  int next_action = 0;
  double expert_reward = 0.0;
  double phi_old = 0.0;  // Phi_t(s,a) before this step's update
  double shaping = 0.0;  // F
  double total_reward = 0.0;
};

struct NoObserver {
  template <class R>
  void operator()(const R&) const {}
};

// A Sarsa learner combined with one shaping mode.
template <class Task>
class ShapedLearner {
 public:
  using Q = typename Task::Q;
  using Obs = typename Q::Observation;
  using State = typename Task::Env::State;

  // `rng` drives Q initialization; `phi_rng` is a separate stream so that the
  // potential's initialization never shifts the rest of the run.
  ShapedLearner(Task task, const ExperimentConfig& cfg, Rng& rng, Rng& phi_rng)
      : task_(std::move(task)),
        cfg_(cfg),
        q_(task_.make_values(cfg.alpha, cfg.gamma, cfg.lambda, cfg.q_init_max, rng)) {
    if (learns_potential(cfg.mode))
      phi_.emplace(task_.make_values(cfg.beta, cfg.gamma, cfg.lambda, cfg.phi_init_max, phi_rng));
    if (cfg.mode == ShapingMode::PIES) xi_.emplace(cfg.c.value());
  }

  const Task& task() const { return task_; }
  const Q& q() const { return q_; }
  const Potential<Q>* phi() const { return phi_ ? &*phi_ : nullptr; }
  std::optional<double> xi() const { return xi_ ? std::optional<double>(xi_->xi()) : std::nullopt; }

  // Action values after the mode's policy bias.
  std::vector<double> biased_values(const Obs& o) const {
    std::vector<double> v = q_.values(o);
    if (phi_ && (cfg_.mode == ShapingMode::CorrectedDPBA || cfg_.mode == ShapingMode::PIES)) {
      const auto bias = policy_bias(cfg_.mode, phi_->values(o), xi());
      for (std::size_t a = 0; a < v.size(); ++a) v[a] += bias[a];
    }
    return v;
  }

  // Runs one episode (1-based index) and returns its length in steps.
  template <class Observer = NoObserver>
  int run_episode(int episode, Rng& rng, Observer&& observe = {}) {
    const double eps = epsilon_at(cfg_.epsilon, episode);
    q_.begin_episode();
    if (phi_) phi_->begin_episode();

    State s = task_.env.reset(rng);
    Obs o = task_.observe(s);
    int a = select_action(biased_values(o), eps, rng);
    for (int t = 0;; ++t) {
      StepRecord<Task> rec;
      rec.transition = task_.env.step(s, a, t);
      const auto& tr = rec.transition;
      rec.expert_reward = task_.expert(tr.state, a, tr.next_state);
      Obs o_next = task_.observe(tr.next_state);
      rec.next_action = tr.terminal ? 0 : select_action(biased_values(o_next), eps, rng);

      if (phi_) {
        rec.phi_old = phi_->update(o, a, o_next, rec.next_action, rec.expert_reward, tr.terminal);
        if (adds_shaping_reward(cfg_.mode))
          rec.shaping = shaping_reward_dynamic(*phi_, o_next, rec.next_action, rec.phi_old, cfg_.gamma,
                                               tr.terminal);
      } else if (cfg_.mode == ShapingMode::StaticPBRS) {
        const double next = tr.terminal ? 0.0 : task_.static_potential(tr.next_state, rec.next_action);
        rec.shaping = shaping_reward_static(task_.static_potential(s, a), next, cfg_.gamma, tr.terminal);
      }
      rec.total_reward = total_reward(cfg_.mode, tr.reward, rec.shaping);
      q_.update(o, a, rec.total_reward, o_next, rec.next_action, tr.terminal);
      observe(std::as_const(rec));

      if (tr.terminal) {
        if (xi_) xi_->advance();
        return t + 1;
      }
      s = tr.next_state;
      o = std::move(o_next);
      a = rec.next_action;
    }
  }

 private:
  Task task_;
  ExperimentConfig cfg_;
  Q q_;
  std::optional<Potential<Q>> phi_;
  std::optional<DecaySchedule> xi_;
};

inline GridTask make_grid_task(const ExperimentConfig& cfg) {
  return GridTask{GridWorld(grid_spec(cfg.env)), cfg.advice};
}

inline CartPoleTask make_cartpole_task(const ExperimentConfig& cfg) {
  return CartPoleTask{CartPole(), cfg.advice, TileCoder(cartpole_tile_config())};
}

inline std::uint64_t run_seed(const ExperimentConfig& cfg, int run_index) {
  return cfg.base_seed + static_cast<std::uint64_t>(run_index);
}

template <class Task>
std::vector<int> run_task(Task task, const ExperimentConfig& cfg, int run_index) {
  Rng rng(run_seed(cfg, run_index));
  Rng phi_rng(derive_seed(run_seed(cfg, run_index), 1));
  ShapedLearner<Task> learner(std::move(task), cfg, rng, phi_rng);
  std::vector<int> lengths;
  lengths.reserve(static_cast<std::size_t>(cfg.episodes));
  for (int e = 1; e <= cfg.episodes; ++e) lengths.push_back(learner.run_episode(e, rng));
  return lengths;
}

// Steps per episode for one seeded run.
inline std::vector<int> run_single(const ExperimentConfig& cfg, int run_index) {
  cfg.validate();
  if (is_grid(cfg.env)) return run_task(make_grid_task(cfg), cfg, run_index);
  return run_task(make_cartpole_task(cfg), cfg, run_index);
}

// Runs are distributed over `parallel` threads; results are placed by run
// index so the output does not depend on scheduling.
inline LearningCurve run_batch(const ExperimentConfig& cfg, int parallel = 1) {
  cfg.validate();
  std::vector<std::vector<int>> lengths(static_cast<std::size_t>(cfg.runs));
  const int workers = std::clamp(parallel, 1, cfg.runs);
  if (workers == 1) {
    for (int r = 0; r < cfg.runs; ++r) lengths[static_cast<std::size_t>(r)] = run_single(cfg, r);
    return LearningCurve(std::move(lengths));
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < cfg.runs; r = next++) {
          try {
            lengths[static_cast<std::size_t>(r)] = run_single(cfg, r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return LearningCurve(std::move(lengths));
}

}  // namespace rshape
