#pragma once

// Temporal-difference learners: tabular Sarsa(0) and linear Sarsa(lambda) over
// tile-coded features, plus epsilon-greedy action selection.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rshape/envs.hpp"
#include "rshape/features.hpp"
#include "rshape/random.hpp"

namespace rshape {

struct ExplorationSchedule {
  double epsilon_initial = 0.1;
  double epsilon_final = 0.0;
  int decay_horizon = 100;  // episode at which epsilon_final is reached

  void validate() const {
    if (epsilon_initial < 0.0 || epsilon_initial > 1.0 || epsilon_final < 0.0 || epsilon_final > 1.0)
      throw std::invalid_argument("epsilon values must lie in [0, 1]");
    if (epsilon_final > epsilon_initial)
      throw std::invalid_argument("epsilon must not increase over time");
    if (decay_horizon < 1) throw std::invalid_argument("epsilon decay horizon must be >= 1");
  }
};

// Linear from epsilon_initial at episode 1 to epsilon_final at decay_horizon.
inline double epsilon_at(const ExplorationSchedule& schedule, int episode) {
  if (episode <= 1 || schedule.decay_horizon <= 1)
    return episode >= schedule.decay_horizon ? schedule.epsilon_final : schedule.epsilon_initial;
  if (episode >= schedule.decay_horizon) return schedule.epsilon_final;
  const double progress = static_cast<double>(episode - 1) / (schedule.decay_horizon - 1);
  return schedule.epsilon_initial + (schedule.epsilon_final - schedule.epsilon_initial) * progress;
}

// Epsilon-greedy over already-biased action values; greedy ties are broken
// uniformly at random. Always consumes exactly one uniform draw plus one
// index draw when a random choice is needed.
inline int select_action(std::span<const double> values, double epsilon, Rng& rng) {
  if (values.empty()) throw std::invalid_argument("cannot select from an empty action set");
  if (uniform01(rng) < epsilon) return static_cast<int>(uniform_index(rng, values.size()));
  const double best = *std::max_element(values.begin(), values.end());
  int ties = 0;
  for (double v : values) ties += v == best ? 1 : 0;
  int pick = ties == 1 ? 0 : static_cast<int>(uniform_index(rng, static_cast<std::size_t>(ties)));
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] == best && pick-- == 0) return static_cast<int>(a);
  }
  return 0;  // unreachable for finite values
}

// Interface shared by the Q learners and the potential learner.
template <class V>
concept ValueFunction = requires(V v, const V cv, const typename V::Observation& o, int a, double r,
                                 bool terminal) {
  typename V::Observation;
  { cv.num_actions() } -> std::convertible_to<int>;
  { cv.value(o, a) } -> std::convertible_to<double>;
  { cv.values(o) } -> std::convertible_to<std::vector<double>>;
  { v.update(o, a, r, o, a, terminal) } -> std::convertible_to<double>;
  v.begin_episode();
};

class TabularQ {
 public:
  using Observation = int;  // state index

  TabularQ(int num_states, int num_actions, double alpha, double gamma, double initial_value = 0.0)
      : num_states_(num_states),
        num_actions_(num_actions),
        alpha_(alpha),
        gamma_(gamma),
        table_(static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions),
               initial_value) {
    if (num_states < 1 || num_actions < 1) throw std::invalid_argument("empty Q table");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must lie in [0, 1]");
  }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

  double value(int s, int a) const { return table_[slot(s, a)]; }
  double& at(int s, int a) { return table_[slot(s, a)]; }
  std::vector<double> values(int s) const {
    const auto first = table_.begin() + static_cast<std::ptrdiff_t>(slot(s, 0));
    return {first, first + num_actions_};
  }
  std::span<const double> table() const { return table_; }

  void begin_episode() {}

  // Sarsa(0): Q(s,a) += alpha * (r + gamma Q(s',a') - Q(s,a)); a terminal
  // successor bootstraps from 0. Returns the TD error.
  double update(int s, int a, double reward, int s_next, int a_next, bool terminal) {
    const double bootstrap = terminal ? 0.0 : gamma_ * value(s_next, a_next);
    const double delta = reward + bootstrap - value(s, a);
    if (!std::isfinite(delta)) throw std::domain_error("non-finite TD error");
    table_[slot(s, a)] += alpha_ * delta;
    return delta;
  }

 private:
  std::size_t slot(int s, int a) const {
    if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
      throw std::out_of_range("Q table index out of range");
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions_) +
           static_cast<std::size_t>(a);
  }

  int num_states_;
  int num_actions_;
  double alpha_;
  double gamma_;
  std::vector<double> table_;
};

template <class State>
void sarsa0_update(TabularQ& q, const GridSpec& grid, const Transition<State>& t, int a_next,
                   double total_reward) {
  q.update(grid.index(t.state), t.action, total_reward, grid.index(t.next_state), a_next, t.terminal);
}

// Linear action values over binary features, one weight vector per action,
// with replacing eligibility traces. The configured alpha is split evenly
// over the active features.
class LinearQ {
 public:
  using Observation = ActiveFeatures;

  LinearQ(std::size_t table_size, int num_actions, int num_tilings, double alpha, double gamma,
          double lambda)
      : table_size_(table_size),
        num_actions_(num_actions),
        step_size_(alpha / num_tilings),
        alpha_(alpha),
        gamma_(gamma),
        lambda_(lambda),
        weights_(static_cast<std::size_t>(num_actions), std::vector<double>(table_size, 0.0)),
        traces_(static_cast<std::size_t>(num_actions), std::vector<double>(table_size, 0.0)) {
    if (table_size == 0 || num_actions < 1 || num_tilings < 1)
      throw std::invalid_argument("empty linear value function");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must lie in [0, 1]");
  }

  int num_actions() const { return num_actions_; }
  std::size_t table_size() const { return table_size_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }

  void initialize_uniform(Rng& rng, double high) {
    if (high <= 0.0) return;
    for (auto& w : weights_)
      for (double& x : w) x = uniform_real(rng, 0.0, high);
  }

  double value(const ActiveFeatures& f, int a) const {
    const auto& w = weights_.at(static_cast<std::size_t>(a));
    double sum = 0.0;
    for (auto i : f.indices) sum += w[checked(i)];
    return sum;
  }

  std::vector<double> values(const ActiveFeatures& f) const {
    std::vector<double> out(static_cast<std::size_t>(num_actions_));
    for (int a = 0; a < num_actions_; ++a) out[static_cast<std::size_t>(a)] = value(f, a);
    return out;
  }

  void begin_episode() {
    for (auto& e : traces_) std::fill(e.begin(), e.end(), 0.0);
  }

  // Sarsa(lambda) step. Returns the TD error.
  double update(const ActiveFeatures& f, int a, double reward, const ActiveFeatures& f_next, int a_next,
                bool terminal) {
    const double bootstrap = terminal ? 0.0 : gamma_ * value(f_next, a_next);
    const double delta = reward + bootstrap - value(f, a);
    if (!std::isfinite(delta)) throw std::domain_error("non-finite TD error");
    for (auto i : f.indices) {
      const std::size_t k = checked(i);
      for (int b = 0; b < num_actions_; ++b) traces_[static_cast<std::size_t>(b)][k] = b == a ? 1.0 : 0.0;
    }
    const double decay = gamma_ * lambda_;
    for (std::size_t b = 0; b < weights_.size(); ++b) {
      auto& w = weights_[b];
      auto& e = traces_[b];
      for (std::size_t k = 0; k < table_size_; ++k) {
        if (e[k] == 0.0) continue;
        w[k] += step_size_ * delta * e[k];
        e[k] *= decay;
      }
    }
    return delta;
  }

  std::span<const double> weights(int a) const { return weights_.at(static_cast<std::size_t>(a)); }
  std::span<const double> traces(int a) const { return traces_.at(static_cast<std::size_t>(a)); }

 private:
  std::size_t checked(std::uint32_t i) const {
    if (i >= table_size_) throw std::out_of_range("feature index beyond weight table");
    return i;
  }

  std::size_t table_size_;
  int num_actions_;
  double step_size_;
  double alpha_;
  double gamma_;
  double lambda_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> traces_;
};

inline double sarsa_lambda_update(LinearQ& q, const ActiveFeatures& features,
                                  const ActiveFeatures& features_next, int a, int a_next,
                                  double total_reward, bool terminal) {
  return q.update(features, a, total_reward, features_next, a_next, terminal);
}

static_assert(ValueFunction<TabularQ>);
static_assert(ValueFunction<LinearQ>);

}  // namespace rshape
