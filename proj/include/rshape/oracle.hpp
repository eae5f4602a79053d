#pragma once

// Exact dynamic programming on small finite MDPs, used as ground truth for
// invariance checks that must not depend on learning dynamics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rshape/envs.hpp"

namespace rshape {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double sup_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

struct FiniteMDP {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  std::vector<double> transition;  // P(s'|s,a) at [(s * n_actions + a) * n_states + s']
  Matrix reward;                   // R(s,a)
  std::vector<int> terminal_states;
  // State-action potential evaluated at the successor action chosen by the
  // greedy-on-(Q + potential) policy. Empty unless produced by
  // shape_statically with an action-dependent potential.
  std::optional<Matrix> successor_potential;

  FiniteMDP() = default;
  FiniteMDP(int states, int actions, double discount)
      : n_states(states),
        n_actions(actions),
        gamma(discount),
        transition(static_cast<std::size_t>(states * actions * states), 0.0),
        reward(static_cast<std::size_t>(states), static_cast<std::size_t>(actions)) {}

  double& p(int s, int a, int s_next) { return transition[offset(s, a) + static_cast<std::size_t>(s_next)]; }
  double p(int s, int a, int s_next) const {
    return transition[offset(s, a) + static_cast<std::size_t>(s_next)];
  }
  bool is_terminal(int s) const {
    return std::find(terminal_states.begin(), terminal_states.end(), s) != terminal_states.end();
  }

  void validate() const {
    if (n_states < 1 || n_actions < 1) throw std::invalid_argument("MDP must have states and actions");
    if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("MDP discount must lie in [0, 1)");
    if (transition.size() != static_cast<std::size_t>(n_states * n_actions * n_states) ||
        reward.rows() != static_cast<std::size_t>(n_states) ||
        reward.cols() != static_cast<std::size_t>(n_actions))
      throw std::invalid_argument("MDP tensor shapes do not match its dimensions");
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        double sum = 0.0;
        for (int t = 0; t < n_states; ++t) {
          const double pr = p(s, a, t);
          if (pr < 0.0) throw std::invalid_argument("negative transition probability");
          sum += pr;
        }
        if (std::abs(sum - 1.0) > 1e-12)
          throw std::invalid_argument("transition row (" + std::to_string(s) + "," + std::to_string(a) +
                                      ") does not sum to 1");
      }
    }
    for (int s : terminal_states) {
      if (s < 0 || s >= n_states) throw std::invalid_argument("terminal state out of range");
      for (int a = 0; a < n_actions; ++a) {
        if (p(s, a, s) != 1.0 || reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) != 0.0)
          throw std::invalid_argument("terminal states must self-loop with zero reward");
      }
    }
  }

 private:
  std::size_t offset(int s, int a) const {
    return (static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(a)) *
           static_cast<std::size_t>(n_states);
  }
};

struct ExactQ {
  Matrix values;
  int iterations = 0;
  double residual = 0.0;  // sup-norm Bellman residual of `values`
};

namespace detail {

// (T Q)(s,a) = R(s,a) + gamma sum_s' P(s'|s,a) max_b [Q(s',b) + psi(s',b)]
inline Matrix bellman_optimality(const FiniteMDP& mdp, const Matrix& q) {
  const auto ns = static_cast<std::size_t>(mdp.n_states);
  const auto na = static_cast<std::size_t>(mdp.n_actions);
  std::vector<double> best(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < na; ++b) {
      const double psi = mdp.successor_potential ? (*mdp.successor_potential)(s, b) : 0.0;
      m = std::max(m, q(s, b) + psi);
    }
    best[s] = m;
  }
  Matrix out(ns, na);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      double expect = 0.0;
      for (std::size_t t = 0; t < ns; ++t) {
        const double pr = mdp.p(static_cast<int>(s), static_cast<int>(a), static_cast<int>(t));
        if (pr != 0.0) expect += pr * best[t];
      }
      out(s, a) = mdp.reward(s, a) + mdp.gamma * expect;
    }
  }
  return out;
}

}  // namespace detail

inline ExactQ value_iteration(const FiniteMDP& mdp, double tol = 1e-12, int max_iterations = 1000000) {
  mdp.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("value iteration tolerance must be positive");
  ExactQ out;
  out.values = Matrix(static_cast<std::size_t>(mdp.n_states), static_cast<std::size_t>(mdp.n_actions));
  for (int it = 1; it <= max_iterations; ++it) {
    Matrix next = detail::bellman_optimality(mdp, out.values);
    const double change = sup_distance(next, out.values);
    out.values = std::move(next);
    out.iterations = it;
    if (change < tol) {
      out.residual = sup_distance(detail::bellman_optimality(mdp, out.values), out.values);
      if (out.residual < tol) return out;
    }
  }
  throw std::runtime_error("value iteration did not converge within the iteration cap");
}

inline double bellman_residual(const FiniteMDP& mdp, const Matrix& q) {
  return sup_distance(detail::bellman_optimality(mdp, q), q);
}

// Q^pi for a deterministic policy (state -> action).
inline ExactQ policy_evaluation(const FiniteMDP& mdp, const std::vector<int>& policy, double tol = 1e-12,
                                int max_iterations = 1000000) {
  mdp.validate();
  if (policy.size() != static_cast<std::size_t>(mdp.n_states))
    throw std::invalid_argument("policy must assign an action to every state");
  const auto ns = static_cast<std::size_t>(mdp.n_states);
  const auto na = static_cast<std::size_t>(mdp.n_actions);
  ExactQ out;
  out.values = Matrix(ns, na);
  for (int it = 1; it <= max_iterations; ++it) {
    Matrix next(ns, na);
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        double expect = 0.0;
        for (std::size_t t = 0; t < ns; ++t) {
          const double pr = mdp.p(static_cast<int>(s), static_cast<int>(a), static_cast<int>(t));
          if (pr != 0.0) expect += pr * out.values(t, static_cast<std::size_t>(policy[t]));
        }
        next(s, a) = mdp.reward(s, a) + mdp.gamma * expect;
      }
    }
    const double change = sup_distance(next, out.values);
    out.values = std::move(next);
    out.iterations = it;
    out.residual = change;
    if (change < tol) return out;
  }
  throw std::runtime_error("policy evaluation did not converge within the iteration cap");
}

// Per-state argmax of q + bias, lowest action index on ties.
inline std::vector<int> greedy_policy(const Matrix& q, const std::optional<Matrix>& bias = std::nullopt) {
  if (bias && (bias->rows() != q.rows() || bias->cols() != q.cols()))
    throw std::invalid_argument("bias shape differs from Q");
  std::vector<int> policy(q.rows(), 0);
  for (std::size_t s = 0; s < q.rows(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q.cols(); ++a) {
      const double v = q(s, a) + (bias ? (*bias)(s, a) : 0.0);
      if (v > best) {
        best = v;
        policy[s] = static_cast<int>(a);
      }
    }
  }
  return policy;
}

// Actions within tol of the best biased value in state s.
inline std::vector<int> greedy_action_set(const Matrix& q, std::size_t s, double tol,
                                          const std::optional<Matrix>& bias = std::nullopt) {
  std::vector<double> v(q.cols());
  for (std::size_t a = 0; a < q.cols(); ++a) v[a] = q(s, a) + (bias ? (*bias)(s, a) : 0.0);
  const double best = *std::max_element(v.begin(), v.end());
  std::vector<int> out;
  for (std::size_t a = 0; a < v.size(); ++a)
    if (v[a] >= best - tol) out.push_back(static_cast<int>(a));
  return out;
}

// M' = M with the static potential-based shaping reward. A state-only
// potential (constant across actions) is folded into R exactly:
//   R'(s,a) = R(s,a) + gamma E[phi(s')] - phi(s).
// An action-dependent potential assumes the successor action is the one the
// bias-corrected greedy policy picks, so
//   R'(s,a) = R(s,a) - phi(s,a) and gamma E[phi(s', a')] enters the backup.
inline FiniteMDP shape_statically(const FiniteMDP& mdp, const Matrix& phi) {
  mdp.validate();
  const auto ns = static_cast<std::size_t>(mdp.n_states);
  const auto na = static_cast<std::size_t>(mdp.n_actions);
  if (phi.rows() != ns || phi.cols() != na) throw std::invalid_argument("potential shape differs from MDP");
  for (int s : mdp.terminal_states)
    for (std::size_t a = 0; a < na; ++a)
      if (phi(static_cast<std::size_t>(s), a) != 0.0)
        throw std::invalid_argument("potential must be zero at terminal states");

  bool state_only = true;
  for (std::size_t s = 0; s < ns && state_only; ++s)
    for (std::size_t a = 1; a < na; ++a) state_only = state_only && phi(s, a) == phi(s, 0);

  FiniteMDP shaped = mdp;
  if (state_only) {
    for (std::size_t s = 0; s < ns; ++s) {
      if (mdp.is_terminal(static_cast<int>(s))) continue;
      for (std::size_t a = 0; a < na; ++a) {
        double expect = 0.0;
        for (std::size_t t = 0; t < ns; ++t) {
          const double pr = mdp.p(static_cast<int>(s), static_cast<int>(a), static_cast<int>(t));
          if (pr != 0.0) expect += pr * phi(t, 0);
        }
        shaped.reward(s, a) = mdp.reward(s, a) + mdp.gamma * expect - phi(s, 0);
      }
    }
    return shaped;
  }
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < na; ++a) shaped.reward(s, a) = mdp.reward(s, a) - phi(s, a);
  shaped.successor_potential = phi;
  return shaped;
}

// Deterministic grid as an MDP: +1 on entering the goal, goal absorbing.
inline FiniteMDP grid_to_mdp(const GridSpec& grid, double gamma) {
  FiniteMDP mdp(grid.num_states(), grid_action::kCount, gamma);
  const int goal = grid.index(grid.goal);
  for (int s = 0; s < grid.num_states(); ++s) {
    for (int a = 0; a < grid_action::kCount; ++a) {
      if (s == goal) {
        mdp.p(s, a, s) = 1.0;
        continue;
      }
      const int t = grid.index(grid.move(grid.cell(s), a));
      mdp.p(s, a, t) = 1.0;
      mdp.reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) = t == goal ? 1.0 : 0.0;
    }
  }
  mdp.terminal_states = {goal};
  return mdp;
}

// Plain-text format:
//   # comments and blank lines are ignored
//   n_states n_actions gamma
//   terminals k t_1 ... t_k
//   n_states rows of n_actions rewards
//   n_states * n_actions rows of n_states probabilities, row (s, a) in s-major order
inline FiniteMDP read_mdp(std::istream& in) {
  std::stringstream clean;
  for (std::string line; std::getline(in, line);) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    clean << line << '\n';
  }
  auto expect = [&](auto& value, const char* what) {
    if (!(clean >> value)) throw std::runtime_error(std::string("MDP file: expected ") + what);
  };
  int ns = 0;
  int na = 0;
  double gamma = 0.0;
  expect(ns, "n_states");
  expect(na, "n_actions");
  expect(gamma, "gamma");
  if (ns < 1 || na < 1) throw std::runtime_error("MDP file: dimensions must be positive");
  FiniteMDP mdp(ns, na, gamma);
  std::string keyword;
  expect(keyword, "'terminals'");
  if (keyword != "terminals") throw std::runtime_error("MDP file: expected 'terminals', got '" + keyword + "'");
  int k = 0;
  expect(k, "terminal count");
  for (int i = 0; i < k; ++i) {
    int t = 0;
    expect(t, "terminal state");
    mdp.terminal_states.push_back(t);
  }
  for (int s = 0; s < ns; ++s)
    for (int a = 0; a < na; ++a) expect(mdp.reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a)), "reward");
  for (int s = 0; s < ns; ++s)
    for (int a = 0; a < na; ++a)
      for (int t = 0; t < ns; ++t) expect(mdp.p(s, a, t), "transition probability");
  mdp.validate();
  return mdp;
}

inline void write_mdp(std::ostream& out, const FiniteMDP& mdp) {
  const auto old_precision = out.precision(17);
  out << mdp.n_states << ' ' << mdp.n_actions << ' ' << mdp.gamma << '\n';
  out << "terminals " << mdp.terminal_states.size();
  for (int t : mdp.terminal_states) out << ' ' << t;
  out << '\n';
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a)
      out << (a ? " " : "") << mdp.reward(static_cast<std::size_t>(s), static_cast<std::size_t>(a));
    out << '\n';
  }
  for (int s = 0; s < mdp.n_states; ++s)
    for (int a = 0; a < mdp.n_actions; ++a) {
      for (int t = 0; t < mdp.n_states; ++t) out << (t ? " " : "") << mdp.p(s, a, t);
      out << '\n';
    }
  out.precision(old_precision);
}

}  // namespace rshape
