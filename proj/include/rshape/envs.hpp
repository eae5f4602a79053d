#pragma once

// Episodic environments: deterministic grid worlds (the 2x2 toy grid and the
// 20x20 grid world) and the classic cart-pole balancing task, together with
// the expert advice functions defined over them.

#include <array>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rshape/random.hpp"

namespace rshape {

enum class EnvId { Toy, GridWorld20, CartPole };

inline EnvId parse_env_id(std::string_view id) {
  if (id == "toy") return EnvId::Toy;
  if (id == "gridworld20") return EnvId::GridWorld20;
  if (id == "cartpole") return EnvId::CartPole;
  throw std::invalid_argument("unknown environment id '" + std::string(id) + "'");
}

inline std::string_view to_string(EnvId id) {
  switch (id) {
    case EnvId::Toy: return "toy";
    case EnvId::GridWorld20: return "gridworld20";
    case EnvId::CartPole: return "cartpole";
  }
  return "?";
}

inline bool is_grid(EnvId id) { return id != EnvId::CartPole; }

// ---------------------------------------------------------------------------
// Grid worlds

struct Cell {
  int x = 0;  // column, grows to the right
  int y = 0;  // row, grows downwards

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

namespace grid_action {
inline constexpr int kUp = 0;
inline constexpr int kRight = 1;
inline constexpr int kDown = 2;
inline constexpr int kLeft = 3;
inline constexpr int kCount = 4;
}  // namespace grid_action

struct GridSpec {
  int width = 1;
  int height = 1;
  Cell start{};
  Cell goal{};
  int max_steps = 1;

  bool contains(Cell c) const { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; }
  int num_states() const { return width * height; }
  int index(Cell c) const { return c.y * width + c.x; }
  Cell cell(int index) const { return Cell{index % width, index / width}; }

  // Cardinal move; bumping into the border leaves the position unchanged.
  Cell move(Cell c, int action) const {
    Cell n = c;
    switch (action) {
      case grid_action::kUp: --n.y; break;
      case grid_action::kRight: ++n.x; break;
      case grid_action::kDown: ++n.y; break;
      case grid_action::kLeft: --n.x; break;
      default: throw std::invalid_argument("grid action out of range: " + std::to_string(action));
    }
    return contains(n) ? n : c;
  }

  void validate() const;
};

// Shortest start-to-goal path length, by breadth-first search.
inline int optimal_episode_length(const GridSpec& grid) {
  if (!grid.contains(grid.start) || !grid.contains(grid.goal))
    throw std::invalid_argument("grid start/goal out of bounds");
  std::vector<int> dist(static_cast<std::size_t>(grid.num_states()), -1);
  std::deque<Cell> frontier{grid.start};
  dist[static_cast<std::size_t>(grid.index(grid.start))] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    const int d = dist[static_cast<std::size_t>(grid.index(c))];
    if (c == grid.goal) return d;
    for (int a = 0; a < grid_action::kCount; ++a) {
      const Cell n = grid.move(c, a);
      auto& nd = dist[static_cast<std::size_t>(grid.index(n))];
      if (nd < 0) {
        nd = d + 1;
        frontier.push_back(n);
      }
    }
  }
  throw std::invalid_argument("grid goal is unreachable from start");
}

inline void GridSpec::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
  if (!contains(start) || !contains(goal)) throw std::invalid_argument("grid start/goal out of bounds");
  if (start == goal) throw std::invalid_argument("grid start must differ from goal");
  if (max_steps < optimal_episode_length(*this))
    throw std::invalid_argument("grid step cap is shorter than the shortest path");
}

inline GridSpec toy_grid() { return GridSpec{2, 2, Cell{0, 0}, Cell{1, 1}, 100}; }
inline GridSpec gridworld20() { return GridSpec{20, 20, Cell{0, 0}, Cell{19, 19}, 10000}; }

inline GridSpec grid_spec(EnvId id) {
  switch (id) {
    case EnvId::Toy: return toy_grid();
    case EnvId::GridWorld20: return gridworld20();
    case EnvId::CartPole: break;
  }
  throw std::invalid_argument("environment is not a grid");
}

template <class State>
struct Transition {
  State state{};
  int action = 0;
  State next_state{};
  double reward = 0.0;
  bool terminal = false;
  int step_index = 0;
};

class GridWorld {
 public:
  static constexpr int kNumActions = grid_action::kCount;
  using State = Cell;

  explicit GridWorld(GridSpec spec) : spec_(spec) { spec_.validate(); }

  const GridSpec& spec() const { return spec_; }
  int max_steps() const { return spec_.max_steps; }

  Cell reset(Rng& /*rng*/) const { return spec_.start; }

  // step_index is the zero-based index of this step within the episode.
  Transition<Cell> step(Cell s, int action, int step_index) const {
    if (!spec_.contains(s)) throw std::invalid_argument("grid state out of bounds");
    if (s == spec_.goal) throw std::logic_error("cannot step from the terminal goal state");
    Transition<Cell> t;
    t.state = s;
    t.action = action;
    t.next_state = spec_.move(s, action);
    t.step_index = step_index;
    const bool arrived = t.next_state == spec_.goal;
    t.reward = arrived ? 1.0 : 0.0;
    t.terminal = arrived || step_index + 1 >= spec_.max_steps;
    return t;
  }

 private:
  GridSpec spec_;
};

// ---------------------------------------------------------------------------
// Cart-pole (Euler-integrated, constants of the Gym cartpole-v0 task)

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  std::array<double, 4> as_array() const { return {x, x_dot, theta, theta_dot}; }
  friend bool operator==(const CartPoleState&, const CartPoleState&) = default;
};

struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force_magnitude = 10.0;
  double tau = 0.02;
  double theta_threshold = 12.0 * 2.0 * std::numbers::pi / 360.0;
  double x_threshold = 2.4;
  int max_steps = 200;
  double reset_spread = 0.05;
};

class CartPole {
 public:
  static constexpr int kNumActions = 2;  // 0 pushes left, 1 pushes right
  using State = CartPoleState;

  CartPole() = default;
  explicit CartPole(CartPoleParams params) : p_(params) {}

  const CartPoleParams& params() const { return p_; }
  int max_steps() const { return p_.max_steps; }

  double force(int action) const {
    if (action != 0 && action != 1)
      throw std::invalid_argument("cart-pole action out of range: " + std::to_string(action));
    return action == 1 ? p_.force_magnitude : -p_.force_magnitude;
  }

  bool out_of_bounds(const CartPoleState& s) const {
    return s.x < -p_.x_threshold || s.x > p_.x_threshold || s.theta < -p_.theta_threshold ||
           s.theta > p_.theta_threshold;
  }

  CartPoleState reset(Rng& rng) const {
    CartPoleState s;
    s.x = uniform_real(rng, -p_.reset_spread, p_.reset_spread);
    s.x_dot = uniform_real(rng, -p_.reset_spread, p_.reset_spread);
    s.theta = uniform_real(rng, -p_.reset_spread, p_.reset_spread);
    s.theta_dot = uniform_real(rng, -p_.reset_spread, p_.reset_spread);
    return s;
  }

  Transition<CartPoleState> step(const CartPoleState& s, int action, int step_index) const {
    if (out_of_bounds(s)) throw std::logic_error("cannot step from a terminal cart-pole state");
    const double f = force(action);
    const double total_mass = p_.cart_mass + p_.pole_mass;
    const double polemass_length = p_.pole_mass * p_.half_length;
    const double cos_t = std::cos(s.theta);
    const double sin_t = std::sin(s.theta);
    const double temp = (f + polemass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
    const double theta_acc = (p_.gravity * sin_t - cos_t * temp) /
                             (p_.half_length * (4.0 / 3.0 - p_.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

    Transition<CartPoleState> t;
    t.state = s;
    t.action = action;
    t.next_state = CartPoleState{s.x + p_.tau * s.x_dot, s.x_dot + p_.tau * x_acc,
                                 s.theta + p_.tau * s.theta_dot, s.theta_dot + p_.tau * theta_acc};
    t.reward = 1.0;
    t.terminal = out_of_bounds(t.next_state) || step_index + 1 >= p_.max_steps;
    t.step_index = step_index;
    return t;
  }

 private:
  CartPoleParams p_;
};

// ---------------------------------------------------------------------------
// Id-dispatched facade used by configuration-driven code.

using EnvState = std::variant<Cell, CartPoleState>;

inline EnvState reset(EnvId id, Rng& rng) {
  if (is_grid(id)) return GridWorld(grid_spec(id)).reset(rng);
  return CartPole().reset(rng);
}

inline Transition<EnvState> step(EnvId id, const EnvState& state, int action, int step_index,
                                 Rng& /*rng*/) {
  auto widen = [](const auto& t) {
    return Transition<EnvState>{t.state, t.action, t.next_state, t.reward, t.terminal, t.step_index};
  };
  if (is_grid(id)) {
    const Cell* c = std::get_if<Cell>(&state);
    if (c == nullptr) throw std::invalid_argument("grid environment given a non-grid state");
    return widen(GridWorld(grid_spec(id)).step(*c, action, step_index));
  }
  const CartPoleState* cp = std::get_if<CartPoleState>(&state);
  if (cp == nullptr) throw std::invalid_argument("cart-pole environment given a non-cart-pole state");
  return widen(CartPole().step(*cp, action, step_index));
}

// ---------------------------------------------------------------------------
// Expert advice R^expert(s, a, s').

enum class AdviceKind { Zero, GridGood, GridBad, GridRightDown, CartPoleAligned };

inline AdviceKind parse_advice_kind(std::string_view id) {
  if (id == "zero") return AdviceKind::Zero;
  if (id == "grid_good") return AdviceKind::GridGood;
  if (id == "grid_bad") return AdviceKind::GridBad;
  if (id == "grid_right_down") return AdviceKind::GridRightDown;
  if (id == "cartpole_aligned") return AdviceKind::CartPoleAligned;
  throw std::invalid_argument("unknown advice id '" + std::string(id) + "'");
}

inline std::string_view to_string(AdviceKind kind) {
  switch (kind) {
    case AdviceKind::Zero: return "zero";
    case AdviceKind::GridGood: return "grid_good";
    case AdviceKind::GridBad: return "grid_bad";
    case AdviceKind::GridRightDown: return "grid_right_down";
    case AdviceKind::CartPoleAligned: return "cartpole_aligned";
  }
  return "?";
}

inline bool advice_applies(AdviceKind kind, EnvId env) {
  switch (kind) {
    case AdviceKind::Zero: return true;
    case AdviceKind::CartPoleAligned: return env == EnvId::CartPole;
    default: return is_grid(env);
  }
}

struct AdviceSpec {
  AdviceKind kind = AdviceKind::Zero;
  double magnitude = 1.0;  // the advised reward value (c for cart-pole)

  void validate() const {
    if (!(magnitude > 0.0) || !std::isfinite(magnitude))
      throw std::invalid_argument("advice magnitude must be positive and finite");
  }
};

inline double expert_reward(const AdviceSpec& advice, const GridSpec& grid, Cell s, int action,
                            Cell s_next) {
  switch (advice.kind) {
    case AdviceKind::Zero: return 0.0;
    case AdviceKind::GridRightDown:
      return action == grid_action::kRight || action == grid_action::kDown ? advice.magnitude : 0.0;
    case AdviceKind::GridGood:
      return manhattan(s_next, grid.goal) < manhattan(s, grid.goal) ? advice.magnitude : 0.0;
    case AdviceKind::GridBad:
      return manhattan(s_next, grid.goal) > manhattan(s, grid.goal) ? advice.magnitude : 0.0;
    case AdviceKind::CartPoleAligned: break;
  }
  throw std::invalid_argument("advice '" + std::string(to_string(advice.kind)) +
                              "' does not apply to grid environments");
}

// Rewards pushing the cart towards the side the pole leans to.
inline double expert_reward(const AdviceSpec& advice, const CartPole& env, const CartPoleState& s,
                            int action, const CartPoleState& /*s_next*/) {
  switch (advice.kind) {
    case AdviceKind::Zero: return 0.0;
    case AdviceKind::CartPoleAligned: {
      const double f = env.force(action);
      const bool aligned = (f > 0.0 && s.theta > 0.0) || (f < 0.0 && s.theta < 0.0);
      return aligned ? advice.magnitude : 0.0;
    }
    default: break;
  }
  throw std::invalid_argument("advice '" + std::string(to_string(advice.kind)) +
                              "' does not apply to cart-pole");
}

inline double expert_reward(const AdviceSpec& advice, EnvId id, const EnvState& s, int action,
                            const EnvState& s_next) {
  if (is_grid(id))
    return expert_reward(advice, grid_spec(id), std::get<Cell>(s), action, std::get<Cell>(s_next));
  return expert_reward(advice, CartPole(), std::get<CartPoleState>(s), action,
                       std::get<CartPoleState>(s_next));
}

}  // namespace rshape
