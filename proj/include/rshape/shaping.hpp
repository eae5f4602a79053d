#pragma once

// Reward shaping from arbitrary advice.
//
// A secondary value function Phi is learned from the negated advice. The
// shaping modes then differ only in how Phi enters the learner:
//
//   none            no shaping
//   static_pbrs     F = gamma Phi(s',a') - Phi(s,a) for a fixed Phi
//   dpba            F = gamma Phi_{t+1}(s',a') - Phi_t(s,a), greedy on Q
//   corrected_dpba  same F, greedy on Q + Phi_t
//   pies            no F, greedy on Q - xi_t Phi_t with xi decayed to 0

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rshape/agents.hpp"

namespace rshape {

enum class ShapingMode { None, StaticPBRS, DPBA, CorrectedDPBA, PIES };

inline ShapingMode parse_shaping_mode(std::string_view name) {
  if (name == "none") return ShapingMode::None;
  if (name == "static_pbrs") return ShapingMode::StaticPBRS;
  if (name == "dpba") return ShapingMode::DPBA;
  if (name == "corrected_dpba") return ShapingMode::CorrectedDPBA;
  if (name == "pies") return ShapingMode::PIES;
  throw std::invalid_argument("unknown shaping mode '" + std::string(name) + "'");
}

inline std::string_view to_string(ShapingMode mode) {
  switch (mode) {
    case ShapingMode::None: return "none";
    case ShapingMode::StaticPBRS: return "static_pbrs";
    case ShapingMode::DPBA: return "dpba";
    case ShapingMode::CorrectedDPBA: return "corrected_dpba";
    case ShapingMode::PIES: return "pies";
  }
  return "?";
}

inline constexpr ShapingMode kAllModes[] = {ShapingMode::None, ShapingMode::StaticPBRS,
                                            ShapingMode::DPBA, ShapingMode::CorrectedDPBA,
                                            ShapingMode::PIES};

// Modes that learn Phi online from the advice.
inline bool learns_potential(ShapingMode m) {
  return m == ShapingMode::DPBA || m == ShapingMode::CorrectedDPBA || m == ShapingMode::PIES;
}

// Modes whose agent sees r + F instead of r.
inline bool adds_shaping_reward(ShapingMode m) {
  return m == ShapingMode::StaticPBRS || m == ShapingMode::DPBA || m == ShapingMode::CorrectedDPBA;
}

// xi_1 = 1, xi_e = max(xi_{e-1} - 1/C, 0). Kept as an integer count of
// remaining decrements so the sequence carries no accumulated rounding.
class DecaySchedule {
 public:
  explicit DecaySchedule(int c) : c_(c), remaining_(c) {
    if (c < 1) throw std::invalid_argument("xi decay constant C must be a positive integer");
  }

  int c() const { return c_; }
  double xi() const { return static_cast<double>(remaining_) / c_; }

  // Called once at the end of every episode.
  void advance() {
    if (remaining_ > 0) --remaining_;
  }

 private:
  int c_;
  int remaining_;
};

inline DecaySchedule xi_advance(DecaySchedule schedule) {
  schedule.advance();
  return schedule;
}

// Phi learned by the same TD rule as Q, on reward R^Phi = -R^expert and with
// learning rate beta. Phi of a terminal state is never stored: terminal
// successors bootstrap from 0.
template <ValueFunction V>
class Potential {
 public:
  using Observation = typename V::Observation;

  explicit Potential(V fn) : fn_(std::move(fn)) {}

  const V& function() const { return fn_; }
  V& function() { return fn_; }

  double value(const Observation& o, int a) const { return fn_.value(o, a); }
  std::vector<double> values(const Observation& o) const { return fn_.values(o); }
  void begin_episode() { fn_.begin_episode(); }

  // Applies one update and returns Phi_t(s,a), the value before it.
  double update(const Observation& s, int a, const Observation& s_next, int a_next, double r_expert,
                bool terminal) {
    const double phi_old = fn_.value(s, a);
    fn_.update(s, a, -r_expert, s_next, a_next, terminal);
    return phi_old;
  }

 private:
  V fn_;
};

template <ValueFunction V>
double phi_update(Potential<V>& phi, const typename V::Observation& s, int a,
                  const typename V::Observation& s_next, int a_next, double r_expert, bool terminal) {
  return phi.update(s, a, s_next, a_next, r_expert, terminal);
}

// F = gamma Phi_{t+1}(s',a') - Phi_t(s,a), with Phi(terminal) = 0.
inline double shaping_reward_dynamic(double phi_next_after_update, double phi_old, double gamma,
                                     bool terminal) {
  return (terminal ? 0.0 : gamma * phi_next_after_update) - phi_old;
}

template <ValueFunction V>
double shaping_reward_dynamic(const Potential<V>& phi_after, const typename V::Observation& s_next,
                              int a_next, double phi_old, double gamma, bool terminal) {
  return shaping_reward_dynamic(terminal ? 0.0 : phi_after.value(s_next, a_next), phi_old, gamma,
                                terminal);
}

// F = gamma Phi(s',a') - Phi(s,a) for a fixed potential, Phi(terminal) = 0.
inline double shaping_reward_static(double phi_current, double phi_next, double gamma, bool terminal) {
  return (terminal ? 0.0 : gamma * phi_next) - phi_current;
}

// Additive bias b(s,.) such that actions are chosen by argmax Q(s,.) + b(s,.).
inline std::vector<double> policy_bias(ShapingMode mode, std::span<const double> phi_values,
                                       std::optional<double> xi = std::nullopt) {
  std::vector<double> bias(phi_values.size(), 0.0);
  switch (mode) {
    case ShapingMode::CorrectedDPBA:
      std::copy(phi_values.begin(), phi_values.end(), bias.begin());
      break;
    case ShapingMode::PIES:
      if (!xi) throw std::invalid_argument("PIES bias requires a xi decay schedule");
      for (std::size_t a = 0; a < bias.size(); ++a) bias[a] = -*xi * phi_values[a];
      break;
    case ShapingMode::None:
    case ShapingMode::StaticPBRS:
    case ShapingMode::DPBA:
      break;
  }
  return bias;
}

inline double total_reward(ShapingMode mode, double env_reward, double f) {
  return adds_shaping_reward(mode) ? env_reward + f : env_reward;
}

}  // namespace rshape
