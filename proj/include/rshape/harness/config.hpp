#pragma once

// Experiment configuration. On disk a config is a flat JSON object whose keys
// are exactly the field names below; unspecified fields take the defaults of
// the selected environment and unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "rshape/agents.hpp"
#include "rshape/envs.hpp"
#include "rshape/shaping.hpp"

namespace rshape {

struct ExperimentConfig {
  EnvId env = EnvId::Toy;
  AdviceSpec advice{AdviceKind::GridGood, 1.0};
  ShapingMode mode = ShapingMode::None;
  double alpha = 0.05;
  double beta = 0.1;
  double gamma = 0.3;
  double lambda = 0.9;  // linear (cart-pole) learners only
  std::optional<int> c;  // xi decay constant, PIES only
  ExplorationSchedule epsilon{0.1, 0.0, 100};
  int episodes = 100;
  int runs = 50;
  std::uint64_t base_seed = 1;
  std::string output;
  double q_init_max = 0.0;    // weights drawn uniformly from [0, q_init_max]
  double phi_init_max = 0.0;  // likewise for the potential

  void validate() const {
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (learns_potential(mode) && !(beta > 0.0 && beta <= 1.0))
      throw std::invalid_argument("beta must lie in (0, 1]");
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must lie in [0, 1]");
    if (mode == ShapingMode::PIES && !c) throw std::invalid_argument("mode 'pies' requires field 'c'");
    if (c && *c < 1) throw std::invalid_argument("c must be a positive integer");
    if (q_init_max < 0.0 || phi_init_max < 0.0)
      throw std::invalid_argument("initialization ranges must be non-negative");
    epsilon.validate();
    advice.validate();
    if (!advice_applies(advice.kind, env))
      throw std::invalid_argument("advice '" + std::string(to_string(advice.kind)) +
                                  "' does not apply to environment '" + std::string(to_string(env)) + "'");
  }
};

// Per-environment defaults: 50 runs on the grids and 30 on cart-pole; 100,
// 300 and 1000 episodes; epsilon annealed linearly to 0 over the experiment.
inline ExperimentConfig default_config(EnvId env) {
  ExperimentConfig cfg;
  cfg.env = env;
  switch (env) {
    case EnvId::Toy:
      cfg.advice = {AdviceKind::GridGood, 1.0};
      cfg.gamma = 0.3;
      cfg.episodes = 100;
      cfg.runs = 50;
      break;
    case EnvId::GridWorld20:
      cfg.advice = {AdviceKind::GridRightDown, 1.0};
      cfg.gamma = 0.99;
      cfg.episodes = 300;
      cfg.runs = 50;
      break;
    case EnvId::CartPole:
      cfg.advice = {AdviceKind::CartPoleAligned, 0.1};
      cfg.gamma = 1.0;
      cfg.lambda = 0.9;
      cfg.alpha = 0.1;
      cfg.episodes = 1000;
      cfg.runs = 30;
      cfg.q_init_max = 0.001;
      cfg.phi_init_max = 0.001;
      break;
  }
  cfg.epsilon = {0.1, 0.0, cfg.episodes};
  return cfg;
}

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "env",   "advice", "advice_magnitude", "mode",     "alpha",           "beta",
      "gamma", "lambda", "c",                "episodes", "runs",            "base_seed",
      "output", "epsilon_initial", "epsilon_final", "epsilon_decay_episodes", "q_init_max",
      "phi_init_max"};
  return keys;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  for (const auto& item : j.items())
    if (!config_keys().contains(item.key()))
      throw std::invalid_argument("unknown config key '" + item.key() + "'");
  if (!j.contains("env")) throw std::invalid_argument("config is missing required key 'env'");

  ExperimentConfig cfg = default_config(parse_env_id(j.at("env").get<std::string>()));
  const bool explicit_horizon = j.contains("epsilon_decay_episodes");
  try {
    if (j.contains("advice")) {
      cfg.advice.kind = parse_advice_kind(j.at("advice").get<std::string>());
      if (cfg.advice.kind != AdviceKind::CartPoleAligned) cfg.advice.magnitude = 1.0;
    }
    if (j.contains("advice_magnitude")) cfg.advice.magnitude = j.at("advice_magnitude").get<double>();
    if (j.contains("mode")) cfg.mode = parse_shaping_mode(j.at("mode").get<std::string>());
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("c")) cfg.c = j.at("c").get<int>();
    if (j.contains("episodes")) cfg.episodes = j.at("episodes").get<int>();
    if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
    if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("epsilon_initial")) cfg.epsilon.epsilon_initial = j.at("epsilon_initial").get<double>();
    if (j.contains("epsilon_final")) cfg.epsilon.epsilon_final = j.at("epsilon_final").get<double>();
    cfg.epsilon.decay_horizon =
        explicit_horizon ? j.at("epsilon_decay_episodes").get<int>() : cfg.episodes;
    if (j.contains("q_init_max")) cfg.q_init_max = j.at("q_init_max").get<double>();
    if (j.contains("phi_init_max")) cfg.phi_init_max = j.at("phi_init_max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j{{"env", std::string(to_string(cfg.env))},
                   {"advice", std::string(to_string(cfg.advice.kind))},
                   {"advice_magnitude", cfg.advice.magnitude},
                   {"mode", std::string(to_string(cfg.mode))},
                   {"alpha", cfg.alpha},
                   {"beta", cfg.beta},
                   {"gamma", cfg.gamma},
                   {"lambda", cfg.lambda},
                   {"episodes", cfg.episodes},
                   {"runs", cfg.runs},
                   {"base_seed", cfg.base_seed},
                   {"epsilon_initial", cfg.epsilon.epsilon_initial},
                   {"epsilon_final", cfg.epsilon.epsilon_final},
                   {"epsilon_decay_episodes", cfg.epsilon.decay_horizon},
                   {"q_init_max", cfg.q_init_max},
                   {"phi_init_max", cfg.phi_init_max}};
  if (cfg.c) j["c"] = *cfg.c;
  if (!cfg.output.empty()) j["output"] = cfg.output;
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_json(read_json_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("'" + path + "': " + e.what());
  }
}

}  // namespace rshape
