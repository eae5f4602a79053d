#pragma once

// Exhaustive hyperparameter sweeps ranked by area under the learning curve.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rshape/harness/config.hpp"
#include "rshape/harness/output.hpp"
#include "rshape/harness/runner.hpp"

namespace rshape {

// Candidate values per hyperparameter. An empty list keeps the base value.
struct SweepSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<int> c;
  std::vector<double> lambda;
  std::vector<double> epsilon_initial;
};

struct SweepRow {
  ExperimentConfig config;
  double auc = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // cross-product order: alpha, beta, c, lambda, epsilon_initial
  std::size_t best = 0;
  Orientation orientation = Orientation::LowerBetter;

  const ExperimentConfig& best_config() const { return rows.at(best).config; }
};

// Fewer steps is better on the grids; longer balancing is better on cart-pole.
inline Orientation orientation_for(EnvId env) {
  return env == EnvId::CartPole ? Orientation::HigherBetter : Orientation::LowerBetter;
}

inline std::vector<ExperimentConfig> expand_sweep(const SweepSpec& spec, const ExperimentConfig& base) {
  auto or_base = [](const auto& list, auto value) {
    using T = decltype(value);
    return list.empty() ? std::vector<T>{value} : std::vector<T>(list.begin(), list.end());
  };
  std::vector<ExperimentConfig> out;
  for (double alpha : or_base(spec.alpha, base.alpha))
    for (double beta : or_base(spec.beta, base.beta))
      for (int c : or_base(spec.c, base.c.value_or(0)))
        for (double lambda : or_base(spec.lambda, base.lambda))
          for (double eps : or_base(spec.epsilon_initial, base.epsilon.epsilon_initial)) {
            ExperimentConfig cfg = base;
            cfg.alpha = alpha;
            cfg.beta = beta;
            if (!spec.c.empty()) cfg.c = c;
            cfg.lambda = lambda;
            cfg.epsilon.epsilon_initial = eps;
            cfg.validate();
            out.push_back(cfg);
          }
  return out;
}

inline SweepResult sweep(const SweepSpec& spec, const ExperimentConfig& base, int parallel = 1) {
  SweepResult result;
  result.orientation = orientation_for(base.env);
  for (const auto& cfg : expand_sweep(spec, base)) {
    const LearningCurve curve = run_batch(cfg, parallel);
    result.rows.push_back({cfg, curve.auc()});
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    const double a = result.rows[i].auc;
    const double b = result.rows[result.best].auc;
    if (result.orientation == Orientation::LowerBetter ? a < b : a > b) result.best = i;
  }
  return result;
}

inline std::string sweep_table_csv(const SweepResult& result) {
  std::string out = "alpha,beta,c,lambda,epsilon_initial,auc,best\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    out += format_number(r.config.alpha) + ',' + format_number(r.config.beta) + ',' +
           (r.config.c ? std::to_string(*r.config.c) : std::string()) + ',' + format_number(r.config.lambda) +
           ',' + format_number(r.config.epsilon.epsilon_initial) + ',' + format_number(r.auc) + ',' +
           (i == result.best ? "1" : "0") + '\n';
  }
  return out;
}

// Sweep file: {"base": {<experiment config>}, "alpha": [...], "beta": [...],
// "c": [...], "lambda": [...], "epsilon_initial": [...]}.
struct SweepFile {
  ExperimentConfig base;
  SweepSpec spec;
};

inline SweepFile sweep_from_json(const nlohmann::json& j) {
  static const std::set<std::string> keys{"base", "alpha", "beta", "c", "lambda", "epsilon_initial"};
  if (!j.is_object() || !j.contains("base")) throw std::invalid_argument("sweep file needs a 'base' config");
  for (const auto& item : j.items())
    if (!keys.contains(item.key())) throw std::invalid_argument("unknown sweep key '" + item.key() + "'");
  SweepFile f;
  f.base = config_from_json(j.at("base"));
  try {
    if (j.contains("alpha")) f.spec.alpha = j.at("alpha").get<std::vector<double>>();
    if (j.contains("beta")) f.spec.beta = j.at("beta").get<std::vector<double>>();
    if (j.contains("c")) f.spec.c = j.at("c").get<std::vector<int>>();
    if (j.contains("lambda")) f.spec.lambda = j.at("lambda").get<std::vector<double>>();
    if (j.contains("epsilon_initial")) f.spec.epsilon_initial = j.at("epsilon_initial").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed sweep list: ") + e.what());
  }
  for (const auto& key : {"alpha", "beta", "c", "lambda", "epsilon_initial"})
    if (j.contains(key) && j.at(key).empty())
      throw std::invalid_argument(std::string("sweep list '") + key + "' is empty");
  return f;
}

}  // namespace rshape
