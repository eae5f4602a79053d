#pragma once

// Preset experiments comparing the shaping modes, each rendered as one plot
// plus one CSV per line.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rshape/harness/config.hpp"
#include "rshape/harness/output.hpp"
#include "rshape/harness/runner.hpp"
#include "rshape/harness/sweep.hpp"

namespace rshape {

struct FigureLine {
  std::string label;  // legend text
  std::string slug;   // CSV file suffix
  ExperimentConfig config;
};

struct FigureSpec {
  std::string name;
  std::string title;
  EnvId env = EnvId::Toy;
  std::vector<FigureLine> lines;

  Orientation orientation() const { return orientation_for(env); }
};

namespace presets {

inline ExperimentConfig learner(EnvId env, AdviceKind advice, ShapingMode mode, double alpha,
                                std::optional<double> beta = std::nullopt, std::optional<int> c = std::nullopt) {
  ExperimentConfig cfg = default_config(env);
  cfg.advice.kind = advice;
  cfg.mode = mode;
  cfg.alpha = alpha;
  if (beta) cfg.beta = *beta;
  cfg.c = c;
  return cfg;
}

inline ExperimentConfig with_epsilon(ExperimentConfig cfg, double eps_initial) {
  cfg.epsilon.epsilon_initial = eps_initial;
  return cfg;
}

inline std::string eps_tag(double eps) { return format_number(eps); }

// Toy grid, Sarsa(0), gamma 0.3, Q and Phi start at 0.
inline ExperimentConfig toy_sarsa(AdviceKind advice) {
  return learner(EnvId::Toy, advice, ShapingMode::None, 0.05);
}
inline ExperimentConfig toy_dpba(AdviceKind advice) {
  return learner(EnvId::Toy, advice, ShapingMode::DPBA, 0.2, 0.5);
}
inline ExperimentConfig toy_corrected(AdviceKind advice) {
  return advice == AdviceKind::GridBad ? learner(EnvId::Toy, advice, ShapingMode::CorrectedDPBA, 0.05, 0.2)
                                       : learner(EnvId::Toy, advice, ShapingMode::CorrectedDPBA, 0.2, 0.1);
}
inline ExperimentConfig toy_pies(AdviceKind advice) {
  return advice == AdviceKind::GridBad ? learner(EnvId::Toy, advice, ShapingMode::PIES, 0.1, 0.2, 5)
                                       : learner(EnvId::Toy, advice, ShapingMode::PIES, 0.05, 0.2, 50);
}

// 20x20 grid with right/down advice. The DPBA rates were chosen by an AUC
// sweep over {0.05, 0.1, 0.2, 0.5}^2.
inline ExperimentConfig grid_sarsa() {
  return learner(EnvId::GridWorld20, AdviceKind::GridRightDown, ShapingMode::None, 0.05);
}
inline ExperimentConfig grid_dpba() {
  return learner(EnvId::GridWorld20, AdviceKind::GridRightDown, ShapingMode::DPBA, 0.1, 0.05);
}
inline ExperimentConfig grid_corrected() {
  return learner(EnvId::GridWorld20, AdviceKind::GridRightDown, ShapingMode::CorrectedDPBA, 0.1, 0.01);
}
inline ExperimentConfig grid_pies() {
  return learner(EnvId::GridWorld20, AdviceKind::GridRightDown, ShapingMode::PIES, 0.05, 0.5, 100);
}

// Cart-pole, Sarsa(0.9) on tile codes, weights start in [0, 0.001].
inline ExperimentConfig cartpole_sarsa() {
  return learner(EnvId::CartPole, AdviceKind::CartPoleAligned, ShapingMode::None, 0.1);
}
inline ExperimentConfig cartpole_dpba() {
  return learner(EnvId::CartPole, AdviceKind::CartPoleAligned, ShapingMode::DPBA, 0.02, 0.1);
}
inline ExperimentConfig cartpole_corrected() {
  return learner(EnvId::CartPole, AdviceKind::CartPoleAligned, ShapingMode::CorrectedDPBA, 0.02, 0.1);
}
inline ExperimentConfig cartpole_pies() {
  return learner(EnvId::CartPole, AdviceKind::CartPoleAligned, ShapingMode::PIES, 0.2, 0.5, 200);
}

}  // namespace presets

inline std::vector<FigureSpec> figure_specs() {
  using namespace presets;
  const AdviceKind bad = AdviceKind::GridBad;
  const AdviceKind good = AdviceKind::GridGood;
  std::vector<FigureSpec> out;

  out.push_back({"gridworld_dpba", "Grid-world, right/down advice", EnvId::GridWorld20,
                 {{"Sarsa", "sarsa", grid_sarsa()}, {"DPBA", "dpba", grid_dpba()}}});
  out.push_back({"cartpole_dpba", "Cart-pole, aligned-push advice", EnvId::CartPole,
                 {{"Sarsa", "sarsa", cartpole_sarsa()}, {"DPBA", "dpba", cartpole_dpba()}}});

  FigureSpec toy_bad{"toy_bad_advice", "Toy grid, bad advice", EnvId::Toy, {}};
  toy_bad.lines.push_back({"Sarsa", "sarsa", toy_sarsa(bad)});
  for (double eps : {0.1, 0.3, 0.5}) {
    toy_bad.lines.push_back({"DPBA eps_i=" + eps_tag(eps), "dpba_eps" + eps_tag(eps), with_epsilon(toy_dpba(bad), eps)});
    toy_bad.lines.push_back({"corrected DPBA eps_i=" + eps_tag(eps), "corrected_dpba_eps" + eps_tag(eps),
                             with_epsilon(toy_corrected(bad), eps)});
  }
  out.push_back(std::move(toy_bad));

  out.push_back({"toy_good_advice", "Toy grid, good advice", EnvId::Toy,
                 {{"Sarsa", "sarsa", toy_sarsa(good)},
                  {"DPBA", "dpba", toy_dpba(good)},
                  {"corrected DPBA", "corrected_dpba", toy_corrected(good)}}});

  out.push_back({"toy_pies_bad", "Toy grid, PIES with bad advice", EnvId::Toy,
                 {{"Sarsa", "sarsa", toy_sarsa(bad)},
                  {"corrected DPBA", "corrected_dpba", toy_corrected(bad)},
                  {"PIES", "pies", toy_pies(bad)}}});
  out.push_back({"toy_pies_good", "Toy grid, PIES with good advice", EnvId::Toy,
                 {{"Sarsa", "sarsa", toy_sarsa(good)},
                  {"corrected DPBA", "corrected_dpba", toy_corrected(good)},
                  {"PIES", "pies", toy_pies(good)}}});

  out.push_back({"gridworld_pies", "Grid-world, PIES", EnvId::GridWorld20,
                 {{"Sarsa", "sarsa", grid_sarsa()},
                  {"corrected DPBA", "corrected_dpba", grid_corrected()},
                  {"PIES", "pies", grid_pies()}}});
  out.push_back({"cartpole_pies", "Cart-pole, PIES", EnvId::CartPole,
                 {{"Sarsa", "sarsa", cartpole_sarsa()},
                  {"corrected DPBA", "corrected_dpba", cartpole_corrected()},
                  {"PIES", "pies", cartpole_pies()}}});
  return out;
}

struct FigureOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> episodes;
};

inline void apply_overrides(ExperimentConfig& cfg, const FigureOverrides& o) {
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.runs) cfg.runs = *o.runs;
  if (o.episodes) {
    cfg.episodes = *o.episodes;
    cfg.epsilon.decay_horizon = *o.episodes;
  }
}

struct FigureResult {
  std::string svg_path;
  std::vector<std::string> csv_paths;
  std::vector<LearningCurve> curves;
};

// Runs every line of `spec` and writes <name>.svg and <name>_<slug>.csv into `dir`.
inline FigureResult produce_figure(const FigureSpec& spec, const std::filesystem::path& dir,
                                   const FigureOverrides& overrides = {}, int parallel = 1,
                                   const std::function<void(const FigureLine&)>& on_line = {}) {
  std::filesystem::create_directories(dir);
  FigureResult result;
  result.curves.reserve(spec.lines.size());
  for (const auto& line : spec.lines) {
    if (on_line) on_line(line);
    ExperimentConfig cfg = line.config;
    apply_overrides(cfg, overrides);
    result.curves.push_back(run_batch(cfg, parallel));
    const auto csv = dir / (spec.name + "_" + line.slug + ".csv");
    emit_csv(result.curves.back(), csv.string());
    result.csv_paths.push_back(csv.string());
  }
  std::vector<NamedCurve> named;
  for (std::size_t i = 0; i < spec.lines.size(); ++i) named.push_back({spec.lines[i].label, &result.curves[i]});
  result.svg_path = (dir / (spec.name + ".svg")).string();
  emit_plot(named, result.svg_path, spec.orientation(), spec.title);
  return result;
}

}  // namespace rshape
