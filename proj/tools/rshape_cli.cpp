#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rshape/harness/config.hpp"
#include "rshape/harness/figures.hpp"
#include "rshape/harness/output.hpp"
#include "rshape/harness/runner.hpp"
#include "rshape/harness/sweep.hpp"
#include "rshape/verify.hpp"

namespace fs = std::filesystem;
using namespace rshape;

namespace {

struct CommonOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  int parallel = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config) {
  if (needs_config)
    cmd->add_option("--config", o.config, "experiment or sweep file (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base seed, overrides the config");
  cmd->add_option("--runs", o.runs, "number of runs, overrides the config")->check(CLI::PositiveNumber);
  cmd->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

void apply(ExperimentConfig& cfg, const CommonOptions& o) {
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.runs) cfg.runs = *o.runs;
  cfg.validate();
}

std::string stem_for(const ExperimentConfig& cfg, const std::string& config_path) {
  if (!cfg.output.empty()) return cfg.output;
  return fs::path(config_path).stem().string();
}

int cmd_run(const CommonOptions& o) {
  ExperimentConfig cfg = load_config(o.config);
  apply(cfg, o);
  fs::create_directories(o.out);
  const std::string stem = stem_for(cfg, o.config);
  const LearningCurve curve = run_batch(cfg, o.parallel);
  const auto csv = (fs::path(o.out) / (stem + ".csv")).string();
  const auto svg = (fs::path(o.out) / (stem + ".svg")).string();
  emit_csv(curve, csv);
  emit_plot({{std::string(to_string(cfg.mode)), &curve}}, svg, orientation_for(cfg.env),
            std::string(to_string(cfg.env)));
  std::printf("%s: %d runs x %d episodes, AUC %s, final-20 mean %s\n", stem.c_str(), cfg.runs, cfg.episodes,
              format_number(curve.auc()).c_str(), format_number(curve.final_mean(std::min<std::size_t>(20, curve.episodes()))).c_str());
  std::printf("wrote %s\nwrote %s\n", csv.c_str(), svg.c_str());
  return 0;
}

int cmd_sweep(const CommonOptions& o) {
  SweepFile file = sweep_from_json(read_json_file(o.config));
  apply(file.base, o);
  fs::create_directories(o.out);
  const std::string stem = stem_for(file.base, o.config);
  const SweepResult result = sweep(file.spec, file.base, o.parallel);
  const auto table = (fs::path(o.out) / (stem + "_sweep.csv")).string();
  write_text_file(table, sweep_table_csv(result));

  ExperimentConfig best = result.best_config();
  const auto best_json = (fs::path(o.out) / (stem + "_best.json")).string();
  write_text_file(best_json, config_to_json(best).dump(2) + "\n");
  const LearningCurve curve = run_batch(best, o.parallel);
  emit_csv(curve, (fs::path(o.out) / (stem + "_best.csv")).string());
  emit_plot({{std::string(to_string(best.mode)) + " (best)", &curve}},
            (fs::path(o.out) / (stem + "_best.svg")).string(), result.orientation, std::string(to_string(best.env)));

  std::printf("%zu combinations; best alpha=%s beta=%s", result.rows.size(), format_number(best.alpha).c_str(),
              format_number(best.beta).c_str());
  if (best.c) std::printf(" c=%d", *best.c);
  std::printf(" AUC %s\nwrote %s\n", format_number(result.rows[result.best].auc).c_str(), table.c_str());
  return 0;
}

int cmd_figures(const CommonOptions& o, const std::vector<std::string>& only, std::optional<int> episodes) {
  auto specs = figure_specs();
  for (const auto& name : only) {
    if (std::none_of(specs.begin(), specs.end(), [&](const FigureSpec& s) { return s.name == name; }))
      throw std::invalid_argument("unknown figure '" + name + "'");
  }
  FigureOverrides overrides{o.seed, o.runs, episodes};
  for (const auto& spec : specs) {
    if (!only.empty() && std::find(only.begin(), only.end(), spec.name) == only.end()) continue;
    std::printf("%s\n", spec.name.c_str());
    const auto result = produce_figure(spec, o.out, overrides, o.parallel, [](const FigureLine& line) {
      std::printf("  %s\n", line.label.c_str());
      std::fflush(stdout);
    });
    for (std::size_t i = 0; i < spec.lines.size(); ++i)
      std::printf("  %-28s AUC %-12s final mean %s\n", spec.lines[i].label.c_str(),
                  format_number(result.curves[i].auc()).c_str(),
                  format_number(result.curves[i].final_mean(std::min<std::size_t>(20, result.curves[i].episodes())))
                      .c_str());
    std::printf("  wrote %s\n", result.svg_path.c_str());
  }
  return 0;
}

int cmd_verify() {
  bool all = true;
  for (const auto& r : run_property_checks()) {
    std::printf("%s  %-24s %s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-shaping experiments: run, sweep, figures, verify"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, fig_opts;
  auto* run = app.add_subcommand("run", "run one experiment config");
  add_common(run, run_opts, true);
  auto* sw = app.add_subcommand("sweep", "grid search over a sweep file, selecting by AUC");
  add_common(sw, sweep_opts, true);
  auto* fig = app.add_subcommand("figures", "run the preset comparison experiments");
  add_common(fig, fig_opts, false);
  std::vector<std::string> only;
  std::optional<int> episodes;
  fig->add_option("--only", only, "restrict to the named presets");
  fig->add_option("--episodes", episodes, "episode count override")->check(CLI::PositiveNumber);
  auto* verify = app.add_subcommand("verify", "oracle and invariant property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(run_opts);
    if (*sw) return cmd_sweep(sweep_opts);
    if (*fig) return cmd_figures(fig_opts, only, episodes);
    if (*verify) return cmd_verify();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
