// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails. Tolerances and runtime budgets are fixed here.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "rshape/harness/figures.hpp"
#include "rshape/harness/runner.hpp"
#include "rshape/verify.hpp"

using namespace rshape;

namespace {

constexpr double kInvarianceTol = 1e-8;
constexpr double kXiTol = 1e-12;
constexpr double kTelescopeTol = 1e-10;
constexpr double kToyOptimal = 2.0;
constexpr double kConvergedMax = 2.5;
constexpr int kNonInvariantRunsRequired = 45;
constexpr std::size_t kToyWindow = 20;
constexpr std::size_t kCartPoleWindow = 100;
constexpr double kBudgetInvariance = 10.0;
constexpr double kBudgetToyDpba = 30.0;
constexpr double kBudgetGrid = 300.0;
constexpr double kBudgetCartPole = 900.0;

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body, double budget = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, {}};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget > 0.0 && secs > budget) {
    o.passed = false;
    o.detail += "; over the " + format_number(budget) + " s budget";
  }
  if (!o.passed) ++failures;
  std::printf("%s [%2d] %s: %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

Outcome from_check(const CheckResult& r) { return {r.passed, r.detail}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

LearningCurve batch(const ExperimentConfig& cfg) { return run_batch(cfg, workers()); }

}  // namespace

int main() {
  using namespace presets;
  const AdviceKind bad = AdviceKind::GridBad;
  const AdviceKind good = AdviceKind::GridGood;

  report(1, "static PBRS invariance on random MDPs",
         [] { return from_check(check_static_invariance(100, 2024, kInvarianceTol)); }, kBudgetInvariance);

  report(2, "DPBA leaves the optimal policy under bad advice", [&] {
    bool ok = true;
    std::string detail;
    for (double eps : {0.1, 0.3, 0.5}) {
      const auto curve = batch(with_epsilon(toy_dpba(bad), eps));
      int long_runs = 0;
      for (double m : curve.per_run_final_mean(kToyWindow)) long_runs += m > 2.0 * kToyOptimal ? 1 : 0;
      ok = ok && long_runs >= kNonInvariantRunsRequired;
      detail += (detail.empty() ? "" : ", ") + std::string("eps_i=") + fmt(eps) + ": " + std::to_string(long_runs) +
                "/" + std::to_string(curve.runs()) + " runs > 4 steps";
    }
    return Outcome{ok, detail + " (need >= " + std::to_string(kNonInvariantRunsRequired) + " each)"};
  }, kBudgetToyDpba);

  report(3, "corrected DPBA converges under bad advice", [&] {
    bool ok = true;
    std::string detail;
    for (double eps : {0.1, 0.3, 0.5}) {
      const double m = batch(with_epsilon(toy_corrected(bad), eps)).final_mean(kToyWindow);
      ok = ok && m <= kConvergedMax;
      detail += (detail.empty() ? "" : ", ") + std::string("eps_i=") + fmt(eps) + ": final-20 " + fmt(m);
    }
    return Outcome{ok, detail + " (need <= " + fmt(kConvergedMax) + ")"};
  });

  report(4, "corrected DPBA is slowed by good advice but converges", [&] {
    const auto sarsa = batch(toy_sarsa(good));
    const auto corrected = batch(toy_corrected(good));
    const bool ok = corrected.auc() >= sarsa.auc() && corrected.final_mean(kToyWindow) <= kConvergedMax;
    return Outcome{ok, "AUC corrected " + fmt(corrected.auc()) + " vs Sarsa " + fmt(sarsa.auc()) + ", final-20 " +
                           fmt(corrected.final_mean(kToyWindow))};
  });

  report(5, "PIES converges with bad advice and speeds up with good advice", [&] {
    const double bad_final = batch(toy_pies(bad)).final_mean(kToyWindow);
    const double pies_auc = batch(toy_pies(good)).auc();
    const double sarsa_auc = batch(toy_sarsa(good)).auc();
    const bool ok = bad_final <= kConvergedMax && pies_auc <= sarsa_auc;
    return Outcome{ok, "bad advice final-20 " + fmt(bad_final) + " (<= " + fmt(kConvergedMax) +
                           "), good advice AUC PIES " + fmt(pies_auc) + " vs Sarsa " + fmt(sarsa_auc)};
  });

  report(6, "grid-world speed-up from right/down advice", [&] {
    const double sarsa = batch(grid_sarsa()).auc();
    const double dpba = batch(grid_dpba()).auc();
    const double pies = batch(grid_pies()).auc();
    const double corrected = batch(grid_corrected()).auc();
    const bool ok = dpba < sarsa && pies < sarsa && pies < corrected;
    return Outcome{ok, "AUC Sarsa " + fmt(sarsa) + ", DPBA " + fmt(dpba) + ", PIES " + fmt(pies) +
                           ", corrected DPBA " + fmt(corrected)};
  }, kBudgetGrid);

  report(7, "cart-pole: DPBA and PIES balance longer than Sarsa", [&] {
    const double sarsa = batch(cartpole_sarsa()).final_mean(kCartPoleWindow);
    const double dpba = batch(cartpole_dpba()).final_mean(kCartPoleWindow);
    const double pies = batch(cartpole_pies()).final_mean(kCartPoleWindow);
    const bool ok = dpba > sarsa && pies > sarsa;
    return Outcome{ok, "final-100 mean Sarsa " + fmt(sarsa) + ", DPBA " + fmt(dpba) + ", PIES " + fmt(pies)};
  }, kBudgetCartPole);

  report(8, "zero advice reduces every mode to Sarsa", [] { return from_check(check_zero_advice_reduction(3, 7)); });
  report(9, "xi decay schedule", [] { return from_check(check_xi_schedule(1000, kXiTol)); });
  report(10, "telescoping of frozen-potential shaping", [] { return from_check(check_telescoping(1000, 99, kTelescopeTol)); });
  report(11, "tile coder invariants", [] { return from_check(check_tile_coder(10)); });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
