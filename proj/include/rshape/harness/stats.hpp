#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rshape {

// Episode lengths of several runs (runs x episodes) with per-episode mean,
// standard error (sample standard deviation / sqrt(runs)) and area under the
// mean curve.
class LearningCurve {
 public:
  LearningCurve() = default;
  explicit LearningCurve(std::vector<std::vector<int>> lengths) : lengths_(std::move(lengths)) {
    if (lengths_.empty()) throw std::invalid_argument("learning curve needs at least one run");
    const std::size_t episodes = lengths_.front().size();
    if (episodes == 0) throw std::invalid_argument("learning curve needs at least one episode");
    for (const auto& run : lengths_)
      if (run.size() != episodes) throw std::invalid_argument("runs have different episode counts");

    const double n = static_cast<double>(lengths_.size());
    mean_.assign(episodes, 0.0);
    stderr_.assign(episodes, 0.0);
    for (std::size_t e = 0; e < episodes; ++e) {
      double sum = 0.0;
      for (const auto& run : lengths_) sum += run[e];
      const double m = sum / n;
      mean_[e] = m;
      if (lengths_.size() > 1) {
        double ss = 0.0;
        for (const auto& run : lengths_) ss += (run[e] - m) * (run[e] - m);
        stderr_[e] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
      }
    }
  }

  std::size_t runs() const { return lengths_.size(); }
  std::size_t episodes() const { return mean_.size(); }
  const std::vector<std::vector<int>>& lengths() const { return lengths_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& standard_error() const { return stderr_; }

  // Sum of the mean curve over all episodes (unit-width rectangles).
  double auc() const { return std::accumulate(mean_.begin(), mean_.end(), 0.0); }

  // Mean of the mean curve over the last `n` episodes.
  double final_mean(std::size_t n) const { return run_final_mean_of(mean_, n); }

  // Per-run mean over the last `n` episodes.
  std::vector<double> per_run_final_mean(std::size_t n) const {
    std::vector<double> out;
    for (const auto& run : lengths_) out.push_back(run_final_mean_of(run, n));
    return out;
  }

 private:
  template <class T>
  static double run_final_mean_of(const std::vector<T>& v, std::size_t n) {
    if (n == 0 || n > v.size()) throw std::invalid_argument("final window out of range");
    double sum = 0.0;
    for (std::size_t i = v.size() - n; i < v.size(); ++i) sum += v[i];
    return sum / static_cast<double>(n);
  }

  std::vector<std::vector<int>> lengths_;
  std::vector<double> mean_;
  std::vector<double> stderr_;
};

}  // namespace rshape
