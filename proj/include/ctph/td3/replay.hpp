#pragma once

#include <Eigen/Dense>
#include <limits>
#include <random>
#include <vector>

#include "ctph/td3/config.hpp"

namespace ctph {

struct Transition {
  Eigen::Matrix<float, 7, 1> obs;
  float action = 0.0f;  // in [-1, 1]
  float reward = 0.0f;
  Eigen::Matrix<float, 7, 1> next;
  bool done = false;
};

/// Nearest-rank percentile (1-based rank ceil(rho*n)); reorders `scratch`.
float nearest_rank_percentile(std::vector<float>& scratch, double rho);

/// Main buffer plus reward-filtered high-reward buffer. Admission follows
/// the training loop's order: a transition is screened against the threshold
/// computed before its own reward enters the sliding window.
class DualReplay {
 public:
  struct Batch {
    std::vector<const Transition*> items;
    std::size_t from_high = 0;
  };

  explicit DualReplay(const ReplayConfig& cfg, bool high_enabled = true);

  /// Appends to the main buffer (FIFO), screens for the high-reward buffer,
  /// then refreshes the percentile threshold. Returns whether the transition
  /// was admitted to the high-reward buffer.
  bool insert(const Transition& t);

  /// Uniform mini-batch; mixes in N_h high-reward samples once the
  /// high-reward buffer holds at least 2*N_h. Throws std::runtime_error when
  /// the main buffer holds fewer than `batch` transitions.
  Batch sample(std::size_t batch, std::mt19937_64& rng) const;

  std::size_t main_size() const { return main_.size(); }
  std::size_t high_size() const { return high_.size(); }
  double threshold() const { return threshold_; }

 private:
  ReplayConfig cfg_;
  bool high_enabled_;
  std::vector<Transition> main_, high_;
  std::size_t main_next_ = 0, high_next_ = 0;  // ring write positions
  std::vector<float> window_;
  std::size_t window_next_ = 0;
  mutable std::vector<float> scratch_;
  double threshold_ = -std::numeric_limits<double>::infinity();
};

}  // namespace ctph
