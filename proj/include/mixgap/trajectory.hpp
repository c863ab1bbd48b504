#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mixgap/chain_core.hpp"

namespace mixgap {

using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Observed path X_1..X_m over states 0..d-1.
struct Trajectory {
  std::vector<std::uint32_t> states;
  int d = 0;
  std::optional<std::uint64_t> seed;

  std::size_t size() const noexcept { return states.size(); }
};

/// Validates range and wraps the states.
Trajectory make_trajectory(std::vector<std::uint32_t> states, int d);

/// X_1 ~ mu, X_{t+1} ~ M(X_t, .), inverse-CDF sampling driven by SplitMix64(seed).
/// Each draw consumes exactly one generator output.
Trajectory simulate(const TransitionMatrix& m, const Vector& mu, std::size_t length, std::uint64_t seed);

/// Visit and transition counts of the k-skipped chain, pairs
/// (X_{1+k(t-1)}, X_{1+kt}) for t = 1..floor((m-1)/k).
struct SkippedCounts {
  int k = 1;
  int d = 0;
  CountVector n_visits;
  CountMatrix n_trans;
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;
  std::int64_t n_steps = 0;
};

SkippedCounts skipped_counts(const Trajectory& traj, int k);

/// Counts object from a transition-count table; visits are its row sums.
SkippedCounts counts_from_transitions(CountMatrix n_trans, int k = 1);

/// One pass over a state stream producing counts for every k in 1..K at once.
/// Memory is O(K d^2) and independent of the stream length.
class SkipCountAccumulator {
 public:
  SkipCountAccumulator(int d, int max_k);

  void push(std::uint32_t state);
  std::int64_t length() const noexcept { return length_; }
  int max_k() const noexcept { return static_cast<int>(anchors_.size()); }

  /// Throws SkipTooLarge when k > m - 1.
  SkippedCounts counts(int k) const;
  std::vector<SkippedCounts> all_counts() const;

 private:
  int d_;
  std::int64_t length_ = 0;
  std::vector<std::uint32_t> anchors_;
  std::vector<CountMatrix> trans_;
};

/// Additively smoothed estimators built from one SkippedCounts object.
struct SmoothedEstimates {
  double alpha = 0.0;
  Matrix m_hat;   // (N_ij + a) / (N_i + d a)
  Vector pi_hat;  // (N_i + d a) / (n_steps + d^2 a)
  Matrix l_hat;   // (N_ij + a) / sqrt((N_i + d a)(N_j + d a))
};

SmoothedEstimates smoothed_estimates(const SkippedCounts& counts, double alpha);

}  // namespace mixgap
