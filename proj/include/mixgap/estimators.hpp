#pragma once

#include <span>
#include <vector>

#include "mixgap/trajectory.hpp"

namespace mixgap {

/// Smallest entry of the smoothed empirical stationary vector at skip 1.
/// alpha = 0 gives the plain visit-frequency estimator.
double estimate_pimin(const Trajectory& traj, double alpha = 0.0);

/// D T D with N = d*alpha + N_i, T = alpha + N_ij, D = diag(N)^{-1/2}.
/// Same matrix as SmoothedEstimates::l_hat, assembled the other way round.
Matrix algorithm_one_matrix(const SkippedCounts& counts, double alpha);

/// 1 - |lambda_3| of the dilation [[0, L], [L^T, 0]] of the smoothed rescaled
/// matrix, where |lambda_3| is the spectral radius after removing the +-1
/// pair built from sqrt(pi_hat). Result clamped to [0, 1].
double spec_gap_dil_rev(const SkippedCounts& counts, double alpha,
                        eigen::SolverPath path = eigen::SolverPath::Auto);

struct PssgTerm {
  int k;
  double g;      // spectral gap estimate of the k-skipped chain
  double ratio;  // g / k
};

struct PssgEstimate {
  double value = 0.0;
  std::vector<PssgTerm> per_k;
  int k_used = 0;
  double alpha = 0.0;
  int argmax_k = 1;
};

/// counts[k-1] must hold the k-skipped counts, k = 1..K.
PssgEstimate estimate_pssg_dilated(std::span<const SkippedCounts> counts, double alpha,
                                   eigen::SolverPath path = eigen::SolverPath::Auto);
PssgEstimate estimate_pssg_dilated(const Trajectory& traj, int K, double alpha,
                                   eigen::SolverPath path = eigen::SolverPath::Auto);

/// ceil(cbrt(n_min / eps)) clamped to [1, m - 1].
int adaptive_K(std::int64_t n_min, std::int64_t m, double eps);
int adaptive_K(const Trajectory& traj, double eps);

/// Absolute spectral gap of (M_hat + M_hat*)/2, where the reversal uses
/// pi_hat. Evaluated through its symmetric form
/// (N_ij + N_ji + 2a) / (2 sqrt((N_i + da)(N_j + da))).
double estimate_asg_reversible(const SkippedCounts& counts, double alpha);
double estimate_asg_reversible(const Trajectory& traj, double alpha);

}  // namespace mixgap
